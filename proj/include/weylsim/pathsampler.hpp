#pragma once

// Quasiprobability Monte Carlo estimation of tr(E C(rho)) by l1 path
// sampling through the circuit's basis representation, in Schroedinger and
// Heisenberg pictures, with the Hoeffding sample planner, plus the
// Poisson-path estimator for products of Lindbladian exponentials.
//
// Estimates are deterministic functions of (master seed, worker count):
// sample i draws from an independent counter-derived stream and partial
// sums are reduced in worker order.

#include <cstdint>
#include <vector>

#include "weylsim/reps.hpp"

namespace weylsim {

struct PathSample {
  Complex value;
  std::vector<long> path;  // visited linear indices when recording is on
};

struct SamplingPlan {
  double m_b = 1;                // squared per-sample bound of Eq.-style planning
  double per_sample_bound = 1;   // |rho|_l1 |E|_linf prod_k |N_k|_(l1->l1) (picture-paired)
  std::uint64_t samples_needed = 0;
  double epsilon = 0;
  double delta = 0;
  Picture picture = Picture::schrodinger;
};

struct EstimateResult {
  Complex mean;
  double std_error = 0;
  std::uint64_t samples = 0;
  SamplingPlan plan;
};

// One path of the circuit sampling algorithm. The initial index is drawn
// from |rho(w)| / |rho|_l1; every layer draws a row of its column at the
// restricted index (never skipped: non-unital maps move the identity
// column). A zero-mass column yields the valid sample 0.
PathSample sample_path(const CircuitDescription& circuit, const WeylVector& rho,
                       const WeylVector& observable, Rng& rng, bool record_path = false);

// Same contract, starting from the observable and walking transposed layers
// in reverse order; terminal weight is rho's entry.
PathSample sample_path_heisenberg(const CircuitDescription& circuit, const WeylVector& rho,
                                  const WeylVector& observable, Rng& rng, bool record_path = false);

// samples_needed = ceil(2 M_B log(1/delta) / eps^2), M_B through the grouped
// circuit norm bound with the picture-appropriate norm pairing.
SamplingPlan plan(const CircuitDescription& circuit, const WeylVector& rho,
                  const WeylVector& observable, double epsilon, double delta,
                  Picture picture = Picture::schrodinger, int arity_cap = kDefaultArityCap);

// Runs plan().samples_needed paths over `workers` deterministic streams.
// The walk uses the same grouped circuit the planner bounded, so every
// sample magnitude stays within plan.per_sample_bound.
EstimateResult estimate(const CircuitDescription& circuit, const WeylVector& rho,
                        const WeylVector& observable, double epsilon, double delta,
                        std::uint64_t seed, int workers = 1,
                        Picture picture = Picture::schrodinger, int arity_cap = kDefaultArityCap);

// Fixed sample count variant (plan fields besides the bound are left zero).
EstimateResult estimate_fixed(const CircuitDescription& circuit, const WeylVector& rho,
                              const WeylVector& observable, std::uint64_t samples,
                              std::uint64_t seed, int workers = 1,
                              Picture picture = Picture::schrodinger,
                              int arity_cap = kDefaultArityCap);

// All sample values of the grouped walk, for diagnostics and tests.
std::vector<Complex> collect_samples(const CircuitDescription& circuit, const WeylVector& rho,
                                     const WeylVector& observable, std::uint64_t samples,
                                     std::uint64_t seed, Picture picture = Picture::schrodinger,
                                     int arity_cap = kDefaultArityCap);

// ---------------------------------------------------------------------------
// Lindbladian evolution: tr(E e^{t_n L_n} o ... o e^{t_1 L_1}(rho))

struct LindbladLayer {
  std::shared_ptr<const LocalSuperOp> generator;  // Weyl-basis matrix of L
  std::vector<int> support;
  double time = 0;
  bool rescaled = false;  // true when the loader divided L down to norm 1
};

// Rescales (L, t) -> (L/c, t c) when c = |L|_(l1->l1) exceeds 1, keeping
// e^{tL} intact while the Poisson rates stay physical times.
LindbladLayer make_lindblad_layer(const LocalSuperOp& generator, std::vector<int> support,
                                  double time);

struct LindbladPlan {
  double variance_bound = 0;  // exp(sum t_i (|L_i|^2 + 1)) |rho|_l1^2 |E|_linf^2
  std::uint64_t samples_needed = 0;
  double epsilon = 0;
};

// One Poisson path: draws q_l ~ Poisson(t_l) applications of each layer and
// walks them, output prefixed by e^{sum t_l}.
PathSample sample_lindblad_path(const std::vector<LindbladLayer>& layers, const WeylVector& rho,
                                const WeylVector& observable, Rng& rng);

// Same walk with the application counts pinned; the unconditioned sampler
// is this walk averaged over Poisson counts.
PathSample sample_lindblad_path_with_counts(const std::vector<LindbladLayer>& layers,
                                            const WeylVector& rho, const WeylVector& observable,
                                            const std::vector<int>& counts, Rng& rng);

// Chebyshev planner at the fixed 2/3 success probability.
LindbladPlan plan_lindblad(const std::vector<LindbladLayer>& layers, const WeylVector& rho,
                           const WeylVector& observable, double epsilon);

EstimateResult estimate_lindblad(const std::vector<LindbladLayer>& layers, const WeylVector& rho,
                                 const WeylVector& observable, std::uint64_t samples,
                                 std::uint64_t seed, int workers = 1);

}  // namespace weylsim
