#include "weylsim/pathsampler.hpp"

#include <cmath>
#include <thread>

namespace weylsim {

namespace {

struct WalkLayer {
  std::shared_ptr<const LocalSuperOp> op;
  std::vector<int> support;
};

struct Walk {
  int d = 2, n = 1;
  std::vector<WalkLayer> layers;
  const WeylVector* start = nullptr;  // drawn by l1
  const WeylVector* end = nullptr;    // terminal weight
};

void check_frames(const CircuitDescription& circuit, const WeylVector& rho,
                  const WeylVector& observable) {
  if (rho.kind() != VectorKind::state || observable.kind() != VectorKind::observable)
    throw ValidationError("sampler needs a state and an observable, in that order");
  if (rho.d() != circuit.d() || rho.n() != circuit.n() || observable.d() != circuit.d() ||
      observable.n() != circuit.n())
    throw ValidationError("vector frames do not match the circuit");
  if (rho.basis() != observable.basis())
    throw ValidationError("state and observable use different bases");
  for (const auto& layer : circuit.layers())
    if (layer.op->basis() != rho.basis())
      throw ValidationError("circuit layers and vectors use different bases");
  if (rho.l1() <= 0) throw ValidationError("state has zero l1 mass");
}

Walk prepare_walk(const CircuitDescription& grouped, const WeylVector& rho,
                  const WeylVector& observable, Picture picture) {
  Walk w;
  w.d = grouped.d();
  w.n = grouped.n();
  if (picture == Picture::schrodinger) {
    w.start = &rho;
    w.end = &observable;
    for (const auto& layer : grouped.layers()) w.layers.push_back({layer.op, layer.support});
  } else {
    w.start = &observable;
    w.end = &rho;
    for (auto it = grouped.layers().rbegin(); it != grouped.layers().rend(); ++it)
      w.layers.push_back({std::make_shared<LocalSuperOp>(it->op->transposed()), it->support});
  }
  return w;
}

PathSample walk_once(const Walk& walk, Rng& rng, bool record_path) {
  PathSample out;
  const auto draw = walk.start->sample(rng);
  std::vector<int> digits = draw.digits;
  Complex value = draw.sign * walk.start->l1();
  const long radix = static_cast<long>(walk.d) * walk.d;
  auto push_path = [&] {
    long idx = 0;
    for (int q = 0; q < walk.n; ++q) idx = idx * radix + digits[q];
    out.path.push_back(idx);
  };
  if (record_path) push_path();
  for (const auto& layer : walk.layers) {
    long col = 0;
    for (int q : layer.support) col = col * radix + digits[q];
    const auto s = layer.op->column_sample(col, rng);
    if (!s) {
      out.value = 0;  // zero-mass column: the path contributes exactly 0
      return out;
    }
    value *= layer.op->column_l1(col) * s->second;
    long row = s->first;
    for (int i = static_cast<int>(layer.support.size()) - 1; i >= 0; --i) {
      digits[layer.support[i]] = static_cast<int>(row % radix);
      row /= radix;
    }
    if (record_path) push_path();
  }
  out.value = value * walk.end->terminal_weight_digits(digits);
  return out;
}

// Deterministic parallel mean/variance accumulation: worker w owns samples
// w, w + K, w + 2K, ...; partials combine in worker order.
template <typename SampleFn>
EstimateResult reduce_samples(std::uint64_t samples, std::uint64_t seed, int workers,
                              SampleFn&& sample_fn) {
  struct Partial {
    double sum_re = 0, sum_im = 0, sq_re = 0, sq_im = 0;
  };
  if (workers < 1) workers = 1;
  if (static_cast<std::uint64_t>(workers) > samples && samples > 0)
    workers = static_cast<int>(samples);
  std::vector<Partial> partials(workers);
  auto body = [&](int w) {
    Partial p;
    for (std::uint64_t i = w; i < samples; i += static_cast<std::uint64_t>(workers)) {
      Rng rng = Rng::for_stream(seed, i);
      const Complex x = sample_fn(rng);
      p.sum_re += x.real();
      p.sum_im += x.imag();
      p.sq_re += x.real() * x.real();
      p.sq_im += x.imag() * x.imag();
    }
    partials[w] = p;
  };
  if (workers == 1) {
    body(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(body, w);
    for (auto& t : pool) t.join();
  }
  Partial total;
  for (const Partial& p : partials) {
    total.sum_re += p.sum_re;
    total.sum_im += p.sum_im;
    total.sq_re += p.sq_re;
    total.sq_im += p.sq_im;
  }
  EstimateResult res;
  res.samples = samples;
  if (samples == 0) return res;
  const double n = static_cast<double>(samples);
  res.mean = Complex(total.sum_re / n, total.sum_im / n);
  const double var_re = std::max(0.0, total.sq_re / n - res.mean.real() * res.mean.real());
  const double var_im = std::max(0.0, total.sq_im / n - res.mean.imag() * res.mean.imag());
  res.std_error = std::sqrt((var_re + var_im) / n);
  return res;
}

std::uint64_t hoeffding_samples(double m_b, double epsilon, double delta) {
  if (epsilon <= 0) throw ValidationError("epsilon must be positive");
  if (delta <= 0 || delta >= 1) throw ValidationError("delta must lie in (0, 1)");
  const double raw = 2.0 * m_b * std::log(1.0 / delta) / (epsilon * epsilon);
  return static_cast<std::uint64_t>(std::ceil(raw));
}

}  // namespace

PathSample sample_path(const CircuitDescription& circuit, const WeylVector& rho,
                       const WeylVector& observable, Rng& rng, bool record_path) {
  check_frames(circuit, rho, observable);
  const Walk walk = prepare_walk(circuit, rho, observable, Picture::schrodinger);
  return walk_once(walk, rng, record_path);
}

PathSample sample_path_heisenberg(const CircuitDescription& circuit, const WeylVector& rho,
                                  const WeylVector& observable, Rng& rng, bool record_path) {
  check_frames(circuit, rho, observable);
  if (observable.l1() <= 0) throw ValidationError("observable has zero l1 mass");
  const Walk walk = prepare_walk(circuit, rho, observable, Picture::heisenberg);
  return walk_once(walk, rng, record_path);
}

SamplingPlan plan(const CircuitDescription& circuit, const WeylVector& rho,
                  const WeylVector& observable, double epsilon, double delta, Picture picture,
                  int arity_cap) {
  check_frames(circuit, rho, observable);
  SamplingPlan p;
  p.picture = picture;
  p.epsilon = epsilon;
  p.delta = delta;
  const double norms = circuit_norm_bound(circuit, picture, arity_cap);
  p.per_sample_bound = picture == Picture::schrodinger ? rho.l1() * observable.linf() * norms
                                                       : observable.l1() * rho.linf() * norms;
  p.m_b = p.per_sample_bound * p.per_sample_bound;
  p.samples_needed = hoeffding_samples(p.m_b, epsilon, delta);
  return p;
}

EstimateResult estimate(const CircuitDescription& circuit, const WeylVector& rho,
                        const WeylVector& observable, double epsilon, double delta,
                        std::uint64_t seed, int workers, Picture picture, int arity_cap) {
  const SamplingPlan p = plan(circuit, rho, observable, epsilon, delta, picture, arity_cap);
  const CircuitDescription grouped = group_circuit(circuit, arity_cap);
  const Walk walk = prepare_walk(grouped, rho, observable, picture);
  EstimateResult res = reduce_samples(p.samples_needed, seed, workers,
                                      [&](Rng& rng) { return walk_once(walk, rng, false).value; });
  res.plan = p;
  return res;
}

EstimateResult estimate_fixed(const CircuitDescription& circuit, const WeylVector& rho,
                              const WeylVector& observable, std::uint64_t samples,
                              std::uint64_t seed, int workers, Picture picture, int arity_cap) {
  check_frames(circuit, rho, observable);
  const CircuitDescription grouped = group_circuit(circuit, arity_cap);
  const Walk walk = prepare_walk(grouped, rho, observable, picture);
  EstimateResult res = reduce_samples(samples, seed, workers,
                                      [&](Rng& rng) { return walk_once(walk, rng, false).value; });
  const double norms = circuit_norm_bound(circuit, picture, arity_cap);
  res.plan.picture = picture;
  res.plan.per_sample_bound = picture == Picture::schrodinger
                                  ? rho.l1() * observable.linf() * norms
                                  : observable.l1() * rho.linf() * norms;
  res.plan.m_b = res.plan.per_sample_bound * res.plan.per_sample_bound;
  res.plan.samples_needed = samples;
  return res;
}

std::vector<Complex> collect_samples(const CircuitDescription& circuit, const WeylVector& rho,
                                     const WeylVector& observable, std::uint64_t samples,
                                     std::uint64_t seed, Picture picture, int arity_cap) {
  check_frames(circuit, rho, observable);
  const CircuitDescription grouped = group_circuit(circuit, arity_cap);
  const Walk walk = prepare_walk(grouped, rho, observable, picture);
  std::vector<Complex> out;
  out.reserve(samples);
  for (std::uint64_t i = 0; i < samples; ++i) {
    Rng rng = Rng::for_stream(seed, i);
    out.push_back(walk_once(walk, rng, false).value);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Lindbladian paths

LindbladLayer make_lindblad_layer(const LocalSuperOp& generator, std::vector<int> support,
                                  double time) {
  if (time < 0) throw ValidationError("Lindblad time must be nonnegative");
  if (static_cast<int>(support.size()) != generator.arity())
    throw ValidationError("support size does not match the generator arity");
  LindbladLayer layer;
  layer.support = std::move(support);
  layer.time = time;
  const double norm = generator.l1_to_l1();
  if (norm > 1.0 + 1e-12) {
    layer.generator = std::make_shared<LocalSuperOp>(LocalSuperOp::from_matrix(
        generator.matrix() / norm, generator.d(), generator.arity(), generator.basis(),
        generator.arity()));
    layer.time = time * norm;
    layer.rescaled = true;
  } else {
    layer.generator = std::make_shared<LocalSuperOp>(generator);
  }
  return layer;
}

namespace {

void check_lindblad_frames(const std::vector<LindbladLayer>& layers, const WeylVector& rho,
                           const WeylVector& observable) {
  if (rho.kind() != VectorKind::state || observable.kind() != VectorKind::observable)
    throw ValidationError("sampler needs a state and an observable, in that order");
  for (const auto& l : layers) {
    if (!l.generator) throw ValidationError("null Lindblad generator");
    if (l.generator->d() != rho.d()) throw ValidationError("generator dimension mismatch");
    if (static_cast<int>(l.support.size()) != l.generator->arity())
      throw ValidationError("Lindblad support size mismatch");
    for (int q : l.support)
      if (q < 0 || q >= rho.n()) throw ValidationError("Lindblad support out of range");
  }
}

PathSample lindblad_walk(const std::vector<LindbladLayer>& layers, const WeylVector& rho,
                         const WeylVector& observable, const std::vector<int>& counts, Rng& rng) {
  const int d = rho.d();
  const long radix = static_cast<long>(d) * d;
  double t_total = 0;
  for (const auto& l : layers) t_total += l.time;

  PathSample out;
  const auto draw = rho.sample(rng);
  std::vector<int> digits = draw.digits;
  Complex value = std::exp(t_total) * draw.sign * rho.l1();
  for (size_t li = 0; li < layers.size(); ++li) {
    const auto& layer = layers[li];
    for (int rep = 0; rep < counts[li]; ++rep) {
      long col = 0;
      for (int q : layer.support) col = col * radix + digits[q];
      const auto s = layer.generator->column_sample(col, rng);
      if (!s) {
        out.value = 0;
        return out;
      }
      value *= layer.generator->column_l1(col) * s->second;
      long row = s->first;
      for (int i = static_cast<int>(layer.support.size()) - 1; i >= 0; --i) {
        digits[layer.support[i]] = static_cast<int>(row % radix);
        row /= radix;
      }
    }
  }
  out.value = value * observable.terminal_weight_digits(digits);
  return out;
}

}  // namespace

PathSample sample_lindblad_path(const std::vector<LindbladLayer>& layers, const WeylVector& rho,
                                const WeylVector& observable, Rng& rng) {
  check_lindblad_frames(layers, rho, observable);
  std::vector<int> counts(layers.size());
  for (size_t i = 0; i < layers.size(); ++i) counts[i] = rng.poisson(layers[i].time);
  return lindblad_walk(layers, rho, observable, counts, rng);
}

PathSample sample_lindblad_path_with_counts(const std::vector<LindbladLayer>& layers,
                                            const WeylVector& rho, const WeylVector& observable,
                                            const std::vector<int>& counts, Rng& rng) {
  check_lindblad_frames(layers, rho, observable);
  if (counts.size() != layers.size()) throw ValidationError("one count per layer required");
  return lindblad_walk(layers, rho, observable, counts, rng);
}

LindbladPlan plan_lindblad(const std::vector<LindbladLayer>& layers, const WeylVector& rho,
                           const WeylVector& observable, double epsilon) {
  check_lindblad_frames(layers, rho, observable);
  if (epsilon <= 0) throw ValidationError("epsilon must be positive");
  LindbladPlan p;
  p.epsilon = epsilon;
  double exponent = 0;
  for (const auto& l : layers) {
    const double norm = l.generator->l1_to_l1();
    exponent += l.time * (norm * norm + 1.0);
  }
  p.variance_bound =
      std::exp(exponent) * rho.l1() * rho.l1() * observable.linf() * observable.linf();
  // Chebyshev at success probability 2/3
  p.samples_needed =
      static_cast<std::uint64_t>(std::ceil(3.0 * p.variance_bound / (epsilon * epsilon)));
  return p;
}

EstimateResult estimate_lindblad(const std::vector<LindbladLayer>& layers, const WeylVector& rho,
                                 const WeylVector& observable, std::uint64_t samples,
                                 std::uint64_t seed, int workers) {
  check_lindblad_frames(layers, rho, observable);
  return reduce_samples(samples, seed, workers, [&](Rng& rng) {
    std::vector<int> counts(layers.size());
    for (size_t l = 0; l < layers.size(); ++l) counts[l] = rng.poisson(layers[l].time);
    return lindblad_walk(layers, rho, observable, counts, rng).value;
  });
}

}  // namespace weylsim
