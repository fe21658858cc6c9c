#pragma once

// Weyl randomized benchmarking against a synthetic noisy device (dense
// simulator in the Weyl basis) plus the estimator stack: |q(m)|^2 pairing,
// the adaptive multiplicative |mu| estimator, phase recovery with
// unwrapping, the noiseless-Clifford off-diagonal trick, the noisy-Weyl
// correction and exponential decay fitting.
//
// One benchmarking run applies a uniformly random Weyl conjugation, then m
// rounds of (uniform random Weyl, noisy round channel T o U), undoes the
// accumulated Weyl word with a single gate, measures {E, 1 - E}, and emits
// the character-projection weight of the initial Weyl on success, else 0.

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "weylsim/noise.hpp"

namespace weylsim {

// Noisy implementation of a target unitary: the round channel T o U on the
// full register, held as a dense Weyl-basis matrix.
class DeviceModel {
 public:
  // `noise` is the full-register noise channel in the Weyl basis; it must be
  // CPTP within 1e-8. `weyl_gate_noise`, when present, follows every Weyl
  // gate of the protocol (including the initial and inversion gates).
  static DeviceModel from_parts(const Eigen::MatrixXcd& unitary, const LocalSuperOp& noise,
                                int d, int n,
                                std::optional<WeylDiagonalChannel> weyl_gate_noise = std::nullopt);

  int d() const { return d_; }
  int n() const { return n_; }
  long dim() const { return round_.rows(); }  // d^{2n}
  const Eigen::MatrixXcd& round_matrix() const { return round_; }
  const Eigen::MatrixXcd& unitary_matrix() const { return u_mat_; }
  bool has_weyl_gate_noise() const { return weyl_noise_.size() > 0; }
  const Eigen::VectorXcd& weyl_gate_noise() const { return weyl_noise_; }

  // Diagonal of the unitary channel / the noisy round channel at a label.
  Complex u_diag(const WeylIndex& label) const;
  Complex mu(const WeylIndex& label) const;
  Complex weyl_noise_eigenvalue(const WeylIndex& label) const;

  // Device with a noiseless Clifford appended after each noisy round.
  DeviceModel with_clifford(const CliffordGate& c) const;

  // nu^{conjugation exponent} lookup: phase of conjugating basis label t by
  // the Weyl gate g.
  Complex conj_phase(long gate, long target) const {
    return phase_values_[conj_exponent_[gate * round_.rows() + target]];
  }

 private:
  DeviceModel() = default;
  void build_phase_table();

  int d_ = 2, n_ = 1;
  Eigen::MatrixXcd u_super_;   // Weyl superoperator of the unitary alone
  Eigen::MatrixXcd round_;     // T o U (o inserted Clifford, if any)
  Eigen::MatrixXcd u_mat_;     // the bare unitary, for reference
  Eigen::VectorXcd weyl_noise_;
  std::vector<std::uint8_t> conj_exponent_;
  std::vector<Complex> phase_values_;
};

struct WRBConfig {
  WRBConfig(WeylIndex label, Eigen::MatrixXcd rho, Eigen::MatrixXcd povm);

  WeylIndex label;
  Eigen::MatrixXcd rho;   // initial state, d^n x d^n
  Eigen::MatrixXcd povm;  // POVM element E, 0 <= E <= 1
  Eigen::VectorXcd rho_vec;     // tr(W^dag rho)
  Eigen::VectorXcd povm_pair;   // d^{-n} tr(E W)
  Complex spam_constant = 0;    // C = rho_vec[label] * povm_pair[label]
};

// State / POVM pair for a label: a product eigenstate of W_label and the
// projector onto its largest eigenspace, giving |C| >= 1/d.
WRBConfig choose_state_povm(const WeylIndex& label);

// One run at sequence length m; output is a character value or 0.
Complex run_wrb_once(const DeviceModel& device, const WRBConfig& cfg, int m, Rng& rng);

// `count` runs over deterministic streams (seed, base_stream + i).
std::vector<Complex> run_wrb_batch(const DeviceModel& device, const WRBConfig& cfg, int m,
                                   std::uint64_t count, std::uint64_t seed,
                                   std::uint64_t base_stream = 0, int workers = 1);

struct MPoint {
  int m = 0;
  std::uint64_t runs = 0;
  Complex s_mean;      // empirical mean of the run outputs
  double q2 = 0;       // pairing estimate of |q(m)|^2
  double q2_stderr = 0;
};

struct BenchmarkRecord {
  std::string label;
  std::vector<MPoint> points;
};

// Pairing estimator of |q(m)|^2 from 2l independent sequences.
MPoint estimate_q2(const DeviceModel& device, const WRBConfig& cfg, int m, std::uint64_t l,
                   std::uint64_t seed, int workers = 1);

struct MuEstimate {
  double abs = 0;
  double phase = 0;
  std::string label;
  double spam_constant = 0;  // |C|
  int m_max = 0;
  std::uint64_t samples = 0;
  bool precision_warning = false;  // eps > C^2 |mu|^2 / 200 guidance violated
};

struct AdaptiveOptions {
  int max_iterations = 16;   // sequence lengths up to 2^max + 1
  double mu_sq_upper = 1.0;  // upper bound u on |mu|^2
  int workers = 1;
};

// Doubling-schedule multiplicative estimator of |mu(label)|. Fails with
// ValidationError when the decay never crosses the stopping rule (gap ~ 0).
struct AdaptiveResult {
  MuEstimate estimate;
  BenchmarkRecord record;
};
AdaptiveResult adaptive_abs_mu(const DeviceModel& device, const WRBConfig& cfg, double epsilon,
                               double delta, std::uint64_t seed, AdaptiveOptions opts = {});

// Phase of mu from arctan(Z_m / Y_m) per length, unwrapped and fitted over
// m_list. Refuses when the signal magnitude drops below `floor`.
double estimate_phase(const DeviceModel& device, const WRBConfig& cfg,
                      const std::vector<int>& m_list, std::uint64_t l, std::uint64_t seed,
                      double floor = 0.02, int workers = 1);

// Off-diagonal entry <T o U>^{(w2)}_{(w1)} via an inserted noiseless
// Clifford mapping w1 to w2; phase is resolved with a short phase schedule.
MuEstimate offdiagonal_mu(const DeviceModel& device, const WeylIndex& w1, const WeylIndex& w2,
                          double epsilon, double delta, std::uint64_t seed,
                          AdaptiveOptions opts = {});

// Divides the fitted decay base by mu_W^2 (noisy Weyl gates lemma).
MuEstimate correct_for_noisy_weyls(const MuEstimate& raw, Complex mu_w);

// lambda_hat = mu / u_diag; refuses at u_diag = 0 (use the Clifford trick).
Complex mu_to_noise_eigenvalue(Complex mu, Complex u_diag);

// Log-linear inverse-variance fit of |s_mean(m)| ~ |C| |mu|^m.
struct DecayFit {
  double abs_mu = 0;
  double abs_c = 0;
};
DecayFit fit_decay(const BenchmarkRecord& record);

}  // namespace weylsim
