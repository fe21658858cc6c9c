#include "weylsim/wrb.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <thread>

namespace weylsim {

namespace {

long pow_long(long base, int exp) {
  long r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

constexpr long kDeviceDimCap = 1024;  // d^{2n} of the dense device simulator

void check_cptp_dense(const LocalSuperOp& op, double tol = 1e-8) {
  const long hdim = pow_long(op.d(), op.arity());
  // trace preservation: identity row of the Weyl matrix
  for (long c = 0; c < op.dim(); ++c) {
    const Complex want = c == 0 ? Complex(1, 0) : Complex(0, 0);
    if (std::abs(op.matrix()(0, c) - want) > tol)
      throw ValidationError("device channel is not trace preserving within 1e-8");
  }
  // complete positivity: Choi eigenvalues
  Eigen::MatrixXcd choi = Eigen::MatrixXcd::Zero(hdim * hdim, hdim * hdim);
  for (long i = 0; i < hdim; ++i)
    for (long j = 0; j < hdim; ++j) {
      Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(hdim, hdim);
      e(i, j) = 1;
      const Eigen::MatrixXcd img = op.apply_dense(e);
      for (long r = 0; r < hdim; ++r)
        for (long c = 0; c < hdim; ++c) choi(i * hdim + r, j * hdim + c) = img(r, c);
    }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(choi);
  if (es.eigenvalues().minCoeff() < -tol)
    throw ValidationError("device channel is not completely positive within 1e-8");
}

}  // namespace

// ---------------------------------------------------------------------------
// DeviceModel

DeviceModel DeviceModel::from_parts(const Eigen::MatrixXcd& unitary, const LocalSuperOp& noise,
                                    int d, int n,
                                    std::optional<WeylDiagonalChannel> weyl_gate_noise) {
  if (!is_prime(d)) throw ValidationError("qudit dimension must be prime");
  const long hdim = pow_long(d, n);
  const long dim = hdim * hdim;
  if (dim > kDeviceDimCap) throw ResourceError("device register exceeds the dense simulator cap");
  if (unitary.rows() != hdim || unitary.cols() != hdim)
    throw ValidationError("unitary has the wrong dimensions");
  if ((unitary.adjoint() * unitary - Eigen::MatrixXcd::Identity(hdim, hdim)).cwiseAbs().maxCoeff() >
      1e-8)
    throw ValidationError("target gate is not unitary within 1e-8");
  if (noise.d() != d || noise.arity() != n || noise.basis() != Basis::weyl)
    throw ValidationError("noise channel frame does not match the device");
  check_cptp_dense(noise);

  DeviceModel dev;
  dev.d_ = d;
  dev.n_ = n;
  dev.u_mat_ = unitary;
  dev.u_super_ = LocalSuperOp::from_unitary(unitary, d, n, Basis::weyl, n).matrix();
  dev.round_ = noise.matrix() * dev.u_super_;
  if (weyl_gate_noise) {
    if (weyl_gate_noise->d() != d || weyl_gate_noise->arity() != n)
      throw ValidationError("Weyl-gate noise frame does not match the device");
    if (!weyl_gate_noise->cp_check(1e-8).ok)
      throw ValidationError("Weyl-gate noise is not a channel within 1e-8");
    dev.weyl_noise_ = weyl_gate_noise->eigenvalues();
  }
  dev.build_phase_table();
  return dev;
}

void DeviceModel::build_phase_table() {
  const long dim = round_.rows();
  phase_values_.resize(d_);
  for (int k = 0; k < d_; ++k) phase_values_[k] = make_phase(k, d_).value();
  conj_exponent_.assign(dim * dim, 0);
  // per-qudit digit exponent table, then digit sums per pair
  const int d2 = d_ * d_;
  std::vector<std::uint8_t> single(d2 * d2);
  for (int g = 0; g < d2; ++g)
    for (int t = 0; t < d2; ++t) {
      const int ag = g / d_, bg = g % d_, at = t / d_, bt = t % d_;
      single[g * d2 + t] = static_cast<std::uint8_t>(((ag * bt - bg * at) % d_ + d_) % d_);
    }
  std::vector<int> gd(n_), td(n_);
  for (long g = 0; g < dim; ++g) {
    long rem = g;
    for (int i = n_ - 1; i >= 0; --i) {
      gd[i] = static_cast<int>(rem % d2);
      rem /= d2;
    }
    for (long t = 0; t < dim; ++t) {
      long r2 = t;
      for (int i = n_ - 1; i >= 0; --i) {
        td[i] = static_cast<int>(r2 % d2);
        r2 /= d2;
      }
      int e = 0;
      for (int i = 0; i < n_; ++i) e += single[gd[i] * d2 + td[i]];
      conj_exponent_[g * dim + t] = static_cast<std::uint8_t>(e % d_);
    }
  }
}

Complex DeviceModel::u_diag(const WeylIndex& label) const {
  return u_super_(label.linear_index(), label.linear_index());
}

Complex DeviceModel::mu(const WeylIndex& label) const {
  return round_(label.linear_index(), label.linear_index());
}

Complex DeviceModel::weyl_noise_eigenvalue(const WeylIndex& label) const {
  if (weyl_noise_.size() == 0) return {1, 0};
  return weyl_noise_[label.linear_index()];
}

DeviceModel DeviceModel::with_clifford(const CliffordGate& c) const {
  if (c.d() != d_ || c.arity() != n_) throw ValidationError("Clifford frame mismatch");
  DeviceModel dev = *this;
  dev.round_ = c.to_superop().matrix() * round_;
  return dev;
}

// ---------------------------------------------------------------------------
// Config and protocol runs

WRBConfig::WRBConfig(WeylIndex lbl, Eigen::MatrixXcd state, Eigen::MatrixXcd povm_in)
    : label(std::move(lbl)), rho(std::move(state)), povm(std::move(povm_in)) {
  const long hdim = pow_long(label.d(), label.n());
  if (rho.rows() != hdim || rho.cols() != hdim || povm.rows() != hdim || povm.cols() != hdim)
    throw ValidationError("state or POVM size does not match the label frame");
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-8 ||
      std::abs(rho.trace() - Complex(1, 0)) > 1e-8)
    throw ValidationError("initial state is not a density matrix");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(povm);
  if ((povm - povm.adjoint()).cwiseAbs().maxCoeff() > 1e-8 || es.eigenvalues().minCoeff() < -1e-8 ||
      es.eigenvalues().maxCoeff() > 1 + 1e-8)
    throw ValidationError("POVM element must satisfy 0 <= E <= 1");
  const long dim = hdim * hdim;
  rho_vec.resize(dim);
  povm_pair.resize(dim);
  for (long t = 0; t < dim; ++t) {
    const Eigen::MatrixXcd w = materialize(WeylIndex::from_linear_index(t, label.d(), label.n()));
    rho_vec[t] = (w.adjoint() * rho).trace();
    povm_pair[t] = (povm * w).trace() / static_cast<double>(hdim);
  }
  spam_constant = rho_vec[label.linear_index()] * povm_pair[label.linear_index()];
}

WRBConfig choose_state_povm(const WeylIndex& label) {
  const int d = label.d(), n = label.n();
  const long hdim = pow_long(d, n);
  // per-qudit eigendecomposition (Schur: the factors are normal matrices)
  std::vector<Eigen::MatrixXcd> vecs(n);
  std::vector<Eigen::VectorXcd> vals(n);
  for (int q = 0; q < n; ++q) {
    if (label.a()[q] == 0 && label.b()[q] == 0) {
      vecs[q] = Eigen::MatrixXcd::Identity(d, d);
      vals[q] = Eigen::VectorXcd::Ones(d);
      continue;
    }
    const Eigen::MatrixXcd w = materialize(WeylIndex({label.a()[q]}, {label.b()[q]}, d));
    Eigen::ComplexSchur<Eigen::MatrixXcd> schur(w);
    vecs[q] = schur.matrixU();
    vals[q] = schur.matrixT().diagonal();
  }
  // bucket the d^n product eigenvalues
  std::map<std::pair<long, long>, std::vector<long>> buckets;
  const double grid = 1e6;
  for (long k = 0; k < hdim; ++k) {
    Complex lambda = 1;
    long rem = k;
    for (int q = n - 1; q >= 0; --q) {
      lambda *= vals[q][rem % d];
      rem /= d;
    }
    const std::pair<long, long> key = {std::lround(lambda.real() * grid),
                                       std::lround(lambda.imag() * grid)};
    buckets[key].push_back(k);
  }
  // largest eigenspace; ties go to the bucket holding the earliest combo
  const std::vector<long>* best = nullptr;
  for (const auto& [key, combos] : buckets)
    if (!best || combos.size() > best->size() ||
        (combos.size() == best->size() && combos.front() < best->front()))
      best = &combos;

  auto product_vector = [&](long combo) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Ones(1);
    std::vector<int> digit(n);
    long rem = combo;
    for (int q = n - 1; q >= 0; --q) {
      digit[q] = static_cast<int>(rem % d);
      rem /= d;
    }
    for (int q = 0; q < n; ++q) {
      const Eigen::VectorXcd col = vecs[q].col(digit[q]);
      Eigen::VectorXcd next(v.size() * d);
      for (long i = 0; i < v.size(); ++i) next.segment(i * d, d) = v[i] * col;
      v = std::move(next);
    }
    return v;
  };

  const Eigen::VectorXcd v0 = product_vector(best->front());
  const Eigen::MatrixXcd rho = v0 * v0.adjoint();
  Eigen::MatrixXcd povm = Eigen::MatrixXcd::Zero(hdim, hdim);
  for (long combo : *best) {
    const Eigen::VectorXcd v = product_vector(combo);
    povm += v * v.adjoint();
  }
  WRBConfig cfg(label, rho, povm);
  if (std::abs(cfg.spam_constant) < 1.0 / d - 1e-9)
    throw ValidationError("state/POVM choice failed to reach |C| >= 1/d");
  return cfg;
}

Complex run_wrb_once(const DeviceModel& device, const WRBConfig& cfg, int m, Rng& rng) {
  if (m < 1) throw ValidationError("sequence length must be at least 1");
  const long dim = device.dim();
  const int d = device.d(), n = device.n();
  const int d2 = d * d;
  Eigen::VectorXcd v = cfg.rho_vec;
  Eigen::VectorXcd scratch(dim);
  const bool noisy_weyls = device.has_weyl_gate_noise();

  auto apply_weyl = [&](long gate) {
    for (long t = 0; t < dim; ++t) v[t] *= device.conj_phase(gate, t);
    if (noisy_weyls)
      for (long t = 0; t < dim; ++t) v[t] *= device.weyl_gate_noise()[t];
  };

  const long w0 = static_cast<long>(rng.uniform_int(dim));
  apply_weyl(w0);

  std::vector<int> net(n, 0);  // accumulated gate word, digitwise over Z_d x Z_d
  for (int round = 0; round < m; ++round) {
    long gate = 0;
    for (int q = 0; q < n; ++q) {
      const int ga = static_cast<int>(rng.uniform_int(d));
      const int gb = static_cast<int>(rng.uniform_int(d));
      gate = gate * d2 + ga * d + gb;
      const int na = (net[q] / d + ga) % d;
      const int nb = (net[q] % d + gb) % d;
      net[q] = na * d + nb;
    }
    apply_weyl(gate);
    scratch.noalias() = device.round_matrix() * v;
    v.swap(scratch);
  }

  long inverse_gate = 0;  // single inversion gate: the negated accumulated word
  for (int q = 0; q < n; ++q) {
    const int na = (d - net[q] / d) % d;
    const int nb = (d - net[q] % d) % d;
    inverse_gate = inverse_gate * d2 + na * d + nb;
  }
  apply_weyl(inverse_gate);

  Complex overlap = 0;
  for (long t = 0; t < dim; ++t) overlap += cfg.povm_pair[t] * v[t];
  const double p = std::clamp(overlap.real(), 0.0, 1.0);
  if (rng.uniform() >= p) return {0, 0};
  // character-projection weight of the initial Weyl
  const WeylIndex arg = WeylIndex::from_linear_index(w0, d, n);
  const int exponent = character_exponent(cfg.label, arg);
  return std::conj(make_phase(exponent, d).value());
}

std::vector<Complex> run_wrb_batch(const DeviceModel& device, const WRBConfig& cfg, int m,
                                   std::uint64_t count, std::uint64_t seed,
                                   std::uint64_t base_stream, int workers) {
  std::vector<Complex> out(count);
  if (workers < 1) workers = 1;
  if (static_cast<std::uint64_t>(workers) > count && count > 0) workers = static_cast<int>(count);
  auto body = [&](int w) {
    for (std::uint64_t i = w; i < count; i += static_cast<std::uint64_t>(workers)) {
      Rng rng = Rng::for_stream(seed, base_stream + i);
      out[i] = run_wrb_once(device, cfg, m, rng);
    }
  };
  if (workers == 1) {
    body(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(body, w);
    for (auto& t : pool) t.join();
  }
  return out;
}

MPoint estimate_q2(const DeviceModel& device, const WRBConfig& cfg, int m, std::uint64_t l,
                   std::uint64_t seed, int workers) {
  if (l < 1) throw ValidationError("pair count must be at least 1");
  const auto s = run_wrb_batch(device, cfg, m, 2 * l, seed, 0, workers);
  MPoint point;
  point.m = m;
  point.runs = 2 * l;
  Complex mean = 0;
  double sum = 0, sumsq = 0;
  for (std::uint64_t k = 0; k < l; ++k) {
    const double x = (s[k] * std::conj(s[k + l])).real();
    sum += x;
    sumsq += x * x;
  }
  for (const Complex& si : s) mean += si;
  point.s_mean = mean / static_cast<double>(2 * l);
  point.q2 = sum / static_cast<double>(l);
  const double var = std::max(0.0, sumsq / static_cast<double>(l) - point.q2 * point.q2);
  point.q2_stderr = std::sqrt(var / static_cast<double>(l));
  return point;
}

// ---------------------------------------------------------------------------
// Estimators

AdaptiveResult adaptive_abs_mu(const DeviceModel& device, const WRBConfig& cfg, double epsilon,
                               double delta, std::uint64_t seed, AdaptiveOptions opts) {
  if (epsilon <= 0 || delta <= 0 || delta >= 1) throw ValidationError("bad epsilon/delta");
  const double c_abs = std::abs(cfg.spam_constant);
  if (c_abs < 1e-12) throw ValidationError("SPAM constant is zero for this label");

  AdaptiveResult out;
  out.record.label = cfg.label.to_string();
  std::uint64_t total_runs = 0;

  auto delta_i = [&](int i) { return delta / (2.0 * (i + 1) * (i + 2)); };
  auto pair_count = [&](double err, int i) {
    const double raw = 2.0 * std::log(2.0 / delta_i(i)) / (err * err);
    return static_cast<std::uint64_t>(std::ceil(raw));
  };

  // |q(1)|^2 to additive error u^2 C^2 eps
  const double err1 = opts.mu_sq_upper * opts.mu_sq_upper * c_abs * c_abs * epsilon;
  const std::uint64_t l1 = pair_count(err1, 0);
  const MPoint base = estimate_q2(device, cfg, 1, l1, Rng::mix(seed), opts.workers);
  out.record.points.push_back(base);
  total_runs += base.runs;
  if (base.q2 <= 0)
    throw ValidationError("|q(1)|^2 estimate is not positive; SPAM too small or eps too coarse");

  const double err_i = epsilon * base.q2;  // |mu|^2 C^2 eps with q(1)^2 as its proxy
  MPoint last = base;
  bool stopped = false;
  for (int i = 1; i <= opts.max_iterations; ++i) {
    const int m_i = (1 << i) + 1;
    const std::uint64_t li = pair_count(err_i, i);
    const MPoint point =
        estimate_q2(device, cfg, m_i, li, Rng::mix(seed + 0x9e37ULL * i), opts.workers);
    out.record.points.push_back(point);
    total_runs += point.runs;
    last = point;
    if (point.q2 <= base.q2 / 3.0) {
      stopped = true;
      break;
    }
  }
  if (!stopped)
    throw ValidationError(
        "adaptive estimator did not terminate: spectral gap is (near) zero for this label");

  const double ratio = std::max(last.q2 / base.q2, 1e-300);
  MuEstimate est;
  est.abs = std::min(1.0, std::pow(ratio, 1.0 / (2.0 * last.m)));
  est.phase = 0;
  est.label = cfg.label.to_string();
  est.spam_constant = c_abs;
  est.m_max = last.m;
  est.samples = total_runs;
  est.precision_warning = epsilon > c_abs * c_abs * est.abs * est.abs / 200.0;
  out.estimate = est;
  return out;
}

double estimate_phase(const DeviceModel& device, const WRBConfig& cfg,
                      const std::vector<int>& m_list, std::uint64_t l, std::uint64_t seed,
                      double floor, int workers) {
  if (m_list.empty()) throw ValidationError("need at least one sequence length");
  std::vector<int> ms = m_list;
  std::sort(ms.begin(), ms.end());
  const Complex c_phase = cfg.spam_constant / std::abs(cfg.spam_constant);

  struct Obs {
    int m;
    double angle;   // unwrapped m * theta
    double weight;  // signal amplitude squared
  };
  std::vector<Obs> obs;
  double theta = 0;
  bool have_theta = false;
  for (size_t i = 0; i < ms.size(); ++i) {
    const auto s = run_wrb_batch(device, cfg, ms[i], l, Rng::mix(seed + 131 * i), 0, workers);
    Complex mean = 0;
    for (const Complex& si : s) mean += si;
    mean /= static_cast<double>(l);
    mean *= std::conj(c_phase);  // remove the SPAM constant's phase
    const double amp = std::abs(mean);
    if (amp < floor)
      throw ValidationError("phase signal below the magnitude floor at m = " +
                            std::to_string(ms[i]) + "; error amplification |mu|^-m too severe");
    double raw = std::atan2(mean.imag(), mean.real());
    if (have_theta) {
      const double predicted = ms[i] * theta;
      raw += 2 * std::numbers::pi * std::round((predicted - raw) / (2 * std::numbers::pi));
    }
    obs.push_back({ms[i], raw, amp * amp});
    theta = raw / ms[i];
    have_theta = true;
  }
  // inverse-variance weighted least squares through the origin
  double num = 0, den = 0;
  for (const Obs& o : obs) {
    num += o.weight * o.m * o.angle;
    den += o.weight * o.m * o.m;
  }
  return std::remainder(num / den, 2 * std::numbers::pi);
}

MuEstimate offdiagonal_mu(const DeviceModel& device, const WeylIndex& w1, const WeylIndex& w2,
                          double epsilon, double delta, std::uint64_t seed, AdaptiveOptions opts) {
  if (w1.is_identity() || w2.is_identity())
    throw ValidationError("off-diagonal estimation needs non-identity labels");
  const CliffordGate g = solve_clifford_mapping(w1, w2);
  const Complex eta = g.action(w1).first.value();  // G W1 G^dag = eta W2
  const DeviceModel composed = device.with_clifford(g.inverse());
  const WRBConfig cfg = choose_state_povm(w1);
  AdaptiveResult res = adaptive_abs_mu(composed, cfg, epsilon, delta, seed, opts);

  // resolve the phase of the measured diagonal, then undo the Clifford's
  // phase: target entry = mu' * eta
  double theta_prime = 0;
  const double floor = std::max(0.005, 0.25 * std::abs(cfg.spam_constant) *
                                           std::pow(std::max(res.estimate.abs, 0.1), 9));
  try {
    theta_prime =
        estimate_phase(composed, cfg, {1, 2, 3, 5, 9}, 4000, Rng::mix(seed ^ 0xabcdefULL), floor,
                       opts.workers);
  } catch (const ValidationError&) {
    theta_prime = 0;  // signal too small to resolve; |mu| remains valid
  }
  MuEstimate est = res.estimate;
  est.label = w1.to_string() + "->" + w2.to_string();
  est.phase = std::remainder(theta_prime + std::arg(eta), 2 * std::numbers::pi);
  return est;
}

MuEstimate correct_for_noisy_weyls(const MuEstimate& raw, Complex mu_w) {
  if (std::abs(mu_w) < 1e-12) throw ValidationError("Weyl-gate decay mu_W must be nonzero");
  MuEstimate out = raw;
  out.abs = raw.abs / (std::abs(mu_w) * std::abs(mu_w));
  out.phase = std::remainder(raw.phase - 2 * std::arg(mu_w), 2 * std::numbers::pi);
  return out;
}

Complex mu_to_noise_eigenvalue(Complex mu, Complex u_diag) {
  if (std::abs(u_diag) < 1e-12)
    throw ValidationError("unitary diagonal vanishes at this label; use the Clifford trick");
  return mu / u_diag;
}

DecayFit fit_decay(const BenchmarkRecord& record) {
  double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
  int used = 0;
  for (const MPoint& p : record.points) {
    const double amp = std::abs(p.s_mean);
    if (amp <= 0) continue;
    const double w = static_cast<double>(p.runs) * amp * amp;
    const double x = p.m, y = std::log(amp);
    sw += w;
    swx += w * x;
    swy += w * y;
    swxx += w * x * x;
    swxy += w * x * y;
    ++used;
  }
  if (used < 2) throw ValidationError("decay fit needs at least two usable sequence lengths");
  const double det = sw * swxx - swx * swx;
  if (std::abs(det) < 1e-30) throw ValidationError("decay fit is degenerate");
  const double slope = (sw * swxy - swx * swy) / det;
  const double intercept = (swxx * swy - swx * swxy) / det;
  return {std::exp(slope), std::exp(intercept)};
}

}  // namespace weylsim
