#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "test_helpers.hpp"
#include "weylsim/wrb.hpp"

using namespace weylsim;
using namespace weylsim::testing;

namespace {

DeviceModel depolarized_identity(double p, int n = 1) {
  const long hdim = 1L << n;
  return DeviceModel::from_parts(Eigen::MatrixXcd::Identity(hdim, hdim),
                                 depolarizing(p, n).to_superop(), 2, n);
}

std::pair<Complex, double> batch_mean(const std::vector<Complex>& s) {
  Complex mean = 0;
  double sq = 0;
  for (const Complex& x : s) mean += x;
  mean /= static_cast<double>(s.size());
  for (const Complex& x : s) sq += std::norm(x - mean);
  return {mean, std::sqrt(sq / s.size() / s.size())};
}

}  // namespace

TEST_CASE("choose_state_povm canonical cases") {
  // Z x Z: rho = |00><00|, E = even parity projector, C = 1/2
  const WeylIndex zz({1, 1}, {0, 0}, 2);
  const WRBConfig cfg = choose_state_povm(zz);
  Eigen::MatrixXcd want_rho = Eigen::MatrixXcd::Zero(4, 4);
  want_rho(0, 0) = 1;
  CHECK(max_abs_diff(cfg.rho, want_rho) < 1e-12);
  Eigen::MatrixXcd parity = Eigen::MatrixXcd::Zero(4, 4);
  parity(0, 0) = parity(3, 3) = 1;
  CHECK(max_abs_diff(cfg.povm, parity) < 1e-12);
  CHECK(std::abs(cfg.spam_constant - Complex(0.5, 0)) < 1e-12);

  // identity label: E = identity, C = 1
  const WRBConfig id_cfg = choose_state_povm(WeylIndex::identity(2, 2));
  CHECK(std::abs(id_cfg.spam_constant - Complex(1, 0)) < 1e-12);

  // sweep: every label at d = 3, n = 2 reaches |C| >= 1/3
  for (long t = 0; t < 81; ++t) {
    const WRBConfig c = choose_state_povm(WeylIndex::from_linear_index(t, 3, 2));
    CHECK(std::abs(c.spam_constant) >= 1.0 / 3 - 1e-9);
  }
}

TEST_CASE("device model diagnostics and factorization") {
  Rng rng(5);
  const Eigen::MatrixXcd u = random_unitary(2, rng);
  const WeylDiagonalChannel t = dephasing(0.8, 2);
  const DeviceModel dev = DeviceModel::from_parts(u, t.to_superop(), 2, 1);
  const LocalSuperOp uop = LocalSuperOp::from_unitary(u, 2, 1);
  for (long w = 0; w < 4; ++w) {
    const WeylIndex label = WeylIndex::from_linear_index(w, 2, 1);
    CHECK(std::abs(dev.u_diag(label) - uop.matrix()(w, w)) < 1e-12);
    // mu = <U>_diag * <T>_diag for Weyl-diagonal noise
    CHECK(std::abs(dev.mu(label) - t.eigenvalues()[w] * uop.matrix()(w, w)) < 1e-12);
  }
  // non-CPTP noise is rejected
  Eigen::VectorXcd bad(4);
  bad << 1, 1, 1, -1;
  CHECK_THROWS_AS(
      DeviceModel::from_parts(Eigen::MatrixXcd::Identity(2, 2),
                              LocalSuperOp::from_diagonal(bad, 2, 1), 2, 1),
      ValidationError);
}

TEST_CASE("run outputs are characters or zero and E(y) = C mu^m") {
  const double p = 0.92;
  const DeviceModel dev = depolarized_identity(p);
  const WeylIndex z({1}, {0}, 2);
  const WRBConfig cfg = choose_state_povm(z);

  for (int m : {1, 4}) {
    const auto s = run_wrb_batch(dev, cfg, m, 20000, 7 + m);
    for (const Complex& y : s) {
      const double a = std::abs(y);
      CHECK((a < 1e-14 || std::abs(a - 1.0) < 1e-12));
    }
    const auto [mean, se] = batch_mean(s);
    const double want = 0.5 * std::pow(p, m);  // C = 1/2, mu = p
    CHECK(std::abs(mean - Complex(want, 0)) <= 3 * se + 1e-12);
  }
}

TEST_CASE("character projection against the dense twirl on a two-qubit CNOT device") {
  Eigen::MatrixXcd cnot = Eigen::MatrixXcd::Zero(4, 4);
  cnot(0, 0) = cnot(1, 1) = cnot(3, 2) = cnot(2, 3) = 1;
  const WeylDiagonalChannel t = depolarizing(0.95, 2);
  const DeviceModel dev = DeviceModel::from_parts(cnot, t.to_superop(), 2, 2);
  const WeylIndex label({1, 0}, {0, 0}, 2);  // Z x I
  const WRBConfig cfg = choose_state_povm(label);

  const int m = 3;
  const auto s = run_wrb_batch(dev, cfg, m, 30000, 99);
  const auto [mean, se] = batch_mean(s);
  // dense prediction: C mu^m with mu the twirled diagonal of T o U
  const Complex mu = dev.mu(label);
  const Complex want = cfg.spam_constant * std::pow(mu, m);
  CHECK(std::abs(mean - want) <= 3 * se + 1e-12);
}

TEST_CASE("estimate_q2") {
  // perfect device, always-success POVM, identity label: estimate exactly 1
  const DeviceModel perfect = depolarized_identity(1.0);
  const WeylIndex id = WeylIndex::identity(2, 1);
  const WRBConfig cfg_id(id, Eigen::MatrixXcd::Identity(2, 2) / 2.0,
                         Eigen::MatrixXcd::Identity(2, 2));
  const MPoint exact = estimate_q2(perfect, cfg_id, 3, 500, 11);
  CHECK(exact.q2 == doctest::Approx(1.0));
  CHECK(exact.q2_stderr == doctest::Approx(0.0));

  // known |q(2)|^2 = C^2 mu^4 within 0.05 at l = 2000
  const double p = 0.9;
  const DeviceModel dev = depolarized_identity(p);
  const WRBConfig cfg = choose_state_povm(WeylIndex({1}, {0}, 2));
  const double truth = 0.25 * std::pow(p, 4);
  const MPoint est = estimate_q2(dev, cfg, 2, 2000, 13);
  CHECK(std::abs(est.q2 - truth) < 0.05);

  // unbiasedness: the mean over repetitions stays within 3 combined sigma
  double sum = 0, sumsq = 0;
  const int reps = 60;
  for (int r = 0; r < reps; ++r) {
    const double q = estimate_q2(dev, cfg, 2, 400, 1000 + r).q2;
    sum += q;
    sumsq += q * q;
  }
  const double mean = sum / reps;
  const double se = std::sqrt(std::max(0.0, sumsq / reps - mean * mean) / reps);
  CHECK(std::abs(mean - truth) <= 3 * se + 1e-3);
}

TEST_CASE("adaptive estimator recovers depolarizing decays multiplicatively") {
  for (double p : {0.9, 0.95}) {
    const DeviceModel dev = depolarized_identity(p);
    const WRBConfig cfg = choose_state_povm(WeylIndex({1}, {0}, 2));
    const AdaptiveResult res = adaptive_abs_mu(dev, cfg, 0.1, 0.05, 4242);
    CHECK(std::abs(res.estimate.abs - p) <= 5 * 0.1 * (1 - p));
    // final sequence length within a factor 4 of 1 / gap
    const double lambda = 1 - p;
    CHECK(res.estimate.m_max * lambda >= 0.25);
    CHECK(res.estimate.m_max * lambda <= 4.0);
    CHECK(res.record.points.size() >= 2);
  }
}

TEST_CASE("adaptive estimator refuses a gapless label") {
  // mu = 1 exactly: dephasing noise leaves the Z label untouched
  const DeviceModel dev = DeviceModel::from_parts(Eigen::MatrixXcd::Identity(2, 2),
                                                  dephasing(0.9, 2).to_superop(), 2, 1);
  const WRBConfig cfg = choose_state_povm(WeylIndex({1}, {0}, 2));
  AdaptiveOptions opts;
  opts.max_iterations = 6;
  CHECK_THROWS_AS(adaptive_abs_mu(dev, cfg, 0.1, 0.1, 7, opts), ValidationError);
}

TEST_CASE("phase estimation") {
  // real positive decay: theta = 0
  const DeviceModel dev = depolarized_identity(0.9);
  const WRBConfig cfg = choose_state_povm(WeylIndex({1}, {0}, 2));
  const double theta0 = estimate_phase(dev, cfg, {1, 2, 3}, 20000, 17);
  CHECK(std::abs(theta0) < 0.02);

  // complex decay at d = 3: T = 0.9 id + 0.1 conj(W_(1,0))
  Eigen::VectorXcd eig(9);
  for (long t = 0; t < 9; ++t) {
    const WeylIndex v = WeylIndex::from_linear_index(t, 3, 1);
    eig[t] = 0.9 + 0.1 * weyl_conjugate(WeylIndex({1}, {0}, 3), v).value();
  }
  const WeylDiagonalChannel tch(eig, 3, 1);
  const DeviceModel dev3 =
      DeviceModel::from_parts(Eigen::MatrixXcd::Identity(3, 3), tch.to_superop(), 3, 1);
  const WeylIndex x3({0}, {1}, 3);
  const Complex mu = dev3.mu(x3);
  const double want = std::arg(mu);
  const WRBConfig cfg3 = choose_state_povm(x3);
  const double theta = estimate_phase(dev3, cfg3, {1, 2, 3, 5}, 20000, 19);
  CHECK(std::abs(theta - want) < 0.02);

  // magnitude floor: strong decay at long m refuses
  const DeviceModel weak = depolarized_identity(0.3);
  CHECK_THROWS_AS(estimate_phase(weak, cfg, {9}, 2000, 21), ValidationError);
}

TEST_CASE("off-diagonal recovery through the Clifford trick") {
  // T = (conjugation by F) o depolarizing(0.95): single off-diagonal block
  const double p = 0.95;
  const LocalSuperOp f_super = CliffordGate::parse("F(0)", 2, 1).to_superop();
  const LocalSuperOp t_op = f_super.compose_after(depolarizing(p, 1).to_superop());
  const DeviceModel dev = DeviceModel::from_parts(Eigen::MatrixXcd::Identity(2, 2), t_op, 2, 1);

  const WeylIndex z({1}, {0}, 2), x({0}, {1}, 2);
  const Complex truth = t_op.matrix()(x.linear_index(), z.linear_index());
  REQUIRE(std::abs(std::abs(truth) - p) < 1e-12);

  const MuEstimate est = offdiagonal_mu(dev, z, x, 0.1, 0.05, 31337);
  CHECK(std::abs(est.abs - std::abs(truth)) <= 5 * 0.1 * (1 - std::abs(truth)) + 0.01);
  // sign resolution at d = 2: the recovered entry matches the true sign
  const Complex recovered = est.abs * std::exp(Complex(0, est.phase));
  CHECK(std::abs(recovered - truth) < 0.05);

  // w1 == w2 reduces to the diagonal pipeline
  const DeviceModel plain = depolarized_identity(0.9);
  const MuEstimate diag = offdiagonal_mu(plain, z, z, 0.1, 0.05, 99);
  CHECK(std::abs(diag.abs - 0.9) < 0.05);

  CHECK_THROWS_AS(offdiagonal_mu(plain, WeylIndex::identity(2, 1), x, 0.1, 0.05, 1),
                  ValidationError);

  // noiseless identity device: the mapped label has zero diagonal, so the
  // decay signal vanishes
  const DeviceModel noiseless = depolarized_identity(1.0);
  try {
    const MuEstimate zero = offdiagonal_mu(noiseless, z, x, 0.1, 0.1, 55);
    CHECK(zero.abs < 0.5);
  } catch (const ValidationError&) {
    // acceptable: |q(1)|^2 is indistinguishable from zero
  }
}

TEST_CASE("noisy Weyl gates correct out as mu_W^2") {
  CHECK(correct_for_noisy_weyls({0.95, 0.0, "z", 0.5, 9, 100, false}, Complex(1, 0)).abs ==
        doctest::Approx(0.95));
  CHECK_THROWS_AS(correct_for_noisy_weyls({0.95, 0, "z", 0.5, 9, 100, false}, Complex(0, 0)),
                  ValidationError);

  const double p = 0.95, pw = 0.99;
  const Eigen::MatrixXcd id2 = Eigen::MatrixXcd::Identity(2, 2);
  const DeviceModel noisy_weyls =
      DeviceModel::from_parts(id2, depolarizing(p, 1).to_superop(), 2, 1, depolarizing(pw, 1));
  const DeviceModel clean = depolarized_identity(p);
  const WRBConfig cfg = choose_state_povm(WeylIndex({1}, {0}, 2));

  const AdaptiveResult raw = adaptive_abs_mu(noisy_weyls, cfg, 0.1, 0.05, 777);
  const AdaptiveResult ref = adaptive_abs_mu(clean, cfg, 0.1, 0.05, 778);
  // raw decay base is mu mu_W^2; corrected matches the clean device
  CHECK(std::abs(raw.estimate.abs - p * pw * pw) < 0.02);
  const MuEstimate corrected = correct_for_noisy_weyls(raw.estimate, Complex(pw, 0));
  CHECK(std::abs(corrected.abs - ref.estimate.abs) < 0.02);
}

TEST_CASE("mu_to_noise_eigenvalue") {
  CHECK(mu_to_noise_eigenvalue(Complex(0.95, 0), Complex(1, 0)) == Complex(0.95, 0));
  // Hadamard-style unitary has zero diagonal at the Z label
  Eigen::MatrixXcd h(2, 2);
  h << 1, 1, 1, -1;
  h /= std::sqrt(2.0);
  const DeviceModel dev = DeviceModel::from_parts(h, depolarizing(0.9, 1).to_superop(), 2, 1);
  const Complex u = dev.u_diag(WeylIndex({1}, {0}, 2));
  CHECK(std::abs(u) < 1e-12);
  CHECK_THROWS_AS(mu_to_noise_eigenvalue(Complex(0.5, 0), u), ValidationError);
}

TEST_CASE("fixed-schedule decay fitting") {
  // exact synthetic record
  BenchmarkRecord rec;
  rec.label = "1|0";
  const double c = 0.47, mu = 0.93;
  for (int m : {1, 2, 4, 8, 16}) {
    MPoint p;
    p.m = m;
    p.runs = 1000;
    p.s_mean = c * std::pow(mu, m);
    rec.points.push_back(p);
  }
  const DecayFit fit = fit_decay(rec);
  CHECK(fit.abs_mu == doctest::Approx(mu).epsilon(1e-10));
  CHECK(fit.abs_c == doctest::Approx(c).epsilon(1e-10));

  // measured record from the device
  const double p = 0.9;
  const DeviceModel dev = depolarized_identity(p);
  const WRBConfig cfg = choose_state_povm(WeylIndex({1}, {0}, 2));
  BenchmarkRecord meas;
  meas.label = "1|0";
  for (int m : {1, 2, 4, 8}) {
    MPoint pt;
    pt.m = m;
    pt.runs = 20000;
    const auto s = run_wrb_batch(dev, cfg, m, pt.runs, 300 + m);
    Complex mean = 0;
    for (const Complex& x : s) mean += x;
    pt.s_mean = mean / static_cast<double>(pt.runs);
    meas.points.push_back(pt);
  }
  const DecayFit mf = fit_decay(meas);
  CHECK(std::abs(mf.abs_mu - p) < 0.02);
  CHECK(std::abs(mf.abs_c - 0.5) < 0.05);
}

TEST_CASE("wrb batches are deterministic per seed") {
  const DeviceModel dev = depolarized_identity(0.9);
  const WRBConfig cfg = choose_state_povm(WeylIndex({1}, {0}, 2));
  const auto a = run_wrb_batch(dev, cfg, 3, 4000, 123, 0, 2);
  const auto b = run_wrb_batch(dev, cfg, 3, 4000, 123, 0, 2);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}
