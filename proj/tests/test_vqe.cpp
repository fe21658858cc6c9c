#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "test_helpers.hpp"
#include "weylsim/noise.hpp"
#include "weylsim/vqe.hpp"

using namespace weylsim;
using namespace weylsim::testing;

namespace {

MaxCutProblem ring(int n) {
  std::vector<std::tuple<int, int, double>> ws;
  for (int i = 0; i < n; ++i) ws.push_back({i, (i + 1) % n, 1.0});
  return MaxCutProblem(n, std::move(ws));
}

Eigen::MatrixXd uniform_theta(int n, int depth, double value) {
  return Eigen::MatrixXd::Constant(n, depth, value);
}

}  // namespace

TEST_CASE("ansatz assembly") {
  CHECK_THROWS_AS(MaxCutProblem(3, {}), ValidationError);

  const MaxCutProblem prob(4, {{0, 1, 1.0}, {2, 3, 0.5}});
  AnsatzParams params;
  params.theta = uniform_theta(4, 0, 0.0);
  CHECK(build_ansatz_circuit(prob, params).empty());

  // n = 4, D = 1: four noisy rotations plus one noisy CNOT on pair (1, 2)
  params.theta = uniform_theta(4, 1, 0.3);
  params.p_c = 0.95;
  params.p_y = 0.97;
  const CircuitDescription c = build_ansatz_circuit(prob, params);
  REQUIRE(c.layers().size() == 10);  // 4 x (rotation + dep) + cnot + dep
  CHECK(c.layers()[0].label == "Y(0,0)");
  CHECK(c.layers()[1].label == "dep_y");
  CHECK(c.layers()[8].label == "cnot");
  CHECK(c.layers()[8].support == std::vector<int>{1, 2});
  CHECK(c.layers()[9].label == "dep_c");

  // brick-wall variant shifts the pairing on odd depths
  params.theta = uniform_theta(4, 2, 0.3);
  params.brickwall = true;
  const CircuitDescription b = build_ansatz_circuit(prob, params);
  bool seen01 = false;
  for (const auto& layer : b.layers())
    if (layer.label == "cnot" && layer.support == std::vector<int>{0, 1}) seen01 = true;
  CHECK(seen01);
}

TEST_CASE("layer_norm closed form") {
  CHECK(layer_norm(0, 0, 0.9, 0.8) == 1.0);
  CHECK(layer_norm(M_PI / 4, M_PI / 4, 1.0, 1.0) == doctest::Approx(2.0));

  // equals the column norm of the assembled sandwich
  Rng rng(9);
  for (int trial = 0; trial < 12; ++trial) {
    const double t1 = 3 * rng.uniform() - 1.5, t2 = 3 * rng.uniform() - 1.5;
    const double pc = 0.5 + 0.5 * rng.uniform(), py = 0.5 + 0.5 * rng.uniform();
    const LocalSuperOp sandwich =
        depolarizing(pc, 2)
            .to_superop()
            .compose_after(rotation_superop(t1).tensor(rotation_superop(t2)))
            .compose_after(depolarizing(py, 1).to_superop().tensor(
                depolarizing(py, 1).to_superop()));
    CHECK(layer_norm(t1, t2, pc, py) == doctest::Approx(sandwich.l1_to_l1()).epsilon(1e-10));
  }
}

TEST_CASE("sample_complexity closed form") {
  // fixture: n = 4, D = 1, noiseless: scaling = 2^{2 n D} = 256 exactly
  const SampleComplexity fx = sample_complexity(4, 1, 0.1, 1.0, 1.0);
  CHECK(fx.scaling == doctest::Approx(256.0).epsilon(1e-12));
  CHECK_FALSE(fx.efficient);

  // D = 0 baseline: ceil(2 n^2 log(1/delta) / eps^2)
  const SampleComplexity base = sample_complexity(4, 0, 0.1, 0.9, 0.9, 0.05);
  CHECK(base.scaling == 1.0);
  CHECK(base.samples ==
        static_cast<std::uint64_t>(std::ceil(2.0 * 16 * std::log(1 / 0.05) / 0.01)));
  CHECK(base.polynomial_regime);

  // polynomial branch flag
  CHECK(sample_complexity(4, 1, 0.1, 0.45, 1.0).efficient);
  CHECK(sample_complexity(4, 1, 0.1, 0.45, 1.0).polynomial_regime);  // scaling 0.9^8 < 16

  // monotone in the rates (survival convention: smaller p, smaller bound)
  CHECK(sample_complexity(4, 2, 0.1, 0.9, 0.9).scaling <=
        sample_complexity(4, 2, 0.1, 0.95, 0.9).scaling);
}

TEST_CASE("ansatz norm bound properties") {
  const MaxCutProblem prob = ring(4);
  AnsatzParams params;
  params.theta = uniform_theta(4, 1, M_PI / 4);

  // noiseless limit: the grouped bound equals the per-pair layer_norm product
  params.p_c = params.p_y = 1.0;
  const CircuitDescription c1 = build_ansatz_circuit(prob, params);
  const double bound1 = circuit_norm_bound(c1, Picture::heisenberg);
  double pair_product = 1;
  for (int pair = 0; pair < 2; ++pair)
    pair_product *= layer_norm(M_PI / 4, M_PI / 4, 1.0, 1.0);
  CHECK(bound1 == doctest::Approx(pair_product).epsilon(1e-12));
  // the printed worst-case scaling dominates the honest grouped bound
  CHECK(bound1 * bound1 <= sample_complexity(4, 1, 0.1, 1.0, 1.0).scaling + 1e-9);

  // monotonicity: more noise (smaller survival) never increases the bound
  double prev = bound1;
  for (double p : {0.95, 0.9, 0.8}) {
    params.p_c = params.p_y = p;
    const double b = circuit_norm_bound(build_ansatz_circuit(prob, params), Picture::heisenberg);
    CHECK(b <= prev + 1e-12);
    prev = b;
  }

  // theta = 0 Clifford-only limit: every norm is 1
  params.theta = uniform_theta(4, 1, 0.0);
  params.p_c = params.p_y = 1.0;
  CHECK(circuit_norm_bound(build_ansatz_circuit(prob, params), Picture::heisenberg) == 1.0);
}

TEST_CASE("energy estimation") {
  // D = 0 from |0...0>: energy = sum of weights, exactly
  const MaxCutProblem prob = ring(4);
  AnsatzParams params;
  params.theta = uniform_theta(4, 0, 0.0);
  const EnergyEstimate flat = estimate_energy(prob, params, 0.1, 0.1, 1);
  CHECK(flat.energy == doctest::Approx(4.0).epsilon(1e-12));
  for (const auto& term : flat.terms) CHECK(term.std_error == doctest::Approx(0.0));

  // noisy n = 4, D = 1 against the dense oracle at the planner's count
  Rng rng(33);
  Eigen::MatrixXd theta(4, 1);
  for (int i = 0; i < 4; ++i) theta(i, 0) = 0.6 * rng.uniform() - 0.3;
  params.theta = theta;
  params.p_c = params.p_y = 0.98;
  const double eps = 0.05;
  const EnergyEstimate est = estimate_energy(prob, params, eps, 0.05, 77, 2);
  const double truth = dense_energy(prob, params);
  CHECK(std::abs(est.energy - truth) <= eps);

  // determinism at fixed seed and worker count
  const EnergyEstimate again = estimate_energy(prob, params, eps, 0.05, 77, 2);
  CHECK(again.energy == est.energy);
}
