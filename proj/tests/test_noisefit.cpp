#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "test_helpers.hpp"
#include "weylsim/noisefit.hpp"

using namespace weylsim;
using namespace weylsim::testing;

namespace {

Hypergraph path3() { return Hypergraph(3, {{0, 1}, {1, 2}}); }

std::vector<Measurement> noiseless_measurements(const LocalNoiseModel& model,
                                                const std::vector<WeylIndex>& labels) {
  std::vector<Measurement> ms;
  for (const WeylIndex& w : labels) ms.push_back({w, model.induced_eigenvalue(w), Complex(1, 0)});
  return ms;
}

}  // namespace

TEST_CASE("hypergraph validation and parameter counting") {
  CHECK_THROWS_AS(Hypergraph(2, {{}}), ValidationError);
  CHECK_THROWS_AS(Hypergraph(2, {{0, 2}}), ValidationError);
  CHECK_THROWS_AS(Hypergraph(3, {{0, 1}, {1, 0}}), ValidationError);  // duplicate after sorting

  CHECK(parameter_count(Hypergraph(2, {{0, 1}}), 2) == 16);
  CHECK(parameter_count(Hypergraph(4, {}), 3) == 0);
  // complete 2-uniform graph on n vertices: C(n,2) d^4
  std::vector<std::vector<int>> edges;
  const int n = 4;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) edges.push_back({i, j});
  CHECK(parameter_count(Hypergraph(n, edges), 3) == 6 * 81);
}

TEST_CASE("induced eigenvalues: normalization, circle example, dense oracle") {
  // 4-qudit circle with uniform quarter weights of W_(1,0) x W_(1,0) conjugations
  const Hypergraph circle(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}});
  std::vector<Eigen::VectorXcd> tables;
  const WeylIndex gate({1, 1}, {0, 0}, 2);
  for (int e = 0; e < 4; ++e) {
    Eigen::VectorXcd f(16);
    for (long t = 0; t < 16; ++t)
      f[t] = 0.25 * weyl_conjugate(gate, WeylIndex::from_linear_index(t, 2, 2)).value();
    tables.push_back(f);
  }
  const LocalNoiseModel model(circle, 2, tables);
  CHECK(std::abs(model.induced_eigenvalue(WeylIndex::identity(2, 4)) - Complex(1, 0)) < 1e-12);

  // eigenvalue at any label is the quarter-sum of four conjugation phases
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const WeylIndex w = WeylIndex::from_linear_index(rng.uniform_int(256), 2, 4);
    Complex want = 0;
    for (const auto& e : circle.edges)
      want += 0.25 * weyl_conjugate(gate, w.restricted_to(e)).value();
    CHECK(std::abs(model.induced_eigenvalue(w) - want) < 1e-12);
  }

  // random model against the dense conjugation-mixture oracle
  const Hypergraph g = path3();
  Rng mrng(17);
  const LocalNoiseModel rnd = random_mixture_model(g, 2, mrng);
  const WeylDiagonalChannel ch = rnd.to_diagonal_channel();
  CHECK(ch.cp_check(1e-8).ok);
  for (long t = 0; t < 64; ++t) {
    const WeylIndex w = WeylIndex::from_linear_index(t, 2, 3);
    CHECK(std::abs(ch.eigenvalue(w) - rnd.induced_eigenvalue(w)) < 1e-12);
  }
}

TEST_CASE("build_fit structure") {
  const Hypergraph g = path3();
  // identity-only measurement: one normalization row plus gauge rows
  const WeylIndex id = WeylIndex::identity(2, 3);
  const FitProblem p = build_fit(g, 2, {{id, Complex(1, 0), Complex(1, 0)}});
  CHECK(p.measurement_rows == 1);
  CHECK(p.underdetermined);
  CHECK(p.a.cols() == 32);
  // the identity row touches exactly the identity column of each edge
  CHECK(std::abs(p.a(0, 0) - Complex(1, 0)) < 1e-14);
  CHECK(std::abs(p.a(0, 16) - Complex(1, 0)) < 1e-14);
  CHECK(std::abs(p.b[0] - Complex(1, 0)) < 1e-14);

  // zero unitary diagonal is rejected with Clifford-trick guidance
  CHECK_THROWS_WITH_AS(build_fit(g, 2, {{id, Complex(1, 0), Complex(0, 0)}}),
                       doctest::Contains("Clifford trick"), ValidationError);
}

TEST_CASE("default schedule spans and the fit recovers exactly") {
  for (const Hypergraph& g : {path3(), Hypergraph(4, {{0, 1}, {1, 2}, {2, 3}}),
                              Hypergraph(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}}),
                              Hypergraph(3, {{0, 1}, {1, 2}, {0, 2}})}) {
    Rng rng(101 + g.n + g.edges.size());
    const LocalNoiseModel model = random_mixture_model(g, 2, rng).canonicalized();
    const auto schedule = default_label_schedule(g, 2);
    const FitProblem p = build_fit(g, 2, noiseless_measurements(model, schedule));
    const FitSolution sol = solve_fit(p);
    const Eigen::VectorXcd truth = model.stacked_parameters();
    CHECK((sol.parameters - truth).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(sol.residual < 1e-10);
  }
  // d = 3 single edge
  const Hypergraph g3(2, {{0, 1}});
  Rng rng(7);
  const LocalNoiseModel model = random_mixture_model(g3, 3, rng).canonicalized();
  const auto schedule = default_label_schedule(g3, 3);
  const FitProblem p = build_fit(g3, 3, noiseless_measurements(model, schedule));
  const FitSolution sol = solve_fit(p);
  CHECK((sol.parameters - model.stacked_parameters()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("rank deficiency reports unidentifiable combinations") {
  const Hypergraph g = path3();
  // only edge-0 labels measured: edge-1 parameters are unconstrained
  std::vector<WeylIndex> labels;
  for (long t = 0; t < 16; ++t) {
    const WeylIndex local = WeylIndex::from_linear_index(t, 2, 2);
    labels.push_back(WeylIndex({local.a()[0], local.a()[1], 0}, {local.b()[0], local.b()[1], 0}, 2));
  }
  Rng rng(5);
  const LocalNoiseModel model = random_mixture_model(g, 2, rng);
  FitProblem p = build_fit(g, 2, noiseless_measurements(model, labels));
  CHECK_THROWS_WITH_AS(solve_fit(p), doctest::Contains("unidentifiable"), ValidationError);
}

TEST_CASE("stability bound") {
  // identity system: bound = eps |1 - mu|^2
  FitProblem p;
  p.a = Eigen::MatrixXcd::Identity(4, 4);
  p.b = Eigen::VectorXcd::Zero(4);
  p.column_names = {"a", "b", "c", "d"};
  CHECK(stability_bound(p, 0.1, 0.8) == doctest::Approx(0.1 * 0.04));

  // hand-computed 4x3 fixture: M = (A^T A)^{-1} A^T
  FitProblem q;
  q.a = Eigen::MatrixXcd::Zero(4, 3);
  q.a(0, 0) = 1;
  q.a(1, 1) = 2;
  q.a(2, 2) = 4;
  q.a(3, 2) = 3;
  q.b = Eigen::VectorXcd::Zero(4);
  // M rows: (1,0,0,0), (0,0.5,0,0), (0,0,4/25,3/25): column sums:
  // {1, 0.5, 4/25, 3/25} -> max 1; row sums: {1, 0.5, 7/25}
  const StabilityNorms norms = stability_norms(q);
  CHECK(norms.column_sum == doctest::Approx(1.0));
  CHECK(norms.row_sum == doctest::Approx(1.0));
  CHECK(stability_bound(q, 0.2, 0.5) == doctest::Approx(0.2 * 0.25 * norms.column_sum));

  // monotone in eps
  CHECK(stability_bound(q, 0.4, 0.5) == doctest::Approx(2 * stability_bound(q, 0.2, 0.5)));
}

TEST_CASE("noisy round trip stays within the stability bound") {
  const Hypergraph g = path3();
  Rng rng(2025);
  const LocalNoiseModel model = random_mixture_model(g, 2, rng).canonicalized();
  const auto schedule = default_label_schedule(g, 2);

  // true mu values and their sup norm over non-identity labels
  double mu_inf = 0;
  for (const WeylIndex& w : schedule)
    if (!w.is_identity()) mu_inf = std::max(mu_inf, std::abs(model.induced_eigenvalue(w)));
  REQUIRE(mu_inf < 1.0);

  const double eps = 0.02;
  const double radius = eps * std::abs(1 - mu_inf) * std::abs(1 - mu_inf);
  int hits = 0;
  const int reps = 30;
  for (int rep = 0; rep < reps; ++rep) {
    Rng nrng(9000 + rep);
    std::vector<Measurement> ms;
    for (const WeylIndex& w : schedule) {
      Complex mu = model.induced_eigenvalue(w);
      if (!w.is_identity()) {
        // the identity row is exact prior knowledge; others carry noise
        mu += radius * Complex(2 * nrng.uniform() - 1, 0);
      }
      ms.push_back({w, mu, Complex(1, 0)});
    }
    const FitProblem p = build_fit(g, 2, ms);
    const FitSolution sol = solve_fit(p);
    const double err = (sol.parameters - model.stacked_parameters()).cwiseAbs().maxCoeff();
    if (err <= stability_bound(p, eps, mu_inf)) ++hits;
  }
  CHECK(hits >= 27);  // >= 90%
}
