#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_helpers.hpp"
#include "weylsim/weyl_core.hpp"

using namespace weylsim;
using weylsim::testing::max_abs_diff;
using weylsim::testing::random_hermitian;

namespace {

WeylIndex idx1(int a, int b, int d) { return WeylIndex({a}, {b}, d); }

// every (d, n) frame the exactness suite sweeps
const std::vector<std::pair<int, int>> kFrames = {{2, 1}, {2, 2}, {3, 1}, {3, 2}, {5, 1}};

}  // namespace

TEST_CASE("construction rejects invalid input") {
  CHECK_THROWS_AS(WeylIndex({0}, {0}, 4), ValidationError);   // composite d
  CHECK_THROWS_AS(WeylIndex({0}, {0}, 1), ValidationError);
  CHECK_THROWS_AS(WeylIndex({2}, {0}, 2), ValidationError);   // entry out of range
  CHECK_THROWS_AS(WeylIndex({0}, {1, 0}, 2), ValidationError);
  CHECK_THROWS_AS(weyl_mul(idx1(1, 0, 2), idx1(1, 0, 3)), ValidationError);
}

TEST_CASE("string round trip") {
  const WeylIndex w({1, 0}, {0, 1}, 2);
  CHECK(w.to_string() == "10|01");
  CHECK(WeylIndex::parse("10|01", 2) == w);
  CHECK_THROWS_AS(WeylIndex::parse("10|0", 2), ParseError);
  CHECK_THROWS_AS(WeylIndex::parse("1001", 2), ParseError);
}

TEST_CASE("materialize fixed points") {
  CHECK(max_abs_diff(materialize(WeylIndex::identity(3, 2)), Eigen::MatrixXcd::Identity(9, 9)) == 0);

  Eigen::MatrixXcd z2(2, 2);
  z2 << 1, 0, 0, -1;
  CHECK(max_abs_diff(materialize(idx1(1, 0, 2)), z2) < 1e-15);

  Eigen::MatrixXcd x3 = Eigen::MatrixXcd::Zero(3, 3);  // |0>->|1>->|2>->|0>
  x3(1, 0) = x3(2, 1) = x3(0, 2) = 1;
  CHECK(max_abs_diff(materialize(idx1(0, 1, 3)), x3) < 1e-15);

  CHECK_THROWS_AS(materialize(WeylIndex::identity(5, 7)), ResourceError);
}

TEST_CASE("weyl_mul matches the printed examples") {
  auto [p0, w0] = weyl_mul(WeylIndex::identity(3, 2), WeylIndex({1, 2}, {0, 1}, 3));
  CHECK(p0.k == 0);
  CHECK(w0 == WeylIndex({1, 2}, {0, 1}, 3));

  auto [p1, w1] = weyl_mul(idx1(1, 0, 2), idx1(0, 1, 2));  // Z X
  CHECK(p1 == make_phase(0, 2));
  CHECK(w1 == idx1(1, 1, 2));

  auto [p2, w2] = weyl_mul(idx1(0, 1, 2), idx1(1, 0, 2));  // X Z = -ZX
  CHECK(p2 == make_phase(1, 2));
  CHECK(w2 == idx1(1, 1, 2));
}

TEST_CASE("weyl_mul agrees with the dense oracle on every frame") {
  for (auto [d, n] : kFrames) {
    const long count = 1;
    (void)count;
    const long total = static_cast<long>(std::pow(d * d, n));
    for (long i = 0; i < total; ++i)
      for (long j = 0; j < total; ++j) {
        const WeylIndex w1 = WeylIndex::from_linear_index(i, d, n);
        const WeylIndex w2 = WeylIndex::from_linear_index(j, d, n);
        const auto [phase, w3] = weyl_mul(w1, w2);
        const Eigen::MatrixXcd lhs = materialize(w1) * materialize(w2);
        const Eigen::MatrixXcd rhs = phase.value() * materialize(w3);
        REQUIRE(max_abs_diff(lhs, rhs) < 1e-12);
      }
  }
}

TEST_CASE("weyl_conjugate matches the printed examples and the dense oracle") {
  // any w1 conjugating the identity
  CHECK(weyl_conjugate(idx1(1, 1, 3), WeylIndex::identity(3, 1)).k == 0);
  // Z conjugating X at d=2: phase -1
  CHECK(weyl_conjugate(idx1(1, 0, 2), idx1(0, 1, 2)) == make_phase(1, 2));
  // d=3: W_(1,0) conjugating W_(0,2)
  CHECK(weyl_conjugate(idx1(1, 0, 3), idx1(0, 2, 3)) == make_phase(2, 3));

  for (auto [d, n] : kFrames) {
    const long total = static_cast<long>(std::pow(d * d, n));
    for (long i = 0; i < total; ++i)
      for (long j = 0; j < total; ++j) {
        const WeylIndex w1 = WeylIndex::from_linear_index(i, d, n);
        const WeylIndex w2 = WeylIndex::from_linear_index(j, d, n);
        const Eigen::MatrixXcd m1 = materialize(w1);
        const Eigen::MatrixXcd lhs = m1 * materialize(w2) * m1.adjoint();
        const Eigen::MatrixXcd rhs = weyl_conjugate(w1, w2).value() * materialize(w2);
        REQUIRE(max_abs_diff(lhs, rhs) < 1e-12);
      }
  }
}

TEST_CASE("characters: fixed values and orthogonality") {
  const WeylIndex id2 = WeylIndex::identity(2, 1);
  for (long j = 0; j < 4; ++j)
    CHECK(std::abs(character(id2, WeylIndex::from_linear_index(j, 2, 1)) - Complex(1, 0)) < 1e-15);

  CHECK(std::abs(character(idx1(1, 0, 2), idx1(1, 1, 2)) - Complex(-1, 0)) < 1e-15);

  for (auto [d, n] : kFrames) {
    const long total = static_cast<long>(std::pow(d * d, n));
    for (long i = 0; i < total; ++i)
      for (long j = 0; j < total; ++j) {
        const WeylIndex li = WeylIndex::from_linear_index(i, d, n);
        const WeylIndex lj = WeylIndex::from_linear_index(j, d, n);
        Complex acc = 0;
        for (long t = 0; t < total; ++t) {
          const WeylIndex arg = WeylIndex::from_linear_index(t, d, n);
          acc += character(li, arg) * std::conj(character(lj, arg));
        }
        acc /= static_cast<double>(total);
        REQUIRE(std::abs(acc - (i == j ? Complex(1, 0) : Complex(0, 0))) < 1e-12);
      }
  }
}

TEST_CASE("basis orthonormality: tr(Wi^dag Wj) = d^n delta_ij") {
  for (auto [d, n] : kFrames) {
    const long total = static_cast<long>(std::pow(d * d, n));
    const long dim = static_cast<long>(std::pow(d, n));
    for (long i = 0; i < total; ++i) {
      const Eigen::MatrixXcd wi = materialize(WeylIndex::from_linear_index(i, d, n));
      for (long j = 0; j < total; ++j) {
        const Eigen::MatrixXcd wj = materialize(WeylIndex::from_linear_index(j, d, n));
        const Complex t = (wi.adjoint() * wj).trace();
        REQUIRE(std::abs(t - (i == j ? Complex(dim, 0) : Complex(0, 0))) < 1e-10);
      }
    }
  }
}

TEST_CASE("weyl_coefficient: deltas and reconstruction") {
  const int d = 2, n = 2;
  const long total = 16, dim = 4;

  for (long j = 0; j < total; ++j) {
    const WeylIndex w = WeylIndex::from_linear_index(j, d, n);
    const Complex c = weyl_coefficient(Eigen::MatrixXcd::Identity(dim, dim), w);
    CHECK(std::abs(c - (w.is_identity() ? Complex(1, 0) : Complex(0, 0))) < 1e-13);
  }

  const WeylIndex w0 = WeylIndex::from_linear_index(7, d, n);
  for (long j = 0; j < total; ++j) {
    const WeylIndex w = WeylIndex::from_linear_index(j, d, n);
    const Complex c = weyl_coefficient(materialize(w0), w);
    CHECK(std::abs(c - (j == 7 ? Complex(1, 0) : Complex(0, 0))) < 1e-13);
  }

  Rng rng(12345);
  const Eigen::MatrixXcd x = random_hermitian(dim, rng);
  Eigen::MatrixXcd rebuilt = Eigen::MatrixXcd::Zero(dim, dim);
  for (long j = 0; j < total; ++j) {
    const WeylIndex w = WeylIndex::from_linear_index(j, d, n);
    rebuilt += weyl_coefficient(x, w) * materialize(w);
  }
  CHECK(max_abs_diff(rebuilt, x) < 1e-12);

  CHECK_THROWS_AS(weyl_coefficient(Eigen::MatrixXcd::Identity(3, 3), w0), ValidationError);
}

TEST_CASE("phase exponent arithmetic stays exact") {
  CHECK(make_phase(-1, 2) == make_phase(1, 2));
  CHECK((make_phase(1, 2) * make_phase(1, 2)).k == 0);
  CHECK(make_phase(1, 4) * make_phase(1, 4) == make_phase(1, 2));
  CHECK(std::abs(make_phase(1, 4).value() - Complex(0, 1)) < 1e-15);
}
