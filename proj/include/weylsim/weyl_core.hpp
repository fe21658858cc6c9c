#pragma once

// Exact arithmetic for the projective Weyl-Heisenberg group on n qudits of
// prime dimension d, plus the dense-matrix oracle every property test checks
// against.
//
// Conventions, fixed once and derived from the definition W_{(a,b)} = Z^a X^b
// with Z|j> = nu^j |j>, X|j> = |j+1 mod d>, nu = exp(2 pi i / d):
//
//   W_{(a1,b1)} W_{(a2,b2)}       = nu^{-<b1,a2>}        W_{(a1+a2, b1+b2)}
//   W_{(a1,b1)} W_{(a2,b2)} W^dag = nu^{<a1,b2>-<b1,a2>} W_{(a2,b2)}
//
// Phases are kept as exact integers mod d; complex values appear only at
// evaluation boundaries.

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "weylsim/common.hpp"

namespace weylsim {

using DenseOperator = Eigen::MatrixXcd;

// Scalar nu^k with nu = exp(2 pi i / den). Group ops return den = d; Clifford
// conjugation phases at d = 2 need den = 4 (fourth roots).
struct PhaseExponent {
  int k = 0;
  int den = 1;

  Complex value() const;
  PhaseExponent operator*(const PhaseExponent& o) const;
  bool operator==(const PhaseExponent& o) const = default;
};

PhaseExponent make_phase(long k, int den);

// Label (a, b) in (Z_d)^{2n} of a tensor-product Weyl operator.
class WeylIndex {
 public:
  WeylIndex(std::vector<int> a, std::vector<int> b, int d);
  static WeylIndex identity(int d, int n);
  // Single qudit pair list: {(a_0,b_0), ..., (a_{n-1},b_{n-1})}.
  static WeylIndex from_pairs(const std::vector<std::pair<int, int>>& ab, int d);

  int d() const { return d_; }
  int n() const { return static_cast<int>(a_.size()); }
  const std::vector<int>& a() const { return a_; }
  const std::vector<int>& b() const { return b_; }
  bool is_identity() const;

  // Digit a_i*d + b_i of qudit i; used as the per-qudit symbol everywhere.
  int digit(int i) const { return a_[i] * d_ + b_[i]; }
  // Mixed-radix linear index over the given support (radix d^2, first qudit
  // most significant). Support defaults to all qudits.
  long linear_index() const;
  long linear_index_on(const std::vector<int>& support) const;
  static WeylIndex from_linear_index(long idx, int d, int n);

  WeylIndex restricted_to(const std::vector<int>& support) const;
  WeylIndex negated() const;  // (-a, -b) mod d

  bool operator==(const WeylIndex& o) const = default;

  // Serialized as "a1...an|b1...bn" in base-d digits, e.g. "10|01".
  std::string to_string() const;
  static WeylIndex parse(const std::string& s, int d);

 private:
  std::vector<int> a_, b_;
  int d_;
};

// W1 * W2 = nu^k * W3.
std::pair<PhaseExponent, WeylIndex> weyl_mul(const WeylIndex& w1, const WeylIndex& w2);

// W1 W2 W1^dag = nu^k W2, k = sum_i (a1_i b2_i - b1_i a2_i) mod d.
// (Derived from W = Z^a X^b via the dense oracle; see tests.)
PhaseExponent weyl_conjugate(const WeylIndex& w1, const WeylIndex& w2);

// chi_{(a,b)}(a0,b0) = exp(i 2pi/d (<b,a0> - <a,b0>)).
int character_exponent(const WeylIndex& label, const WeylIndex& arg);
Complex character(const WeylIndex& label, const WeylIndex& arg);

// Tensor product of Z^{a_i} X^{b_i} factors as a dense matrix. Qudit 0 is the
// most significant tensor factor. Throws ResourceError beyond kDenseDimCap.
DenseOperator materialize(const WeylIndex& w);

// d^{-n} tr(W^dag X).
Complex weyl_coefficient(const DenseOperator& x, const WeylIndex& w);

long dense_dim(int d, int n);  // d^n with overflow/cap check

}  // namespace weylsim
