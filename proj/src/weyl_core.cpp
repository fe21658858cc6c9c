#include "weylsim/weyl_core.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

namespace weylsim {

namespace {

int mod(long x, int m) {
  long r = x % m;
  return static_cast<int>(r < 0 ? r + m : r);
}

void check_same_frame(const WeylIndex& w1, const WeylIndex& w2) {
  if (w1.d() != w2.d() || w1.n() != w2.n())
    throw ValidationError("WeylIndex dimension mismatch: (" + std::to_string(w1.d()) + "," +
                          std::to_string(w1.n()) + ") vs (" + std::to_string(w2.d()) + "," +
                          std::to_string(w2.n()) + ")");
}

}  // namespace

Complex PhaseExponent::value() const {
  const double ang = 2.0 * std::numbers::pi * k / den;
  return {std::cos(ang), std::sin(ang)};
}

PhaseExponent PhaseExponent::operator*(const PhaseExponent& o) const {
  const int l = std::lcm(den, o.den);
  return make_phase(static_cast<long>(k) * (l / den) + static_cast<long>(o.k) * (l / o.den), l);
}

PhaseExponent make_phase(long k, int den) {
  if (den <= 0) throw ValidationError("phase denominator must be positive");
  PhaseExponent p;
  p.den = den;
  p.k = mod(k, den);
  // reduce the fraction so comparisons are canonical
  const int g = std::gcd(p.k == 0 ? den : p.k, den);
  p.k /= g;
  p.den /= g;
  return p;
}

WeylIndex::WeylIndex(std::vector<int> a, std::vector<int> b, int d)
    : a_(std::move(a)), b_(std::move(b)), d_(d) {
  if (!is_prime(d_)) throw ValidationError("qudit dimension must be prime, got " + std::to_string(d_));
  if (a_.empty() || a_.size() != b_.size())
    throw ValidationError("WeylIndex needs matching nonempty a, b vectors");
  for (size_t i = 0; i < a_.size(); ++i) {
    if (a_[i] < 0 || a_[i] >= d_ || b_[i] < 0 || b_[i] >= d_)
      throw ValidationError("WeylIndex entries must lie in [0, d)");
  }
}

WeylIndex WeylIndex::identity(int d, int n) {
  return WeylIndex(std::vector<int>(n, 0), std::vector<int>(n, 0), d);
}

WeylIndex WeylIndex::from_pairs(const std::vector<std::pair<int, int>>& ab, int d) {
  std::vector<int> a, b;
  a.reserve(ab.size());
  b.reserve(ab.size());
  for (auto& [x, y] : ab) {
    a.push_back(x);
    b.push_back(y);
  }
  return WeylIndex(std::move(a), std::move(b), d);
}

bool WeylIndex::is_identity() const {
  for (int i = 0; i < n(); ++i)
    if (a_[i] != 0 || b_[i] != 0) return false;
  return true;
}

long WeylIndex::linear_index() const {
  long idx = 0;
  const long radix = static_cast<long>(d_) * d_;
  for (int i = 0; i < n(); ++i) idx = idx * radix + digit(i);
  return idx;
}

long WeylIndex::linear_index_on(const std::vector<int>& support) const {
  long idx = 0;
  const long radix = static_cast<long>(d_) * d_;
  for (int q : support) idx = idx * radix + digit(q);
  return idx;
}

WeylIndex WeylIndex::from_linear_index(long idx, int d, int n) {
  std::vector<int> a(n), b(n);
  const long radix = static_cast<long>(d) * d;
  for (int i = n - 1; i >= 0; --i) {
    const int digit = static_cast<int>(idx % radix);
    idx /= radix;
    a[i] = digit / d;
    b[i] = digit % d;
  }
  return WeylIndex(std::move(a), std::move(b), d);
}

WeylIndex WeylIndex::restricted_to(const std::vector<int>& support) const {
  std::vector<int> a, b;
  for (int q : support) {
    a.push_back(a_[q]);
    b.push_back(b_[q]);
  }
  return WeylIndex(std::move(a), std::move(b), d_);
}

WeylIndex WeylIndex::negated() const {
  std::vector<int> a(a_), b(b_);
  for (auto& x : a) x = mod(-x, d_);
  for (auto& x : b) x = mod(-x, d_);
  return WeylIndex(std::move(a), std::move(b), d_);
}

std::string WeylIndex::to_string() const {
  if (d_ > 9) throw ValidationError("string form only supports d <= 9");
  std::string s;
  for (int x : a_) s += static_cast<char>('0' + x);
  s += '|';
  for (int x : b_) s += static_cast<char>('0' + x);
  return s;
}

WeylIndex WeylIndex::parse(const std::string& s, int d) {
  const auto bar = s.find('|');
  if (bar == std::string::npos || bar == 0 || bar != s.size() - 1 - bar)
    throw ParseError("malformed Weyl index '" + s + "' (want \"a1..an|b1..bn\")");
  std::vector<int> a, b;
  for (size_t i = 0; i < s.size(); ++i) {
    if (i == bar) continue;
    const char c = s[i];
    if (c < '0' || c > '9') throw ParseError("non-digit in Weyl index '" + s + "'");
    (i < bar ? a : b).push_back(c - '0');
  }
  return WeylIndex(std::move(a), std::move(b), d);
}

std::pair<PhaseExponent, WeylIndex> weyl_mul(const WeylIndex& w1, const WeylIndex& w2) {
  check_same_frame(w1, w2);
  const int d = w1.d();
  long k = 0;
  std::vector<int> a(w1.n()), b(w1.n());
  for (int i = 0; i < w1.n(); ++i) {
    k -= static_cast<long>(w1.b()[i]) * w2.a()[i];
    a[i] = mod(w1.a()[i] + w2.a()[i], d);
    b[i] = mod(w1.b()[i] + w2.b()[i], d);
  }
  return {make_phase(k, d), WeylIndex(std::move(a), std::move(b), d)};
}

PhaseExponent weyl_conjugate(const WeylIndex& w1, const WeylIndex& w2) {
  check_same_frame(w1, w2);
  long k = 0;
  for (int i = 0; i < w1.n(); ++i)
    k += static_cast<long>(w1.a()[i]) * w2.b()[i] - static_cast<long>(w1.b()[i]) * w2.a()[i];
  return make_phase(k, w1.d());
}

int character_exponent(const WeylIndex& label, const WeylIndex& arg) {
  check_same_frame(label, arg);
  long k = 0;
  for (int i = 0; i < label.n(); ++i)
    k += static_cast<long>(label.b()[i]) * arg.a()[i] - static_cast<long>(label.a()[i]) * arg.b()[i];
  return mod(k, label.d());
}

Complex character(const WeylIndex& label, const WeylIndex& arg) {
  return make_phase(character_exponent(label, arg), label.d()).value();
}

long dense_dim(int d, int n) {
  long dim = 1;
  for (int i = 0; i < n; ++i) {
    dim *= d;
    if (dim > kDenseDimCap)
      throw ResourceError("dense dimension d^n exceeds cap " + std::to_string(kDenseDimCap));
  }
  return dim;
}

DenseOperator materialize(const WeylIndex& w) {
  const int d = w.d();
  const long dim = dense_dim(d, w.n());
  // Single-qudit factor: (Z^a X^b)[ (j+b) mod d, j ] = nu^{a ((j+b) mod d)}.
  DenseOperator out = DenseOperator::Identity(1, 1);
  for (int q = 0; q < w.n(); ++q) {
    DenseOperator f = DenseOperator::Zero(d, d);
    for (int j = 0; j < d; ++j) {
      const int row = (j + w.b()[q]) % d;
      f(row, j) = make_phase(static_cast<long>(w.a()[q]) * row, d).value();
    }
    DenseOperator next(out.rows() * d, out.cols() * d);
    for (long r = 0; r < out.rows(); ++r)
      for (long c = 0; c < out.cols(); ++c) next.block(r * d, c * d, d, d) = out(r, c) * f;
    out = std::move(next);
  }
  (void)dim;
  return out;
}

Complex weyl_coefficient(const DenseOperator& x, const WeylIndex& w) {
  const long dim = dense_dim(w.d(), w.n());
  if (x.rows() != dim || x.cols() != dim)
    throw ValidationError("operator size does not match (d, n) of the index");
  return (materialize(w).adjoint() * x).trace() / static_cast<double>(dim);
}

}  // namespace weylsim
