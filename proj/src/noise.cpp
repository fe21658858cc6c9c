#include "weylsim/noise.hpp"

#include <cctype>
#include <cmath>

namespace weylsim {

namespace {

long pow_long(long base, int exp) {
  long r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

int mod(long x, int m) {
  long r = x % m;
  return static_cast<int>(r < 0 ? r + m : r);
}

int mod_inverse(int c, int d) {
  // d prime; Fermat
  long r = 1, b = mod(c, d);
  if (b == 0) throw ValidationError("no inverse of 0 mod d");
  for (int e = d - 2; e > 0; e >>= 1) {
    if (e & 1) r = r * b % d;
    b = b * b % d;
  }
  return static_cast<int>(r);
}

}  // namespace

// ---------------------------------------------------------------------------
// WeylDiagonalChannel

WeylDiagonalChannel::WeylDiagonalChannel(Eigen::VectorXcd eigenvalues, int d, int arity)
    : eig_(std::move(eigenvalues)), d_(d), m_(arity) {
  if (!is_prime(d)) throw ValidationError("qudit dimension must be prime");
  const long dim = pow_long(static_cast<long>(d) * d, arity);
  if (eig_.size() != dim) throw ValidationError("eigenvalue vector has wrong length");
  if (std::abs(eig_[0] - Complex(1, 0)) > 1e-10)
    throw ValidationError("Weyl-diagonal channel must have eigenvalue 1 at the identity");
  for (long t = 0; t < dim; ++t)
    if (std::abs(eig_[t]) > 1.0 + 1e-10)
      throw ValidationError("Weyl-diagonal eigenvalues must have modulus at most 1");
}

WeylDiagonalChannel::CpCheck WeylDiagonalChannel::cp_check(double tol) const {
  const long dim = eig_.size();
  CpCheck out;
  out.p = Eigen::VectorXd(dim);
  out.ok = true;
  // lambda(v) = sum_w p(w) nu^{<a_w,b_v> - <b_w,a_v>}; invert by character
  // orthogonality: p(w) = D^{-1} sum_v conj(phase(w, v)) lambda(v)
  for (long w = 0; w < dim; ++w) {
    const WeylIndex iw = WeylIndex::from_linear_index(w, d_, m_);
    Complex acc = 0;
    for (long v = 0; v < dim; ++v) {
      const WeylIndex iv = WeylIndex::from_linear_index(v, d_, m_);
      acc += std::conj(weyl_conjugate(iw, iv).value()) * eig_[v];
    }
    acc /= static_cast<double>(dim);
    if (std::abs(acc.imag()) > tol) out.ok = false;
    if (acc.real() < -tol) out.ok = false;
    out.p[w] = acc.real();
  }
  if (std::abs(out.p.sum() - 1.0) > 1e-8) out.ok = false;
  return out;
}

WeylDiagonalChannel WeylDiagonalChannel::tensor(const WeylDiagonalChannel& other) const {
  if (d_ != other.d_) throw ValidationError("dimension mismatch");
  Eigen::VectorXcd eig(eig_.size() * other.eig_.size());
  for (long i = 0; i < eig_.size(); ++i)
    for (long j = 0; j < other.eig_.size(); ++j)
      eig[i * other.eig_.size() + j] = eig_[i] * other.eig_[j];
  return WeylDiagonalChannel(std::move(eig), d_, m_ + other.m_);
}

WeylDiagonalChannel depolarizing(double p, int arity, int d) {
  if (p < 0 || p > 1) throw ValidationError("depolarizing parameter out of [0, 1]");
  const long dim = pow_long(static_cast<long>(d) * d, arity);
  Eigen::VectorXcd eig = Eigen::VectorXcd::Constant(dim, p);
  eig[0] = 1.0;
  return WeylDiagonalChannel(std::move(eig), d, arity);
}

WeylDiagonalChannel dephasing(double p, int d) {
  if (p < 0 || p > 1) throw ValidationError("dephasing parameter out of [0, 1]");
  const long dim = static_cast<long>(d) * d;
  Eigen::VectorXcd eig(dim);
  for (long t = 0; t < dim; ++t) eig[t] = (t % d == 0) ? 1.0 : p;  // b = 0 survives
  return WeylDiagonalChannel(std::move(eig), d, 1);
}

// ---------------------------------------------------------------------------
// CliffordGate

CliffordGate CliffordGate::identity(int d, int arity) {
  CliffordGate g(d, arity);
  g.rebuild_symplectic();
  return g;
}

CliffordGate CliffordGate::from_word(const std::vector<CliffordGenerator>& word, int d, int arity,
                                     bool verify_dense) {
  if (!is_prime(d)) throw ValidationError("qudit dimension must be prime");
  CliffordGate g(d, arity);
  for (const auto& gen : word) {
    if (gen.q1 < 0 || gen.q1 >= arity || gen.q2 < 0 || gen.q2 >= arity)
      throw ValidationError("Clifford generator slot out of range");
    if ((gen.kind == CliffordGenerator::Kind::csum ||
         gen.kind == CliffordGenerator::Kind::csum_inv) &&
        gen.q1 == gen.q2)
      throw ValidationError("controlled sum needs distinct slots");
    if (gen.kind == CliffordGenerator::Kind::mult && mod(gen.param, d) == 0)
      throw ValidationError("multiplication gate needs an invertible multiplier");
  }
  g.word_ = word;
  g.rebuild_symplectic();
  if (verify_dense && pow_long(d, arity) <= 32) g.verify_against_dense();
  return g;
}

std::pair<PhaseExponent, WeylIndex> CliffordGate::action(const WeylIndex& w) const {
  if (w.d() != d_ || w.n() != m_) throw ValidationError("index does not match gate support");
  std::vector<int> a = w.a(), b = w.b();
  const int den = d_ == 2 ? 4 : d_;
  long kappa = 0;  // phase exponent over den-th roots
  for (const auto& gen : word_) {
    switch (gen.kind) {
      case CliffordGenerator::Kind::fourier:
      case CliffordGenerator::Kind::fourier_inv: {
        const int q = gen.q1;
        const long ab = static_cast<long>(a[q]) * b[q];
        kappa += (d_ == 2 ? 2 * ab : ab);
        const bool fwd = gen.kind == CliffordGenerator::Kind::fourier;
        const int na = fwd ? b[q] : mod(-b[q], d_);
        const int nb = fwd ? mod(-a[q], d_) : a[q];
        a[q] = na;
        b[q] = nb;
        break;
      }
      case CliffordGenerator::Kind::phase: {
        const int q = gen.q1;
        if (d_ == 2) {
          // S X S^dag = Y = i^3 ZX, so each application contributes i^{3b}
          const int k = mod(gen.param, 4);
          kappa += 3L * k * b[q];
          a[q] = mod(a[q] + static_cast<long>(k) * b[q], 2);
        } else {
          const int k = mod(gen.param, d_);
          const long bb = b[q];
          kappa -= static_cast<long>(k) * (bb * (bb + 1) / 2);
          a[q] = mod(a[q] + static_cast<long>(k) * b[q], d_);
        }
        break;
      }
      case CliffordGenerator::Kind::mult: {
        const int q = gen.q1, c = mod(gen.param, d_);
        a[q] = mod(static_cast<long>(mod_inverse(c, d_)) * a[q], d_);
        b[q] = mod(static_cast<long>(c) * b[q], d_);
        break;
      }
      case CliffordGenerator::Kind::csum: {
        a[gen.q1] = mod(a[gen.q1] - a[gen.q2], d_);
        b[gen.q2] = mod(b[gen.q2] + b[gen.q1], d_);
        break;
      }
      case CliffordGenerator::Kind::csum_inv: {
        a[gen.q1] = mod(a[gen.q1] + a[gen.q2], d_);
        b[gen.q2] = mod(b[gen.q2] - b[gen.q1], d_);
        break;
      }
    }
  }
  return {make_phase(kappa, den), WeylIndex(std::move(a), std::move(b), d_)};
}

void CliffordGate::rebuild_symplectic() {
  symplectic_ = Eigen::MatrixXi::Zero(2 * m_, 2 * m_);
  for (int col = 0; col < 2 * m_; ++col) {
    std::vector<int> a(m_, 0), b(m_, 0);
    if (col < m_)
      a[col] = 1;
    else
      b[col - m_] = 1;
    const auto [phase, img] = action(WeylIndex(std::move(a), std::move(b), d_));
    (void)phase;
    for (int i = 0; i < m_; ++i) {
      symplectic_(i, col) = img.a()[i];
      symplectic_(m_ + i, col) = img.b()[i];
    }
  }
  // the action must preserve the symplectic form mod d
  Eigen::MatrixXi j = Eigen::MatrixXi::Zero(2 * m_, 2 * m_);
  for (int i = 0; i < m_; ++i) {
    j(i, m_ + i) = 1;
    j(m_ + i, i) = d_ - 1;
  }
  const Eigen::MatrixXi lhs = symplectic_.transpose() * j * symplectic_;
  for (int r = 0; r < 2 * m_; ++r)
    for (int c = 0; c < 2 * m_; ++c)
      if (mod(lhs(r, c), d_) != mod(j(r, c), d_))
        throw ValidationError("generator word does not preserve the symplectic form");
}

Eigen::MatrixXcd CliffordGate::dense_unitary() const {
  const long hdim = pow_long(d_, m_);
  if (hdim > kDenseDimCap) throw ResourceError("dense Clifford exceeds cap");
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(hdim, hdim);
  for (const auto& gen : word_) {
    Eigen::MatrixXcd g;
    const int q1 = gen.q1, q2 = gen.q2;
    switch (gen.kind) {
      case CliffordGenerator::Kind::fourier:
      case CliffordGenerator::Kind::fourier_inv: {
        Eigen::MatrixXcd f(d_, d_);
        for (int r = 0; r < d_; ++r)
          for (int c = 0; c < d_; ++c)
            f(r, c) = make_phase(static_cast<long>(r) * c, d_).value() / std::sqrt(double(d_));
        g = gen.kind == CliffordGenerator::Kind::fourier ? f : Eigen::MatrixXcd(f.adjoint());
        break;
      }
      case CliffordGenerator::Kind::phase: {
        Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(d_, d_);
        for (int jj = 0; jj < d_; ++jj)
          p(jj, jj) = d_ == 2 ? (jj == 1 ? Complex(0, 1) : Complex(1, 0))
                              : make_phase(static_cast<long>(jj) * (jj - 1) / 2, d_).value();
        const int k = mod(gen.param, d_ == 2 ? 4 : d_);
        Eigen::MatrixXcd acc = Eigen::MatrixXcd::Identity(d_, d_);
        for (int i = 0; i < k; ++i) acc = acc * p;
        g = acc;
        break;
      }
      case CliffordGenerator::Kind::mult: {
        Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(d_, d_);
        const int c = mod(gen.param, d_);
        for (int jj = 0; jj < d_; ++jj) p(mod(static_cast<long>(c) * jj, d_), jj) = 1;
        g = p;
        break;
      }
      case CliffordGenerator::Kind::csum:
      case CliffordGenerator::Kind::csum_inv: {
        const long dim2 = static_cast<long>(d_) * d_;
        Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(dim2, dim2);
        const int sgn = gen.kind == CliffordGenerator::Kind::csum ? 1 : -1;
        for (int i = 0; i < d_; ++i)
          for (int jj = 0; jj < d_; ++jj) p(i * d_ + mod(jj + sgn * i, d_), i * d_ + jj) = 1;
        g = p;
        break;
      }
    }
    const bool two = gen.kind == CliffordGenerator::Kind::csum ||
                     gen.kind == CliffordGenerator::Kind::csum_inv;
    Eigen::MatrixXcd full = Eigen::MatrixXcd::Zero(hdim, hdim);
    for (long col = 0; col < hdim; ++col) {
      std::vector<int> digits(m_);
      long rem = col;
      for (int i = m_ - 1; i >= 0; --i) {
        digits[i] = static_cast<int>(rem % d_);
        rem /= d_;
      }
      const long loc_c = two ? digits[q1] * d_ + digits[q2] : digits[q1];
      const long loc_dim = two ? static_cast<long>(d_) * d_ : d_;
      for (long loc_r = 0; loc_r < loc_dim; ++loc_r) {
        const Complex e = g(loc_r, loc_c);
        if (e == Complex(0, 0)) continue;
        std::vector<int> rd = digits;
        if (two) {
          rd[q1] = static_cast<int>(loc_r / d_);
          rd[q2] = static_cast<int>(loc_r % d_);
        } else {
          rd[q1] = static_cast<int>(loc_r);
        }
        long row = 0;
        for (int i = 0; i < m_; ++i) row = row * d_ + rd[i];
        full(row, col) = e;
      }
    }
    u = full * u;
  }
  return u;
}

void CliffordGate::verify_against_dense() const {
  const Eigen::MatrixXcd u = dense_unitary();
  const long dim = pow_long(static_cast<long>(d_) * d_, m_);
  for (long t = 0; t < dim; ++t) {
    const WeylIndex w = WeylIndex::from_linear_index(t, d_, m_);
    const auto [phase, img] = action(w);
    const Eigen::MatrixXcd lhs = u * materialize(w) * u.adjoint();
    const Eigen::MatrixXcd rhs = phase.value() * materialize(img);
    if ((lhs - rhs).cwiseAbs().maxCoeff() > 1e-10)
      throw ValidationError("Clifford phase table disagrees with dense conjugation");
  }
}

CliffordGate CliffordGate::compose_after(const CliffordGate& inner) const {
  if (d_ != inner.d_ || m_ != inner.m_) throw ValidationError("Clifford frame mismatch");
  std::vector<CliffordGenerator> word = inner.word_;
  word.insert(word.end(), word_.begin(), word_.end());
  return from_word(word, d_, m_, false);
}

CliffordGate CliffordGate::inverse() const {
  std::vector<CliffordGenerator> word;
  for (auto it = word_.rbegin(); it != word_.rend(); ++it) {
    CliffordGenerator g = *it;
    switch (g.kind) {
      case CliffordGenerator::Kind::fourier:
        g.kind = CliffordGenerator::Kind::fourier_inv;
        break;
      case CliffordGenerator::Kind::fourier_inv:
        g.kind = CliffordGenerator::Kind::fourier;
        break;
      case CliffordGenerator::Kind::phase:
        g.param = -g.param;
        break;
      case CliffordGenerator::Kind::mult:
        g.param = mod_inverse(mod(g.param, d_), d_);
        break;
      case CliffordGenerator::Kind::csum:
        g.kind = CliffordGenerator::Kind::csum_inv;
        break;
      case CliffordGenerator::Kind::csum_inv:
        g.kind = CliffordGenerator::Kind::csum;
        break;
    }
    word.push_back(g);
  }
  return from_word(word, d_, m_, false);
}

LocalSuperOp CliffordGate::to_superop() const {
  const long dim = pow_long(static_cast<long>(d_) * d_, m_);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (long c = 0; c < dim; ++c) {
    const auto [phase, img] = action(WeylIndex::from_linear_index(c, d_, m_));
    m(img.linear_index(), c) = phase.value();
  }
  return LocalSuperOp::from_matrix(std::move(m), d_, m_, Basis::weyl, m_);
}

namespace {

// "P(0,2)" -> name "P", args {0, 2}
void parse_token(const std::string& tok, std::string& name, std::vector<int>& args) {
  name.clear();
  args.clear();
  size_t i = 0;
  while (i < tok.size() && std::isalpha(static_cast<unsigned char>(tok[i]))) name += tok[i++];
  if (i >= tok.size() || tok[i] != '(' || tok.back() != ')')
    throw ParseError("malformed Clifford token '" + tok + "'");
  const std::string inner = tok.substr(i + 1, tok.size() - i - 2);
  size_t start = 0;
  while (start <= inner.size()) {
    const size_t comma = inner.find(',', start);
    const std::string piece =
        inner.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (piece.empty()) throw ParseError("malformed Clifford token '" + tok + "'");
    try {
      args.push_back(std::stoi(piece));
    } catch (const std::exception&) {
      throw ParseError("bad integer in Clifford token '" + tok + "'");
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
}

}  // namespace

CliffordGate CliffordGate::parse(const std::string& word, int d, int arity) {
  std::vector<CliffordGenerator> gens;
  size_t start = 0;
  while (start < word.size()) {
    size_t end = word.find(';', start);
    if (end == std::string::npos) end = word.size();
    std::string tok = word.substr(start, end - start);
    while (!tok.empty() && std::isspace(static_cast<unsigned char>(tok.front()))) tok.erase(tok.begin());
    while (!tok.empty() && std::isspace(static_cast<unsigned char>(tok.back()))) tok.pop_back();
    start = end + 1;
    if (tok.empty()) continue;
    std::string name;
    std::vector<int> args;
    parse_token(tok, name, args);
    using K = CliffordGenerator::Kind;
    if (name == "F" && args.size() == 1) {
      gens.push_back({K::fourier, args[0], 0, 1});
    } else if (name == "Finv" && args.size() == 1) {
      gens.push_back({K::fourier_inv, args[0], 0, 1});
    } else if (name == "P" && (args.size() == 1 || args.size() == 2)) {
      gens.push_back({K::phase, args[0], 0, args.size() == 2 ? args[1] : 1});
    } else if (name == "M" && args.size() == 2) {
      gens.push_back({K::mult, args[0], 0, args[1]});
    } else if (name == "CSUM" && args.size() == 2) {
      gens.push_back({K::csum, args[0], args[1], 1});
    } else if (name == "CSUMinv" && args.size() == 2) {
      gens.push_back({K::csum_inv, args[0], args[1], 1});
    } else if (name == "SWAP" && args.size() == 2) {
      gens.push_back({K::csum, args[0], args[1], 1});
      gens.push_back({K::csum_inv, args[1], args[0], 1});
      gens.push_back({K::csum, args[0], args[1], 1});
      if (d > 2) gens.push_back({K::mult, args[0], 0, d - 1});
    } else {
      throw ParseError("unknown Clifford token '" + tok + "'");
    }
  }
  return from_word(gens, d, arity);
}

std::pair<Complex, WeylIndex> clifford_action(const CliffordGate& g, const WeylIndex& w) {
  auto [phase, img] = g.action(w);
  return {phase.value(), img};
}

// ---------------------------------------------------------------------------
// Mapping solver

namespace {

// Word mapping w (non-identity) to X on slot 0, appended to `gens`.
void reduce_to_x0(const WeylIndex& w, std::vector<CliffordGenerator>& gens) {
  using K = CliffordGenerator::Kind;
  const int d = w.d();
  std::vector<int> a = w.a(), b = w.b();
  int pivot = -1;
  for (int q = 0; q < w.n(); ++q)
    if (a[q] != 0 || b[q] != 0) {
      pivot = q;
      break;
    }
  if (pivot < 0) throw ValidationError("cannot map the identity label");

  auto make_pure_x = [&](int q) {
    if (b[q] == 0) {
      gens.push_back({K::fourier, q, 0, 1});
      b[q] = mod(-a[q], d);
      a[q] = 0;
    } else if (a[q] != 0) {
      const int k = mod(-static_cast<long>(a[q]) * mod_inverse(b[q], d), d);
      gens.push_back({K::phase, q, 0, k});
      a[q] = 0;
    }
  };

  make_pure_x(pivot);
  if (b[pivot] != 1) {
    gens.push_back({K::mult, pivot, 0, mod_inverse(b[pivot], d)});
    b[pivot] = 1;
  }
  for (int q = 0; q < w.n(); ++q) {
    if (q == pivot || (a[q] == 0 && b[q] == 0)) continue;
    make_pure_x(q);
    const int reps = mod(-b[q], d);
    for (int i = 0; i < reps; ++i) gens.push_back({K::csum, pivot, q, 1});
    b[q] = 0;
  }
  if (pivot != 0) {  // swap pivot into slot 0
    gens.push_back({K::csum, pivot, 0, 1});
    gens.push_back({K::csum_inv, 0, pivot, 1});
    gens.push_back({K::csum, pivot, 0, 1});
    if (d > 2) gens.push_back({K::mult, pivot, 0, d - 1});
  }
}

}  // namespace

CliffordGate solve_clifford_mapping(const WeylIndex& w1, const WeylIndex& w2) {
  if (w1.d() != w2.d() || w1.n() != w2.n()) throw ValidationError("label frames differ");
  if (w1.is_identity() || w2.is_identity())
    throw ValidationError("the mapping solver needs non-identity labels on both sides");
  if (w1 == w2) return CliffordGate::identity(w1.d(), w1.n());

  std::vector<CliffordGenerator> g1, g2;
  reduce_to_x0(w1, g1);
  reduce_to_x0(w2, g2);
  const CliffordGate fwd = CliffordGate::from_word(g1, w1.d(), w1.n(), false);
  const CliffordGate back = CliffordGate::from_word(g2, w1.d(), w1.n(), false).inverse();
  const CliffordGate c = back.compose_after(fwd);
  const auto [phase, img] = c.action(w1);
  (void)phase;
  if (!(img == w2)) throw ValidationError("mapping solver failed to land on the target label");
  return c;
}

// ---------------------------------------------------------------------------
// Twirl, gap, rotations

WeylDiagonalChannel twirl(const LocalSuperOp& op) {
  if (op.basis() != Basis::weyl) throw ValidationError("twirl needs the Weyl basis");
  Eigen::VectorXcd eig = op.matrix().diagonal();
  // a twirled quantum channel keeps eigenvalue 1 at the identity; absorb
  // numerical residue there so the diagonal-channel invariant holds
  if (std::abs(eig[0] - Complex(1, 0)) < 1e-8) eig[0] = 1.0;
  return WeylDiagonalChannel(std::move(eig), op.d(), op.arity());
}

double weyl_spectral_gap(const WeylDiagonalChannel& channel) {
  double top = 0;
  for (long t = 1; t < channel.eigenvalues().size(); ++t)
    top = std::max(top, std::abs(channel.eigenvalues()[t]));
  return 1.0 - top;
}

double weyl_spectral_gap(const LocalSuperOp& op) {
  double top = 0;
  for (long t = 1; t < op.dim(); ++t) top = std::max(top, std::abs(op.matrix()(t, t)));
  return 1.0 - top;
}

LocalSuperOp rotation_superop(double theta) {
  // digits: 0 = I, 1 = X, 2 = Z, 3 = ZX; Y = i ZX is fixed by the rotation
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(4, 4);
  const double c = std::cos(theta), s = std::sin(theta);
  m(0, 0) = 1;
  m(3, 3) = 1;
  m(1, 1) = c;
  m(2, 1) = -s;
  m(2, 2) = c;
  m(1, 2) = s;
  return LocalSuperOp::from_matrix(std::move(m), 2, 1);
}

}  // namespace weylsim
