#include "weylsim/reps.hpp"

#include <algorithm>
#include <cmath>

namespace weylsim {

namespace {

long pow_long(long base, int exp) {
  long r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

// Snap components to exact 0 and +-1 within the tolerance so Clifford
// superoperators stay exact signed permutations with column norms of 1.
void snap_small(Eigen::MatrixXcd& m) {
  const double scale = m.cwiseAbs().maxCoeff();
  if (scale == 0) return;
  const double thr = scale * kEntrySnapTol;
  auto snap = [thr](double x) {
    if (std::abs(x) < thr) return 0.0;
    if (std::abs(x - 1.0) < thr) return 1.0;
    if (std::abs(x + 1.0) < thr) return -1.0;
    return x;
  };
  for (long c = 0; c < m.cols(); ++c)
    for (long r = 0; r < m.rows(); ++r) {
      Complex& z = m(r, c);
      z = Complex(snap(z.real()), snap(z.imag()));
    }
}

void check_density_matrix(const Eigen::MatrixXcd& rho, int d) {
  if (rho.rows() != d || rho.cols() != d) throw ValidationError("state factor must be d x d");
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
    throw ValidationError("state factor is not Hermitian");
  if (std::abs(rho.trace() - Complex(1, 0)) > 1e-10)
    throw ValidationError("state factor must have unit trace");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
  if (es.eigenvalues().minCoeff() < -1e-10)
    throw ValidationError("state factor is not positive semidefinite");
}

// digit i of a mixed-radix index (radix d^2), position 0 most significant
int radix_digit(long idx, int pos, int count, long radix) {
  for (int i = count - 1; i > pos; --i) idx /= radix;
  return static_cast<int>(idx % radix);
}

}  // namespace

// ---------------------------------------------------------------------------
// WeylVector

WeylVector WeylVector::state_from_factors(const std::vector<Eigen::MatrixXcd>& factors, int d,
                                          Basis basis) {
  if (factors.empty()) throw ValidationError("state needs at least one factor");
  WeylVector v(VectorKind::state, basis, d, static_cast<int>(factors.size()));
  const long d2 = static_cast<long>(d) * d;
  for (int q = 0; q < v.n_; ++q) {
    check_density_matrix(factors[q], d);
    Block blk;
    blk.support = {q};
    blk.entries.resize(d2);
    for (long t = 0; t < d2; ++t) {
      const Eigen::MatrixXcd b = LocalSuperOp::basis_element(t, d, 1, basis);
      blk.entries[t] = (b.adjoint() * factors[q]).trace();  // state gauge: no prefactor
    }
    v.blocks_.push_back(std::move(blk));
  }
  v.finalize();
  return v;
}

WeylVector WeylVector::observable_from_blocks(
    int d, int n, const std::vector<std::pair<std::vector<int>, Eigen::MatrixXcd>>& blocks,
    Basis basis) {
  WeylVector v(VectorKind::observable, basis, d, n);
  std::vector<bool> used(n, false);
  for (const auto& [support, op] : blocks) {
    const int m = static_cast<int>(support.size());
    if (m == 0) throw ValidationError("observable block needs a nonempty support");
    for (int q : support) {
      if (q < 0 || q >= n) throw ValidationError("observable block support out of range");
      if (used[q]) throw ValidationError("observable blocks must have disjoint supports");
      used[q] = true;
    }
    const long dim = pow_long(d, m);
    if (op.rows() != dim || op.cols() != dim)
      throw ValidationError("observable block size does not match its support");
    if ((op - op.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, op.cwiseAbs().maxCoeff()))
      throw ValidationError("observable block is not Hermitian");
    Block blk;
    blk.support = support;
    const long d2m = pow_long(static_cast<long>(d) * d, m);
    blk.entries.resize(d2m);
    const double w = basis == Basis::weyl ? 1.0 / static_cast<double>(dim) : 1.0;
    for (long t = 0; t < d2m; ++t) {
      const Eigen::MatrixXcd b = LocalSuperOp::basis_element(t, d, m, basis);
      blk.entries[t] = w * (b.adjoint() * op).trace();  // observable gauge: d^{-m}
    }
    v.blocks_.push_back(std::move(blk));
  }
  v.finalize();
  return v;
}

WeylVector WeylVector::observable_weyl_operator(const WeylIndex& w) {
  WeylVector v(VectorKind::observable, Basis::weyl, w.d(), w.n());
  const long d2 = static_cast<long>(w.d()) * w.d();
  for (int q = 0; q < w.n(); ++q) {
    Block blk;
    blk.support = {q};
    blk.entries = Eigen::VectorXcd::Zero(d2);
    blk.entries[w.digit(q)] = 1.0;
    v.blocks_.push_back(std::move(blk));
  }
  v.finalize();
  return v;
}

void WeylVector::finalize() {
  block_of_.assign(n_, -1);
  l1_ = 1.0;
  linf_ = 1.0;
  for (size_t i = 0; i < blocks_.size(); ++i) {
    Block& blk = blocks_[i];
    for (int q : blk.support) block_of_[q] = static_cast<int>(i);
    blk.l1 = blk.entries.cwiseAbs().sum();
    blk.linf = blk.entries.cwiseAbs().maxCoeff();
    std::vector<double> w(blk.entries.size());
    for (long t = 0; t < blk.entries.size(); ++t) w[t] = std::abs(blk.entries[t]);
    blk.alias = AliasTable(w);
    l1_ *= blk.l1;
    linf_ *= blk.linf;
  }
  // identity factors on uncovered qudits
  for (int q = 0; q < n_; ++q) {
    if (block_of_[q] != -1) continue;
    if (kind_ == VectorKind::state)
      throw ValidationError("state vector must cover every qudit");
    if (basis_ == Basis::computational) l1_ *= d_;  // identity spreads over the diagonal
  }
}

Complex WeylVector::entry(const WeylIndex& w) const {
  if (w.d() != d_ || w.n() != n_) throw ValidationError("index does not match vector frame");
  std::vector<int> digits(n_);
  for (int q = 0; q < n_; ++q) digits[q] = w.digit(q);
  return entry_digits(digits);
}

Complex WeylVector::entry_digits(const std::vector<int>& digits) const {
  Complex val = 1.0;
  for (const Block& blk : blocks_) {
    long idx = 0;
    const long radix = static_cast<long>(d_) * d_;
    for (int q : blk.support) idx = idx * radix + digits[q];
    val *= blk.entries[idx];
    if (val == Complex(0, 0)) return val;
  }
  for (int q = 0; q < n_; ++q) {
    if (block_of_[q] != -1) continue;
    const int x = digits[q] / d_, y = digits[q] % d_;
    const bool identity_hit = basis_ == Basis::weyl ? digits[q] == 0 : x == y;
    if (!identity_hit) return {0, 0};
  }
  return val;
}

Complex WeylVector::terminal_weight_digits(const std::vector<int>& digits) const {
  const Complex e = entry_digits(digits);
  return kind_ == VectorKind::observable ? std::conj(e) : e;
}

WeylVector::Draw WeylVector::sample(Rng& rng) const {
  Draw out;
  out.digits.assign(n_, 0);
  Complex sign = 1.0;
  for (const Block& blk : blocks_) {
    if (blk.alias.empty()) throw ValidationError("cannot sample from an all-zero block");
    const long t = blk.alias.sample(rng);
    long idx = t;
    const long radix = static_cast<long>(d_) * d_;
    for (int i = static_cast<int>(blk.support.size()) - 1; i >= 0; --i) {
      out.digits[blk.support[i]] = static_cast<int>(idx % radix);
      idx /= radix;
    }
    const Complex e = blk.entries[t];
    sign *= e / std::abs(e);
  }
  for (int q = 0; q < n_; ++q) {
    if (block_of_[q] != -1) continue;
    if (basis_ == Basis::weyl) {
      out.digits[q] = 0;
    } else {
      const int i = static_cast<int>(rng.uniform_int(d_));
      out.digits[q] = i * d_ + i;
    }
  }
  out.sign = kind_ == VectorKind::observable ? std::conj(sign) : sign;
  return out;
}

std::vector<std::pair<WeylIndex, Complex>> WeylVector::nonzero_amplitudes() const {
  const long total = pow_long(static_cast<long>(d_) * d_, n_);
  if (total > 1 << 20) throw ResourceError("vector too large to enumerate");
  std::vector<std::pair<WeylIndex, Complex>> out;
  for (long idx = 0; idx < total; ++idx) {
    const WeylIndex w = WeylIndex::from_linear_index(idx, d_, n_);
    const Complex e = entry(w);
    if (std::abs(e) > 0) out.emplace_back(w, e);
  }
  return out;
}

// ---------------------------------------------------------------------------
// LocalSuperOp

LocalSuperOp::LocalSuperOp(Eigen::MatrixXcd m, int d, int arity, Basis basis)
    : mat_(std::move(m)), d_(d), m_(arity), basis_(basis) {
  build_tables();
}

Eigen::MatrixXcd LocalSuperOp::basis_element(long idx, int d, int m, Basis basis) {
  if (basis == Basis::weyl) return materialize(WeylIndex::from_linear_index(idx, d, m));
  const long dim = pow_long(d, m);
  long ket = 0, bra = 0;
  const long radix = static_cast<long>(d) * d;
  for (int q = 0; q < m; ++q) {
    const int digit = radix_digit(idx, q, m, radix);
    ket = ket * d + digit / d;
    bra = bra * d + digit % d;
  }
  Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(dim, dim);
  b(ket, bra) = 1.0;
  return b;
}

LocalSuperOp LocalSuperOp::from_matrix(Eigen::MatrixXcd m, int d, int arity, Basis basis,
                                       int arity_cap) {
  if (!is_prime(d)) throw ValidationError("qudit dimension must be prime");
  if (arity < 1 || arity > arity_cap)
    throw ValidationError("channel arity " + std::to_string(arity) + " exceeds the local-arity cap " +
                          std::to_string(arity_cap));
  const long dim = pow_long(static_cast<long>(d) * d, arity);
  if (dim > kDenseDimCap) throw ResourceError("superoperator dimension exceeds cap");
  if (m.rows() != dim || m.cols() != dim)
    throw ValidationError("superoperator matrix has wrong dimensions");
  return LocalSuperOp(std::move(m), d, arity, basis);
}

LocalSuperOp LocalSuperOp::from_kraus(const std::vector<Eigen::MatrixXcd>& kraus, int d, int arity,
                                      Basis basis, int arity_cap) {
  if (kraus.empty()) throw ValidationError("need at least one Kraus operator");
  if (arity < 1 || arity > arity_cap)
    throw ValidationError("channel arity exceeds the local-arity cap");
  const long hdim = pow_long(d, arity);
  const long dim = pow_long(static_cast<long>(d) * d, arity);
  if (dim > kDenseDimCap) throw ResourceError("superoperator dimension exceeds cap");
  for (const auto& k : kraus)
    if (k.rows() != hdim || k.cols() != hdim) throw ValidationError("Kraus operator has wrong size");

  std::vector<Eigen::MatrixXcd> basis_ops(dim);
  for (long t = 0; t < dim; ++t) basis_ops[t] = basis_element(t, d, arity, basis);
  const double w = basis == Basis::weyl ? 1.0 / static_cast<double>(hdim) : 1.0;

  Eigen::MatrixXcd m(dim, dim);
  for (long c = 0; c < dim; ++c) {
    Eigen::MatrixXcd img = Eigen::MatrixXcd::Zero(hdim, hdim);
    for (const auto& k : kraus) img += k * basis_ops[c] * k.adjoint();
    for (long r = 0; r < dim; ++r) m(r, c) = w * (basis_ops[r].adjoint() * img).trace();
  }

  LocalSuperOp op(std::move(m), d, arity, basis);
  Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(hdim, hdim);
  for (const auto& k : kraus) sum += k.adjoint() * k;
  op.cptp_ = (sum - Eigen::MatrixXcd::Identity(hdim, hdim)).cwiseAbs().maxCoeff() <= 1e-8;
  return op;
}

LocalSuperOp LocalSuperOp::from_unitary(const Eigen::MatrixXcd& u, int d, int arity, Basis basis,
                                        int arity_cap) {
  return from_kraus({u}, d, arity, basis, arity_cap);
}

LocalSuperOp LocalSuperOp::from_diagonal(const Eigen::VectorXcd& eigenvalues, int d, int arity) {
  const long dim = pow_long(static_cast<long>(d) * d, arity);
  if (eigenvalues.size() != dim) throw ValidationError("diagonal has wrong length");
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  m.diagonal() = eigenvalues;
  return LocalSuperOp(std::move(m), d, arity, Basis::weyl);
}

LocalSuperOp LocalSuperOp::identity(int d, int arity, Basis basis) {
  const long dim = pow_long(static_cast<long>(d) * d, arity);
  return LocalSuperOp(Eigen::MatrixXcd::Identity(dim, dim), d, arity, basis);
}

void LocalSuperOp::build_tables() {
  snap_small(mat_);
  const long dim = mat_.cols();
  col_l1_.resize(dim);
  col_alias_.resize(dim);
  std::vector<double> w(dim);
  for (long c = 0; c < dim; ++c) {
    double s = 0;
    for (long r = 0; r < dim; ++r) {
      w[r] = std::abs(mat_(r, c));
      s += w[r];
    }
    col_l1_[c] = s;
    col_alias_[c] = s > 0 ? AliasTable(w) : AliasTable();
  }
}

double LocalSuperOp::l1_to_l1() const {
  double m = 0;
  for (double v : col_l1_) m = std::max(m, v);
  return m;
}

std::optional<std::pair<long, Complex>> LocalSuperOp::column_sample(long col, Rng& rng) const {
  if (col < 0 || col >= mat_.cols()) throw ValidationError("column index out of range");
  if (col_alias_[col].empty()) return std::nullopt;  // exactly zero column
  const long r = col_alias_[col].sample(rng);
  const Complex e = mat_(r, col);
  return std::make_pair(r, e / std::abs(e));
}

LocalSuperOp LocalSuperOp::adjoint() const {
  LocalSuperOp out(mat_.adjoint(), d_, m_, basis_);
  out.cptp_ = cptp_;
  return out;
}

LocalSuperOp LocalSuperOp::transposed() const {
  LocalSuperOp out(mat_.transpose(), d_, m_, basis_);
  out.cptp_ = cptp_;
  return out;
}

LocalSuperOp LocalSuperOp::compose_after(const LocalSuperOp& inner) const {
  if (d_ != inner.d_ || m_ != inner.m_ || basis_ != inner.basis_)
    throw ValidationError("cannot compose superoperators from different frames");
  LocalSuperOp out(mat_ * inner.mat_, d_, m_, basis_);
  out.cptp_ = cptp_ && inner.cptp_;
  return out;
}

LocalSuperOp LocalSuperOp::tensor(const LocalSuperOp& other) const {
  if (d_ != other.d_ || basis_ != other.basis_)
    throw ValidationError("cannot tensor superoperators from different frames");
  const long d1 = mat_.rows(), d2 = other.mat_.rows();
  Eigen::MatrixXcd m(d1 * d2, d1 * d2);
  for (long r1 = 0; r1 < d1; ++r1)
    for (long c1 = 0; c1 < d1; ++c1) m.block(r1 * d2, c1 * d2, d2, d2) = mat_(r1, c1) * other.mat_;
  LocalSuperOp out(std::move(m), d_, m_ + other.m_, basis_);
  out.cptp_ = cptp_ && other.cptp_;
  return out;
}

Eigen::MatrixXcd LocalSuperOp::apply_dense(const Eigen::MatrixXcd& y) const {
  const long hdim = pow_long(d_, m_);
  if (y.rows() != hdim || y.cols() != hdim) throw ValidationError("operator size mismatch");
  const long dim = mat_.rows();
  const double w = basis_ == Basis::weyl ? 1.0 / static_cast<double>(hdim) : 1.0;
  Eigen::VectorXcd coeff(dim);
  for (long t = 0; t < dim; ++t)
    coeff[t] = w * (basis_element(t, d_, m_, basis_).adjoint() * y).trace();
  const Eigen::VectorXcd out_coeff = mat_ * coeff;
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(hdim, hdim);
  for (long t = 0; t < dim; ++t) {
    if (out_coeff[t] == Complex(0, 0)) continue;
    out += out_coeff[t] * basis_element(t, d_, m_, basis_);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Circuits

void CircuitDescription::append(std::shared_ptr<const LocalSuperOp> op, std::vector<int> support,
                                std::string label) {
  if (!op) throw ValidationError("null layer");
  if (op->d() != d_) throw ValidationError("layer qudit dimension mismatch");
  if (static_cast<int>(support.size()) != op->arity())
    throw ValidationError("layer support size does not match channel arity");
  std::vector<int> sorted = support;
  std::sort(sorted.begin(), sorted.end());
  for (size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i] < 0 || sorted[i] >= n_) throw ValidationError("layer support out of range");
    if (i > 0 && sorted[i] == sorted[i - 1]) throw ValidationError("layer support has duplicates");
  }
  layers_.push_back({std::move(op), std::move(support), std::move(label)});
}

double l1_to_l1_norm(const LocalSuperOp& op) { return op.l1_to_l1(); }

LocalSuperOp adjoint_superop(const LocalSuperOp& op) { return op.adjoint(); }

LocalSuperOp embed_on_support(const LocalSuperOp& op, const std::vector<int>& from,
                              const std::vector<int>& onto) {
  if (from == onto) return op;
  const int m_onto = static_cast<int>(onto.size());
  std::vector<int> pos(from.size());
  for (size_t i = 0; i < from.size(); ++i) {
    const auto it = std::find(onto.begin(), onto.end(), from[i]);
    if (it == onto.end()) throw ValidationError("embedding target does not cover the support");
    pos[i] = static_cast<int>(it - onto.begin());
  }
  const long radix = static_cast<long>(op.d()) * op.d();
  const long dim = pow_long(radix, m_onto);
  const long dloc = op.dim();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
  std::vector<long> place(m_onto);  // radix weight of each onto position
  for (int i = 0; i < m_onto; ++i) place[i] = pow_long(radix, m_onto - 1 - i);
  for (long c = 0; c < dim; ++c) {
    long c_loc = 0;
    for (size_t i = 0; i < pos.size(); ++i) c_loc = c_loc * radix + radix_digit(c, pos[i], m_onto, radix);
    for (long r_loc = 0; r_loc < dloc; ++r_loc) {
      const Complex e = op.matrix()(r_loc, c_loc);
      if (e == Complex(0, 0)) continue;
      long r = c;
      long rem = r_loc;
      for (int i = static_cast<int>(pos.size()) - 1; i >= 0; --i) {
        const int digit = static_cast<int>(rem % radix);
        rem /= radix;
        const int old = radix_digit(r, pos[i], m_onto, radix);
        r += (digit - old) * place[pos[i]];
      }
      out(r, c) = e;
    }
  }
  return LocalSuperOp::from_matrix(std::move(out), op.d(), m_onto, op.basis(), m_onto);
}

CircuitDescription group_circuit(const CircuitDescription& circuit, int arity_cap) {
  CircuitDescription out(circuit.d(), circuit.n());
  std::optional<CircuitLayer> group;
  std::string label;
  auto flush = [&] {
    if (group) out.append(group->op, group->support, label);
    group.reset();
    label.clear();
  };
  for (const CircuitLayer& layer : circuit.layers()) {
    if (!group) {
      std::vector<int> sup = layer.support;
      std::sort(sup.begin(), sup.end());
      auto op = std::make_shared<LocalSuperOp>(embed_on_support(*layer.op, layer.support, sup));
      group = CircuitLayer{std::move(op), std::move(sup), ""};
      label = layer.label;
      continue;
    }
    std::vector<int> uni = group->support;
    for (int q : layer.support) uni.push_back(q);
    std::sort(uni.begin(), uni.end());
    uni.erase(std::unique(uni.begin(), uni.end()), uni.end());
    if (static_cast<int>(uni.size()) > arity_cap) {
      flush();
      std::vector<int> sup = layer.support;
      std::sort(sup.begin(), sup.end());
      auto op = std::make_shared<LocalSuperOp>(embed_on_support(*layer.op, layer.support, sup));
      group = CircuitLayer{std::move(op), std::move(sup), ""};
      label = layer.label;
      continue;
    }
    const LocalSuperOp prev = embed_on_support(*group->op, group->support, uni);
    const LocalSuperOp next = embed_on_support(*layer.op, layer.support, uni);
    group->op = std::make_shared<LocalSuperOp>(next.compose_after(prev));
    group->support = uni;
    if (!layer.label.empty()) label += (label.empty() ? "" : "+") + layer.label;
  }
  flush();
  return out;
}

double circuit_norm_bound(const CircuitDescription& circuit, Picture picture, int arity_cap) {
  const CircuitDescription grouped = group_circuit(circuit, arity_cap);
  double bound = 1.0;
  for (const CircuitLayer& layer : grouped.layers())
    bound *= picture == Picture::schrodinger ? layer.op->l1_to_l1() : layer.op->transposed().l1_to_l1();
  return bound;
}

Eigen::MatrixXcd apply_layer_dense(const CircuitLayer& layer, const Eigen::MatrixXcd& rho, int d,
                                   int n) {
  const long dim = pow_long(d, n);
  if (rho.rows() != dim || rho.cols() != dim) throw ValidationError("density matrix size mismatch");
  const int m = layer.op->arity();
  const long hloc = pow_long(d, m);
  // weight of each support qudit in the global computational index
  std::vector<long> weight(m);
  for (int i = 0; i < m; ++i) weight[i] = pow_long(d, n - 1 - layer.support[i]);
  const long rest = dim / hloc;
  // enumerate global indices with all support digits zero, in order
  std::vector<long> base(rest);
  {
    long k = 0;
    for (long g = 0; g < dim; ++g) {
      bool zero = true;
      for (int i = 0; i < m && zero; ++i)
        if ((g / weight[i]) % d != 0) zero = false;
      if (zero) base[k++] = g;
    }
  }
  std::vector<long> offs(hloc);
  for (long p = 0; p < hloc; ++p) {
    long o = 0, rem = p;
    for (int i = m - 1; i >= 0; --i) {
      o += (rem % d) * weight[i];
      rem /= d;
    }
    offs[p] = o;
  }
  Eigen::MatrixXcd out(dim, dim);
  Eigen::MatrixXcd block(hloc, hloc);
  for (long u = 0; u < rest; ++u)
    for (long v = 0; v < rest; ++v) {
      for (long p = 0; p < hloc; ++p)
        for (long q = 0; q < hloc; ++q) block(p, q) = rho(base[u] + offs[p], base[v] + offs[q]);
      const Eigen::MatrixXcd img = layer.op->apply_dense(block);
      for (long p = 0; p < hloc; ++p)
        for (long q = 0; q < hloc; ++q) out(base[u] + offs[p], base[v] + offs[q]) = img(p, q);
    }
  return out;
}

Eigen::MatrixXcd dense_evolve(const CircuitDescription& circuit, Eigen::MatrixXcd rho) {
  for (const CircuitLayer& layer : circuit.layers())
    rho = apply_layer_dense(layer, rho, circuit.d(), circuit.n());
  return rho;
}

Eigen::MatrixXcd dense_layer_matrix(const CircuitLayer& layer, int d, int n, Basis basis) {
  std::vector<int> all(n);
  for (int i = 0; i < n; ++i) all[i] = i;
  if (layer.op->basis() != basis) throw ValidationError("basis mismatch");
  const long dim = pow_long(static_cast<long>(d) * d, n);
  if (dim > kDenseDimCap) throw ResourceError("full-system superoperator exceeds cap");
  return embed_on_support(*layer.op, layer.support, all).matrix();
}

}  // namespace weylsim
