#pragma once

// Basis-vector representations of states and observables, superoperator
// matrices of channels on local supports, l1/linf/l1->l1 norm machinery and
// the l1 sampling oracles the path sampler walks.
//
// Gauge (states vs observables):
//   state:      rho(a,b) = tr(W_{(a,b)}^dag rho)
//   observable: O(a,b)   = d^{-n} tr(W_{(a,b)}^dag O)
// so that tr(O sigma) = sum_w conj(O(w)) sigma(w) for Hermitian O. The
// conjugation is folded into the observable-side sampling weights; at d = 2
// all amplitudes are real and it is invisible.
//
// The basis is pluggable: the Weyl basis (default) or the computational
// basis |i><j|, which shares the same per-qudit digit indexing (x*d + y).

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "weylsim/rng.hpp"
#include "weylsim/weyl_core.hpp"

namespace weylsim {

enum class Basis { weyl, computational };
enum class VectorKind { state, observable };
enum class Picture { schrodinger, heisenberg };

inline constexpr int kDefaultArityCap = 3;

// Sparse product-form vector over basis labels. Blocks own disjoint supports;
// qudits not covered by any block carry the identity factor.
class WeylVector {
 public:
  struct Block {
    std::vector<int> support;
    Eigen::VectorXcd entries;  // mixed-radix over support, radix d^2
    double l1 = 0;
    double linf = 0;
    AliasTable alias;
  };

  struct Draw {
    std::vector<int> digits;  // per-qudit digit, length n
    Complex sign;             // unit-modulus pairing phase
  };

  // Product state from per-qudit density matrices (trace 1, PSD within 1e-10).
  static WeylVector state_from_factors(const std::vector<Eigen::MatrixXcd>& factors, int d,
                                       Basis basis = Basis::weyl);
  // Observable from Hermitian blocks on disjoint supports; uncovered qudits
  // are identity.
  static WeylVector observable_from_blocks(
      int d, int n, const std::vector<std::pair<std::vector<int>, Eigen::MatrixXcd>>& blocks,
      Basis basis = Basis::weyl);
  // Observable equal to a single Weyl operator (Pauli string at d = 2).
  static WeylVector observable_weyl_operator(const WeylIndex& w);

  VectorKind kind() const { return kind_; }
  Basis basis() const { return basis_; }
  int d() const { return d_; }
  int n() const { return n_; }

  Complex entry(const WeylIndex& w) const;
  Complex entry_digits(const std::vector<int>& digits) const;
  // Weight used when this vector terminates a sampled path (observable side
  // is conjugated, see gauge note above).
  Complex terminal_weight_digits(const std::vector<int>& digits) const;

  double l1() const { return l1_; }
  double linf() const { return linf_; }

  // Draw a label with probability |entry| / l1 together with its unit phase.
  Draw sample(Rng& rng) const;

  // All nonzero (label, amplitude) pairs; intended for small n.
  std::vector<std::pair<WeylIndex, Complex>> nonzero_amplitudes() const;

  const std::vector<Block>& blocks() const { return blocks_; }

 private:
  WeylVector(VectorKind kind, Basis basis, int d, int n) : kind_(kind), basis_(basis), d_(d), n_(n) {}
  void finalize();

  VectorKind kind_;
  Basis basis_;
  int d_, n_;
  std::vector<Block> blocks_;
  std::vector<int> block_of_;  // per qudit: block id or -1 (identity factor)
  double l1_ = 1, linf_ = 1;
};

// A channel's matrix on its support qudits with per-column l1 norms and
// alias sampling tables. Immutable after construction.
class LocalSuperOp {
 public:
  static LocalSuperOp from_matrix(Eigen::MatrixXcd m, int d, int arity, Basis basis = Basis::weyl,
                                  int arity_cap = kDefaultArityCap);
  static LocalSuperOp from_kraus(const std::vector<Eigen::MatrixXcd>& kraus, int d, int arity,
                                 Basis basis = Basis::weyl, int arity_cap = kDefaultArityCap);
  static LocalSuperOp from_unitary(const Eigen::MatrixXcd& u, int d, int arity,
                                   Basis basis = Basis::weyl, int arity_cap = kDefaultArityCap);
  // Diagonal in the Weyl basis.
  static LocalSuperOp from_diagonal(const Eigen::VectorXcd& eigenvalues, int d, int arity);
  static LocalSuperOp identity(int d, int arity, Basis basis = Basis::weyl);

  int d() const { return d_; }
  int arity() const { return m_; }
  Basis basis() const { return basis_; }
  long dim() const { return mat_.rows(); }
  const Eigen::MatrixXcd& matrix() const { return mat_; }
  double column_l1(long col) const { return col_l1_[col]; }
  double l1_to_l1() const;
  bool cptp() const { return cptp_; }
  bool non_cptp_warning() const { return !cptp_; }

  // Row drawn with probability |entry| / column_l1 plus the entry's phase
  // factor. nullopt for an exactly zero column (the caller records a zero
  // sample).
  std::optional<std::pair<long, Complex>> column_sample(long col, Rng& rng) const;

  LocalSuperOp adjoint() const;     // conjugate transpose (Heisenberg map)
  LocalSuperOp transposed() const;  // plain transpose (reverse l1 walk)
  LocalSuperOp compose_after(const LocalSuperOp& inner) const;  // this o inner
  LocalSuperOp tensor(const LocalSuperOp& other) const;

  // Dense action on an operator living on the support qudits.
  Eigen::MatrixXcd apply_dense(const Eigen::MatrixXcd& y) const;
  // Dense basis element no. `idx` of this op's (d, m, basis) frame.
  static Eigen::MatrixXcd basis_element(long idx, int d, int m, Basis basis);

 private:
  LocalSuperOp(Eigen::MatrixXcd m, int d, int arity, Basis basis);
  void build_tables();

  Eigen::MatrixXcd mat_;
  int d_, m_;
  Basis basis_;
  std::vector<double> col_l1_;
  std::vector<AliasTable> col_alias_;
  bool cptp_ = true;
};

struct CircuitLayer {
  std::shared_ptr<const LocalSuperOp> op;
  std::vector<int> support;  // digit order of the op follows this order
  std::string label;
};

class CircuitDescription {
 public:
  CircuitDescription(int d, int n) : d_(d), n_(n) {
    if (!is_prime(d)) throw ValidationError("qudit dimension must be prime");
    if (n < 1) throw ValidationError("need at least one qudit");
  }

  void append(std::shared_ptr<const LocalSuperOp> op, std::vector<int> support,
              std::string label = "");
  int d() const { return d_; }
  int n() const { return n_; }
  const std::vector<CircuitLayer>& layers() const { return layers_; }
  bool empty() const { return layers_.empty(); }

 private:
  int d_, n_;
  std::vector<CircuitLayer> layers_;
};

// max over columns of the column l1 norm.
double l1_to_l1_norm(const LocalSuperOp& op);
LocalSuperOp adjoint_superop(const LocalSuperOp& op);

// Compose consecutive layers whose union support stays within `arity_cap`
// qudits; returns the equivalent coarser circuit. Deterministic.
CircuitDescription group_circuit(const CircuitDescription& circuit, int arity_cap = kDefaultArityCap);

// Upper bound on || N^(N) o ... o N^(1) ||_{l1->l1} via grouped composition
// (tensor multiplicativity within groups, submultiplicativity across them).
// The Heisenberg picture bounds the transposed walk.
double circuit_norm_bound(const CircuitDescription& circuit, Picture picture = Picture::schrodinger,
                          int arity_cap = kDefaultArityCap);

// Embed a layer's superoperator onto a larger support (extra qudits idle).
LocalSuperOp embed_on_support(const LocalSuperOp& op, const std::vector<int>& from,
                              const std::vector<int>& onto);

// Dense reference evolution: apply a layer (or a whole circuit) to a density
// matrix on the full n-qudit space. Oracle-grade, not performance-grade.
Eigen::MatrixXcd apply_layer_dense(const CircuitLayer& layer, const Eigen::MatrixXcd& rho, int d,
                                   int n);
Eigen::MatrixXcd dense_evolve(const CircuitDescription& circuit, Eigen::MatrixXcd rho);

// Full-system matrix of a circuit layer in the given basis (small n only).
Eigen::MatrixXcd dense_layer_matrix(const CircuitLayer& layer, int d, int n, Basis basis);

}  // namespace weylsim
