#pragma once

// Channel and gate library: Weyl-diagonal (mixed-Weyl) channels, the
// depolarizing/dephasing families, Clifford gates as symplectic action plus
// exact phase tracking through a generator word, the Weyl-label mapping
// solver behind the off-diagonal trick, twirling, spectral gap, and Y
// rotations.

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "weylsim/reps.hpp"

namespace weylsim {

// Channel diagonal in the Weyl basis; equivalently a mixed Weyl channel.
class WeylDiagonalChannel {
 public:
  WeylDiagonalChannel(Eigen::VectorXcd eigenvalues, int d, int arity);

  int d() const { return d_; }
  int arity() const { return m_; }
  const Eigen::VectorXcd& eigenvalues() const { return eig_; }
  Complex eigenvalue(const WeylIndex& w) const { return eig_[w.linear_index()]; }

  // Inverse character transform of the eigenvalues: the mixing distribution
  // of the mixed-Weyl form. `ok` iff it is a true probability vector within
  // tolerance (i.e. the channel is CP).
  struct CpCheck {
    bool ok;
    Eigen::VectorXd p;
  };
  CpCheck cp_check(double tol = 1e-10) const;

  LocalSuperOp to_superop() const { return LocalSuperOp::from_diagonal(eig_, d_, m_); }
  WeylDiagonalChannel tensor(const WeylDiagonalChannel& other) const;

 private:
  Eigen::VectorXcd eig_;
  int d_, m_;
};

// Eigenvalue 1 at the identity, survival amplitude p on every other index of
// the support (global-on-support depolarizing, Table convention).
WeylDiagonalChannel depolarizing(double p, int arity, int d = 2);

// Single-qudit dephasing: eigenvalue 1 on pure-Z indices (b = 0), p
// otherwise. For d > 2 this is the Z-Weyl mixing channel with uniform weight
// on Z^k, k >= 1.
WeylDiagonalChannel dephasing(double p, int d = 2);

// The complementary parameterization used in the main-text gap example:
// a channel that depolarizes with probability q has survival eigenvalue
// 1 - q on non-identity indices.
inline double survival_from_error_probability(double q) { return 1.0 - q; }
inline double error_probability_from_survival(double p) { return 1.0 - p; }

// Elementary Clifford generators acting on local qudit slots.
struct CliffordGenerator {
  enum class Kind { fourier, fourier_inv, phase, mult, csum, csum_inv };
  Kind kind;
  int q1 = 0;      // target slot (control slot for csum)
  int q2 = 0;      // csum target slot
  int param = 1;   // phase power k or multiplier c
};

// Clifford gate stored as a symplectic matrix over Z_d plus the generator
// word; conjugation phases are folded exactly through the word (d-th roots
// for odd d, fourth roots for d = 2).
class CliffordGate {
 public:
  static CliffordGate identity(int d, int arity);
  static CliffordGate from_word(const std::vector<CliffordGenerator>& word, int d, int arity,
                                bool verify_dense = true);
  // Grammar: semicolon/comma separated "F(q)", "Finv(q)", "P(q[,k])",
  // "M(q,c)", "CSUM(c,t)", "CSUMinv(c,t)", "SWAP(i,j)".
  static CliffordGate parse(const std::string& word, int d, int arity);

  int d() const { return d_; }
  int arity() const { return m_; }
  const Eigen::MatrixXi& symplectic() const { return symplectic_; }
  const std::vector<CliffordGenerator>& word() const { return word_; }

  // C W C^dag = phase * W'.
  std::pair<PhaseExponent, WeylIndex> action(const WeylIndex& w) const;

  CliffordGate compose_after(const CliffordGate& inner) const;  // this o inner
  CliffordGate inverse() const;
  Eigen::MatrixXcd dense_unitary() const;
  LocalSuperOp to_superop() const;  // exact signed permutation

 private:
  CliffordGate(int d, int arity) : d_(d), m_(arity) {}
  void rebuild_symplectic();
  void verify_against_dense() const;

  int d_, m_;
  Eigen::MatrixXi symplectic_;  // acts on stacked (a, b) index vectors
  std::vector<CliffordGenerator> word_;
};

std::pair<Complex, WeylIndex> clifford_action(const CliffordGate& g, const WeylIndex& w);

// A Clifford (word over F, P, M, CSUM) whose conjugation maps w1 to w2 up to
// phase. Both labels must be non-identity.
CliffordGate solve_clifford_mapping(const WeylIndex& w1, const WeylIndex& w2);

// Diagonal of the superoperator; the group-averaged twirl projection.
WeylDiagonalChannel twirl(const LocalSuperOp& op);

double weyl_spectral_gap(const WeylDiagonalChannel& channel);
double weyl_spectral_gap(const LocalSuperOp& op);

struct RotationGate {
  double theta;
  int target;
};

// 4x4 Weyl-basis superoperator of conjugation by exp(-i theta Y / 2), d = 2.
LocalSuperOp rotation_superop(double theta);

}  // namespace weylsim
