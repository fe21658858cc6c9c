#pragma once

// Hypergraph-local Weyl noise models and the linear-regression recovery of
// their parameters from benchmarking results, with the stability bound.
//
// A model assigns each hyperedge e a table f_e over the labels restricted
// to e; the induced channel eigenvalue at a label w is sum_e f_e(w|_e).
// That additive parameterization is inherently gauge-redundant (any
// function of an edge intersection can be shifted between the edges it
// belongs to), so fit problems carry structural gauge rows pinning the
// minimum-norm representative; see build_fit.

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "weylsim/noise.hpp"

namespace weylsim {

struct Hypergraph {
  int n = 0;
  std::vector<std::vector<int>> edges;

  Hypergraph(int vertices, std::vector<std::vector<int>> es);
};

long parameter_count(const Hypergraph& g, int d);  // sum_e d^{2|e|}

class LocalNoiseModel {
 public:
  LocalNoiseModel(Hypergraph g, int d, std::vector<Eigen::VectorXcd> tables);

  const Hypergraph& hypergraph() const { return graph_; }
  int d() const { return d_; }
  const std::vector<Eigen::VectorXcd>& tables() const { return tables_; }

  Complex induced_eigenvalue(const WeylIndex& label) const;
  // Eigenvalue table over all d^{2n} labels (dense, desk scale).
  WeylDiagonalChannel to_diagonal_channel() const;

  // Parameters stacked edge by edge (the fit's coordinate order).
  Eigen::VectorXcd stacked_parameters() const;
  // Same model re-expressed in the minimum-norm gauge the fit recovers.
  LocalNoiseModel canonicalized() const;

 private:
  Hypergraph graph_;
  int d_;
  std::vector<Eigen::VectorXcd> tables_;
};

// Random mixture of edge-local Weyl conjugations: a CP, unit-normalized
// local model for round-trip fixtures. `strength` caps the non-identity
// weight per edge.
LocalNoiseModel random_mixture_model(const Hypergraph& g, int d, Rng& rng, double strength = 0.3);

struct FitProblem {
  Eigen::MatrixXcd a;      // measurement rows then gauge rows
  Eigen::VectorXcd b;      // normalized observations then zeros
  long gauge_rows = 0;
  long measurement_rows = 0;
  bool underdetermined = false;  // fewer measurements than parameters
  std::vector<std::string> column_names;
};

struct Measurement {
  WeylIndex label;
  Complex mu_hat;   // benchmarking estimate of the round-channel diagonal
  Complex u_diag;   // diagonal of the bare unitary at this label
};

// One row per measurement: sum_e f_e(label|_e) = mu_hat / u_diag. The
// identity label enters as the exact normalization row. Structural gauge
// rows (an orthonormal basis of the complete system's null space) are
// appended so the least-squares problem has full column rank whenever the
// measured labels span the identifiable space.
FitProblem build_fit(const Hypergraph& g, int d, const std::vector<Measurement>& measurements);

struct FitSolution {
  Eigen::VectorXcd parameters;
  double residual = 0;
};

// Least squares by column-pivoted QR; requires full column rank and reports
// the unidentifiable combinations otherwise.
FitSolution solve_fit(const FitProblem& p);

// eps |1 - mu_inf|^2 |(A^dag A)^{-1} A^dag|_{inf->inf}, with the matrix norm
// taken as the maximum column absolute sum (the bound's stated convention;
// the standard induced infinity norm is the maximum row sum and is exposed
// separately).
struct StabilityNorms {
  double column_sum = 0;  // convention used by stability_bound
  double row_sum = 0;     // standard induced inf->inf norm
};
StabilityNorms stability_norms(const FitProblem& p);
double stability_bound(const FitProblem& p, double epsilon, double mu_inf);

// Per hyperedge, every label supported inside that hyperedge (identity
// first, deduplicated); extended with edge-pair unions when those rows do
// not span the identifiable space.
std::vector<WeylIndex> default_label_schedule(const Hypergraph& g, int d);

}  // namespace weylsim
