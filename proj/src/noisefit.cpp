#include "weylsim/noisefit.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace weylsim {

namespace {

long pow_long(long base, int exp) {
  long r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

constexpr double kRankTol = 1e-9;

// rows of the design matrix for a set of labels (no gauge rows)
Eigen::MatrixXcd raw_rows(const Hypergraph& g, int d, const std::vector<WeylIndex>& labels) {
  const long cols = parameter_count(g, d);
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(labels.size(), cols);
  for (size_t i = 0; i < labels.size(); ++i) {
    long offset = 0;
    for (const auto& e : g.edges) {
      const long local = labels[i].restricted_to(e).linear_index();
      a(i, offset + local) += 1.0;
      offset += pow_long(static_cast<long>(d) * d, static_cast<int>(e.size()));
    }
  }
  return a;
}

std::vector<WeylIndex> all_labels(int d, int n) {
  const long total = pow_long(static_cast<long>(d) * d, n);
  if (total > (1 << 16)) throw ResourceError("label space too large for a structural analysis");
  std::vector<WeylIndex> out;
  out.reserve(total);
  for (long t = 0; t < total; ++t) out.push_back(WeylIndex::from_linear_index(t, d, n));
  return out;
}

// orthonormal basis of the null space of the complete-label system
Eigen::MatrixXcd structural_gauge_basis(const Hypergraph& g, int d) {
  const Eigen::MatrixXcd complete = raw_rows(g, d, all_labels(d, g.n));
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(complete, Eigen::ComputeFullV);
  const long cols = complete.cols();
  const double thr = std::max(kRankTol, svd.singularValues()[0] * kRankTol);
  long keep = 0;
  for (long i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()[i] > thr) ++keep;
  return svd.matrixV().rightCols(cols - keep);
}

}  // namespace

Hypergraph::Hypergraph(int vertices, std::vector<std::vector<int>> es)
    : n(vertices), edges(std::move(es)) {
  if (n < 1) throw ValidationError("hypergraph needs at least one vertex");
  std::set<std::vector<int>> seen;
  for (auto& e : edges) {
    if (e.empty()) throw ValidationError("hyperedges must be nonempty");
    std::sort(e.begin(), e.end());
    for (size_t i = 0; i < e.size(); ++i) {
      if (e[i] < 0 || e[i] >= n) throw ValidationError("hyperedge vertex out of range");
      if (i > 0 && e[i] == e[i - 1]) throw ValidationError("hyperedge repeats a vertex");
    }
    if (!seen.insert(e).second) throw ValidationError("duplicate hyperedge");
  }
}

long parameter_count(const Hypergraph& g, int d) {
  long total = 0;
  for (const auto& e : g.edges)
    total += pow_long(static_cast<long>(d) * d, static_cast<int>(e.size()));
  return total;
}

LocalNoiseModel::LocalNoiseModel(Hypergraph g, int d, std::vector<Eigen::VectorXcd> tables)
    : graph_(std::move(g)), d_(d), tables_(std::move(tables)) {
  if (!is_prime(d_)) throw ValidationError("qudit dimension must be prime");
  if (tables_.size() != graph_.edges.size())
    throw ValidationError("one coefficient table per hyperedge required");
  Complex identity_sum = 0;
  for (size_t i = 0; i < tables_.size(); ++i) {
    const long want =
        pow_long(static_cast<long>(d_) * d_, static_cast<int>(graph_.edges[i].size()));
    if (tables_[i].size() != want) throw ValidationError("coefficient table has the wrong size");
    identity_sum += tables_[i][0];
  }
  if (std::abs(identity_sum - Complex(1, 0)) > 1e-8)
    throw ValidationError("local model must satisfy sum_e f_e(identity) = 1");
}

Complex LocalNoiseModel::induced_eigenvalue(const WeylIndex& label) const {
  if (label.d() != d_ || label.n() != graph_.n) throw ValidationError("label frame mismatch");
  Complex acc = 0;
  for (size_t i = 0; i < graph_.edges.size(); ++i)
    acc += tables_[i][label.restricted_to(graph_.edges[i]).linear_index()];
  return acc;
}

WeylDiagonalChannel LocalNoiseModel::to_diagonal_channel() const {
  const long total = pow_long(static_cast<long>(d_) * d_, graph_.n);
  Eigen::VectorXcd eig(total);
  for (long t = 0; t < total; ++t)
    eig[t] = induced_eigenvalue(WeylIndex::from_linear_index(t, d_, graph_.n));
  return WeylDiagonalChannel(std::move(eig), d_, graph_.n);
}

Eigen::VectorXcd LocalNoiseModel::stacked_parameters() const {
  Eigen::VectorXcd out(parameter_count(graph_, d_));
  long offset = 0;
  for (const auto& t : tables_) {
    out.segment(offset, t.size()) = t;
    offset += t.size();
  }
  return out;
}

LocalNoiseModel LocalNoiseModel::canonicalized() const {
  // project onto the orthogonal complement of the structural gauge
  // subspace; the induced eigenvalues are untouched
  const Eigen::MatrixXcd gauge = structural_gauge_basis(graph_, d_);
  Eigen::VectorXcd f = stacked_parameters();
  f -= gauge * (gauge.adjoint() * f);
  std::vector<Eigen::VectorXcd> tables;
  long offset = 0;
  for (const auto& e : graph_.edges) {
    const long sz = pow_long(static_cast<long>(d_) * d_, static_cast<int>(e.size()));
    tables.push_back(f.segment(offset, sz));
    offset += sz;
  }
  return LocalNoiseModel(graph_, d_, std::move(tables));
}

LocalNoiseModel random_mixture_model(const Hypergraph& g, int d, Rng& rng, double strength) {
  const size_t ne = g.edges.size();
  std::vector<double> q(ne);
  double total = 0;
  for (double& x : q) {
    x = 0.2 + rng.uniform();
    total += x;
  }
  for (double& x : q) x /= total;

  std::vector<Eigen::VectorXcd> tables;
  for (size_t i = 0; i < ne; ++i) {
    const int m = static_cast<int>(g.edges[i].size());
    const long dim = pow_long(static_cast<long>(d) * d, m);
    // convex mixture: (1 - s) identity + s spread over local conjugations
    const double s = strength * (0.3 + 0.7 * rng.uniform());
    const int terms = 2 + static_cast<int>(rng.uniform_int(3));
    std::vector<double> c(terms);
    double csum = 0;
    for (double& x : c) {
      x = 0.05 + rng.uniform();
      csum += x;
    }
    for (double& x : c) x *= s / csum;

    Eigen::VectorXcd f = Eigen::VectorXcd::Constant(dim, Complex(1.0 - s, 0));
    for (int j = 0; j < terms; ++j) {
      const long v = 1 + static_cast<long>(rng.uniform_int(dim - 1));
      const WeylIndex gate = WeylIndex::from_linear_index(v, d, m);
      for (long t = 0; t < dim; ++t)
        f[t] += c[j] * weyl_conjugate(gate, WeylIndex::from_linear_index(t, d, m)).value();
    }
    f *= q[i];
    tables.push_back(std::move(f));
  }
  return LocalNoiseModel(g, d, std::move(tables));
}

FitProblem build_fit(const Hypergraph& g, int d, const std::vector<Measurement>& measurements) {
  if (measurements.empty()) throw ValidationError("need at least one measurement");
  const long cols = parameter_count(g, d);
  FitProblem p;
  p.measurement_rows = static_cast<long>(measurements.size());
  p.underdetermined = p.measurement_rows < cols;

  std::vector<WeylIndex> labels;
  Eigen::VectorXcd b(measurements.size());
  for (size_t i = 0; i < measurements.size(); ++i) {
    const Measurement& m = measurements[i];
    if (m.label.d() != d || m.label.n() != g.n) throw ValidationError("measurement label mismatch");
    if (std::abs(m.u_diag) < 1e-12)
      throw ValidationError("measurement at label " + m.label.to_string() +
                            " has a vanishing unitary diagonal; obtain that row through the "
                            "Clifford trick instead");
    labels.push_back(m.label);
    b[i] = m.mu_hat / m.u_diag;
  }
  const Eigen::MatrixXcd rows = raw_rows(g, d, labels);
  const Eigen::MatrixXcd gauge = structural_gauge_basis(g, d);
  p.gauge_rows = gauge.cols();
  p.a.resize(rows.rows() + gauge.cols(), cols);
  p.a.topRows(rows.rows()) = rows;
  p.a.bottomRows(gauge.cols()) = gauge.adjoint();
  p.b.resize(b.size() + gauge.cols());
  p.b.head(b.size()) = b;
  p.b.tail(gauge.cols()).setZero();

  for (size_t e = 0; e < g.edges.size(); ++e) {
    const int m = static_cast<int>(g.edges[e].size());
    const long dim = pow_long(static_cast<long>(d) * d, m);
    for (long t = 0; t < dim; ++t)
      p.column_names.push_back("e" + std::to_string(e) + ":" +
                               WeylIndex::from_linear_index(t, d, m).to_string());
  }
  return p;
}

FitSolution solve_fit(const FitProblem& p) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(p.a);
  qr.setThreshold(kRankTol);
  if (qr.rank() < p.a.cols()) {
    // name the unidentifiable combinations
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(p.a, Eigen::ComputeFullV);
    const double thr = svd.singularValues()[0] * kRankTol;
    std::string msg = "fit problem is rank deficient; unidentifiable parameter combinations:";
    for (long i = p.a.cols() - 1; i >= 0; --i) {
      if (i < svd.singularValues().size() && svd.singularValues()[i] > thr) break;
      const Eigen::VectorXcd v = svd.matrixV().col(i);
      msg += " [";
      int shown = 0;
      for (long j = 0; j < v.size() && shown < 4; ++j) {
        if (std::abs(v[j]) < 0.2) continue;
        msg += (shown ? ", " : "") + p.column_names[j];
        ++shown;
      }
      msg += "]";
    }
    throw ValidationError(msg);
  }
  FitSolution sol;
  sol.parameters = qr.solve(p.b);
  sol.residual = (p.a * sol.parameters - p.b).norm();
  return sol;
}

StabilityNorms stability_norms(const FitProblem& p) {
  const Eigen::MatrixXcd gram = p.a.adjoint() * p.a;
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(gram);
  if (!lu.isInvertible())
    throw ValidationError("stability norms need a full-column-rank fit problem");
  const Eigen::MatrixXcd m = lu.solve(p.a.adjoint());
  StabilityNorms out;
  for (long c = 0; c < m.cols(); ++c)
    out.column_sum = std::max(out.column_sum, m.col(c).cwiseAbs().sum());
  for (long r = 0; r < m.rows(); ++r)
    out.row_sum = std::max(out.row_sum, m.row(r).cwiseAbs().sum());
  return out;
}

double stability_bound(const FitProblem& p, double epsilon, double mu_inf) {
  if (epsilon < 0) throw ValidationError("epsilon must be nonnegative");
  const double factor = std::abs(1.0 - mu_inf) * std::abs(1.0 - mu_inf);
  return epsilon * factor * stability_norms(p).column_sum;
}

std::vector<WeylIndex> default_label_schedule(const Hypergraph& g, int d) {
  std::set<long> seen;
  std::vector<WeylIndex> out;
  auto add_supported = [&](const std::vector<int>& support) {
    const int m = static_cast<int>(support.size());
    const long dim = pow_long(static_cast<long>(d) * d, m);
    for (long t = 0; t < dim; ++t) {
      const WeylIndex local = WeylIndex::from_linear_index(t, d, m);
      std::vector<int> a(g.n, 0), b(g.n, 0);
      for (int i = 0; i < m; ++i) {
        a[support[i]] = local.a()[i];
        b[support[i]] = local.b()[i];
      }
      WeylIndex global(std::move(a), std::move(b), d);
      if (seen.insert(global.linear_index()).second) out.push_back(std::move(global));
    }
  };
  for (const auto& e : g.edges) add_supported(e);

  // extend with pairwise unions when the per-edge rows miss identifiable
  // directions (rank gap against the complete system)
  auto rank_of = [&](const std::vector<WeylIndex>& labels) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(raw_rows(g, d, labels));
    qr.setThreshold(kRankTol);
    return qr.rank();
  };
  const long target = rank_of(all_labels(d, g.n));
  if (rank_of(out) < target) {
    for (size_t i = 0; i < g.edges.size(); ++i)
      for (size_t j = i + 1; j < g.edges.size(); ++j) {
        std::vector<int> uni = g.edges[i];
        uni.insert(uni.end(), g.edges[j].begin(), g.edges[j].end());
        std::sort(uni.begin(), uni.end());
        uni.erase(std::unique(uni.begin(), uni.end()), uni.end());
        add_supported(uni);
      }
    if (rank_of(out) < target) return all_labels(d, g.n);  // last resort at desk scale
  }
  return out;
}

}  // namespace weylsim
