#include "weylsim/vqe.hpp"

#include <cmath>

#include "weylsim/noise.hpp"

namespace weylsim {

MaxCutProblem::MaxCutProblem(int vertices, std::vector<std::tuple<int, int, double>> ws)
    : n(vertices), weights(std::move(ws)) {
  if (n < 2 || n % 2 != 0) throw ValidationError("MaxCut register size must be even");
  for (auto& [i, j, w] : weights) {
    if (i < 0 || j < 0 || i >= n || j >= n || i == j)
      throw ValidationError("weight entry addresses an invalid vertex pair");
    if (i > j) std::swap(i, j);
    if (!std::isfinite(w)) throw ValidationError("weights must be finite");
  }
}

CircuitDescription build_ansatz_circuit(const MaxCutProblem& prob, const AnsatzParams& params) {
  const int n = prob.n, depth = params.depth();
  if (params.theta.rows() != n && depth > 0)
    throw ValidationError("theta must have one row per qubit");
  if (params.p_c < 0 || params.p_c > 1 || params.p_y < 0 || params.p_y > 1)
    throw ValidationError("noise rates must lie in [0, 1]");
  CircuitDescription circuit(2, n);
  auto dep1 = std::make_shared<LocalSuperOp>(depolarizing(params.p_y, 1).to_superop());
  auto dep2 = std::make_shared<LocalSuperOp>(depolarizing(params.p_c, 2).to_superop());
  auto cnot = std::make_shared<LocalSuperOp>(CliffordGate::parse("CSUM(0,1)", 2, 2).to_superop());
  for (int k = 0; k < depth; ++k) {
    for (int i = 0; i < n; ++i) {
      circuit.append(std::make_shared<LocalSuperOp>(rotation_superop(params.theta(i, k))), {i},
                     "Y(" + std::to_string(i) + "," + std::to_string(k) + ")");
      circuit.append(dep1, {i}, "dep_y");
    }
    // printed pairing: CNOT_{2i,2i+1} for i = 1..n/2-1 in 1-based indexing;
    // the brick-wall variant shifts by one on odd depths
    const int offset = params.brickwall && (k % 2 == 1) ? 0 : 1;
    for (int c = offset; c + 1 < n; c += 2) {
      circuit.append(cnot, {c, c + 1}, "cnot");
      circuit.append(dep2, {c, c + 1}, "dep_c");
    }
  }
  return circuit;
}

double layer_norm(double theta1, double theta2, double p_c, double p_y) {
  if (p_c < 0 || p_c > 1 || p_y < 0 || p_y > 1)
    throw ValidationError("noise rates must lie in [0, 1]");
  auto phi = [](double t) { return std::abs(std::cos(t)) + std::abs(std::sin(t)); };
  const double f1 = phi(theta1), f2 = phi(theta2);
  return std::max({1.0, p_y * p_y * p_c * f1 * f2, p_y * p_c * f1, p_y * p_c * f2});
}

SampleComplexity sample_complexity(int n, int depth, double epsilon, double p_c, double p_y,
                                   double delta) {
  if (n < 1 || depth < 0) throw ValidationError("invalid register size or depth");
  if (epsilon <= 0 || delta <= 0 || delta >= 1) throw ValidationError("bad epsilon/delta");
  if (p_c < 0 || p_c > 1 || p_y < 0 || p_y > 1)
    throw ValidationError("noise rates must lie in [0, 1]");
  SampleComplexity out;
  out.scaling = std::pow(p_c * p_y * p_y * 2.0, 2.0 * n * depth);
  out.efficient = p_c * p_y * p_y < 0.5;
  out.polynomial_regime =
      depth == 0 || out.scaling <= static_cast<double>(n) * n * depth * depth;
  const double raw =
      2.0 * n * n * out.scaling * std::log(1.0 / delta) / (epsilon * epsilon);
  out.samples = static_cast<std::uint64_t>(std::ceil(raw));
  return out;
}

namespace {

WeylVector zero_state(int n) {
  Eigen::MatrixXcd ket0 = Eigen::MatrixXcd::Zero(2, 2);
  ket0(0, 0) = 1;
  return WeylVector::state_from_factors(std::vector<Eigen::MatrixXcd>(n, ket0), 2);
}

WeylIndex zz_label(int i, int j, int n) {
  std::vector<int> a(n, 0), b(n, 0);
  a[i] = a[j] = 1;
  return WeylIndex(std::move(a), std::move(b), 2);
}

}  // namespace

EnergyEstimate estimate_energy(const MaxCutProblem& prob, const AnsatzParams& params,
                               double epsilon, double delta, std::uint64_t seed, int workers) {
  const CircuitDescription circuit = build_ansatz_circuit(prob, params);
  const WeylVector rho = zero_state(prob.n);
  std::vector<std::tuple<int, int, double>> active;
  for (const auto& [i, j, w] : prob.weights)
    if (w != 0) active.push_back({i, j, w});
  EnergyEstimate out;
  if (active.empty()) return out;

  const double term_count = static_cast<double>(active.size());
  std::uint64_t stream = 0;
  for (const auto& [i, j, w] : active) {
    const WeylVector obs = WeylVector::observable_weyl_operator(zz_label(i, j, prob.n));
    const double eps_term = epsilon / (term_count * std::abs(w));
    const double delta_term = delta / term_count;
    const EstimateResult r = estimate(circuit, rho, obs, eps_term, delta_term,
                                      Rng::mix(seed + 0x51ed2700 + stream), workers,
                                      Picture::heisenberg);
    out.terms.push_back({i, j, w, r.mean.real(), r.std_error, r.samples});
    out.energy += w * r.mean.real();
    ++stream;
  }
  return out;
}

double dense_energy(const MaxCutProblem& prob, const AnsatzParams& params) {
  const CircuitDescription circuit = build_ansatz_circuit(prob, params);
  const long dim = 1L << prob.n;
  if (dim > kDenseDimCap) throw ResourceError("dense validation mode exceeds the size cap");
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
  rho(0, 0) = 1;
  rho = dense_evolve(circuit, std::move(rho));
  double energy = 0;
  for (const auto& [i, j, w] : prob.weights) {
    if (w == 0) continue;
    energy += w * (materialize(zz_label(i, j, prob.n)) * rho).trace().real();
  }
  return energy;
}

}  // namespace weylsim
