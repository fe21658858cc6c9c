#pragma once

// MaxCut VQE ansatz assembly with its noise model, the closed-form layer
// norms and sample-complexity bound, and end-to-end noisy energy estimation
// through the path sampler (Heisenberg picture, per-term budget split).

#include <Eigen/Dense>
#include <cstdint>
#include <tuple>
#include <vector>

#include "weylsim/pathsampler.hpp"

namespace weylsim {

struct MaxCutProblem {
  int n = 0;                                        // even vertex count
  std::vector<std::tuple<int, int, double>> weights;  // (i, j, w_ij), i < j

  MaxCutProblem(int vertices, std::vector<std::tuple<int, int, double>> ws);
};

struct AnsatzParams {
  Eigen::MatrixXd theta;  // n x D rotation angles
  double p_c = 1.0;       // CNOT depolarizing survival
  double p_y = 1.0;       // rotation depolarizing survival
  bool brickwall = false;  // alternate entangler offsets across depths

  int depth() const { return static_cast<int>(theta.cols()); }
};

// D repetitions of (per-qubit Y rotations each followed by 1-local
// depolarizing p_y, then entangler CNOTs each followed by 2-local
// depolarizing p_c). The printed entangler pairs qubits (2i, 2i+1) in
// 1-based indexing, skipping the first and last qubit.
CircuitDescription build_ansatz_circuit(const MaxCutProblem& prob, const AnsatzParams& params);

// max{1, py^2 pc phi(t1) phi(t2), py pc phi(t1), py pc phi(t2)},
// phi(t) = |cos t| + |sin t|.
double layer_norm(double theta1, double theta2, double p_c, double p_y);

struct SampleComplexity {
  std::uint64_t samples = 0;
  double scaling = 1;       // (p_c p_y^2 2)^{2 n D}
  bool efficient = false;   // p_c p_y^2 < 1/2
  bool polynomial_regime = false;  // scaling <= n^2 D^2
};

// M = ceil(2 n^2 scaling log(1/delta) / eps^2): Hoeffding constant 2, the
// n^2 two-body observable count, and the printed worst-angle scaling.
SampleComplexity sample_complexity(int n, int depth, double epsilon, double p_c, double p_y,
                                   double delta = 0.05);

struct EnergyTerm {
  int i = 0, j = 0;
  double weight = 0;
  double mean = 0;
  double std_error = 0;
  std::uint64_t samples = 0;
};

struct EnergyEstimate {
  double energy = 0;
  std::vector<EnergyTerm> terms;
};

// Heisenberg-picture estimate of sum_ij w_ij <Z_i Z_j> on the noisy ansatz
// output from |0...0>, the error budget split evenly across terms.
EnergyEstimate estimate_energy(const MaxCutProblem& prob, const AnsatzParams& params,
                               double epsilon, double delta, std::uint64_t seed, int workers = 1);

// Dense density-matrix oracle for validation at desk scale.
double dense_energy(const MaxCutProblem& prob, const AnsatzParams& params);

}  // namespace weylsim
