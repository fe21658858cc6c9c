#pragma once

// JSON file schemas shared by the CLI and the library consumers, plus the
// plot-ready CSV export of benchmarking decays. All files are structured
// text; numbers round-trip through IEEE shortest representations.

#include <string>

#include "weylsim/noisefit.hpp"
#include "weylsim/pathsampler.hpp"
#include "weylsim/vqe.hpp"
#include "weylsim/wrb.hpp"

// vendored single-header nlohmann/json
#include <json.hpp>

namespace weylsim::io {

using json = nlohmann::json;

inline constexpr const char* kVersion = "0.1.0";

json load_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& j);

Complex parse_complex(const json& j);
json dump_complex(const Complex& z);
Eigen::MatrixXcd parse_complex_matrix(const json& j);
json dump_complex_matrix(const Eigen::MatrixXcd& m);

// circuit files: {d, n, layers: [{kind: builtin|kraus|matrix, support: [..],
// ...}]}; builtin names: depolarizing, dephasing, clifford:<word>,
// rotation_y:<theta>, weyl_diagonal:<eigenvalue-file>
CircuitDescription parse_circuit(const json& j, const std::string& base_dir = "");
CircuitDescription load_circuit(const std::string& path);

// channel entry without circuit context: a single layer object; used by
// device files, which embed U and T as circuit-file channel entries
LocalSuperOp parse_channel_on_register(const json& entry, int d, int n,
                                       const std::string& base_dir = "");

// state files: {d, n, factors: [matrix, ...]} or {d, n, zero: true}
WeylVector parse_state(const json& j);
WeylVector load_state(const std::string& path);

// observable files: {d, n, weyl_label: "a|b"} or {d, n, blocks: [{support,
// matrix}]}
WeylVector parse_observable(const json& j);
WeylVector load_observable(const std::string& path);

// device files: {d, n, unitary: matrix | {clifford: word} | {identity:
// true}, noise: <channel entry or list>, weyl_gate_noise?: <channel entry>}
DeviceModel parse_device(const json& j, const std::string& base_dir = "");
DeviceModel load_device(const std::string& path);

// lindblad files: {d, n, layers: [{support, time, generator: entry}]}
std::vector<LindbladLayer> parse_lindblad_layers(const json& j, const std::string& base_dir = "");
std::vector<LindbladLayer> load_lindblad_layers(const std::string& path);

// hypergraph files: {n, edges: [[ints]]}
Hypergraph parse_hypergraph(const json& j);
Hypergraph load_hypergraph(const std::string& path);

// measurement files: {d, n, measurements: [{label, mu: [re,im], u: [re,im]}]}
std::vector<Measurement> parse_measurements(const json& j, int d, int n);

// MaxCut graph files: {n, weights: [[i, j, w]]}
MaxCutProblem parse_maxcut(const json& j);
MaxCutProblem load_maxcut(const std::string& path);

// theta files: {n, D, theta: [[row per qubit]]}
Eigen::MatrixXd parse_theta(const json& j, int n);

json dump_record(const BenchmarkRecord& record);
BenchmarkRecord parse_record(const json& j);
json dump_mu_estimate(const MuEstimate& est);

// CSV with columns m, re_q, im_q, q2, q2_stderr, runs in stable order.
void emit_decay_csv(const BenchmarkRecord& record, const std::string& path);
BenchmarkRecord parse_decay_csv(const std::string& path);

}  // namespace weylsim::io
