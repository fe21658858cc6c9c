#include "weylsim/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace weylsim::io {

namespace {

long pow_long(long base, int exp) {
  long r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

[[noreturn]] void parse_fail(const std::string& what) { throw ParseError(what); }

const json& need(const json& j, const char* key, const char* ctx) {
  if (!j.contains(key)) parse_fail(std::string(ctx) + ": missing field '" + key + "'");
  return j.at(key);
}

int need_int(const json& j, const char* key, const char* ctx) {
  const json& v = need(j, key, ctx);
  if (!v.is_number_integer()) parse_fail(std::string(ctx) + ": field '" + key + "' must be an integer");
  return v.get<int>();
}

std::string resolve_path(const std::string& base_dir, const std::string& rel) {
  if (base_dir.empty() || std::filesystem::path(rel).is_absolute()) return rel;
  return (std::filesystem::path(base_dir) / rel).string();
}

}  // namespace

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) parse_fail("cannot open file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    parse_fail("malformed JSON in '" + path + "': " + e.what());
  }
  return j;
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write file '" + path + "'");
  out << j.dump(2) << "\n";
}

Complex parse_complex(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  parse_fail("complex values are numbers or [re, im] pairs");
}

json dump_complex(const Complex& z) { return json::array({z.real(), z.imag()}); }

Eigen::MatrixXcd parse_complex_matrix(const json& j) {
  if (!j.is_array() || j.empty()) parse_fail("matrix must be a nonempty array of rows");
  const long rows = static_cast<long>(j.size());
  const long cols = static_cast<long>(j[0].size());
  Eigen::MatrixXcd m(rows, cols);
  for (long r = 0; r < rows; ++r) {
    if (!j[r].is_array() || static_cast<long>(j[r].size()) != cols)
      parse_fail("matrix rows must all have the same length");
    for (long c = 0; c < cols; ++c) m(r, c) = parse_complex(j[r][c]);
  }
  return m;
}

json dump_complex_matrix(const Eigen::MatrixXcd& m) {
  json rows = json::array();
  for (long r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (long c = 0; c < m.cols(); ++c) row.push_back(dump_complex(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

// one circuit layer or device channel entry -> LocalSuperOp on its support
LocalSuperOp parse_layer_op(const json& entry, int d, int arity, const std::string& base_dir,
                            int arity_cap) {
  const std::string kind = need(entry, "kind", "layer").get<std::string>();
  if (kind == "builtin") {
    std::string name = need(entry, "name", "layer").get<std::string>();
    std::string arg;
    if (const auto colon = name.find(':'); colon != std::string::npos) {
      arg = name.substr(colon + 1);
      name = name.substr(0, colon);
    }
    const json params = entry.value("params", json::object());
    if (name == "depolarizing") {
      const double p = params.contains("p") ? params.at("p").get<double>() : std::stod(arg);
      return depolarizing(p, arity, d).to_superop();
    }
    if (name == "dephasing") {
      if (arity != 1) throw ValidationError("dephasing is a single-qudit builtin");
      const double p = params.contains("p") ? params.at("p").get<double>() : std::stod(arg);
      return dephasing(p, d).to_superop();
    }
    if (name == "rotation_y") {
      if (d != 2 || arity != 1) throw ValidationError("rotation_y needs d = 2 and one qubit");
      const double theta =
          params.contains("theta") ? params.at("theta").get<double>() : std::stod(arg);
      return rotation_superop(theta);
    }
    if (name == "clifford") {
      const std::string word = params.contains("word") ? params.at("word").get<std::string>() : arg;
      return CliffordGate::parse(word, d, arity).to_superop();
    }
    if (name == "weyl_diagonal") {
      const std::string file = params.contains("file") ? params.at("file").get<std::string>() : arg;
      const json ev = load_json_file(resolve_path(base_dir, file));
      const long dim = pow_long(static_cast<long>(d) * d, arity);
      Eigen::VectorXcd eig(dim);
      if (ev.contains("values")) {
        const json& vals = ev.at("values");
        if (static_cast<long>(vals.size()) != dim) parse_fail("eigenvalue list has the wrong length");
        for (long t = 0; t < dim; ++t) eig[t] = parse_complex(vals[t]);
      } else {
        eig.setZero();
        for (const auto& [key, val] : need(ev, "eigenvalues", "eigenvalue file").items())
          eig[WeylIndex::parse(key, d).linear_index()] = parse_complex(val);
      }
      return WeylDiagonalChannel(std::move(eig), d, arity).to_superop();
    }
    parse_fail("unknown builtin channel '" + name + "'");
  }
  if (kind == "kraus") {
    const json& mats = need(entry, "matrices", "kraus layer");
    std::vector<Eigen::MatrixXcd> kraus;
    for (const json& m : mats) kraus.push_back(parse_complex_matrix(m));
    return LocalSuperOp::from_kraus(kraus, d, arity, Basis::weyl, arity_cap);
  }
  if (kind == "matrix") {
    return LocalSuperOp::from_matrix(parse_complex_matrix(need(entry, "entries", "matrix layer")), d,
                                     arity, Basis::weyl, arity_cap);
  }
  parse_fail("unknown layer kind '" + kind + "'");
}

}  // namespace

CircuitDescription parse_circuit(const json& j, const std::string& base_dir) {
  const int d = need_int(j, "d", "circuit");
  const int n = need_int(j, "n", "circuit");
  const int cap = j.value("arity_cap", kDefaultArityCap);
  CircuitDescription circuit(d, n);
  for (const json& entry : need(j, "layers", "circuit")) {
    const json& sup = need(entry, "support", "layer");
    std::vector<int> support;
    for (const json& q : sup) support.push_back(q.get<int>());
    LocalSuperOp op =
        parse_layer_op(entry, d, static_cast<int>(support.size()), base_dir, cap);
    circuit.append(std::make_shared<LocalSuperOp>(std::move(op)), support,
                   entry.value("label", std::string()));
  }
  return circuit;
}

CircuitDescription load_circuit(const std::string& path) {
  return parse_circuit(load_json_file(path), std::filesystem::path(path).parent_path().string());
}

LocalSuperOp parse_channel_on_register(const json& entry, int d, int n,
                                       const std::string& base_dir) {
  auto one = [&](const json& e) {
    std::vector<int> support;
    if (e.contains("support"))
      for (const json& q : e.at("support")) support.push_back(q.get<int>());
    else
      for (int q = 0; q < n; ++q) support.push_back(q);
    LocalSuperOp local = parse_layer_op(e, d, static_cast<int>(support.size()), base_dir, n);
    std::vector<int> all(n);
    for (int q = 0; q < n; ++q) all[q] = q;
    return embed_on_support(local, support, all);
  };
  if (entry.is_array()) {
    if (entry.empty()) parse_fail("channel list must be nonempty");
    LocalSuperOp acc = one(entry[0]);
    for (size_t i = 1; i < entry.size(); ++i) acc = one(entry[i]).compose_after(acc);
    return acc;
  }
  return one(entry);
}

WeylVector parse_state(const json& j) {
  const int d = need_int(j, "d", "state");
  const int n = need_int(j, "n", "state");
  if (j.value("zero", false)) {
    Eigen::MatrixXcd ket0 = Eigen::MatrixXcd::Zero(d, d);
    ket0(0, 0) = 1;
    return WeylVector::state_from_factors(std::vector<Eigen::MatrixXcd>(n, ket0), d);
  }
  const json& factors = need(j, "factors", "state");
  if (static_cast<int>(factors.size()) != n) parse_fail("state needs one factor per qudit");
  std::vector<Eigen::MatrixXcd> fs;
  for (const json& f : factors) fs.push_back(parse_complex_matrix(f));
  return WeylVector::state_from_factors(fs, d);
}

WeylVector load_state(const std::string& path) { return parse_state(load_json_file(path)); }

WeylVector parse_observable(const json& j) {
  const int d = need_int(j, "d", "observable");
  const int n = need_int(j, "n", "observable");
  if (j.contains("weyl_label"))
    return WeylVector::observable_weyl_operator(
        WeylIndex::parse(j.at("weyl_label").get<std::string>(), d));
  std::vector<std::pair<std::vector<int>, Eigen::MatrixXcd>> blocks;
  for (const json& blk : need(j, "blocks", "observable")) {
    std::vector<int> support;
    for (const json& q : need(blk, "support", "observable block")) support.push_back(q.get<int>());
    blocks.push_back({support, parse_complex_matrix(need(blk, "matrix", "observable block"))});
  }
  return WeylVector::observable_from_blocks(d, n, blocks);
}

WeylVector load_observable(const std::string& path) {
  return parse_observable(load_json_file(path));
}

DeviceModel parse_device(const json& j, const std::string& base_dir) {
  const int d = need_int(j, "d", "device");
  const int n = need_int(j, "n", "device");
  const long hdim = pow_long(d, n);
  Eigen::MatrixXcd u;
  const json& uj = need(j, "unitary", "device");
  if (uj.is_array()) {
    u = parse_complex_matrix(uj);
  } else if (uj.is_object() && uj.contains("clifford")) {
    u = CliffordGate::parse(uj.at("clifford").get<std::string>(), d, n).dense_unitary();
  } else if (uj.is_object() && uj.value("identity", false)) {
    u = Eigen::MatrixXcd::Identity(hdim, hdim);
  } else {
    parse_fail("device unitary must be a matrix, {clifford: word} or {identity: true}");
  }
  const LocalSuperOp noise = parse_channel_on_register(need(j, "noise", "device"), d, n, base_dir);
  std::optional<WeylDiagonalChannel> weyl_noise;
  if (j.contains("weyl_gate_noise")) {
    const LocalSuperOp wn = parse_channel_on_register(j.at("weyl_gate_noise"), d, n, base_dir);
    Eigen::VectorXcd eig = wn.matrix().diagonal();
    if ((wn.matrix() - Eigen::MatrixXcd(eig.asDiagonal())).cwiseAbs().maxCoeff() > 1e-10)
      throw ValidationError("weyl_gate_noise must be Weyl diagonal");
    weyl_noise = WeylDiagonalChannel(std::move(eig), d, n);
  }
  return DeviceModel::from_parts(u, noise, d, n, std::move(weyl_noise));
}

DeviceModel load_device(const std::string& path) {
  return parse_device(load_json_file(path), std::filesystem::path(path).parent_path().string());
}

std::vector<LindbladLayer> parse_lindblad_layers(const json& j, const std::string& base_dir) {
  const int d = need_int(j, "d", "lindblad");
  const int n = need_int(j, "n", "lindblad");
  (void)n;
  std::vector<LindbladLayer> layers;
  for (const json& entry : need(j, "layers", "lindblad")) {
    std::vector<int> support;
    for (const json& q : need(entry, "support", "lindblad layer")) support.push_back(q.get<int>());
    const double t = need(entry, "time", "lindblad layer").get<double>();
    const json& gen = need(entry, "generator", "lindblad layer");
    LocalSuperOp op = [&]() -> LocalSuperOp {
      if (gen.is_object() && gen.value("kind", "") == "builtin" &&
          gen.value("name", "").rfind("dephasing_generator", 0) == 0) {
        const double gamma = gen.value("params", json::object()).value("gamma", 1.0);
        Eigen::VectorXcd diag(4);
        diag << 0, -2 * gamma, 0, -2 * gamma;
        return LocalSuperOp::from_diagonal(diag, 2, 1);
      }
      return parse_layer_op(gen, d, static_cast<int>(support.size()), base_dir, kDefaultArityCap);
    }();
    layers.push_back(make_lindblad_layer(op, support, t));
  }
  return layers;
}

std::vector<LindbladLayer> load_lindblad_layers(const std::string& path) {
  return parse_lindblad_layers(load_json_file(path),
                               std::filesystem::path(path).parent_path().string());
}

Hypergraph parse_hypergraph(const json& j) {
  const int n = need_int(j, "n", "hypergraph");
  std::vector<std::vector<int>> edges;
  for (const json& e : need(j, "edges", "hypergraph")) {
    std::vector<int> edge;
    for (const json& v : e) edge.push_back(v.get<int>());
    edges.push_back(std::move(edge));
  }
  return Hypergraph(n, std::move(edges));
}

Hypergraph load_hypergraph(const std::string& path) {
  return parse_hypergraph(load_json_file(path));
}

std::vector<Measurement> parse_measurements(const json& j, int d, int n) {
  std::vector<Measurement> out;
  for (const json& m : need(j, "measurements", "measurements")) {
    const WeylIndex label = WeylIndex::parse(need(m, "label", "measurement").get<std::string>(), d);
    if (label.n() != n) parse_fail("measurement label has the wrong register size");
    out.push_back({label, parse_complex(need(m, "mu", "measurement")),
                   m.contains("u") ? parse_complex(m.at("u")) : Complex(1, 0)});
  }
  return out;
}

MaxCutProblem parse_maxcut(const json& j) {
  const int n = need_int(j, "n", "graph");
  std::vector<std::tuple<int, int, double>> ws;
  for (const json& w : need(j, "weights", "graph")) {
    if (!w.is_array() || w.size() != 3) parse_fail("graph weights are [i, j, w] triples");
    ws.push_back({w[0].get<int>(), w[1].get<int>(), w[2].get<double>()});
  }
  return MaxCutProblem(n, std::move(ws));
}

MaxCutProblem load_maxcut(const std::string& path) { return parse_maxcut(load_json_file(path)); }

Eigen::MatrixXd parse_theta(const json& j, int n) {
  const json& rows = need(j, "theta", "theta file");
  if (static_cast<int>(rows.size()) != n) parse_fail("theta needs one row per qubit");
  const int depth = rows.empty() ? 0 : static_cast<int>(rows[0].size());
  Eigen::MatrixXd theta(n, depth);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(rows[i].size()) != depth) parse_fail("theta rows must have equal length");
    for (int k = 0; k < depth; ++k) theta(i, k) = rows[i][k].get<double>();
  }
  return theta;
}

json dump_record(const BenchmarkRecord& record) {
  json points = json::array();
  for (const MPoint& p : record.points)
    points.push_back({{"m", p.m},
                      {"runs", p.runs},
                      {"s_mean", dump_complex(p.s_mean)},
                      {"q2", p.q2},
                      {"q2_stderr", p.q2_stderr}});
  return {{"label", record.label}, {"points", std::move(points)}};
}

BenchmarkRecord parse_record(const json& j) {
  BenchmarkRecord rec;
  rec.label = need(j, "label", "record").get<std::string>();
  for (const json& p : need(j, "points", "record")) {
    MPoint point;
    point.m = need_int(p, "m", "record point");
    point.runs = need(p, "runs", "record point").get<std::uint64_t>();
    point.s_mean = parse_complex(need(p, "s_mean", "record point"));
    point.q2 = need(p, "q2", "record point").get<double>();
    point.q2_stderr = need(p, "q2_stderr", "record point").get<double>();
    rec.points.push_back(point);
  }
  return rec;
}

json dump_mu_estimate(const MuEstimate& est) {
  return {{"abs", est.abs},
          {"phase", est.phase},
          {"label", est.label},
          {"spam_constant", est.spam_constant},
          {"m_max", est.m_max},
          {"samples", est.samples},
          {"precision_warning", est.precision_warning}};
}

void emit_decay_csv(const BenchmarkRecord& record, const std::string& path) {
  if (record.points.empty()) throw ValidationError("cannot export an empty record");
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw ValidationError("cannot write file '" + path + "'");
  std::fprintf(f, "m,re_q,im_q,q2,q2_stderr,runs\n");
  for (const MPoint& p : record.points)
    std::fprintf(f, "%d,%.17g,%.17g,%.17g,%.17g,%llu\n", p.m, p.s_mean.real(), p.s_mean.imag(),
                 p.q2, p.q2_stderr, static_cast<unsigned long long>(p.runs));
  std::fclose(f);
}

BenchmarkRecord parse_decay_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) parse_fail("cannot open file '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line != "m,re_q,im_q,q2,q2_stderr,runs")
    parse_fail("unexpected decay CSV header");
  BenchmarkRecord rec;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    MPoint p;
    double re = 0, im = 0;
    unsigned long long runs = 0;
    if (std::sscanf(line.c_str(), "%d,%lg,%lg,%lg,%lg,%llu", &p.m, &re, &im, &p.q2, &p.q2_stderr,
                    &runs) != 6)
      parse_fail("malformed decay CSV row '" + line + "'");
    p.s_mean = {re, im};
    p.runs = runs;
    rec.points.push_back(p);
  }
  return rec;
}

}  // namespace weylsim::io
