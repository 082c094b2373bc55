#include "iscan/io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <system_error>

#include "iscan/errors.hpp"

namespace iscan {

std::string format_double(double value) {
  std::array<char, 64> buf;
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), res.ptr);
}

namespace {

std::vector<std::string> default_names(int d) {
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(d));
  for (int c = 0; c < d; ++c) names.push_back("x" + std::to_string(c));
  return names;
}

void check_name(const std::string& name) {
  if (name.empty()) throw std::invalid_argument("write_csv: empty column name");
  if (name.find_first_of(",\n\r") != std::string::npos)
    throw std::invalid_argument("write_csv: column name '" + name + "' needs quoting, unsupported");
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CsvError(path + ": cannot open for writing");
  return out;
}

void write_table(std::ofstream& out, const std::vector<std::string>& header,
                 const Eigen::MatrixXd& values, const std::vector<std::string>& comments) {
  for (const auto& c : comments) out << "# " << c << "\n";
  for (std::size_t i = 0; i < header.size(); ++i) {
    check_name(header[i]);
    out << (i ? "," : "") << header[i];
  }
  out << "\n";
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    for (Eigen::Index c = 0; c < values.cols(); ++c)
      out << (c ? "," : "") << format_double(values(r, c));
    out << "\n";
  }
}

}  // namespace

void write_csv_table(const std::string& path, const std::vector<std::string>& header,
                     const Eigen::MatrixXd& values, const std::vector<std::string>& comments) {
  if (static_cast<Eigen::Index>(header.size()) != values.cols())
    throw std::invalid_argument("write_csv_table: header/column count mismatch");
  if (header.empty()) throw std::invalid_argument("write_csv_table: need at least one column");
  auto out = open_out(path);
  write_table(out, header, values, comments);
  if (!out) throw CsvError(path + ": write failed");
}

void write_csv(const std::string& path, const EnvironmentData& env,
               const std::vector<std::string>& comments) {
  const auto names = env.column_names.empty() ? default_names(static_cast<int>(env.values.cols()))
                                              : env.column_names;
  write_csv_table(path, names, env.values, comments);
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return fields;
}

}  // namespace

EnvironmentData read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CsvError(path + ": cannot open");

  EnvironmentData env;
  std::string line;
  std::size_t lineno = 0;
  std::vector<double> data;
  std::size_t rows = 0;

  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (env.column_names.empty() && !line.empty() && line[0] == '#') continue;
    const std::string where = path + ": line " + std::to_string(lineno);
    if (line.empty()) throw CsvError(where + ": empty line");

    const auto fields = split_fields(line);
    if (env.column_names.empty()) {
      for (std::size_t c = 0; c < fields.size(); ++c)
        if (fields[c].empty())
          throw CsvError(where + ", column " + std::to_string(c + 1) + ": empty header name");
      env.column_names = fields;
      continue;
    }
    if (fields.size() != env.column_names.size())
      throw CsvError(where + ": has " + std::to_string(fields.size()) + " fields, header has " +
                     std::to_string(env.column_names.size()));
    for (std::size_t c = 0; c < fields.size(); ++c) {
      double v = 0;
      const char* first = fields[c].data();
      const char* last = first + fields[c].size();
      const auto res = std::from_chars(first, last, v);
      if (res.ec != std::errc() || res.ptr != last)
        throw CsvError(where + ", column " + std::to_string(c + 1) + " (" + env.column_names[c] +
                       "): cannot parse '" + fields[c] + "' as a number");
      data.push_back(v);
    }
    ++rows;
  }
  if (env.column_names.empty()) throw CsvError(path + ": missing header row");

  const auto cols = static_cast<Eigen::Index>(env.column_names.size());
  env.values.resize(static_cast<Eigen::Index>(rows), cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c)
      env.values(static_cast<Eigen::Index>(r), c) = data[r * static_cast<std::size_t>(cols) +
                                                         static_cast<std::size_t>(c)];
  return env;
}

std::string diff_edges_to_dot(const DiffEdges& diff, int num_nodes,
                              const std::vector<std::string>& names) {
  if (!names.empty() && static_cast<int>(names.size()) != num_nodes)
    throw std::invalid_argument("diff_edges_to_dot: name/node count mismatch");
  const auto label = [&](int v) {
    return names.empty() ? "x" + std::to_string(v) : names[static_cast<std::size_t>(v)];
  };
  std::string out = "digraph diff {\n";
  for (int v = 0; v < num_nodes; ++v) out += "  \"" + label(v) + "\";\n";
  for (const auto& [from, to] : diff.edges) {
    if (from < 0 || from >= num_nodes || to < 0 || to >= num_nodes)
      throw std::invalid_argument("diff_edges_to_dot: edge endpoint out of range");
    out += "  \"" + label(from) + "\" -> \"" + label(to) + "\" [color=red penwidth=2];\n";
  }
  out += "}\n";
  return out;
}

namespace {

std::vector<double> to_std(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

void to_json(nlohmann::json& j, const NoiseSpec& v) {
  j = {{"family", v.family}, {"variance", v.variance}};
}
void from_json(const nlohmann::json& j, NoiseSpec& v) {
  v.family = j.value("family", NoiseSpec{}.family);
  v.variance = j.value("variance", NoiseSpec{}.variance);
}

void to_json(nlohmann::json& j, const GraphSpec& v) {
  j = {{"model", v.model}, {"d", v.d}, {"k", v.k}};
}
void from_json(const nlohmann::json& j, GraphSpec& v) {
  j.at("d").get_to(v.d);
  v.model = j.value("model", GraphSpec{}.model);
  v.k = j.value("k", GraphSpec{}.k);
}

void to_json(nlohmann::json& j, const ScenarioTemplate& v) {
  j = {{"graph", v.graph},
       {"num_envs", v.num_envs},
       {"shifted_fraction", v.shifted_fraction},
       {"shift_kind", v.shift_kind},
       {"mechanism", v.mechanism},
       {"gp_shift", v.gp_shift},
       {"gp_scale_factor", v.gp_scale_factor},
       {"samples_per_env", v.samples_per_env},
       {"noise", v.noise}};
}
void from_json(const nlohmann::json& j, ScenarioTemplate& v) {
  const ScenarioTemplate def;
  j.at("graph").get_to(v.graph);
  v.num_envs = j.value("num_envs", def.num_envs);
  v.shifted_fraction = j.value("shifted_fraction", def.shifted_fraction);
  v.shift_kind = j.value("shift_kind", def.shift_kind);
  v.mechanism = j.value("mechanism", def.mechanism);
  v.gp_shift = j.value("gp_shift", def.gp_shift);
  v.gp_scale_factor = j.value("gp_scale_factor", def.gp_scale_factor);
  v.noise = j.value("noise", def.noise);
  if (j.contains("samples_per_env")) {
    j.at("samples_per_env").get_to(v.samples_per_env);
  } else {
    const int m = j.value("samples", 500);
    v.samples_per_env.assign(static_cast<std::size_t>(v.num_envs), m);
  }
}

void to_json(nlohmann::json& j, const Dag& v) {
  j = {{"num_nodes", v.num_nodes()}, {"edges", v.edges()}};
}
void from_json(const nlohmann::json& j, Dag& v) {
  v = Dag(j.at("num_nodes").get<int>());
  for (const auto& e : j.value("edges", std::vector<std::pair<int, int>>{}))
    v.add_edge(e.first, e.second);
}

void to_json(nlohmann::json& j, const TopologicalOrder& v) { j = v.order; }
void from_json(const nlohmann::json& j, TopologicalOrder& v) { j.get_to(v.order); }

void to_json(nlohmann::json& j, const KernelConfig& v) {
  j = {{"bandwidth_rule", v.bandwidth_rule},
       {"fixed_bandwidth", v.fixed_bandwidth},
       {"ridge", v.ridge}};
}
void from_json(const nlohmann::json& j, KernelConfig& v) {
  const KernelConfig def;
  v.bandwidth_rule = j.value("bandwidth_rule", def.bandwidth_rule);
  v.fixed_bandwidth = j.value("fixed_bandwidth", def.fixed_bandwidth);
  v.ridge = j.value("ridge", def.ridge);
}

void to_json(nlohmann::json& j, const DetectConfig& v) {
  j = {{"kernel", v.kernel},
       {"selection", v.selection},
       {"threshold", v.threshold},
       {"epsilon", v.epsilon},
       {"threads", v.threads}};
}
void from_json(const nlohmann::json& j, DetectConfig& v) {
  const DetectConfig def;
  v.kernel = j.value("kernel", def.kernel);
  v.selection = j.value("selection", def.selection);
  v.threshold = j.value("threshold", def.threshold);
  v.epsilon = j.value("epsilon", def.epsilon);
  v.threads = j.value("threads", def.threads);
}

void to_json(nlohmann::json& j, const BasisConfig& v) {
  j = {{"family", v.family},
       {"degree", v.degree},
       {"knots", v.knots},
       {"alpha", v.alpha},
       {"standardize", v.standardize}};
}
void from_json(const nlohmann::json& j, BasisConfig& v) {
  const BasisConfig def;
  v.family = j.value("family", def.family);
  v.degree = j.value("degree", def.degree);
  v.knots = j.value("knots", def.knots);
  v.alpha = j.value("alpha", def.alpha);
  v.standardize = j.value("standardize", def.standardize);
}

void to_json(nlohmann::json& j, const IterationRecord& v) {
  j = {{"leaf", v.leaf},
       {"env_variances", v.env_variances},
       {"pooled_variance", v.pooled_variance}};
}
void from_json(const nlohmann::json& j, IterationRecord& v) {
  j.at("leaf").get_to(v.leaf);
  v.env_variances = j.value("env_variances", std::vector<double>{});
  v.pooled_variance = j.value("pooled_variance", 0.0);
}

void to_json(nlohmann::json& j, const ShiftReport& v) {
  j = {{"shifted", v.shifted},
       {"order", v.order},
       {"stats", to_std(v.stats)},
       {"iterations", v.iterations}};
}
void from_json(const nlohmann::json& j, ShiftReport& v) {
  j.at("shifted").get_to(v.shifted);
  j.at("order").get_to(v.order);
  v.stats = to_eigen(j.value("stats", std::vector<double>{}));
  v.iterations = j.value("iterations", std::vector<IterationRecord>{});
}

void to_json(nlohmann::json& j, const GroundTruth& v) {
  nlohmann::json deleted = nlohmann::json::array();
  for (const auto& [node, parents] : v.deleted_parents)
    deleted.push_back({{"node", node}, {"parents", parents}});
  j = {{"shifted_nodes", v.shifted_nodes},
       {"per_env_dags", v.per_env_dags},
       {"deleted_parents", deleted},
       {"structurally_shifted_edges", v.structurally_shifted_edges}};
}
void from_json(const nlohmann::json& j, GroundTruth& v) {
  j.at("shifted_nodes").get_to(v.shifted_nodes);
  v.per_env_dags = j.value("per_env_dags", std::vector<Dag>{});
  v.deleted_parents.clear();
  for (const auto& item : j.value("deleted_parents", nlohmann::json::array()))
    v.deleted_parents[item.at("node").get<int>()] =
        item.at("parents").get<std::vector<int>>();
  v.structurally_shifted_edges =
      j.value("structurally_shifted_edges", std::vector<std::pair<int, int>>{});
}

void to_json(nlohmann::json& j, const EdgeTest& v) {
  j = {{"edge", v.edge},
       {"statistic", v.statistic},
       {"df", v.df},
       {"critical", v.critical},
       {"rejected", v.rejected}};
}
void from_json(const nlohmann::json& j, EdgeTest& v) {
  j.at("edge").get_to(v.edge);
  v.statistic = j.value("statistic", 0.0);
  v.df = j.value("df", 0);
  v.critical = j.value("critical", 0.0);
  v.rejected = j.value("rejected", false);
}

void to_json(nlohmann::json& j, const DiffEdges& v) {
  j = {{"kind", v.kind}, {"edges", v.edges}, {"tests", v.tests}, {"warnings", v.warnings}};
}
void from_json(const nlohmann::json& j, DiffEdges& v) {
  v.kind = j.value("kind", DiffKind::Structural);
  j.at("edges").get_to(v.edges);
  v.tests = j.value("tests", std::vector<EdgeTest>{});
  v.warnings = j.value("warnings", std::vector<std::string>{});
}

void to_json(nlohmann::json& j, const Metrics& v) {
  j = {{"precision", v.precision}, {"recall", v.recall}, {"f1", v.f1}};
}
void from_json(const nlohmann::json& j, Metrics& v) {
  v.precision = j.value("precision", 0.0);
  v.recall = j.value("recall", 0.0);
  v.f1 = j.value("f1", 0.0);
}

void to_json(nlohmann::json& j, const Aggregate& v) {
  j = {{"mean", v.mean}, {"se", v.se}, {"count", v.count}};
}

void to_json(nlohmann::json& j, const SeedRecord& v) {
  j = {{"seed", v.seed},       {"failed", v.failed}, {"error", v.error},
       {"node", v.node},       {"edge", v.edge},     {"seconds", v.seconds}};
}

void to_json(nlohmann::json& j, const BenchCell& v) {
  j = {{"name", v.name},
       {"scenario", v.scenario},
       {"detector", v.detector},
       {"run_diff", v.run_diff},
       {"foci_cutoff", v.foci_cutoff}};
}
void from_json(const nlohmann::json& j, BenchCell& v) {
  const BenchCell def;
  j.at("scenario").get_to(v.scenario);
  v.name = j.value("name", def.name);
  v.detector = j.value("detector", def.detector);
  v.run_diff = j.value("run_diff", def.run_diff);
  v.foci_cutoff = j.value("foci_cutoff", def.foci_cutoff);
}

void to_json(nlohmann::json& j, const BenchmarkResult& v) {
  j = {{"cell", v.cell},
       {"records", v.records},
       {"node_precision", v.node_precision},
       {"node_recall", v.node_recall},
       {"node_f1", v.node_f1},
       {"edge_f1", v.edge_f1},
       {"seconds", v.seconds}};
}

}  // namespace iscan
