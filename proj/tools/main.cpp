// Command-line front end: simulate multi-environment data, detect shifted
// nodes, localize shifted edges, run benchmark grids, dump score diagnostics.
// Exit codes: 0 success, 2 configuration/input error, 3 data-consistency
// error. ISCAN_SEED overrides the config-file master seed; a --seed flag
// overrides both.

#include <CLI11.hpp>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <string>
#include <vector>

#include "iscan/detect.hpp"
#include "iscan/errors.hpp"
#include "iscan/eval.hpp"
#include "iscan/io.hpp"
#include "iscan/score.hpp"
#include "iscan/simulate.hpp"
#include "iscan/structure.hpp"

namespace {

using nlohmann::json;

// Cross-dataset disagreement (distinct from a malformed single input).
struct ConsistencyError : std::runtime_error {
  explicit ConsistencyError(const std::string& msg) : std::runtime_error(msg) {}
};

json load_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path + ": cannot open");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << content;
  if (!out) throw std::runtime_error(path + ": write failed");
}

void write_json_file(const std::string& path, const json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

void ensure_out_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error(dir + ": cannot create output directory");
}

// Master seed resolution: config value, then ISCAN_SEED, then --seed flag.
std::uint64_t resolve_seed(const json& cfg, const CLI::Option* seed_opt, std::uint64_t flag_seed) {
  std::uint64_t seed = cfg.value("seed", std::uint64_t{0});
  if (const char* env = std::getenv("ISCAN_SEED")) {
    std::uint64_t v = 0;
    const char* last = env + std::string_view(env).size();
    const auto res = std::from_chars(env, last, v);
    if (res.ec != std::errc() || res.ptr != last)
      throw std::runtime_error(std::string("ISCAN_SEED: cannot parse '") + env +
                               "' as an unsigned integer");
    seed = v;
  }
  if (seed_opt->count() > 0) seed = flag_seed;
  return seed;
}

std::vector<iscan::EnvironmentData> load_environments(const std::vector<std::string>& paths) {
  if (paths.size() < 2) throw ConsistencyError("at least two environments required");
  std::vector<iscan::EnvironmentData> envs;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    iscan::EnvironmentData env = iscan::read_csv(paths[i]);
    env.env_id = static_cast<int>(i);
    if (i > 0 && env.column_names != envs[0].column_names)
      throw ConsistencyError(paths[i] + ": columns disagree with " + paths[0]);
    envs.push_back(std::move(env));
  }
  return envs;
}

int run_simulate(const std::string& config_path, const CLI::Option* seed_opt,
                 std::uint64_t flag_seed, const std::string& out_dir) {
  const json cfg = load_json_file(config_path);
  const auto tmpl = cfg.get<iscan::ScenarioTemplate>();
  const std::uint64_t seed = resolve_seed(cfg, seed_opt, flag_seed);

  json resolved = {{"command", "simulate"}, {"seed", seed}, {"scenario", tmpl}};
  const iscan::ScenarioSpec spec = iscan::instantiate(tmpl, seed);
  const auto [envs, truth] = iscan::build_scenario(spec);

  ensure_out_dir(out_dir);
  const std::string comment = "config: " + resolved.dump();
  for (const auto& env : envs)
    iscan::write_csv(join_path(out_dir, "env_" + std::to_string(env.env_id) + ".csv"), env,
                     {comment});
  write_json_file(join_path(out_dir, "ground_truth.json"),
                  {{"config", resolved}, {"ground_truth", truth}});
  return 0;
}

int run_detect(const std::vector<std::string>& inputs, const std::string& config_path,
               iscan::DetectConfig cfg, const std::string& out_dir) {
  const auto envs = load_environments(inputs);
  const iscan::ShiftReport report = iscan::iscan(envs, cfg);

  json detector = cfg;
  detector.erase("threads");  // scheduling knob; results are thread-invariant
  json resolved = {{"command", "detect"}, {"detector", detector}, {"inputs", inputs}};
  if (!config_path.empty()) resolved["config_file"] = config_path;
  ensure_out_dir(out_dir);
  write_json_file(join_path(out_dir, "report.json"), {{"config", resolved}, {"report", report}});
  return 0;
}

int run_diff(const std::vector<std::string>& inputs, const std::string& report_path,
             const std::string& kind, double cutoff, const iscan::BasisConfig& basis,
             std::uint64_t seed, int threads, const std::string& out_dir) {
  json report_file = load_json_file(report_path);
  iscan::ShiftReport report;
  try {
    report = (report_file.contains("report") ? report_file.at("report") : report_file)
                 .get<iscan::ShiftReport>();
  } catch (const json::exception& e) {
    throw std::runtime_error(report_path + ": not a detection report: " + e.what());
  }

  const auto envs = load_environments(inputs);
  const int d = static_cast<int>(envs[0].values.cols());
  if (static_cast<int>(report.order.order.size()) != d)
    throw ConsistencyError(report_path + ": order covers " +
                           std::to_string(report.order.order.size()) + " nodes, data has " +
                           std::to_string(d) + " columns");

  iscan::DiffEdges diff;
  if (kind == "structural") {
    diff = iscan::diff_structural_edges(envs, report.order, report.shifted, seed, cutoff, threads);
  } else {
    diff = iscan::diff_functional_edges(envs, report.order, report.shifted, basis, threads);
  }
  for (const auto& w : diff.warnings) std::cerr << "warning: " << w << "\n";

  json resolved = {{"command", "diff"},   {"kind", kind},   {"inputs", inputs},
                   {"report", report_path}, {"seed", seed}, {"foci_cutoff", cutoff},
                   {"basis", basis}};
  ensure_out_dir(out_dir);
  write_json_file(join_path(out_dir, "diff_edges.json"), {{"config", resolved}, {"diff", diff}});
  write_text_file(join_path(out_dir, "diff_edges.dot"),
                  "// config: " + resolved.dump() + "\n" +
                      iscan::diff_edges_to_dot(diff, d, envs[0].column_names));
  return 0;
}

std::string csv_safe(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ' ';
  return s;
}

int run_bench(const std::string& config_path, const CLI::Option* seed_opt, std::uint64_t flag_seed,
              int threads, const std::string& out_dir) {
  const json cfg = load_json_file(config_path);
  const auto grid = cfg.at("grid").get<std::vector<iscan::BenchCell>>();
  const int seeds = cfg.value("seeds", 10);
  const std::uint64_t master = resolve_seed(cfg, seed_opt, flag_seed);

  const auto results = iscan::run_benchmark(grid, seeds, master, threads);

  json resolved = {{"command", "bench"}, {"seed", master}, {"seeds", seeds}, {"grid", grid}};
  ensure_out_dir(out_dir);

  std::string csv = "# config: " + resolved.dump() + "\n";
  csv += "cell,seed,failed,error,node_precision,node_recall,node_f1,"
         "edge_precision,edge_recall,edge_f1,seconds\n";
  for (const auto& res : results) {
    for (const auto& rec : res.records) {
      csv += csv_safe(res.cell.name) + "," + std::to_string(rec.seed) + "," +
             (rec.failed ? "1" : "0") + "," + csv_safe(rec.error) + "," +
             iscan::format_double(rec.node.precision) + "," +
             iscan::format_double(rec.node.recall) + "," + iscan::format_double(rec.node.f1) +
             "," + iscan::format_double(rec.edge.precision) + "," +
             iscan::format_double(rec.edge.recall) + "," + iscan::format_double(rec.edge.f1) +
             "," + iscan::format_double(rec.seconds) + "\n";
    }
  }
  write_text_file(join_path(out_dir, "results.csv"), csv);

  json cells = json::array();
  for (const auto& res : results) {
    int failures = 0;
    for (const auto& rec : res.records) failures += rec.failed ? 1 : 0;
    cells.push_back({{"name", res.cell.name},
                     {"node_precision", res.node_precision},
                     {"node_recall", res.node_recall},
                     {"node_f1", res.node_f1},
                     {"edge_f1", res.edge_f1},
                     {"seconds", res.seconds},
                     {"failures", failures}});
  }
  write_json_file(join_path(out_dir, "summary.json"),
                  {{"config", resolved}, {"cells", cells}});
  return 0;
}

int run_score_dump(const std::string& input, const iscan::KernelConfig& kernel,
                   const std::string& out_dir) {
  const iscan::EnvironmentData env = iscan::read_csv(input);
  const iscan::ScoreEstimate est = iscan::estimate_score(env.values, kernel);
  const Eigen::VectorXd var = iscan::column_variance(est.hessian_diag);

  json resolved = {{"command", "score-dump"}, {"input", input}, {"kernel", kernel}};
  const std::string comment = "config: " + resolved.dump();
  ensure_out_dir(out_dir);

  std::vector<std::string> header;
  for (const auto& n : env.column_names) header.push_back("g_" + n);
  for (const auto& n : env.column_names) header.push_back("j_" + n);
  Eigen::MatrixXd table(est.gradients.rows(), est.gradients.cols() + est.hessian_diag.cols());
  table << est.gradients, est.hessian_diag;
  iscan::write_csv_table(join_path(out_dir, "score_dump.csv"), header, table, {comment});

  std::vector<std::string> var_header;
  for (const auto& n : env.column_names) var_header.push_back("var_" + n);
  iscan::write_csv_table(join_path(out_dir, "score_var.csv"), var_header, var.transpose(),
                         {comment});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"causal mechanism shift detection across environments"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".", report_path, kind = "structural";
  std::vector<std::string> inputs;
  std::uint64_t flag_seed = 0;
  double eta = 0.05, threshold = 2.0, alpha = 0.05, cutoff = 0.0, bandwidth = 0.0;
  int threads = 0;

  auto* sim = app.add_subcommand("simulate", "sample a multi-environment scenario");
  sim->add_option("--config", config_path, "scenario config JSON")->required();
  auto* sim_seed = sim->add_option("--seed", flag_seed, "master seed");
  sim->add_option("--out-dir", out_dir, "output directory");

  auto* det = app.add_subcommand("detect", "detect shifted nodes across datasets");
  det->add_option("inputs", inputs, "environment CSV files")->required();
  det->add_option("--config", config_path, "detector config JSON");
  auto* det_eta = det->add_option("--eta", eta, "kernel ridge");
  auto* det_thr = det->add_option("--threshold", threshold, "stats ratio threshold");
  auto* det_elbow = det->add_flag("--elbow", "select by elbow instead of threshold");
  auto* det_threads = det->add_option("--threads", threads, "worker threads, 0 = auto");
  det->add_option("--out-dir", out_dir, "output directory");

  auto* dif = app.add_subcommand("diff", "localize shifted edges for a detection report");
  dif->add_option("inputs", inputs, "environment CSV files")->required();
  dif->add_option("--report", report_path, "report.json from detect")->required();
  dif->add_option("--kind", kind, "structural|functional")
      ->check(CLI::IsMember({"structural", "functional"}));
  auto* dif_alpha = dif->add_option("--alpha", alpha, "test level (functional kind)");
  dif->add_option("--cutoff", cutoff, "parent-selection cutoff (structural kind)");
  dif->add_option("--config", config_path, "diff config JSON");
  auto* dif_seed = dif->add_option("--seed", flag_seed, "tie-break seed");
  auto* dif_threads = dif->add_option("--threads", threads, "worker threads, 0 = auto");
  dif->add_option("--out-dir", out_dir, "output directory");

  auto* ben = app.add_subcommand("bench", "run a benchmark grid");
  ben->add_option("--config", config_path, "grid config JSON")->required();
  auto* ben_seed = ben->add_option("--seed", flag_seed, "master seed");
  ben->add_option("--threads", threads, "worker threads, 0 = auto");
  ben->add_option("--out-dir", out_dir, "output directory");

  auto* dmp = app.add_subcommand("score-dump", "export score gradients and Hessian diagonals");
  dmp->add_option("input", inputs, "one dataset CSV")->expected(1)->required();
  auto* dmp_eta = dmp->add_option("--eta", eta, "kernel ridge");
  auto* dmp_bw = dmp->add_option("--bandwidth", bandwidth, "fixed kernel bandwidth");
  dmp->add_option("--out-dir", out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*sim) return run_simulate(config_path, sim_seed, flag_seed, out_dir);

    if (*det) {
      iscan::DetectConfig cfg;
      if (!config_path.empty()) cfg = load_json_file(config_path).get<iscan::DetectConfig>();
      if (*det_eta) cfg.kernel.ridge = eta;
      if (*det_thr) {
        cfg.selection = iscan::DetectConfig::Selection::Threshold;
        cfg.threshold = threshold;
      }
      if (*det_elbow) cfg.selection = iscan::DetectConfig::Selection::Elbow;
      if (*det_threads) cfg.threads = threads;
      return run_detect(inputs, config_path, cfg, out_dir);
    }

    if (*dif) {
      iscan::BasisConfig basis;
      std::uint64_t seed = 0;
      if (!config_path.empty()) {
        const json cfg = load_json_file(config_path);
        basis = cfg.value("basis", basis);
        cutoff = cfg.value("foci_cutoff", cutoff);
        seed = cfg.value("seed", seed);
        if (!dif->get_option("--kind")->count()) kind = cfg.value("kind", kind);
      }
      if (*dif_alpha) basis.alpha = alpha;
      if (*dif_seed) seed = flag_seed;
      const int t = *dif_threads ? threads : 0;
      return run_diff(inputs, report_path, kind, cutoff, basis, seed, t, out_dir);
    }

    if (*ben) return run_bench(config_path, ben_seed, flag_seed, threads, out_dir);

    if (*dmp) {
      iscan::KernelConfig kernel;
      if (*dmp_eta) kernel.ridge = eta;
      if (*dmp_bw) {
        kernel.bandwidth_rule = iscan::KernelConfig::Bandwidth::Fixed;
        kernel.fixed_bandwidth = bandwidth;
      }
      return run_score_dump(inputs[0], kernel, out_dir);
    }
  } catch (const ConsistencyError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
