#include "iscan/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>
#include <stdexcept>

#include "iscan/parallel.hpp"
#include "iscan/rng.hpp"
#include "iscan/structure.hpp"

namespace iscan {

namespace {

template <typename T>
Metrics overlap_metrics(const std::vector<T>& predicted, const std::vector<T>& truth) {
  const std::set<T> pred(predicted.begin(), predicted.end());
  const std::set<T> tru(truth.begin(), truth.end());
  if (pred.empty() && tru.empty()) return {1.0, 1.0, 1.0};
  if (pred.empty()) return {1.0, 0.0, 0.0};
  if (tru.empty()) return {0.0, 1.0, 0.0};
  std::size_t hits = 0;
  for (const T& e : pred) hits += tru.count(e);
  Metrics m;
  m.precision = static_cast<double>(hits) / static_cast<double>(pred.size());
  m.recall = static_cast<double>(hits) / static_cast<double>(tru.size());
  m.f1 = m.precision + m.recall > 0 ? 2 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
  return m;
}

}  // namespace

Metrics set_metrics(const std::vector<int>& predicted, const std::vector<int>& truth) {
  return overlap_metrics(predicted, truth);
}

Metrics set_metrics(const std::vector<std::pair<int, int>>& predicted,
                    const std::vector<std::pair<int, int>>& truth) {
  return overlap_metrics(predicted, truth);
}

double top_k_precision(const Eigen::VectorXd& stats, const std::vector<int>& truth, int k) {
  if (k < 1 || k > stats.size())
    throw std::invalid_argument("top_k_precision: k must lie in [1, d]");
  const std::vector<int> top = top_k_stats(stats, k);
  const std::set<int> tru(truth.begin(), truth.end());
  std::size_t hits = 0;
  for (int node : top) hits += tru.count(node);
  return static_cast<double>(hits) / static_cast<double>(k);
}

namespace {

template <typename Get, typename Use>
Aggregate aggregate_over(const std::vector<SeedRecord>& records, Get get, Use use) {
  Aggregate a;
  double sum = 0.0;
  for (const auto& r : records) {
    if (r.failed || !use(r)) continue;
    sum += get(r);
    ++a.count;
  }
  if (a.count == 0) return a;
  a.mean = sum / a.count;
  double ss = 0.0;
  for (const auto& r : records) {
    if (r.failed || !use(r)) continue;
    const double dev = get(r) - a.mean;
    ss += dev * dev;
  }
  if (a.count > 1) a.se = std::sqrt(ss / (a.count - 1)) / std::sqrt(static_cast<double>(a.count));
  return a;
}

}  // namespace

std::vector<BenchmarkResult> run_benchmark(const std::vector<BenchCell>& grid, int seeds,
                                           std::uint64_t master_seed, int threads) {
  if (grid.empty()) throw std::invalid_argument("run_benchmark: empty grid");
  if (seeds < 1) throw std::invalid_argument("run_benchmark: seeds must be >= 1");

  std::vector<BenchmarkResult> results(grid.size());
  for (std::size_t c = 0; c < grid.size(); ++c) {
    results[c].cell = grid[c];
    results[c].records.resize(static_cast<std::size_t>(seeds));
  }

  // Every (cell, seed) task is a pure function of the cell and derived seed
  // writing into its own slot; cells share the seed list so they are paired.
  parallel_for(grid.size() * static_cast<std::size_t>(seeds), threads, [&](std::size_t task) {
    const std::size_t c = task / static_cast<std::size_t>(seeds);
    const std::size_t s = task % static_cast<std::size_t>(seeds);
    const BenchCell& cell = grid[c];
    SeedRecord& rec = results[c].records[s];
    rec.seed = derive_seed(master_seed, "bench-run", static_cast<std::uint64_t>(s));
    try {
      const ScenarioSpec spec = instantiate(cell.scenario, rec.seed);
      const auto [envs, truth] = build_scenario(spec);
      const auto t0 = std::chrono::steady_clock::now();
      const ShiftReport report = iscan(envs, cell.detector);
      const auto t1 = std::chrono::steady_clock::now();
      rec.seconds = std::chrono::duration<double>(t1 - t0).count();
      rec.node = set_metrics(report.shifted, truth.shifted_nodes);
      if (cell.run_diff) {
        const DiffEdges diff =
            diff_structural_edges(envs, report.order, report.shifted,
                                  derive_seed(rec.seed, "bench-diff"), cell.foci_cutoff, 1);
        rec.edge = set_metrics(diff.edges, truth.structurally_shifted_edges);
      }
    } catch (const std::exception& err) {
      rec.failed = true;
      rec.error = err.what();
    }
  });

  for (auto& res : results) {
    const bool with_diff = res.cell.run_diff;
    auto always = [](const SeedRecord&) { return true; };
    res.node_precision = aggregate_over(res.records, [](const SeedRecord& r) { return r.node.precision; }, always);
    res.node_recall = aggregate_over(res.records, [](const SeedRecord& r) { return r.node.recall; }, always);
    res.node_f1 = aggregate_over(res.records, [](const SeedRecord& r) { return r.node.f1; }, always);
    res.edge_f1 = aggregate_over(res.records, [](const SeedRecord& r) { return r.edge.f1; },
                                 [with_diff](const SeedRecord&) { return with_diff; });
    res.seconds = aggregate_over(res.records, [](const SeedRecord& r) { return r.seconds; }, always);
  }
  return results;
}

}  // namespace iscan
