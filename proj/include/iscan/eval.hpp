#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "iscan/detect.hpp"
#include "iscan/simulate.hpp"

namespace iscan {

struct Metrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Set-overlap precision/recall/F1. Empty-set conventions: both empty ->
// (1,1,1); prediction empty, truth nonempty -> p=1, r=0; prediction nonempty,
// truth empty -> p=0, r=1. f1 = 2pr/(p+r) when p+r > 0, else 0.
Metrics set_metrics(const std::vector<int>& predicted, const std::vector<int>& truth);
Metrics set_metrics(const std::vector<std::pair<int, int>>& predicted,
                    const std::vector<std::pair<int, int>>& truth);

// Fraction of the k highest-stat nodes that are truly shifted. 1 <= k <= d.
double top_k_precision(const Eigen::VectorXd& stats, const std::vector<int>& truth, int k);

// One cell of a benchmark grid: a scenario family plus one detector config.
struct BenchCell {
  std::string name;
  ScenarioTemplate scenario;
  DetectConfig detector;
  bool run_diff = false;     // also recover structurally shifted edges
  double foci_cutoff = 0.0;  // passed through to the parent search
};

struct SeedRecord {
  std::uint64_t seed = 0;
  bool failed = false;
  std::string error;
  Metrics node;          // detected shifted set vs ground truth
  Metrics edge;          // recovered diff edges vs ground truth (run_diff only)
  double seconds = 0.0;  // detection wall clock; simulation excluded
};

struct Aggregate {
  double mean = 0.0;
  double se = 0.0;  // sample std / sqrt(count)
  int count = 0;
};

struct BenchmarkResult {
  BenchCell cell;
  std::vector<SeedRecord> records;  // one per seed, in seed order
  Aggregate node_precision, node_recall, node_f1;
  Aggregate edge_f1;
  Aggregate seconds;
};

// Runs every (cell, seed) pair: instantiate the scenario, sample it, time the
// detector, score against ground truth, optionally recover structural diff
// edges with the estimated order and shifted set. A failing run is tagged on
// its record and excluded from the aggregates; the grid never aborts. Output
// metrics are identical across runs and thread counts (wall clock aside).
std::vector<BenchmarkResult> run_benchmark(const std::vector<BenchCell>& grid, int seeds,
                                           std::uint64_t master_seed = 0, int threads = 0);

}  // namespace iscan
