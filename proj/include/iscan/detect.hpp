#pragma once

#include <Eigen/Dense>
#include <vector>

#include "iscan/graph.hpp"
#include "iscan/score.hpp"
#include "iscan/simulate.hpp"

namespace iscan {

struct DetectConfig {
  KernelConfig kernel;  // ridge defaults to 0.05
  enum class Selection { Threshold, Elbow } selection = Selection::Threshold;
  double threshold = 2.0;
  double epsilon = 1e-9;  // ratio denominator guard
  int threads = 0;        // 0 = hardware concurrency
};

// One leaf-removal round: which node was removed and the variance values the
// decision consumed.
struct IterationRecord {
  int leaf = -1;                      // original column index
  std::vector<double> env_variances;  // per environment, value for the leaf
  double pooled_variance = 0.0;
};

struct ShiftReport {
  std::vector<int> shifted;     // ascending node ids
  TopologicalOrder order;       // estimated causal order, sources first
  Eigen::VectorXd stats;        // pooled/env variance ratio per node
  std::vector<IterationRecord> iterations;
};

// Position of each element in an ascending sort, ties broken by lower index:
// (5.2, 3.1, 4.5, 1.6) -> (3, 1, 2, 0).
std::vector<int> rank_positions(const Eigen::VectorXd& v);

// Iterative leaf removal over the pooled and per-environment data. Each round
// scores every remaining column in every environment, picks the node with the
// smallest rank-sum of per-environment Jacobian variances as the current
// leaf, records the ratio pooled variance / (min env variance + epsilon) for
// it, removes the column, and repeats. Nodes are flagged by threshold or
// elbow selection on the final ratios.
ShiftReport iscan(const std::vector<EnvironmentData>& envs, const DetectConfig& cfg = {});

// Nodes whose statistic strictly exceeds t, ascending.
std::vector<int> select_by_threshold(const Eigen::VectorXd& stats, double t);

// Knee detection on the non-increasingly sorted statistics (convex decreasing
// curve, linear interpolation, online updating); returns the nodes strictly
// before the knee. Empty when no knee exists (constant or linear profiles).
std::vector<int> select_by_elbow(const Eigen::VectorXd& stats);

// Indices of the k largest statistics, descending, ties by lower index.
std::vector<int> top_k_stats(const Eigen::VectorXd& stats, int k);

}  // namespace iscan
