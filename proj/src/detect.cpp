#include "iscan/detect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>

#include "iscan/errors.hpp"
#include "iscan/parallel.hpp"

namespace iscan {

std::vector<int> rank_positions(const Eigen::VectorXd& v) {
  const int n = static_cast<int>(v.size());
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    if (v(a) != v(b)) return v(a) < v(b);
    return a < b;
  });
  std::vector<int> rank(static_cast<std::size_t>(n));
  for (int pos = 0; pos < n; ++pos) rank[static_cast<std::size_t>(idx[pos])] = pos;
  return rank;
}

std::vector<int> select_by_threshold(const Eigen::VectorXd& stats, double t) {
  std::vector<int> out;
  for (Eigen::Index i = 0; i < stats.size(); ++i)
    if (stats(i) > t) out.push_back(static_cast<int>(i));
  return out;
}

namespace {

// Knee finder for a non-increasing convex profile, mirroring the classic
// kneedle construction: normalize, flip to a concave increasing curve, then
// walk the difference curve comparing against per-maximum thresholds. Online
// mode: the latest knee found wins. Returns the knee position, or nullopt.
std::optional<int> kneedle_convex_decreasing(const std::vector<double>& y) {
  const int n = static_cast<int>(y.size());
  if (n < 3) return std::nullopt;
  const double ymin = *std::min_element(y.begin(), y.end());
  const double ymax = *std::max_element(y.begin(), y.end());
  if (!(ymax > ymin)) return std::nullopt;

  std::vector<double> xn(static_cast<std::size_t>(n)), yd(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    xn[static_cast<std::size_t>(i)] = static_cast<double>(i) / (n - 1);
    const double ynorm = (y[static_cast<std::size_t>(i)] - ymin) / (ymax - ymin);
    // convex decreasing -> concave increasing, difference against the diagonal
    yd[static_cast<std::size_t>(i)] = (1.0 - ynorm) - xn[static_cast<std::size_t>(i)];
  }

  auto ge = [&](int a, int b) { return yd[static_cast<std::size_t>(a)] >= yd[static_cast<std::size_t>(b)]; };
  std::vector<int> maxima, minima;
  for (int i = 0; i < n; ++i) {
    const int l = std::max(0, i - 1), r = std::min(n - 1, i + 1);
    if (ge(i, l) && ge(i, r)) maxima.push_back(i);
    if (ge(l, i) && ge(r, i)) minima.push_back(i);
  }
  if (maxima.empty()) return std::nullopt;

  const double sensitivity = 1.0;
  const double step = 1.0 / (n - 1);
  std::vector<double> tmx(maxima.size());
  for (std::size_t q = 0; q < maxima.size(); ++q)
    tmx[q] = yd[static_cast<std::size_t>(maxima[q])] - sensitivity * step;

  std::optional<int> knee;
  std::size_t next_max = 0, next_min = 0;
  double threshold = 0.0;
  int threshold_index = -1;
  for (int i = maxima.front(); i + 1 < n; ++i) {
    if (next_max < maxima.size() && maxima[next_max] == i) {
      threshold = tmx[next_max];
      threshold_index = i;
      ++next_max;
    }
    while (next_max < maxima.size() && maxima[next_max] < i) ++next_max;
    if (next_min < minima.size() && minima[next_min] == i) {
      threshold = 0.0;
      ++next_min;
    }
    while (next_min < minima.size() && minima[next_min] < i) ++next_min;
    if (yd[static_cast<std::size_t>(i + 1)] < threshold && threshold_index >= 0)
      knee = threshold_index;  // online update: latest knee wins
  }
  return knee;
}

}  // namespace

std::vector<int> select_by_elbow(const Eigen::VectorXd& stats) {
  const int d = static_cast<int>(stats.size());
  if (d < 3) return {};
  std::vector<int> idx(static_cast<std::size_t>(d));
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    if (stats(a) != stats(b)) return stats(a) > stats(b);
    return a < b;
  });
  std::vector<double> sorted(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) sorted[static_cast<std::size_t>(i)] = stats(idx[static_cast<std::size_t>(i)]);
  const auto knee = kneedle_convex_decreasing(sorted);
  if (!knee) return {};
  std::vector<int> out(idx.begin(), idx.begin() + *knee);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> top_k_stats(const Eigen::VectorXd& stats, int k) {
  const int d = static_cast<int>(stats.size());
  if (k < 0 || k > d) throw std::invalid_argument("top_k_stats: k out of range");
  std::vector<int> idx(static_cast<std::size_t>(d));
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    if (stats(a) != stats(b)) return stats(a) > stats(b);
    return a < b;
  });
  idx.resize(static_cast<std::size_t>(k));
  return idx;
}

ShiftReport iscan(const std::vector<EnvironmentData>& envs, const DetectConfig& cfg) {
  const int num_envs = static_cast<int>(envs.size());
  if (num_envs < 2) throw std::invalid_argument("iscan: need at least 2 environments");
  const Eigen::Index d = envs[0].values.cols();
  Eigen::Index pooled_rows = 0;
  for (const auto& env : envs) {
    if (env.values.cols() != d)
      throw std::invalid_argument("iscan: environments disagree on column count");
    if (env.values.rows() < 3)
      throw std::invalid_argument("iscan: every environment needs at least 3 samples");
    if (!env.values.allFinite()) throw NonFiniteError("iscan: environment data contains NaN/inf");
    pooled_rows += env.values.rows();
  }
  if (!(cfg.epsilon >= 0)) throw std::invalid_argument("iscan: epsilon must be >= 0");

  // Pooled matrix: environments stacked in input order. All later slicing is
  // column-only, so environment permutations only permute pooled rows, which
  // the row-symmetric estimator statistics do not see.
  Eigen::MatrixXd pooled(pooled_rows, d);
  {
    Eigen::Index at = 0;
    for (const auto& env : envs) {
      pooled.middleRows(at, env.values.rows()) = env.values;
      at += env.values.rows();
    }
  }

  std::vector<int> remaining(static_cast<std::size_t>(d));
  std::iota(remaining.begin(), remaining.end(), 0);

  ShiftReport report;
  report.stats = Eigen::VectorXd::Zero(d);
  std::vector<int> reversed_order;
  reversed_order.reserve(static_cast<std::size_t>(d));

  auto take_columns = [](const Eigen::MatrixXd& x, const std::vector<int>& cols) {
    Eigen::MatrixXd out(x.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) out.col(static_cast<Eigen::Index>(c)) = x.col(cols[c]);
    return out;
  };

  while (!remaining.empty()) {
    // One scoring task per environment plus one for the pooled data; each
    // task is pure and single-threaded, so scheduling cannot change results.
    std::vector<Eigen::VectorXd> env_vars(static_cast<std::size_t>(num_envs));
    Eigen::VectorXd pooled_vars;
    parallel_for(static_cast<std::size_t>(num_envs) + 1, cfg.threads, [&](std::size_t task) {
      if (task < static_cast<std::size_t>(num_envs))
        env_vars[task] = jacobian_variance(take_columns(envs[task].values, remaining), cfg.kernel).var;
      else
        pooled_vars = jacobian_variance(take_columns(pooled, remaining), cfg.kernel).var;
    });

    std::vector<int> rank_sum(remaining.size(), 0);
    for (const auto& v : env_vars) {
      const std::vector<int> r = rank_positions(v);
      for (std::size_t i = 0; i < r.size(); ++i) rank_sum[i] += r[i];
    }
    std::size_t leaf_pos = 0;
    for (std::size_t i = 1; i < rank_sum.size(); ++i)
      if (rank_sum[i] < rank_sum[leaf_pos]) leaf_pos = i;  // ties keep lower original index

    const int leaf = remaining[leaf_pos];
    double min_env = std::numeric_limits<double>::infinity();
    IterationRecord rec;
    rec.leaf = leaf;
    for (const auto& v : env_vars) {
      rec.env_variances.push_back(v(static_cast<Eigen::Index>(leaf_pos)));
      min_env = std::min(min_env, v(static_cast<Eigen::Index>(leaf_pos)));
    }
    rec.pooled_variance = pooled_vars(static_cast<Eigen::Index>(leaf_pos));
    report.stats(leaf) = rec.pooled_variance / (min_env + cfg.epsilon);
    report.iterations.push_back(std::move(rec));

    reversed_order.push_back(leaf);
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(leaf_pos));
  }

  report.order.order.assign(reversed_order.rbegin(), reversed_order.rend());
  report.shifted = cfg.selection == DetectConfig::Selection::Threshold
                       ? select_by_threshold(report.stats, cfg.threshold)
                       : select_by_elbow(report.stats);
  return report;
}

}  // namespace iscan
