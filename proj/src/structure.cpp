#include "iscan/structure.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>

#include "iscan/errors.hpp"
#include "iscan/parallel.hpp"
#include "iscan/rng.hpp"

namespace iscan {

namespace {

// Average ranks (1-based); ties share the mean of their positions.
Eigen::VectorXd average_ranks(const Eigen::VectorXd& v) {
  const Eigen::Index n = v.size();
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) { return v(a) < v(b); });
  Eigen::VectorXd r(n);
  Eigen::Index i = 0;
  while (i < n) {
    Eigen::Index j = i;
    while (j + 1 < n && v(idx[static_cast<std::size_t>(j + 1)]) == v(idx[static_cast<std::size_t>(i)])) ++j;
    const double mean_rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (Eigen::Index q = i; q <= j; ++q) r(idx[static_cast<std::size_t>(q)]) = mean_rank;
    i = j + 1;
  }
  return r;
}

Eigen::MatrixXd rank_columns(const Eigen::MatrixXd& m) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (Eigen::Index c = 0; c < m.cols(); ++c) out.col(c) = average_ranks(m.col(c));
  return out;
}

// Nearest neighbor of every row (excluding itself), ties uniform at random
// from a per-row derived stream. Distances over ranks are exact in double, so
// tie detection by equality is sound.
std::vector<Eigen::Index> nearest_neighbors(const Eigen::MatrixXd& pts, std::uint64_t seed) {
  const Eigen::Index n = pts.rows();
  std::vector<Eigen::Index> nn(static_cast<std::size_t>(n));
  std::vector<Eigen::Index> ties;
  for (Eigen::Index i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    ties.clear();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d2 = (pts.row(i) - pts.row(j)).squaredNorm();
      if (d2 < best) {
        best = d2;
        ties.assign(1, j);
      } else if (d2 == best) {
        ties.push_back(j);
      }
    }
    if (ties.size() == 1) {
      nn[static_cast<std::size_t>(i)] = ties[0];
    } else {
      auto eng = make_engine(derive_seed(seed, "nn-tie", static_cast<std::uint64_t>(i)));
      std::uniform_int_distribution<std::size_t> pick(0, ties.size() - 1);
      nn[static_cast<std::size_t>(i)] = ties[pick(eng)];
    }
  }
  return nn;
}

struct YRanks {
  std::vector<double> r;  // R_i = #{j : y_j <= y_i}
  std::vector<double> l;  // L_i = #{j : y_j >= y_i}
};

YRanks y_ranks(const Eigen::VectorXd& y) {
  const Eigen::Index n = y.size();
  std::vector<double> sorted(y.data(), y.data() + n);
  std::sort(sorted.begin(), sorted.end());
  YRanks out;
  out.r.resize(static_cast<std::size_t>(n));
  out.l.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    out.r[static_cast<std::size_t>(i)] =
        static_cast<double>(std::upper_bound(sorted.begin(), sorted.end(), y(i)) - sorted.begin());
    out.l[static_cast<std::size_t>(i)] =
        static_cast<double>(sorted.end() - std::lower_bound(sorted.begin(), sorted.end(), y(i)));
  }
  return out;
}

void check_codec_input(const Eigen::VectorXd& y, const Eigen::MatrixXd& z,
                       const Eigen::MatrixXd& x_cond) {
  const Eigen::Index n = y.size();
  if (n < 3) throw std::invalid_argument("codec: needs at least 3 samples");
  if (z.rows() != n) throw std::invalid_argument("codec: z row count mismatch");
  if (z.cols() < 1) throw std::invalid_argument("codec: z needs at least one column");
  if (x_cond.cols() > 0 && x_cond.rows() != n)
    throw std::invalid_argument("codec: conditioning row count mismatch");
  if (!y.allFinite() || !z.allFinite() || !(x_cond.size() == 0 || x_cond.allFinite()))
    throw NonFiniteError("codec: input contains NaN/inf");
}

}  // namespace

double codec(const Eigen::VectorXd& y, const Eigen::MatrixXd& z, const Eigen::MatrixXd& x_cond,
             std::uint64_t tie_seed) {
  check_codec_input(y, z, x_cond);
  const Eigen::Index n = y.size();
  const YRanks yr = y_ranks(y);
  const Eigen::MatrixXd zr = rank_columns(z);

  if (x_cond.cols() == 0) {
    const auto m = nearest_neighbors(zr, derive_seed(tie_seed, "nn-z"));
    double num = 0, den = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const std::size_t si = static_cast<std::size_t>(i);
      num += static_cast<double>(n) * std::min(yr.r[si], yr.r[static_cast<std::size_t>(m[si])]) -
             yr.l[si] * yr.l[si];
      den += yr.l[si] * (static_cast<double>(n) - yr.l[si]);
    }
    if (den == 0) throw DegenerateDenominatorError("codec: constant target");
    return num / den;
  }

  const Eigen::MatrixXd xr = rank_columns(x_cond);
  Eigen::MatrixXd xzr(n, xr.cols() + zr.cols());
  xzr << xr, zr;
  const auto nn_x = nearest_neighbors(xr, derive_seed(tie_seed, "nn-x"));
  const auto nn_xz = nearest_neighbors(xzr, derive_seed(tie_seed, "nn-xz"));
  double num = 0, den = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::size_t si = static_cast<std::size_t>(i);
    const double ri = yr.r[si];
    const double rm = yr.r[static_cast<std::size_t>(nn_xz[si])];
    const double rn = yr.r[static_cast<std::size_t>(nn_x[si])];
    num += std::min(ri, rm) - std::min(ri, rn);
    den += ri - std::min(ri, rn);
  }
  if (den == 0)
    throw DegenerateDenominatorError("codec: target already determined by conditioning set");
  return num / den;
}

double codec(const Eigen::VectorXd& y, const Eigen::MatrixXd& z, std::uint64_t tie_seed) {
  return codec(y, z, Eigen::MatrixXd(y.size(), 0), tie_seed);
}

std::vector<int> foci_select(const Eigen::MatrixXd& candidates, const Eigen::VectorXd& target,
                             std::uint64_t seed, double cutoff) {
  if (candidates.rows() != target.size())
    throw std::invalid_argument("foci_select: candidate/target row mismatch");
  const int p = static_cast<int>(candidates.cols());
  std::vector<int> selected;
  std::vector<int> remaining(static_cast<std::size_t>(p));
  std::iota(remaining.begin(), remaining.end(), 0);

  while (!remaining.empty()) {
    Eigen::MatrixXd cond(candidates.rows(), static_cast<Eigen::Index>(selected.size()));
    for (std::size_t c = 0; c < selected.size(); ++c)
      cond.col(static_cast<Eigen::Index>(c)) = candidates.col(selected[c]);

    double best = -std::numeric_limits<double>::infinity();
    int best_idx = -1;
    bool degenerate = false;
    for (int idx : remaining) {
      double t;
      try {
        t = codec(target, candidates.col(idx), cond,
                  derive_seed(seed, "foci-step", selected.size(), static_cast<std::uint64_t>(idx)));
      } catch (const DegenerateDenominatorError&) {
        degenerate = true;  // target fully explained: stop selecting
        break;
      }
      if (t > best) {  // strict: ties keep the lowest candidate index
        best = t;
        best_idx = idx;
      }
    }
    if (degenerate || best <= cutoff) break;
    selected.push_back(best_idx);
    remaining.erase(std::find(remaining.begin(), remaining.end(), best_idx));
  }
  std::sort(selected.begin(), selected.end());
  return selected;
}

namespace {

std::vector<int> positions_of(const TopologicalOrder& order, int d) {
  if (static_cast<int>(order.order.size()) != d)
    throw std::invalid_argument("order length does not match column count");
  std::vector<int> pos(static_cast<std::size_t>(d), -1);
  for (int p = 0; p < d; ++p) {
    const int node = order.order[static_cast<std::size_t>(p)];
    if (node < 0 || node >= d || pos[static_cast<std::size_t>(node)] != -1)
      throw std::invalid_argument("order is not a permutation");
    pos[static_cast<std::size_t>(node)] = p;
  }
  return pos;
}

void check_envs(const std::vector<EnvironmentData>& envs) {
  if (envs.size() < 2) throw std::invalid_argument("need at least 2 environments");
  for (const auto& e : envs) {
    if (e.values.cols() != envs[0].values.cols())
      throw std::invalid_argument("environments disagree on column count");
    if (!e.values.allFinite()) throw NonFiniteError("environment data contains NaN/inf");
  }
}

std::vector<int> check_shifted(const std::vector<int>& shifted, int d) {
  std::vector<int> s = shifted;
  std::sort(s.begin(), s.end());
  for (int j : s)
    if (j < 0 || j >= d) throw std::invalid_argument("shifted node out of range");
  if (std::adjacent_find(s.begin(), s.end()) != s.end())
    throw std::invalid_argument("shifted nodes contain duplicates");
  return s;
}

}  // namespace

DiffEdges diff_structural_edges(const std::vector<EnvironmentData>& envs,
                                const TopologicalOrder& order, const std::vector<int>& shifted,
                                std::uint64_t seed, double cutoff, int threads) {
  check_envs(envs);
  const int d = static_cast<int>(envs[0].values.cols());
  const std::vector<int> pos = positions_of(order, d);
  const std::vector<int> targets = check_shifted(shifted, d);
  const int num_envs = static_cast<int>(envs.size());

  // Parent sets per (shifted node, environment); each slot independent.
  std::vector<std::vector<std::vector<int>>> parent_sets(
      targets.size(), std::vector<std::vector<int>>(static_cast<std::size_t>(num_envs)));
  parallel_for(targets.size() * static_cast<std::size_t>(num_envs), threads, [&](std::size_t task) {
    const std::size_t ti = task / static_cast<std::size_t>(num_envs);
    const int h = static_cast<int>(task % static_cast<std::size_t>(num_envs));
    const int j = targets[ti];
    std::vector<int> pre;
    for (int k = 0; k < d; ++k)
      if (pos[static_cast<std::size_t>(k)] < pos[static_cast<std::size_t>(j)]) pre.push_back(k);
    if (pre.empty()) return;
    const auto& x = envs[static_cast<std::size_t>(h)].values;
    Eigen::MatrixXd cand(x.rows(), static_cast<Eigen::Index>(pre.size()));
    for (std::size_t c = 0; c < pre.size(); ++c)
      cand.col(static_cast<Eigen::Index>(c)) = x.col(pre[c]);
    const std::vector<int> sel =
        foci_select(cand, x.col(j),
                    derive_seed(seed, "structural-foci", static_cast<std::uint64_t>(j),
                                static_cast<std::uint64_t>(h)),
                    cutoff);
    auto& out = parent_sets[ti][static_cast<std::size_t>(h)];
    for (int c : sel) out.push_back(pre[static_cast<std::size_t>(c)]);
  });

  DiffEdges result;
  result.kind = DiffKind::Structural;
  for (std::size_t ti = 0; ti < targets.size(); ++ti) {
    std::set<int> in_union, in_all;
    for (int h = 0; h < num_envs; ++h)
      in_union.insert(parent_sets[ti][static_cast<std::size_t>(h)].begin(),
                      parent_sets[ti][static_cast<std::size_t>(h)].end());
    in_all = in_union;
    for (int h = 0; h < num_envs; ++h) {
      std::set<int> cur(parent_sets[ti][static_cast<std::size_t>(h)].begin(),
                        parent_sets[ti][static_cast<std::size_t>(h)].end());
      std::set<int> keep;
      std::set_intersection(in_all.begin(), in_all.end(), cur.begin(), cur.end(),
                            std::inserter(keep, keep.begin()));
      in_all = std::move(keep);
    }
    for (int k : in_union)
      if (!in_all.contains(k)) result.edges.emplace_back(k, targets[ti]);
  }
  std::sort(result.edges.begin(), result.edges.end());
  return result;
}

double chi_squared_quantile(double probability, int df) {
  if (df < 1) throw std::invalid_argument("chi_squared_quantile: df must be >= 1");
  if (!(probability > 0 && probability < 1))
    throw std::invalid_argument("chi_squared_quantile: probability must lie in (0,1)");
  return boost::math::quantile(boost::math::chi_squared_distribution<double>(df), probability);
}

namespace {

// Frozen feature map for one regressor column, shared across environments.
struct BasisDef {
  BasisConfig::Family family = BasisConfig::Family::Polynomial;
  int degree = 5;
  double center = 0.0, scale = 1.0;  // polynomial standardization
  std::vector<double> knot_vector;   // bspline
  int num_basis = 0;

  Eigen::MatrixXd eval(const Eigen::VectorXd& x) const;
};

double bspline_basis(const std::vector<double>& t, int i, int p, double x) {
  if (p == 0) {
    // Half-open intervals, except the last non-empty one which is closed so
    // the partition of unity also covers the right endpoint.
    const bool last = t[static_cast<std::size_t>(i + 1)] == t.back();
    if (last) return x >= t[static_cast<std::size_t>(i)] && x <= t[static_cast<std::size_t>(i + 1)] ? 1.0 : 0.0;
    return x >= t[static_cast<std::size_t>(i)] && x < t[static_cast<std::size_t>(i + 1)] ? 1.0 : 0.0;
  }
  double out = 0;
  const double den1 = t[static_cast<std::size_t>(i + p)] - t[static_cast<std::size_t>(i)];
  if (den1 > 0) out += (x - t[static_cast<std::size_t>(i)]) / den1 * bspline_basis(t, i, p - 1, x);
  const double den2 = t[static_cast<std::size_t>(i + p + 1)] - t[static_cast<std::size_t>(i + 1)];
  if (den2 > 0)
    out += (t[static_cast<std::size_t>(i + p + 1)] - x) / den2 * bspline_basis(t, i + 1, p - 1, x);
  return out;
}

Eigen::MatrixXd BasisDef_eval_poly(const BasisDef& def, const Eigen::VectorXd& x) {
  Eigen::MatrixXd out(x.size(), def.degree);
  Eigen::VectorXd t = (x.array() - def.center) / def.scale;
  Eigen::VectorXd acc = t;
  for (int c = 0; c < def.degree; ++c) {
    out.col(c) = acc;
    acc = acc.cwiseProduct(t);
  }
  return out;
}

Eigen::MatrixXd BasisDef::eval(const Eigen::VectorXd& x) const {
  if (family == BasisConfig::Family::Polynomial) return BasisDef_eval_poly(*this, x);
  Eigen::MatrixXd out(x.size(), num_basis);
  for (Eigen::Index r = 0; r < x.size(); ++r) {
    const double v = std::clamp(x(r), knot_vector.front(), knot_vector.back());
    for (int b = 0; b < num_basis; ++b) out(r, b) = bspline_basis(knot_vector, b, degree, v);
  }
  return out;
}

BasisDef make_basis(const Eigen::VectorXd& pooled_col, const BasisConfig& cfg, bool standardize) {
  if (cfg.degree < 1) throw std::invalid_argument("BasisConfig: degree must be >= 1");
  BasisDef def;
  def.family = cfg.family;
  def.degree = cfg.degree;
  if (cfg.family == BasisConfig::Family::Polynomial) {
    def.num_basis = cfg.degree;
    if (standardize) {
      def.center = pooled_col.mean();
      const double var =
          (pooled_col.array() - def.center).square().sum() / std::max<double>(1, pooled_col.size() - 1);
      def.scale = var > 0 ? std::sqrt(var) : 1.0;
    }
    return def;
  }
  if (cfg.knots < 0) throw std::invalid_argument("BasisConfig: knots must be >= 0");
  const double lo = pooled_col.minCoeff(), hi = pooled_col.maxCoeff();
  if (!(hi > lo)) throw std::invalid_argument("basis_expand: constant column has no bspline span");
  const int p = cfg.degree;
  for (int q = 0; q <= p; ++q) def.knot_vector.push_back(lo);
  for (int q = 1; q <= cfg.knots; ++q)
    def.knot_vector.push_back(lo + (hi - lo) * q / (cfg.knots + 1));
  for (int q = 0; q <= p; ++q) def.knot_vector.push_back(hi);
  def.num_basis = cfg.knots + p + 1;
  return def;
}

}  // namespace

Eigen::MatrixXd basis_expand(const Eigen::VectorXd& x, const BasisConfig& cfg) {
  if (x.size() < 1) throw std::invalid_argument("basis_expand: empty input");
  if (!x.allFinite()) throw NonFiniteError("basis_expand: input contains NaN/inf");
  return make_basis(x, cfg, /*standardize=*/false).eval(x);
}

Eigen::VectorXd AdditiveFit::block(int env, int pred_pos) const {
  return coefficients[static_cast<std::size_t>(env)].segment(1 + pred_pos * block_size, block_size);
}

Eigen::MatrixXd AdditiveFit::block_cov(int env, int pred_pos) const {
  return covariance[static_cast<std::size_t>(env)].block(1 + pred_pos * block_size,
                                                         1 + pred_pos * block_size, block_size,
                                                         block_size);
}

AdditiveFit fit_additive_regression(const std::vector<EnvironmentData>& envs,
                                    const std::vector<int>& predecessors, int target,
                                    const BasisConfig& cfg) {
  check_envs(envs);
  const int d = static_cast<int>(envs[0].values.cols());
  if (target < 0 || target >= d) throw std::invalid_argument("fit_additive_regression: bad target");
  if (predecessors.empty())
    throw std::invalid_argument("fit_additive_regression: empty predecessor set");
  for (int k : predecessors)
    if (k < 0 || k >= d || k == target)
      throw std::invalid_argument("fit_additive_regression: bad predecessor " + std::to_string(k));

  Eigen::Index pooled_rows = 0;
  for (const auto& e : envs) pooled_rows += e.values.rows();

  // Shared basis per predecessor, frozen from the pooled column so the
  // coefficient blocks are expressed in one common feature map.
  std::vector<BasisDef> defs;
  defs.reserve(predecessors.size());
  for (int k : predecessors) {
    Eigen::VectorXd pooled(pooled_rows);
    Eigen::Index at = 0;
    for (const auto& e : envs) {
      pooled.segment(at, e.values.rows()) = e.values.col(k);
      at += e.values.rows();
    }
    defs.push_back(make_basis(pooled, cfg, cfg.standardize));
  }
  // Partition-of-unity bases are collinear with the intercept; drop the last
  // basis function of each block to keep the design identifiable.
  const int drop = cfg.family == BasisConfig::Family::Bspline ? 1 : 0;
  const int r = defs[0].num_basis - drop;
  if (r < 1) throw std::invalid_argument("fit_additive_regression: empty basis block");

  AdditiveFit fit;
  fit.predecessors = predecessors;
  fit.block_size = r;
  const int cols = 1 + r * static_cast<int>(predecessors.size());

  for (std::size_t h = 0; h < envs.size(); ++h) {
    const auto& x = envs[h].values;
    const Eigen::Index n = x.rows();
    if (n <= cols)
      throw std::invalid_argument("fit_additive_regression: environment " + std::to_string(h) +
                                  " has " + std::to_string(n) + " samples for a " +
                                  std::to_string(cols) + "-column design");
    Eigen::MatrixXd design(n, cols);
    design.col(0).setOnes();
    for (std::size_t q = 0; q < predecessors.size(); ++q)
      design.middleCols(1 + static_cast<Eigen::Index>(q) * r, r) =
          defs[q].eval(x.col(predecessors[q])).leftCols(r);

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < cols)
      throw RankDeficientError("fit_additive_regression: rank-deficient design for target " +
                               std::to_string(target) + " in environment " + std::to_string(h));
    const Eigen::VectorXd y = x.col(target);
    const Eigen::VectorXd beta = qr.solve(y);
    const double rss = (y - design * beta).squaredNorm();
    const double sigma2 = rss / static_cast<double>(n - cols);
    const Eigen::MatrixXd xtx = design.transpose() * design;
    const Eigen::MatrixXd cov =
        sigma2 * xtx.ldlt().solve(Eigen::MatrixXd::Identity(cols, cols));
    fit.coefficients.push_back(beta);
    fit.covariance.push_back(cov);
  }
  return fit;
}

namespace {

// Wald test of equal coefficient blocks across environments. The pooled mean
// is precision weighted; under the null the statistic is chi-squared with
// (H-1)*r degrees of freedom.
EdgeTest wald_equal_blocks(const AdditiveFit& fit, int pred_pos, double alpha) {
  const int num_envs = static_cast<int>(fit.coefficients.size());
  const int r = fit.block_size;
  std::vector<Eigen::VectorXd> blocks;
  std::vector<Eigen::MatrixXd> precisions;
  for (int h = 0; h < num_envs; ++h) {
    blocks.push_back(fit.block(h, pred_pos));
    Eigen::MatrixXd v = fit.block_cov(h, pred_pos);
    Eigen::LLT<Eigen::MatrixXd> llt(v);
    if (llt.info() != Eigen::Success) {
      v.diagonal().array() += 1e-12 * (1.0 + v.diagonal().maxCoeff());
      llt.compute(v);
      if (llt.info() != Eigen::Success)
        throw SingularSystemError("wald test: coefficient covariance not positive definite");
    }
    precisions.push_back(llt.solve(Eigen::MatrixXd::Identity(r, r)));
  }
  Eigen::MatrixXd prec_sum = Eigen::MatrixXd::Zero(r, r);
  Eigen::VectorXd weighted = Eigen::VectorXd::Zero(r);
  for (int h = 0; h < num_envs; ++h) {
    prec_sum += precisions[static_cast<std::size_t>(h)];
    weighted += precisions[static_cast<std::size_t>(h)] * blocks[static_cast<std::size_t>(h)];
  }
  const Eigen::VectorXd mean = prec_sum.ldlt().solve(weighted);

  EdgeTest test;
  test.df = (num_envs - 1) * r;
  for (int h = 0; h < num_envs; ++h) {
    const Eigen::VectorXd delta = blocks[static_cast<std::size_t>(h)] - mean;
    test.statistic += delta.dot(precisions[static_cast<std::size_t>(h)] * delta);
  }
  test.critical = chi_squared_quantile(1.0 - alpha, test.df);
  test.rejected = test.statistic > test.critical;
  return test;
}

}  // namespace

DiffEdges diff_functional_edges(const std::vector<EnvironmentData>& envs,
                                const TopologicalOrder& order, const std::vector<int>& shifted,
                                const BasisConfig& cfg, int threads) {
  check_envs(envs);
  if (!(cfg.alpha > 0 && cfg.alpha < 1))
    throw std::invalid_argument("diff_functional_edges: alpha must lie in (0,1)");
  const int d = static_cast<int>(envs[0].values.cols());
  const std::vector<int> pos = positions_of(order, d);
  const std::vector<int> targets = check_shifted(shifted, d);

  struct TargetResult {
    std::vector<EdgeTest> tests;
    std::string warning;
  };
  std::vector<TargetResult> per_target(targets.size());

  parallel_for(targets.size(), threads, [&](std::size_t ti) {
    const int j = targets[ti];
    std::vector<int> pre;
    for (int k = 0; k < d; ++k)
      if (pos[static_cast<std::size_t>(k)] < pos[static_cast<std::size_t>(j)]) pre.push_back(k);
    if (pre.empty()) return;
    AdditiveFit fit;
    try {
      fit = fit_additive_regression(envs, pre, j, cfg);
    } catch (const RankDeficientError& err) {
      per_target[ti].warning = std::string(err.what()) + "; target skipped";
      return;
    }
    for (std::size_t q = 0; q < pre.size(); ++q) {
      EdgeTest test = wald_equal_blocks(fit, static_cast<int>(q), cfg.alpha);
      test.edge = {pre[q], j};
      per_target[ti].tests.push_back(test);
    }
  });

  DiffEdges result;
  result.kind = DiffKind::Functional;
  for (auto& tr : per_target) {
    if (!tr.warning.empty()) result.warnings.push_back(tr.warning);
    for (auto& t : tr.tests) {
      if (t.rejected) result.edges.push_back(t.edge);
      result.tests.push_back(t);
    }
  }
  std::sort(result.edges.begin(), result.edges.end());
  std::sort(result.tests.begin(), result.tests.end(),
            [](const EdgeTest& a, const EdgeTest& b) { return a.edge < b.edge; });
  return result;
}

}  // namespace iscan
