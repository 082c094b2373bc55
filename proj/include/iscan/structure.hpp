#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "iscan/graph.hpp"
#include "iscan/simulate.hpp"

namespace iscan {

// Rank/nearest-neighbor dependence coefficient of y on z, optionally given a
// conditioning block x_cond (0 columns = unconditional). Neighbor search runs
// on per-column average ranks, which makes the value exactly invariant under
// strictly increasing per-coordinate transformations; distance ties are broken
// uniformly from a stream derived from tie_seed. Throws
// DegenerateDenominatorError when the normalizer is identically zero (y
// constant, or y already determined by x_cond).
double codec(const Eigen::VectorXd& y, const Eigen::MatrixXd& z, const Eigen::MatrixXd& x_cond,
             std::uint64_t tie_seed = 0);
double codec(const Eigen::VectorXd& y, const Eigen::MatrixXd& z, std::uint64_t tie_seed = 0);

// Greedy forward selection: repeatedly add the candidate with the largest
// codec given the already-selected set, while that maximum stays above
// cutoff. A degenerate denominator means the target is already explained and
// stops the loop. Returns ascending column indices into `candidates`.
std::vector<int> foci_select(const Eigen::MatrixXd& candidates, const Eigen::VectorXd& target,
                             std::uint64_t seed = 0, double cutoff = 0.0);

enum class DiffKind { Structural, Functional };

struct EdgeTest {
  std::pair<int, int> edge{-1, -1};
  double statistic = 0.0;
  int df = 0;
  double critical = 0.0;
  bool rejected = false;
};

struct DiffEdges {
  DiffKind kind = DiffKind::Structural;
  std::vector<std::pair<int, int>> edges;  // lexicographic, target always shifted
  std::vector<EdgeTest> tests;             // functional kind only
  std::vector<std::string> warnings;
};

// Structurally shifted edges: per shifted node and environment, select
// parents among the order-predecessors with foci_select; an edge (k, j) is
// reported when k is selected in some environment but not in another.
DiffEdges diff_structural_edges(const std::vector<EnvironmentData>& envs,
                                const TopologicalOrder& order, const std::vector<int>& shifted,
                                std::uint64_t seed = 0, double cutoff = 0.0, int threads = 0);

struct BasisConfig {
  enum class Family { Polynomial, Bspline } family = Family::Polynomial;
  int degree = 5;    // polynomial degree / spline degree
  int knots = 6;     // interior knot count (bspline only)
  double alpha = 0.05;
  bool standardize = true;  // center/scale the regressor before expansion
};

// Basis expansion of a single column, applied to the raw values. Polynomial:
// columns x, x^2, ..., x^deg. Bspline: an open-uniform partition-of-unity
// basis over the observed range. Standardization is not applied here; the
// regression owns it because its parameters must be shared across
// environments.
Eigen::MatrixXd basis_expand(const Eigen::VectorXd& x, const BasisConfig& cfg);

// Per-environment least-squares fit of column `target` on an intercept plus
// basis expansions of the given predecessor columns. The basis (and any
// standardization) is built once from the pooled data so coefficient blocks
// are comparable across environments.
struct AdditiveFit {
  std::vector<int> predecessors;
  int block_size = 0;                          // coefficients per predecessor
  std::vector<Eigen::VectorXd> coefficients;   // per env, intercept first
  std::vector<Eigen::MatrixXd> covariance;     // per env, full coefficient cov
  Eigen::VectorXd block(int env, int pred_pos) const;
  Eigen::MatrixXd block_cov(int env, int pred_pos) const;
};

AdditiveFit fit_additive_regression(const std::vector<EnvironmentData>& envs,
                                    const std::vector<int>& predecessors, int target,
                                    const BasisConfig& cfg);

// Functionally shifted edges: for each shifted node, fit the additive basis
// regression per environment and run a Wald test of equal coefficient blocks
// across environments for every predecessor. Rank-deficient targets are
// skipped with a warning.
DiffEdges diff_functional_edges(const std::vector<EnvironmentData>& envs,
                                const TopologicalOrder& order, const std::vector<int>& shifted,
                                const BasisConfig& cfg = {}, int threads = 0);

// Quantile of the chi-squared distribution, exposed for tests.
double chi_squared_quantile(double probability, int df);

}  // namespace iscan
