#pragma once

#include <Eigen/Dense>
#include <vector>

namespace iscan {

struct KernelConfig {
  enum class Bandwidth { MedianHeuristic, Fixed };
  Bandwidth bandwidth_rule = Bandwidth::MedianHeuristic;
  double fixed_bandwidth = 1.0;  // used only with Bandwidth::Fixed
  double ridge = 0.05;           // eta added to the kernel diagonal
};

struct ScoreEstimate {
  Eigen::MatrixXd gradients;     // m x d, row i ~ grad log density at sample i
  Eigen::MatrixXd hessian_diag;  // m x d, per-coordinate second derivatives
};

// Squared-exponential kernel K(x,y) = exp(-||x-y||^2 / (2 s^2)) together with
// its closed-form derivatives in the second argument:
//   dK[j](i,k)  = d K(x_i, x_k) / d x_k[j]        = K_ik (x_i[j]-x_k[j]) / s^2
//   d2K[j](i,k) = d^2 K(x_i, x_k) / d x_k[j]^2    = K_ik ((x_i[j]-x_k[j])^2/s^4 - 1/s^2)
struct KernelDerivatives {
  Eigen::MatrixXd K;
  std::vector<Eigen::MatrixXd> dK;
  std::vector<Eigen::MatrixXd> d2K;
};

// Median pairwise Euclidean distance, computed over a deterministic strided
// subsample of at most 2000 rows. Falls back to 1 when the median is zero
// (all subsampled rows identical).
double median_heuristic_bandwidth(const Eigen::MatrixXd& x);

KernelDerivatives rbf_kernel_with_derivatives(const Eigen::MatrixXd& x, double bandwidth);

// Kernelized Stein estimates of the score and the diagonal of its Jacobian on
// the sampling distribution of x. Solves (K + eta I) G = -<grad, K> and
// J = -G.^2 + (K + eta I)^{-1} <grad^2, K> with one shared factorization.
// A failed SPD factorization is retried once with ridge max(eta,1e-6)*10
// (with a warning on stderr); a second failure throws SingularSystemError.
ScoreEstimate estimate_score(const Eigen::MatrixXd& x, const KernelConfig& cfg = {});

Eigen::MatrixXd estimate_score_gradient(const Eigen::MatrixXd& x, const KernelConfig& cfg = {});
Eigen::MatrixXd estimate_hessian_diag(const Eigen::MatrixXd& x, const KernelConfig& cfg = {});

struct VarianceDiagnostics {
  Eigen::VectorXd var;  // per-column sample variance (divisor m-1) of J
};

// Unbiased per-column sample variance (divisor m-1). Requires at least 3 rows.
Eigen::VectorXd column_variance(const Eigen::MatrixXd& values);

// Variance of the estimated Jacobian diagonal per column; the shift statistic
// building block. Requires at least 3 rows.
VarianceDiagnostics jacobian_variance(const Eigen::MatrixXd& x, const KernelConfig& cfg = {});

// Exact score of a multivariate gaussian, used as a test oracle:
// gradients = -(x - mean) Sigma^{-1}, hessian diag rows = -diag(Sigma^{-1}).
ScoreEstimate analytic_gaussian_score(const Eigen::VectorXd& mean,
                                      const Eigen::MatrixXd& covariance,
                                      const Eigen::MatrixXd& x);

}  // namespace iscan
