#include "iscan/score.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <stdexcept>
#include <string>

#include "iscan/errors.hpp"

namespace iscan {

namespace {

void check_input(const Eigen::MatrixXd& x, int min_rows, const char* who) {
  if (x.rows() < min_rows)
    throw std::invalid_argument(std::string(who) + ": needs at least " +
                                std::to_string(min_rows) + " rows, got " +
                                std::to_string(x.rows()));
  if (x.cols() < 1) throw std::invalid_argument(std::string(who) + ": needs at least 1 column");
  if (!x.allFinite()) throw NonFiniteError(std::string(who) + ": input contains NaN/inf");
}

double resolve_bandwidth(const Eigen::MatrixXd& x, const KernelConfig& cfg) {
  if (cfg.bandwidth_rule == KernelConfig::Bandwidth::Fixed) {
    if (!(cfg.fixed_bandwidth > 0))
      throw std::invalid_argument("KernelConfig: fixed bandwidth must be > 0");
    return cfg.fixed_bandwidth;
  }
  return median_heuristic_bandwidth(x);
}

Eigen::MatrixXd squared_distances(const Eigen::MatrixXd& x) {
  const Eigen::VectorXd sq = x.rowwise().squaredNorm();
  Eigen::MatrixXd d2 = sq.replicate(1, x.rows()) + sq.transpose().replicate(x.rows(), 1) -
                       2.0 * (x * x.transpose());
  return d2.cwiseMax(0.0);
}

}  // namespace

double median_heuristic_bandwidth(const Eigen::MatrixXd& x) {
  check_input(x, 2, "median_heuristic_bandwidth");
  constexpr Eigen::Index kMaxRows = 2000;
  Eigen::MatrixXd sub;
  if (x.rows() > kMaxRows) {
    // Deterministic strided subsample.
    const double step = static_cast<double>(x.rows()) / kMaxRows;
    sub.resize(kMaxRows, x.cols());
    for (Eigen::Index i = 0; i < kMaxRows; ++i)
      sub.row(i) = x.row(static_cast<Eigen::Index>(i * step));
  } else {
    sub = x;
  }
  const Eigen::Index m = sub.rows();
  const Eigen::MatrixXd d2 = squared_distances(sub);
  std::vector<double> dists;
  dists.reserve(static_cast<std::size_t>(m) * (m - 1) / 2);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index k = i + 1; k < m; ++k) dists.push_back(std::sqrt(d2(i, k)));
  auto mid = dists.begin() + static_cast<std::ptrdiff_t>((dists.size() - 1) / 2);
  std::nth_element(dists.begin(), mid, dists.end());
  return *mid > 0 ? *mid : 1.0;
}

KernelDerivatives rbf_kernel_with_derivatives(const Eigen::MatrixXd& x, double bandwidth) {
  check_input(x, 1, "rbf_kernel_with_derivatives");
  if (!(bandwidth > 0))
    throw std::invalid_argument("rbf_kernel_with_derivatives: bandwidth must be > 0");
  const Eigen::Index m = x.rows(), d = x.cols();
  const double s2 = bandwidth * bandwidth;
  KernelDerivatives out;
  out.K = (-squared_distances(x) / (2.0 * s2)).array().exp();
  out.dK.reserve(static_cast<std::size_t>(d));
  out.d2K.reserve(static_cast<std::size_t>(d));
  for (Eigen::Index j = 0; j < d; ++j) {
    // diff(i,k) = x_i[j] - x_k[j]
    Eigen::MatrixXd diff =
        x.col(j).replicate(1, m) - x.col(j).transpose().replicate(m, 1);
    out.dK.push_back(out.K.cwiseProduct(diff) / s2);
    out.d2K.push_back(out.K.cwiseProduct((diff.array().square() / (s2 * s2) - 1.0 / s2).matrix()));
  }
  return out;
}

ScoreEstimate estimate_score(const Eigen::MatrixXd& x, const KernelConfig& cfg) {
  check_input(x, 2, "estimate_score");
  if (!(cfg.ridge > 0)) throw std::invalid_argument("KernelConfig: ridge must be > 0");
  const double s = resolve_bandwidth(x, cfg);
  const double s2 = s * s;

  Eigen::MatrixXd k = (-squared_distances(x) / (2.0 * s2)).array().exp();
  const Eigen::VectorXd rowsum = k.rowwise().sum();
  const Eigen::MatrixXd kx = k * x;
  const Eigen::MatrixXd xsq = x.array().square().matrix();

  // gradK(i,j) = sum_k K_ik (x_i[j] - x_k[j]) / s^2
  const Eigen::MatrixXd grad_k = (rowsum.asDiagonal() * x - kx) / s2;
  // hessK(i,j) = sum_k K_ik ((x_i[j] - x_k[j])^2 / s^4 - 1/s^2)
  const Eigen::MatrixXd hess_k =
      (rowsum.asDiagonal() * xsq - 2.0 * x.cwiseProduct(kx) + k * xsq) / (s2 * s2) -
      rowsum.replicate(1, x.cols()) / s2;

  double ridge = cfg.ridge;
  k.diagonal().array() += ridge;
  Eigen::LLT<Eigen::MatrixXd> llt(k);
  if (llt.info() != Eigen::Success) {
    const double retry = std::max(ridge, 1e-6) * 10.0;
    std::cerr << "estimate_score: SPD factorization failed at ridge " << ridge
              << ", retrying with " << retry << "\n";
    k.diagonal().array() += retry - ridge;
    ridge = retry;
    llt.compute(k);
    if (llt.info() != Eigen::Success)
      throw SingularSystemError("estimate_score: kernel system not SPD even at ridge " +
                                std::to_string(ridge));
  }

  ScoreEstimate est;
  est.gradients = -llt.solve(grad_k);
  est.hessian_diag = -est.gradients.array().square().matrix() + llt.solve(hess_k);
  if (!est.gradients.allFinite() || !est.hessian_diag.allFinite())
    throw NonFiniteError("estimate_score: estimate contains NaN/inf");
  return est;
}

Eigen::MatrixXd estimate_score_gradient(const Eigen::MatrixXd& x, const KernelConfig& cfg) {
  return estimate_score(x, cfg).gradients;
}

Eigen::MatrixXd estimate_hessian_diag(const Eigen::MatrixXd& x, const KernelConfig& cfg) {
  return estimate_score(x, cfg).hessian_diag;
}

Eigen::VectorXd column_variance(const Eigen::MatrixXd& values) {
  if (values.rows() < 3) throw std::invalid_argument("column_variance: needs at least 3 rows");
  const Eigen::RowVectorXd mean = values.colwise().mean();
  return (values.rowwise() - mean).array().square().colwise().sum().transpose() /
         static_cast<double>(values.rows() - 1);
}

VarianceDiagnostics jacobian_variance(const Eigen::MatrixXd& x, const KernelConfig& cfg) {
  check_input(x, 3, "jacobian_variance");
  VarianceDiagnostics out;
  out.var = column_variance(estimate_score(x, cfg).hessian_diag);
  return out;
}

ScoreEstimate analytic_gaussian_score(const Eigen::VectorXd& mean,
                                      const Eigen::MatrixXd& covariance,
                                      const Eigen::MatrixXd& x) {
  const Eigen::Index d = mean.size();
  if (covariance.rows() != d || covariance.cols() != d)
    throw std::invalid_argument("analytic_gaussian_score: covariance shape mismatch");
  if (x.cols() != d)
    throw std::invalid_argument("analytic_gaussian_score: x has wrong number of columns");
  if (!covariance.isApprox(covariance.transpose(), 1e-12))
    throw std::invalid_argument("analytic_gaussian_score: covariance must be symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(covariance);
  if (llt.info() != Eigen::Success)
    throw SingularSystemError("analytic_gaussian_score: covariance is not positive definite");
  const Eigen::MatrixXd precision = llt.solve(Eigen::MatrixXd::Identity(d, d));
  ScoreEstimate est;
  est.gradients = -(x.rowwise() - mean.transpose()) * precision;
  est.hessian_diag = (-precision.diagonal().transpose()).replicate(x.rows(), 1);
  return est;
}

}  // namespace iscan
