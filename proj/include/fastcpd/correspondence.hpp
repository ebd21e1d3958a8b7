#pragma once

#include <Eigen/Core>
#include <cmath>
#include <vector>

#include "fastcpd/errors.hpp"
#include "fastcpd/pointset.hpp"

namespace fastcpd {

inline constexpr double kSigma2Floor = 1e-10;

/// Mixture parameters for one E-step.
struct GmmParams {
  double omega = 0.7;   // uniform outlier weight, [0,1)
  double sigma2 = 1.0;  // shared isotropic variance
};

/// Soft-assignment matrix P (model rows x scene columns).
struct Correspondence {
  Eigen::MatrixXd p;
  bool row_constrained = false;
  std::vector<Eigen::Index> degenerate_rows;  // rows replaced by uniform
  bool sigma2_clamped = false;

  Eigen::VectorXd row_sums() const { return p.rowwise().sum(); }
  Eigen::VectorXd col_sums() const { return p.colwise().sum().transpose(); }
};

/// GMM posterior p_mn = exp(-|y_n - x_m|^2 / 2s2) / (sum_k exp(...) + c),
/// c = (2 pi s2)^(D/2) * omega/(1-omega) * M/N. Exponents are max-shifted
/// per column (including the log of c in the shift) so small sigma2 cannot
/// underflow the normalization.
inline Correspondence posterior(const PointSet& x_t, const PointSet& y,
                                const GmmParams& params) {
  if (params.omega < 0.0 || params.omega >= 1.0)
    throw ParameterError("posterior: omega must lie in [0, 1)");
  if (x_t.dim() != y.dim())
    throw DimensionError("posterior: dimension mismatch");

  Correspondence c;
  double sigma2 = params.sigma2;
  if (sigma2 < kSigma2Floor) {
    sigma2 = kSigma2Floor;
    c.sigma2_clamped = true;
  }

  const Eigen::Index m = x_t.count();
  const Eigen::Index n = y.count();
  const Eigen::Index d = x_t.dim();
  const double inv = 1.0 / (2.0 * sigma2);

  Eigen::VectorXd sx = x_t.pts.rowwise().squaredNorm();
  Eigen::VectorXd sy = y.pts.rowwise().squaredNorm();
  Eigen::MatrixXd expo = -(sx.replicate(1, n) + sy.transpose().replicate(m, 1) -
                           2.0 * (x_t.pts * y.pts.transpose()))
                              .cwiseMax(0.0) *
                         inv;

  const bool has_outlier = params.omega > 0.0;
  const double log_c =
      has_outlier ? 0.5 * d * std::log(2.0 * M_PI * sigma2) +
                        std::log(params.omega / (1.0 - params.omega)) +
                        std::log(static_cast<double>(m) / static_cast<double>(n))
                  : 0.0;

  c.p.resize(m, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double shift = expo.col(j).maxCoeff();
    if (has_outlier && log_c > shift) shift = log_c;
    Eigen::ArrayXd num = (expo.col(j).array() - shift).exp();
    double denom = num.sum();
    if (has_outlier) denom += std::exp(log_c - shift);
    c.p.col(j) = num / denom;
  }
  c.row_constrained = false;
  return c;
}

/// Row normalization enforcing sum_n p_mn = 1. Rows with vanishing total mass
/// fall back to the uniform row and are reported.
inline Correspondence enforce_row_constraint(const Correspondence& raw) {
  Correspondence out = raw;
  out.degenerate_rows.clear();
  const Eigen::Index n = raw.p.cols();
  for (Eigen::Index i = 0; i < raw.p.rows(); ++i) {
    const double s = raw.p.row(i).sum();
    if (s < 1e-300) {
      out.p.row(i).setConstant(1.0 / static_cast<double>(n));
      out.degenerate_rows.push_back(i);
    } else {
      out.p.row(i) /= s;
    }
  }
  out.row_constrained = true;
  return out;
}

/// Newly estimated target for each model point: Ytilde = P * Y.
inline PointSet estimated_targets(const Correspondence& p, const PointSet& y) {
  if (p.p.cols() != y.count())
    throw ParameterError("estimated_targets: shape mismatch");
  return PointSet{p.p * y.pts};
}

}  // namespace fastcpd
