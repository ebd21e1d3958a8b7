#pragma once

#include <Eigen/Dense>
#include <string>

#include "fastcpd/correspondence.hpp"
#include "fastcpd/errors.hpp"
#include "fastcpd/kernel.hpp"
#include "fastcpd/pointset.hpp"

namespace fastcpd {

/// Kernel weights of the displacement field v(x) = sum_m w_m phi(x, x_m).
struct Coefficients {
  Eigen::MatrixXd w;
};

enum class SolverVariant { cpd, cpd_lowrank, fast, fast_lowrank };

inline const char* to_string(SolverVariant v) {
  switch (v) {
    case SolverVariant::cpd: return "cpd";
    case SolverVariant::cpd_lowrank: return "cpd_lowrank";
    case SolverVariant::fast: return "fast";
    case SolverVariant::fast_lowrank: return "fast_lowrank";
  }
  return "?";
}

inline SolverVariant variant_from_string(const std::string& s) {
  if (s == "cpd") return SolverVariant::cpd;
  if (s == "cpd_lowrank" || s == "cpd-lowrank") return SolverVariant::cpd_lowrank;
  if (s == "fast") return SolverVariant::fast;
  if (s == "fast_lowrank" || s == "fast-lowrank") return SolverVariant::fast_lowrank;
  throw ParameterError("unknown solver variant: " + s);
}

inline bool is_lowrank(SolverVariant v) {
  return v == SolverVariant::cpd_lowrank || v == SolverVariant::fast_lowrank;
}

inline bool is_fast(SolverVariant v) {
  return v == SolverVariant::fast || v == SolverVariant::fast_lowrank;
}

inline Eigen::Index lowrank_rank(double rank_fraction, Eigen::Index m) {
  if (rank_fraction <= 0.0 || rank_fraction > 1.0)
    throw ParameterError("rank_fraction must lie in (0, 1]");
  Eigen::Index k = static_cast<Eigen::Index>(
      std::llround(rank_fraction * static_cast<double>(m)));
  if (k < 1) k = 1;
  if (k > m) k = m;
  return k;
}

/// W = U (Lambda + lambda sigma2 I)^{-1} U^T (Ytilde - X), evaluated as a
/// diagonal rescaling between two multiplications by U; no factorization and
/// no dense inverse. With a truncated basis this is the low-rank
/// approximation; with the full basis it solves (Phi + lambda sigma2 I) W = R
/// exactly.
inline Coefficients solve_fast_lowrank(const SpectralBasis& basis,
                                       double lambda_reg, double sigma2,
                                       const Eigen::MatrixXd& residual) {
  if (basis.points() != residual.rows())
    throw ParameterError("solve_fast: residual rows must match basis points");
  const double shift = lambda_reg * sigma2;
  Eigen::ArrayXd diag = basis.lambda.array() + shift;
  if (diag.minCoeff() <= 0.0)
    throw NumericError("solve_fast: lambda_i + lambda*sigma2 not positive");
  Eigen::MatrixXd z = basis.u.transpose() * residual;
  z.array().colwise() /= diag;
  return Coefficients{basis.u * z};
}

inline Coefficients solve_fast(const SpectralBasis& basis, double lambda_reg,
                               double sigma2, const Eigen::MatrixXd& residual) {
  if (basis.rank() != basis.points())
    throw ParameterError("solve_fast expects the full spectral basis");
  return solve_fast_lowrank(basis, lambda_reg, sigma2, residual);
}

/// Original CPD M-step: W = (Phi + lambda sigma2 d(P1)^{-1})^{-1}
/// (d(P1)^{-1} P Y - X), via a dense symmetric factorization. This is the
/// O(M^3) oracle and timing baseline.
inline Coefficients solve_cpd_baseline(const GramKernel& k,
                                       const Correspondence& p,
                                       double lambda_reg, double sigma2,
                                       const PointSet& y, const PointSet& x) {
  const Eigen::Index m = k.size();
  if (p.p.rows() != m || x.count() != m || p.p.cols() != y.count())
    throw ParameterError("solve_cpd_baseline: shape mismatch");

  // near-empty rows would make d(P1)^{-1} blow up; they are fixed upstream
  // for fast variants, the baseline floors them here
  Eigen::VectorXd p1 = p.p.rowwise().sum().cwiseMax(1e-10);
  Eigen::VectorXd dinv = p1.cwiseInverse();

  Eigen::MatrixXd a = k.phi;
  a.diagonal() += lambda_reg * sigma2 * dinv;
  Eigen::MatrixXd rhs = dinv.asDiagonal() * (p.p * y.pts) - x.pts;

  Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
  if (ldlt.info() != Eigen::Success)
    throw NumericError("solve_cpd_baseline: LDLT factorization failed, rcond~" +
                       std::to_string(ldlt.rcond()));
  return Coefficients{ldlt.solve(rhs)};
}

/// CPD(low-rank): the baseline system with Phi replaced by its truncated
/// reconstruction, solved by the matrix inversion lemma so the in-loop dense
/// work is a K x K factorization.
inline Coefficients solve_cpd_lowrank(const SpectralBasis& basis,
                                      const Correspondence& p,
                                      double lambda_reg, double sigma2,
                                      const PointSet& y, const PointSet& x) {
  const Eigen::Index m = basis.points();
  if (p.p.rows() != m || x.count() != m || p.p.cols() != y.count())
    throw ParameterError("solve_cpd_lowrank: shape mismatch");

  Eigen::VectorXd p1 = p.p.rowwise().sum().cwiseMax(1e-10);
  // A = lambda sigma2 d(P1)^{-1}  =>  A^{-1} = d(P1) / (lambda sigma2)
  Eigen::VectorXd ainv = p1 / (lambda_reg * sigma2);
  Eigen::MatrixXd rhs =
      p1.cwiseInverse().asDiagonal() * (p.p * y.pts) - x.pts;

  // (U L U^T + A)^{-1} r = A^{-1} r - A^{-1} U L (I + U^T A^{-1} U L)^{-1} U^T A^{-1} r
  Eigen::MatrixXd aiu = ainv.asDiagonal() * basis.u;       // M x K
  Eigen::MatrixXd air = ainv.asDiagonal() * rhs;           // M x D
  Eigen::MatrixXd cap = basis.u.transpose() * aiu;         // K x K
  cap *= basis.lambda.asDiagonal();
  cap.diagonal().array() += 1.0;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(cap);
  Eigen::MatrixXd z = lu.solve(basis.u.transpose() * air); // K x D
  return Coefficients{air - aiu * (basis.lambda.asDiagonal() * z)};
}

/// X + Phi W.
inline PointSet apply_transform(const PointSet& x, const GramKernel& k,
                                const Coefficients& c) {
  if (k.size() != x.count() || c.w.rows() != x.count() ||
      c.w.cols() != x.dim())
    throw ParameterError("apply_transform: shape mismatch");
  return PointSet{x.pts + k.phi * c.w};
}

/// X + U Lambda U^T W, so the low-rank path never touches the full Phi.
inline PointSet apply_transform_lowrank(const PointSet& x,
                                        const SpectralBasis& basis,
                                        const Coefficients& c) {
  if (basis.points() != x.count() || c.w.rows() != x.count() ||
      c.w.cols() != x.dim())
    throw ParameterError("apply_transform_lowrank: shape mismatch");
  return PointSet{x.pts + basis.u * (basis.lambda.asDiagonal() *
                                     (basis.u.transpose() * c.w))};
}

/// Variance update for the constrained E-step:
/// sigma2 = (tr(Y^T d(P^T 1) Y) - 2 tr(Ytilde^T Xt) + tr(Xt^T Xt)) / (D M).
/// The trace form assumes every row of P sums to one.
inline double update_sigma2(const PointSet& y, const Correspondence& p,
                            const PointSet& x_t) {
  if (!p.row_constrained)
    throw ParameterError("update_sigma2 requires a row-constrained P");
  const Eigen::Index m = x_t.count();
  const Eigen::Index d = x_t.dim();
  Eigen::VectorXd pt1 = p.p.colwise().sum().transpose();
  Eigen::MatrixXd ytilde = p.p * y.pts;
  const double val =
      (y.pts.rowwise().squaredNorm().dot(pt1) -
       2.0 * (ytilde.array() * x_t.pts.array()).sum() +
       x_t.pts.squaredNorm()) /
      (static_cast<double>(d) * static_cast<double>(m));
  if (val < -1e-8)
    throw NumericError("update_sigma2: negative variance " + std::to_string(val));
  return std::max(val, kSigma2Floor);
}

/// Standard CPD variance update (unconstrained P, normalized by the total
/// posterior mass Np rather than M).
inline double update_sigma2_cpd(const PointSet& y, const Correspondence& p,
                                const PointSet& x_t) {
  const Eigen::Index d = x_t.dim();
  Eigen::VectorXd p1 = p.p.rowwise().sum();
  Eigen::VectorXd pt1 = p.p.colwise().sum().transpose();
  const double np = p1.sum();
  if (np <= 0.0)
    throw NumericError("update_sigma2_cpd: empty posterior");
  Eigen::MatrixXd py = p.p * y.pts;
  const double val = (y.pts.rowwise().squaredNorm().dot(pt1) -
                      2.0 * (py.array() * x_t.pts.array()).sum() +
                      x_t.pts.rowwise().squaredNorm().dot(p1)) /
                     (np * static_cast<double>(d));
  if (val < -1e-8)
    throw NumericError("update_sigma2_cpd: negative variance " +
                       std::to_string(val));
  return std::max(val, kSigma2Floor);
}

}  // namespace fastcpd
