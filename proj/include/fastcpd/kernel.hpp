#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include "fastcpd/errors.hpp"
#include "fastcpd/pointset.hpp"

namespace fastcpd {

/// Gaussian Gram matrix over the model points: phi(i,j) = exp(-|x_i-x_j|^2 / 2 beta^2).
struct GramKernel {
  Eigen::MatrixXd phi;
  double beta = 0.0;

  Eigen::Index size() const { return phi.rows(); }
};

/// Top-K eigenpairs of the Gram matrix, eigenvalues descending.
struct SpectralBasis {
  Eigen::MatrixXd u;       // M x K, orthonormal columns
  Eigen::VectorXd lambda;  // K, descending

  Eigen::Index points() const { return u.rows(); }
  Eigen::Index rank() const { return u.cols(); }
};

inline GramKernel build_gram(const PointSet& x, double beta) {
  if (beta <= 0.0) throw ParameterError("build_gram: beta must be positive");
  const Eigen::Index m = x.count();
  const double inv = 1.0 / (2.0 * beta * beta);

  Eigen::VectorXd sq = x.pts.rowwise().squaredNorm();
  Eigen::MatrixXd d2 = sq.replicate(1, m) + sq.transpose().replicate(m, 1) -
                       2.0 * (x.pts * x.pts.transpose());
  GramKernel k;
  k.beta = beta;
  k.phi = (-d2.cwiseMax(0.0) * inv).array().exp();
  // symmetrize exactly and pin the diagonal; the distance expansion above
  // is only symmetric up to rounding
  k.phi = ((k.phi + k.phi.transpose()) * 0.5).eval();
  k.phi.diagonal().setOnes();
  return k;
}

inline SpectralBasis eigendecompose(const GramKernel& k, Eigen::Index rank) {
  const Eigen::Index m = k.size();
  if (rank < 1 || rank > m)
    throw ParameterError("eigendecompose: rank out of [1, M]");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k.phi);
  if (es.info() != Eigen::Success)
    throw NumericError("eigendecompose: symmetric eigensolver did not converge (info=" +
                       std::to_string(static_cast<int>(es.info())) + ")");

  // Eigen returns ascending order; take the top `rank` reversed.
  SpectralBasis b;
  b.u.resize(m, rank);
  b.lambda.resize(rank);
  for (Eigen::Index i = 0; i < rank; ++i) {
    b.u.col(i) = es.eigenvectors().col(m - 1 - i);
    b.lambda(i) = es.eigenvalues()(m - 1 - i);
  }
  // clamp eigenvalue sign noise from floating-point PSD violations
  const double floor = 1e-12 * std::max(b.lambda(0), 0.0);
  for (Eigen::Index i = 0; i < rank; ++i)
    if (b.lambda(i) < floor) b.lambda(i) = 0.0;
  return b;
}

/// Frobenius norm of Phi - U Lambda U^T; for a PSD Phi this equals
/// sqrt(sum of squared dropped eigenvalues).
inline double lowrank_reconstruction_error(const SpectralBasis& b,
                                           const GramKernel& k) {
  if (b.points() != k.size())
    throw ParameterError("lowrank_reconstruction_error: size mismatch");
  Eigen::MatrixXd recon =
      b.u * b.lambda.asDiagonal() * b.u.transpose();
  return (k.phi - recon).norm();
}

// --- spectral cache -------------------------------------------------------
// Layout: "FCPD" magic, u32 version, u64 M, u64 K, f64 beta,
// then U row-major and lambda, all little-endian f64.

inline constexpr char kSpectralMagic[4] = {'F', 'C', 'P', 'D'};
inline constexpr std::uint32_t kSpectralVersion = 1;

inline void save_spectral_cache(const std::string& path, const SpectralBasis& b,
                                double beta) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open spectral cache for writing: " + path);
  out.write(kSpectralMagic, 4);
  const std::uint32_t ver = kSpectralVersion;
  const std::uint64_t m = static_cast<std::uint64_t>(b.points());
  const std::uint64_t k = static_cast<std::uint64_t>(b.rank());
  out.write(reinterpret_cast<const char*>(&ver), sizeof ver);
  out.write(reinterpret_cast<const char*>(&m), sizeof m);
  out.write(reinterpret_cast<const char*>(&k), sizeof k);
  out.write(reinterpret_cast<const char*>(&beta), sizeof beta);
  for (Eigen::Index i = 0; i < b.points(); ++i)
    out.write(reinterpret_cast<const char*>(b.u.row(i).eval().data()),
              static_cast<std::streamsize>(sizeof(double)) * b.rank());
  out.write(reinterpret_cast<const char*>(b.lambda.data()),
            static_cast<std::streamsize>(sizeof(double)) * b.rank());
  if (!out) throw IoError("spectral cache write failed: " + path);
}

inline SpectralBasis load_spectral_cache(const std::string& path,
                                         double* beta_out = nullptr) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open spectral cache: " + path);
  char magic[4];
  std::uint32_t ver;
  std::uint64_t m, k;
  double beta;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&ver), sizeof ver);
  in.read(reinterpret_cast<char*>(&m), sizeof m);
  in.read(reinterpret_cast<char*>(&k), sizeof k);
  in.read(reinterpret_cast<char*>(&beta), sizeof beta);
  if (!in || std::memcmp(magic, kSpectralMagic, 4) != 0)
    throw ParseError("not a spectral cache file: " + path);
  if (ver != kSpectralVersion)
    throw ParseError("unsupported spectral cache version in " + path);

  SpectralBasis b;
  b.u.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k));
  b.lambda.resize(static_cast<Eigen::Index>(k));
  Eigen::VectorXd row(static_cast<Eigen::Index>(k));
  for (std::uint64_t i = 0; i < m; ++i) {
    in.read(reinterpret_cast<char*>(row.data()),
            static_cast<std::streamsize>(sizeof(double) * k));
    b.u.row(static_cast<Eigen::Index>(i)) = row.transpose();
  }
  in.read(reinterpret_cast<char*>(b.lambda.data()),
          static_cast<std::streamsize>(sizeof(double) * k));
  if (!in) throw ParseError("truncated spectral cache: " + path);
  if (beta_out) *beta_out = beta;
  return b;
}

}  // namespace fastcpd
