#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "fastcpd/errors.hpp"

namespace fastcpd {

/// Dense point set, one point per row.
struct PointSet {
  Eigen::MatrixXd pts;

  PointSet() = default;
  explicit PointSet(Eigen::MatrixXd p) : pts(std::move(p)) {}

  Eigen::Index count() const { return pts.rows(); }
  Eigen::Index dim() const { return pts.cols(); }
};

/// The affine map used to send a pair of point sets into [-1,1]^D,
/// kept so results can be mapped back to original units.
struct NormalizationRecord {
  Eigen::VectorXd center;
  double scale = 1.0;
  bool degenerate = false;

  PointSet apply(const PointSet& ps) const {
    return PointSet{(ps.pts.rowwise() - center.transpose()) / scale};
  }

  PointSet invert(const PointSet& ps) const {
    return PointSet{(ps.pts * scale).rowwise() + center.transpose()};
  }
};

inline PointSet load_points(const std::string& path,
                            std::optional<Eigen::Index> expected_dim = {}) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open point file: " + path);

  std::vector<std::vector<double>> rows;
  std::string line;
  Eigen::Index dim = -1;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    // comma delimiters are treated like whitespace
    for (char& c : line)
      if (c == ',') c = ' ';
    std::istringstream ss(line);
    std::vector<double> row;
    std::string tok;
    bool comment = false;
    while (ss >> tok) {
      if (tok[0] == '#') {
        comment = true;
        break;
      }
      size_t used = 0;
      double v;
      try {
        v = std::stod(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size() || !std::isfinite(v))
        throw ParseError(path + ":" + std::to_string(lineno) +
                         ": malformed number '" + tok + "'");
      row.push_back(v);
    }
    if (row.empty()) {
      if (!comment && !line.empty() &&
          line.find_first_not_of(" \t\r") != std::string::npos)
        continue;
      continue;  // blank or comment line
    }
    if (dim < 0) {
      dim = static_cast<Eigen::Index>(row.size());
    } else if (static_cast<Eigen::Index>(row.size()) != dim) {
      throw DimensionError(path + ":" + std::to_string(lineno) +
                           ": expected " + std::to_string(dim) +
                           " columns, got " + std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(path + ": no points in file");
  if (expected_dim && dim != *expected_dim)
    throw DimensionError(path + ": expected dimension " +
                         std::to_string(*expected_dim) + ", got " +
                         std::to_string(dim));

  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), dim);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < dim; ++j) m(i, j) = rows[i][j];
  return PointSet{std::move(m)};
}

inline void write_points(const PointSet& ps, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out.precision(std::numeric_limits<double>::max_digits10);
  for (Eigen::Index i = 0; i < ps.count(); ++i) {
    for (Eigen::Index j = 0; j < ps.dim(); ++j) {
      if (j) out << ' ';
      out << ps.pts(i, j);
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

/// Shared affine normalization: subtract the joint centroid of both sets,
/// divide by the max absolute centered coordinate. The identical map on both
/// sets preserves their relative geometry.
inline std::tuple<PointSet, PointSet, NormalizationRecord> normalize_pair(
    const PointSet& x, const PointSet& y) {
  if (x.count() == 0 || y.count() == 0)
    throw ParameterError("normalize_pair: empty point set");
  if (x.dim() != y.dim())
    throw DimensionError("normalize_pair: dimension mismatch");

  const double total = static_cast<double>(x.count() + y.count());
  Eigen::VectorXd center =
      (x.pts.colwise().sum() + y.pts.colwise().sum()).transpose() / total;

  const double sx = (x.pts.rowwise() - center.transpose()).cwiseAbs().maxCoeff();
  const double sy = (y.pts.rowwise() - center.transpose()).cwiseAbs().maxCoeff();
  double scale = std::max(sx, sy);

  NormalizationRecord rec;
  rec.center = center;
  if (scale <= 0.0) {
    rec.scale = 1.0;
    rec.degenerate = true;
  } else {
    rec.scale = scale;
  }
  return {rec.apply(x), rec.apply(y), rec};
}

}  // namespace fastcpd
