#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "fastcpd/errors.hpp"
#include "fastcpd/pointset.hpp"

namespace fastcpd {

/// Ground-truth position for each model index that still has a counterpart.
using Truth = std::map<Eigen::Index, Eigen::VectorXd>;

struct DegradedPair {
  PointSet model;
  PointSet scene;
  Truth truth;
};

inline PointSet add_noise(const PointSet& ps, double stddev,
                          unsigned long seed) {
  if (stddev < 0.0) throw ParameterError("add_noise: negative stddev");
  if (stddev == 0.0) return ps;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, stddev);
  PointSet out = ps;
  for (Eigen::Index i = 0; i < out.count(); ++i)
    for (Eigen::Index j = 0; j < out.dim(); ++j) out.pts(i, j) += gauss(rng);
  return out;
}

/// Appends floor(ratio*M) uniform draws from the 10%-expanded bounding box;
/// original rows stay first and untouched.
inline PointSet add_outliers(const PointSet& ps, double ratio,
                             unsigned long seed) {
  if (ratio < 0.0) throw ParameterError("add_outliers: negative ratio");
  const Eigen::Index extra = static_cast<Eigen::Index>(
      std::floor(ratio * static_cast<double>(ps.count())));
  if (extra == 0) return ps;

  Eigen::VectorXd lo = ps.pts.colwise().minCoeff().transpose();
  Eigen::VectorXd hi = ps.pts.colwise().maxCoeff().transpose();
  Eigen::VectorXd pad = (hi - lo) * 0.05;
  lo -= pad;
  hi += pad;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  PointSet out;
  out.pts.resize(ps.count() + extra, ps.dim());
  out.pts.topRows(ps.count()) = ps.pts;
  for (Eigen::Index i = 0; i < extra; ++i)
    for (Eigen::Index j = 0; j < ps.dim(); ++j)
      out.pts(ps.count() + i, j) = lo(j) + unit(rng) * (hi(j) - lo(j));
  return out;
}

/// Removes `count` points as one contiguous spatial region: a random seed
/// point and its nearest neighbors, emulating a missing shape part rather
/// than random dropout. Returns the survivors and their original indices.
inline std::pair<PointSet, std::vector<Eigen::Index>> occlude(
    const PointSet& ps, Eigen::Index count, unsigned long seed) {
  if (count < 0) throw ParameterError("occlude: negative count");
  if (count >= ps.count())
    throw ParameterError("occlude: count must be smaller than the point count");

  std::vector<Eigen::Index> kept(static_cast<std::size_t>(ps.count()));
  std::iota(kept.begin(), kept.end(), 0);
  if (count > 0) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<Eigen::Index> pick(0, ps.count() - 1);
    const Eigen::Index anchor = pick(rng);
    Eigen::VectorXd d2 =
        (ps.pts.rowwise() - ps.pts.row(anchor)).rowwise().squaredNorm();
    std::vector<Eigen::Index> order = kept;
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return d2(a) < d2(b); });
    order.erase(order.begin(), order.begin() + count);  // drop the nearest
    std::sort(order.begin(), order.end());              // keep file order
    kept = std::move(order);
  }

  PointSet out;
  out.pts.resize(static_cast<Eigen::Index>(kept.size()), ps.dim());
  for (std::size_t i = 0; i < kept.size(); ++i)
    out.pts.row(static_cast<Eigen::Index>(i)) = ps.pts.row(kept[i]);
  return {std::move(out), std::move(kept)};
}

/// Coherent synthetic warp: ceil(M/50) random control points carry Gaussian
/// displacement coefficients (stddev = amplitude); every point moves by the
/// resulting Gaussian-RBF field. Stand-in for articulated pose pairs.
inline DegradedPair synth_deform(const PointSet& ps, double amplitude,
                                 double warp_beta, unsigned long seed) {
  if (amplitude < 0.0) throw ParameterError("synth_deform: negative amplitude");
  if (warp_beta <= 0.0) throw ParameterError("synth_deform: warp_beta must be positive");

  DegradedPair pair;
  pair.model = ps;
  pair.scene = ps;

  const Eigen::Index m = ps.count();
  const Eigen::Index d = ps.dim();
  if (amplitude > 0.0) {
    const Eigen::Index nc = (m + 49) / 50;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<Eigen::Index> pick(0, m - 1);
    std::normal_distribution<double> gauss(0.0, amplitude);

    Eigen::MatrixXd centers(nc, d);
    for (Eigen::Index c = 0; c < nc; ++c) centers.row(c) = ps.pts.row(pick(rng));
    Eigen::MatrixXd coeff(nc, d);
    for (Eigen::Index c = 0; c < nc; ++c)
      for (Eigen::Index j = 0; j < d; ++j) coeff(c, j) = gauss(rng);

    const double inv = 1.0 / (2.0 * warp_beta * warp_beta);
    for (Eigen::Index i = 0; i < m; ++i) {
      Eigen::VectorXd k =
          (-(centers.rowwise() - ps.pts.row(i)).rowwise().squaredNorm() * inv)
              .array()
              .exp();
      pair.scene.pts.row(i) += (coeff.transpose() * k).transpose();
    }
  }
  for (Eigen::Index i = 0; i < m; ++i)
    pair.truth[i] = pair.scene.pts.row(i).transpose();
  return pair;
}

// --- truth file: "index x y [z ...]" per line -----------------------------

inline void write_truth(const Truth& truth, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write truth file: " + path);
  out.precision(std::numeric_limits<double>::max_digits10);
  for (const auto& [idx, pos] : truth) {
    out << idx;
    for (Eigen::Index j = 0; j < pos.size(); ++j) out << ' ' << pos(j);
    out << '\n';
  }
  if (!out) throw IoError("truth write failed: " + path);
}

inline Truth load_truth(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open truth file: " + path);
  Truth truth;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    long idx;
    if (!(ss >> idx))
      throw ParseError(path + ":" + std::to_string(lineno) + ": bad index");
    std::vector<double> vals;
    double v;
    while (ss >> v) vals.push_back(v);
    if (vals.empty())
      throw ParseError(path + ":" + std::to_string(lineno) + ": no coordinates");
    Eigen::VectorXd pos(static_cast<Eigen::Index>(vals.size()));
    for (std::size_t j = 0; j < vals.size(); ++j)
      pos(static_cast<Eigen::Index>(j)) = vals[j];
    truth[idx] = std::move(pos);
  }
  return truth;
}

}  // namespace fastcpd
