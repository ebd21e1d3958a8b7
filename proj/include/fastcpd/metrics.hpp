#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "fastcpd/degradations.hpp"
#include "fastcpd/errors.hpp"
#include "fastcpd/pointset.hpp"
#include "fastcpd/registration.hpp"

namespace fastcpd {

/// Root-mean-square registration error over the model points that have a
/// ground-truth counterpart.
inline double rmse(const PointSet& transformed, const Truth& truth) {
  if (truth.empty()) throw ParameterError("rmse: empty ground truth");
  double sum = 0.0;
  for (const auto& [idx, pos] : truth) {
    if (idx < 0 || idx >= transformed.count())
      throw ParameterError("rmse: truth index out of range");
    if (pos.size() != transformed.dim())
      throw DimensionError("rmse: truth dimension mismatch");
    sum += (transformed.pts.row(idx).transpose() - pos).squaredNorm();
  }
  return std::sqrt(sum / static_cast<double>(truth.size()));
}

struct BenchRecord {
  Eigen::Index m = 0;
  Eigen::Index n = 0;
  SolverVariant variant = SolverVariant::fast;
  TimingBreakdown timing;
  double rmse = 0.0;
  int iterations = 0;
  bool failed = false;
};

/// Uniform random subsample of exactly `size` rows, deterministic per seed.
inline PointSet subsample(const PointSet& ps, Eigen::Index size,
                          unsigned long seed) {
  if (size < 1 || size > ps.count())
    throw ParameterError("subsample: size out of range");
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(ps.count()));
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(static_cast<std::size_t>(size));
  std::sort(idx.begin(), idx.end());
  PointSet out;
  out.pts.resize(size, ps.dim());
  for (Eigen::Index i = 0; i < size; ++i) out.pts.row(i) = ps.pts.row(idx[i]);
  return out;
}

/// Mild random affine: rotation <= 10 degrees (about a random axis in 3D),
/// anisotropic scale in [0.9, 1.1], per-axis translation in [-0.1, 0.1].
inline PointSet random_affine(const PointSet& ps, unsigned long seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const Eigen::Index d = ps.dim();
  const double max_angle = 10.0 * M_PI / 180.0;

  Eigen::MatrixXd rot = Eigen::MatrixXd::Identity(d, d);
  if (d == 2) {
    const double a = unit(rng) * max_angle;
    rot << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
  } else if (d == 3) {
    Eigen::Vector3d axis(unit(rng), unit(rng), unit(rng));
    if (axis.norm() < 1e-12) axis = Eigen::Vector3d::UnitZ();
    axis.normalize();
    const double a = unit(rng) * max_angle;
    // Rodrigues rotation
    Eigen::Matrix3d kx;
    kx << 0, -axis.z(), axis.y(), axis.z(), 0, -axis.x(), -axis.y(), axis.x(), 0;
    rot = Eigen::Matrix3d::Identity() + std::sin(a) * kx +
          (1.0 - std::cos(a)) * kx * kx;
  }
  Eigen::VectorXd scale(d), shift(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    scale(j) = 1.0 + 0.1 * unit(rng);
    shift(j) = 0.1 * unit(rng);
  }
  PointSet out;
  out.pts = ((ps.pts * rot.transpose()) * scale.asDiagonal()).rowwise() +
            shift.transpose();
  return out;
}

/// Benchmark pair builder: the subsample (renormalized to [-1,1]) is the
/// scene, its affine-perturbed copy is the model, truth is row-to-row.
inline DegradedPair make_bench_pair(const PointSet& source, Eigen::Index size,
                                    unsigned long seed) {
  PointSet base = subsample(source, size, seed);
  auto [b0, b1, rec] = normalize_pair(base, base);
  DegradedPair pair;
  pair.scene = b0;
  pair.model = random_affine(b0, seed + 1);
  for (Eigen::Index i = 0; i < size; ++i)
    pair.truth[i] = pair.scene.pts.row(i).transpose();
  return pair;
}

/// One registration per (size, variant) cell, strictly sequential, with a
/// discarded warm-up run per size. A failing cell is recorded, not fatal.
inline std::vector<BenchRecord> run_benchmark(
    const PointSet& source, const std::vector<Eigen::Index>& sizes,
    const std::vector<SolverVariant>& variants, const RegistrationConfig& cfg,
    unsigned long seed) {
  std::vector<BenchRecord> records;
  for (Eigen::Index size : sizes) {
    DegradedPair pair = make_bench_pair(source, size, seed + static_cast<unsigned long>(size));
    {
      // warm-up: desk-scale timings are too noisy cold
      RegistrationConfig warm = cfg;
      warm.iterations = 1;
      warm.variant = SolverVariant::fast;
      register_pointsets(pair.model, pair.scene, warm);
    }
    for (SolverVariant v : variants) {
      BenchRecord rec;
      rec.m = pair.model.count();
      rec.n = pair.scene.count();
      rec.variant = v;
      rec.iterations = cfg.iterations;
      try {
        RegistrationConfig run = cfg;
        run.variant = v;
        RegistrationResult res = register_pointsets(pair.model, pair.scene, run);
        rec.timing = res.timing;
        rec.rmse = rmse(res.transformed, pair.truth);
      } catch (const Error&) {
        rec.failed = true;
      }
      records.push_back(rec);
    }
  }
  return records;
}

// --- CSV ------------------------------------------------------------------

inline constexpr const char* kBenchCsvHeader =
    "M,N,variant,t_c,t_eig,t_iter,t_f,t_o,t_total,rmse,iterations";

inline void write_bench_csv(const std::vector<BenchRecord>& records,
                            const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write CSV: " + path);
  out << kBenchCsvHeader << '\n';
  char buf[512];
  for (const auto& r : records) {
    // durations at 6 decimals; t_f/t_total re-derived from the rounded
    // parts so the printed identities hold exactly
    auto q = [](double v) { return std::round(v * 1e6) / 1e6; };
    const double tc = q(r.timing.t_c), te = q(r.timing.t_eig),
                 ti = q(r.timing.t_iter), to = q(r.timing.t_o);
    std::snprintf(buf, sizeof buf,
                  "%lld,%lld,%s,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.9g,%d\n",
                  static_cast<long long>(r.m), static_cast<long long>(r.n),
                  to_string(r.variant), tc, te, ti, te + ti, to,
                  tc + te + ti + to, r.failed ? -1.0 : r.rmse, r.iterations);
    out << buf;
  }
  if (!out) throw IoError("CSV write failed: " + path);
}

inline std::vector<BenchRecord> load_bench_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open CSV: " + path);
  std::string line;
  if (!std::getline(in, line) || line != kBenchCsvHeader)
    throw ParseError(path + ": missing or unexpected CSV header");
  std::vector<BenchRecord> records;
  long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cur;
    for (char c : line) {
      if (c == ',') {
        cells.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    cells.push_back(cur);
    if (cells.size() != 11)
      throw ParseError(path + ":" + std::to_string(lineno) + ": bad CSV row");
    BenchRecord r;
    try {
      r.m = std::stoll(cells[0]);
      r.n = std::stoll(cells[1]);
      r.variant = variant_from_string(cells[2]);
      r.timing.t_c = std::stod(cells[3]);
      r.timing.t_eig = std::stod(cells[4]);
      r.timing.t_iter = std::stod(cells[5]);
      r.timing.t_f = std::stod(cells[6]);
      r.timing.t_o = std::stod(cells[7]);
      r.timing.t_total = std::stod(cells[8]);
      r.rmse = std::stod(cells[9]);
      r.iterations = std::stoi(cells[10]);
    } catch (const std::exception&) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": bad CSV value");
    }
    r.failed = r.rmse < 0.0;
    records.push_back(r);
  }
  return records;
}

}  // namespace fastcpd
