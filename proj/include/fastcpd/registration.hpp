#pragma once

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "fastcpd/correspondence.hpp"
#include "fastcpd/errors.hpp"
#include "fastcpd/kernel.hpp"
#include "fastcpd/pointset.hpp"
#include "fastcpd/solvers.hpp"

namespace fastcpd {

/// Per-phase wall-clock decomposition:
/// t_f = t_eig + t_iter and t_total = t_c + t_f + t_o hold exactly as stored
/// (t_o is the residual of the measured total).
struct TimingBreakdown {
  double t_c = 0.0;     // correspondence (E-step, incl. row normalization)
  double t_eig = 0.0;   // one-shot eigendecomposition before the loop
  double t_iter = 0.0;  // in-loop transformation solves
  double t_f = 0.0;     // t_eig + t_iter
  double t_o = 0.0;     // everything else
  double t_total = 0.0;
};

struct RegistrationConfig {
  double omega = 0.7;
  double beta = 2.0;
  double lambda_reg = 10.0;
  int iterations = 100;
  SolverVariant variant = SolverVariant::fast;
  double rank_fraction = 0.1;
  unsigned long seed = 0;
  bool normalize = true;
  bool early_stop = false;  // optional |d sigma2| < 1e-10 stop, off by default
};

struct RegistrationDiagnostics {
  long degenerate_rows = 0;  // cumulative over iterations
  long sigma2_clamps = 0;
  std::string baseline_solver = "dense LDLT factorization";
};

struct RegistrationResult {
  PointSet transformed;  // original units when cfg.normalize was on
  Coefficients coefficients;
  Correspondence correspondence;  // final E-step output
  std::vector<double> sigma2_trace;
  TimingBreakdown timing;
  RegistrationDiagnostics diagnostics;
  double sigma2_initial = 0.0;
};

/// CPD-convention initializer: mean squared distance over all cross pairs.
inline double init_sigma2(const PointSet& x, const PointSet& y) {
  if (x.count() == 0 || y.count() == 0)
    throw ParameterError("init_sigma2: empty point set");
  if (x.dim() != y.dim()) throw DimensionError("init_sigma2: dimension mismatch");
  const double m = static_cast<double>(x.count());
  const double n = static_cast<double>(y.count());
  const double d = static_cast<double>(x.dim());
  const double sum = m * y.pts.squaredNorm() + n * x.pts.squaredNorm() -
                     2.0 * x.pts.colwise().sum().dot(y.pts.colwise().sum());
  return std::max(sum / (d * m * n), 0.0);
}

namespace detail {
using Clock = std::chrono::steady_clock;
inline double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}
}  // namespace detail

/// EM registration of model X onto scene Y.
inline RegistrationResult register_pointsets(const PointSet& x_in,
                                             const PointSet& y_in,
                                             const RegistrationConfig& cfg) {
  if (x_in.count() == 0 || y_in.count() == 0)
    throw ParameterError("register: empty point set");
  if (x_in.dim() != y_in.dim())
    throw DimensionError("register: model and scene dimension mismatch");
  if (cfg.iterations < 0) throw ParameterError("register: negative iterations");

  const auto t_start = detail::Clock::now();
  RegistrationResult res;

  PointSet x = x_in, y = y_in;
  NormalizationRecord norm;
  if (cfg.normalize) std::tie(x, y, norm) = normalize_pair(x_in, y_in);

  const Eigen::Index m = x.count();
  const bool fast = is_fast(cfg.variant);
  const bool lowrank = is_lowrank(cfg.variant);
  const Eigen::Index rank =
      lowrank ? lowrank_rank(cfg.rank_fraction, m) : m;

  GramKernel gram = build_gram(x, cfg.beta);

  SpectralBasis basis;
  TimingBreakdown& tb = res.timing;
  if (cfg.variant != SolverVariant::cpd) {
    const auto t0 = detail::Clock::now();
    basis = eigendecompose(gram, rank);
    tb.t_eig = detail::seconds_since(t0);
  }

  double sigma2 = init_sigma2(x, y);
  res.sigma2_initial = sigma2;

  PointSet x_t = x;
  res.coefficients.w = Eigen::MatrixXd::Zero(m, x.dim());

  for (int it = 0; it < cfg.iterations; ++it) {
    try {
      // E-step
      const auto tc0 = detail::Clock::now();
      Correspondence p = posterior(x_t, y, GmmParams{cfg.omega, sigma2});
      if (p.sigma2_clamped) ++res.diagnostics.sigma2_clamps;
      if (fast) {
        p = enforce_row_constraint(p);
        res.diagnostics.degenerate_rows +=
            static_cast<long>(p.degenerate_rows.size());
      }
      tb.t_c += detail::seconds_since(tc0);

      // M-step
      Coefficients w;
      const auto ti0 = detail::Clock::now();
      switch (cfg.variant) {
        case SolverVariant::fast:
        case SolverVariant::fast_lowrank: {
          Eigen::MatrixXd residual = p.p * y.pts - x.pts;
          w = solve_fast_lowrank(basis, cfg.lambda_reg, sigma2, residual);
          break;
        }
        case SolverVariant::cpd:
          w = solve_cpd_baseline(gram, p, cfg.lambda_reg, sigma2, y, x);
          break;
        case SolverVariant::cpd_lowrank:
          w = solve_cpd_lowrank(basis, p, cfg.lambda_reg, sigma2, y, x);
          break;
      }
      tb.t_iter += detail::seconds_since(ti0);

      x_t = lowrank ? apply_transform_lowrank(x, basis, w)
                    : apply_transform(x, gram, w);
      const double next = fast ? update_sigma2(y, p, x_t)
                               : update_sigma2_cpd(y, p, x_t);
      if (next <= kSigma2Floor) ++res.diagnostics.sigma2_clamps;

      res.coefficients = std::move(w);
      res.correspondence = std::move(p);
      res.sigma2_trace.push_back(next);

      const double delta = std::abs(next - sigma2);
      sigma2 = next;
      if (cfg.early_stop && delta < 1e-10) break;
    } catch (Error& e) {
      throw NumericError("register: iteration " + std::to_string(it) + ": " +
                         e.what());
    }
  }

  res.transformed = cfg.normalize ? norm.invert(x_t) : x_t;

  tb.t_f = tb.t_eig + tb.t_iter;
  const double measured = detail::seconds_since(t_start);
  tb.t_o = std::max(measured - tb.t_c - tb.t_f, 0.0);
  tb.t_total = tb.t_c + tb.t_f + tb.t_o;
  return res;
}

/// Key-value run report consumed by humans and by the plot subcommand.
inline void write_report(const std::string& path, const RegistrationConfig& cfg,
                         const RegistrationResult& res) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write report: " + path);
  out.precision(15);
  out << "variant=" << to_string(cfg.variant) << '\n'
      << "omega=" << cfg.omega << '\n'
      << "beta=" << cfg.beta << '\n'
      << "lambda=" << cfg.lambda_reg << '\n'
      << "iterations=" << cfg.iterations << '\n'
      << "rank_fraction=" << cfg.rank_fraction << '\n'
      << "seed=" << cfg.seed << '\n'
      << "normalize=" << (cfg.normalize ? 1 : 0) << '\n'
      << "baseline_solver=" << res.diagnostics.baseline_solver << '\n'
      << "sigma2_initial=" << res.sigma2_initial << '\n'
      << "degenerate_rows=" << res.diagnostics.degenerate_rows << '\n'
      << "sigma2_clamps=" << res.diagnostics.sigma2_clamps << '\n'
      << "t_c=" << res.timing.t_c << '\n'
      << "t_eig=" << res.timing.t_eig << '\n'
      << "t_iter=" << res.timing.t_iter << '\n'
      << "t_f=" << res.timing.t_f << '\n'
      << "t_o=" << res.timing.t_o << '\n'
      << "t_total=" << res.timing.t_total << '\n';
  for (std::size_t i = 0; i < res.sigma2_trace.size(); ++i)
    out << "sigma2[" << i << "]=" << res.sigma2_trace[i] << '\n';
  if (!out) throw IoError("report write failed: " + path);
}

}  // namespace fastcpd
