// fcpd: nonrigid point-set registration CLI.
//   register  - align a model point file onto a scene point file
//   degrade   - synthesize noise/outlier/occlusion/deform test inputs
//   bench     - multi-size, multi-variant timing sweep with CSV + SVG output
//   plot      - re-render a bench CSV as an SVG chart

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "fastcpd/fastcpd.hpp"

namespace fc = fastcpd;

namespace {

struct CommonRegFlags {
  double omega = 0.7;
  double beta = 2.0;
  double lambda = 10.0;
  int iters = 100;
  std::string variant = "fast";
  double rank_fraction = 0.1;
  unsigned long seed = 0;
  bool no_normalize = false;

  fc::RegistrationConfig to_config() const {
    fc::RegistrationConfig cfg;
    cfg.omega = omega;
    cfg.beta = beta;
    cfg.lambda_reg = lambda;
    cfg.iterations = iters;
    cfg.variant = fc::variant_from_string(variant);
    cfg.rank_fraction = rank_fraction;
    cfg.seed = seed;
    cfg.normalize = !no_normalize;
    return cfg;
  }
};

void add_reg_flags(CLI::App* cmd, CommonRegFlags& f) {
  cmd->add_option("--omega", f.omega, "outlier weight in [0,1)");
  cmd->add_option("--beta", f.beta, "Gaussian kernel bandwidth");
  cmd->add_option("--lambda", f.lambda, "regularization weight");
  cmd->add_option("--iters", f.iters, "EM iterations");
  cmd->add_option("--variant", f.variant,
                  "cpd | cpd-lowrank | fast | fast-lowrank");
  cmd->add_option("--rank-fraction", f.rank_fraction,
                  "retained eigenvalue fraction for low-rank variants");
  cmd->add_option("--seed", f.seed, "random seed");
}

int cmd_register(const std::string& model_path, const std::string& scene_path,
                 const CommonRegFlags& flags, bool swap,
                 const std::string& out_path, const std::string& report_path,
                 const std::string& svg_path) {
  fc::PointSet model = fc::load_points(model_path);
  fc::PointSet scene = fc::load_points(scene_path);
  if (swap) std::swap(model, scene);

  fc::RegistrationConfig cfg = flags.to_config();
  fc::RegistrationResult res = fc::register_pointsets(model, scene, cfg);

  fc::write_points(res.transformed, out_path);
  fc::write_report(report_path, cfg, res);
  if (!svg_path.empty())
    fc::svg::write_file(fc::svg::scatter_overlay(res.transformed, scene),
                        svg_path);

  std::printf("registered %lld points onto %lld in %d iterations\n",
              static_cast<long long>(model.count()),
              static_cast<long long>(scene.count()),
              static_cast<int>(res.sigma2_trace.size()));
  std::printf("sigma2: %.6g -> %.6g\n", res.sigma2_initial,
              res.sigma2_trace.empty() ? res.sigma2_initial
                                       : res.sigma2_trace.back());
  std::printf("t_c=%.6f t_eig=%.6f t_iter=%.6f t_total=%.6f\n", res.timing.t_c,
              res.timing.t_eig, res.timing.t_iter, res.timing.t_total);
  return 0;
}

int cmd_degrade(const std::string& input_path, const std::string& kind,
                double stddev, double ratio, long long count, double amplitude,
                unsigned long seed, const std::string& out_path,
                const std::string& truth_path) {
  fc::PointSet ps = fc::load_points(input_path);
  fc::PointSet out;
  fc::Truth truth;

  if (kind == "noise") {
    out = fc::add_noise(ps, stddev, seed);
    for (Eigen::Index i = 0; i < ps.count(); ++i)
      truth[i] = ps.pts.row(i).transpose();
  } else if (kind == "outliers") {
    out = fc::add_outliers(ps, ratio, seed);
    for (Eigen::Index i = 0; i < ps.count(); ++i)
      truth[i] = ps.pts.row(i).transpose();
  } else if (kind == "occlusion") {
    auto [kept, indices] = fc::occlude(ps, static_cast<Eigen::Index>(count), seed);
    out = kept;
    for (std::size_t i = 0; i < indices.size(); ++i)
      truth[static_cast<Eigen::Index>(i)] = ps.pts.row(indices[i]).transpose();
  } else if (kind == "deform") {
    fc::DegradedPair pair = fc::synth_deform(ps, amplitude, 2.0, seed);
    out = pair.scene;
    truth = pair.truth;
  } else {
    throw fc::ParameterError("unknown degradation kind: " + kind);
  }

  fc::write_points(out, out_path);
  fc::write_truth(truth, truth_path);

  std::ofstream meta(out_path + ".meta");
  meta << "input=" << input_path << '\n'
       << "kind=" << kind << '\n'
       << "stddev=" << stddev << '\n'
       << "ratio=" << ratio << '\n'
       << "count=" << count << '\n'
       << "amplitude=" << amplitude << '\n'
       << "seed=" << seed << '\n';

  std::printf("%s: %lld -> %lld points, truth entries %zu\n", kind.c_str(),
              static_cast<long long>(ps.count()),
              static_cast<long long>(out.count()), truth.size());
  return 0;
}

int cmd_bench(const std::string& source_path, bool synthetic,
              const std::string& sizes_arg, const std::string& variants_arg,
              const CommonRegFlags& flags, const std::string& csv_path,
              const std::string& svg_path) {
  std::vector<Eigen::Index> sizes;
  {
    std::stringstream ss(sizes_arg);
    std::string tok;
    while (std::getline(ss, tok, ',')) sizes.push_back(std::stoll(tok));
  }
  std::vector<fc::SolverVariant> variants;
  {
    std::stringstream ss(variants_arg);
    std::string tok;
    while (std::getline(ss, tok, ','))
      variants.push_back(fc::variant_from_string(tok));
  }
  if (sizes.empty() || variants.empty())
    throw fc::ParameterError("bench: --sizes and --variants must be non-empty");

  fc::PointSet source;
  if (synthetic) {
    const Eigen::Index max_size =
        *std::max_element(sizes.begin(), sizes.end());
    // torus-like 3D cloud, enough points for the largest cell
    const Eigen::Index m = max_size;
    source.pts.resize(m, 3);
    std::mt19937_64 rng(flags.seed);
    std::uniform_real_distribution<double> u(0.0, 2.0 * M_PI);
    for (Eigen::Index i = 0; i < m; ++i) {
      const double a = u(rng), b = u(rng);
      source.pts(i, 0) = (1.0 + 0.35 * std::cos(b)) * std::cos(a);
      source.pts(i, 1) = (1.0 + 0.35 * std::cos(b)) * std::sin(a);
      source.pts(i, 2) = 0.35 * std::sin(b);
    }
  } else {
    source = fc::load_points(source_path);
  }

  fc::RegistrationConfig cfg = flags.to_config();
  auto records = fc::run_benchmark(source, sizes, variants, cfg, flags.seed);
  fc::write_bench_csv(records, csv_path);
  fc::svg::write_file(fc::svg::bench_plot(records), svg_path);

  for (const auto& r : records)
    std::printf("M=%lld %s t_iter=%.6f t_total=%.6f rmse=%.6g%s\n",
                static_cast<long long>(r.m), fc::to_string(r.variant),
                r.timing.t_iter, r.timing.t_total, r.rmse,
                r.failed ? " FAILED" : "");
  return 0;
}

int cmd_plot(const std::string& csv_path, const std::string& out_path) {
  auto records = fc::load_bench_csv(csv_path);
  fc::svg::write_file(fc::svg::bench_plot(records), out_path);
  std::printf("wrote %s (%zu records)\n", out_path.c_str(), records.size());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fast coherent point drift registration toolkit"};
  app.require_subcommand(1);

  // register
  auto* reg = app.add_subcommand("register", "align model onto scene");
  std::string model_path, scene_path;
  reg->add_option("model", model_path, "model point file")->required();
  reg->add_option("scene", scene_path, "scene point file")->required();
  CommonRegFlags reg_flags;
  add_reg_flags(reg, reg_flags);
  bool no_normalize = false, swap = false;
  std::string reg_out = "transformed.txt", reg_report = "report.txt",
              reg_svg;
  reg->add_flag("--no-normalize", no_normalize, "skip joint [-1,1] normalization");
  reg->add_flag("--swap", swap, "register scene onto model instead");
  reg->add_option("--out", reg_out, "output point file");
  reg->add_option("--svg", reg_svg, "overlay scatter SVG");
  reg->add_option("--report", reg_report, "run report file");

  // degrade
  auto* deg = app.add_subcommand("degrade", "synthesize degraded inputs");
  std::string deg_input, deg_kind;
  double deg_stddev = 0.1, deg_ratio = 0.6, deg_amplitude = 0.1;
  long long deg_count = 0;
  unsigned long deg_seed = 0;
  std::string deg_out = "degraded.txt", deg_truth = "truth.txt";
  deg->add_option("input", deg_input, "input point file")->required();
  deg->add_option("--kind", deg_kind, "noise | outliers | occlusion | deform")
      ->required();
  deg->add_option("--stddev", deg_stddev, "noise standard deviation");
  deg->add_option("--ratio", deg_ratio, "outlier-to-data ratio");
  deg->add_option("--count", deg_count, "occluded point count");
  deg->add_option("--amplitude", deg_amplitude, "deform coefficient stddev");
  deg->add_option("--seed", deg_seed, "random seed");
  deg->add_option("--out", deg_out, "degraded point file");
  deg->add_option("--truth", deg_truth, "ground-truth file");

  // bench
  auto* bench = app.add_subcommand("bench", "timing sweep over sizes and variants");
  std::string bench_source, bench_sizes, bench_variants = "fast,cpd";
  std::string bench_csv = "bench.csv", bench_svg = "bench.svg";
  bool bench_synth = false;
  CommonRegFlags bench_flags;
  bench_flags.iters = 20;
  bench->add_option("source", bench_source, "source point cloud");
  bench->add_option("--sizes", bench_sizes, "comma-separated M values")
      ->required();
  bench->add_option("--variants", bench_variants, "comma-separated variants");
  bench->add_option("--iters", bench_flags.iters, "EM iterations per cell");
  bench->add_option("--seed", bench_flags.seed, "random seed");
  bench->add_option("--csv", bench_csv, "output CSV path");
  bench->add_option("--svg", bench_svg, "output SVG path");
  bench->add_flag("--synthetic", bench_synth,
                  "generate a synthetic source cloud instead of reading one");

  // plot
  auto* plot = app.add_subcommand("plot", "render a bench CSV as SVG");
  std::string plot_csv, plot_out = "plot.svg";
  plot->add_option("csv", plot_csv, "bench CSV file")->required();
  plot->add_option("--out", plot_out, "output SVG path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (reg->parsed()) {
      reg_flags.no_normalize = no_normalize;
      return cmd_register(model_path, scene_path, reg_flags, swap, reg_out,
                          reg_report, reg_svg);
    }
    if (deg->parsed())
      return cmd_degrade(deg_input, deg_kind, deg_stddev, deg_ratio, deg_count,
                         deg_amplitude, deg_seed, deg_out, deg_truth);
    if (bench->parsed()) {
      if (!bench_synth && bench_source.empty())
        throw fc::ParameterError("bench: provide a source cloud or --synthetic");
      return cmd_bench(bench_source, bench_synth, bench_sizes, bench_variants,
                       bench_flags, bench_csv, bench_svg);
    }
    if (plot->parsed()) return cmd_plot(plot_csv, plot_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
