#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "fastcpd/metrics.hpp"
#include "fastcpd/svg.hpp"
#include "test_util.hpp"

using namespace fastcpd;

TEST_CASE("rmse exact values") {
  PointSet t{(Eigen::MatrixXd(2, 2) << 0, 0, 1, 1).finished()};
  Truth truth;
  truth[0] = Eigen::Vector2d(0, 0);
  truth[1] = Eigen::Vector2d(1, 1);
  CHECK(rmse(t, truth) == 0.0);

  Truth offset;
  offset[0] = Eigen::Vector2d(3, 4);
  CHECK(rmse(t, offset) == doctest::Approx(5.0).epsilon(1e-14));

  PointSet t2{(Eigen::MatrixXd(2, 1) << 0, 0).finished()};
  Truth two;
  two[0] = Eigen::VectorXd::Zero(1);
  two[1] = (Eigen::VectorXd(1) << 2).finished();
  CHECK(rmse(t2, two) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));

  Truth empty;
  CHECK_THROWS_AS(rmse(t, empty), ParameterError);
}

TEST_CASE("rmse is invariant under consistent permutation") {
  PointSet t = testutil::make_cloud(10, 3, 90);
  Truth truth;
  for (Eigen::Index i = 0; i < 10; ++i)
    truth[i] = t.pts.row(i).transpose() + Eigen::Vector3d(0.01 * (i + 1), 0, 0);
  const double base = rmse(t, truth);

  // reverse the row order together with the truth indices
  PointSet rev;
  rev.pts = t.pts.colwise().reverse();
  Truth rtruth;
  for (Eigen::Index i = 0; i < 10; ++i) rtruth[9 - i] = truth[i];
  CHECK(rmse(rev, rtruth) == doctest::Approx(base).epsilon(1e-14));
}

TEST_CASE("subsample is exact-size and seed-deterministic") {
  PointSet src = testutil::make_cloud(200, 3, 91);
  PointSet a = subsample(src, 50, 7);
  PointSet b = subsample(src, 50, 7);
  REQUIRE(a.count() == 50);
  CHECK((a.pts - b.pts).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(subsample(src, 0, 7), ParameterError);
  CHECK_THROWS_AS(subsample(src, 201, 7), ParameterError);
}

TEST_CASE("random_affine stays mild") {
  PointSet src = testutil::make_torus(100, 92);
  PointSet warped = random_affine(src, 93);
  // rotation <= 10 deg, scale in [0.9,1.1], shift <= 0.1: displacement is
  // bounded well under the shape diameter
  CHECK((warped.pts - src.pts).rowwise().norm().maxCoeff() <= 0.6);
}

TEST_CASE("small benchmark sweep has consistent records") {
  PointSet src = testutil::make_torus(120, 94);
  RegistrationConfig cfg;
  cfg.iterations = 3;
  auto records = run_benchmark(src, {40, 60},
                               {SolverVariant::fast, SolverVariant::cpd}, cfg, 1);
  REQUIRE(records.size() == 4);
  for (const auto& r : records) {
    CHECK_FALSE(r.failed);
    CHECK(r.rmse >= 0.0);
    CHECK(r.timing.t_f == r.timing.t_eig + r.timing.t_iter);
    CHECK(r.timing.t_total == r.timing.t_c + r.timing.t_f + r.timing.t_o);
    CHECK(r.iterations == 3);
  }
  CHECK(records[0].m == 40);
  CHECK(records[2].m == 60);
}

TEST_CASE("bench CSV round trip is byte-stable") {
  PointSet src = testutil::make_torus(100, 95);
  RegistrationConfig cfg;
  cfg.iterations = 2;
  auto records = run_benchmark(src, {30}, {SolverVariant::fast,
                                           SolverVariant::fast_lowrank}, cfg, 2);
  auto dir = std::filesystem::temp_directory_path();
  auto p1 = (dir / "fcpd_bench1.csv").string();
  auto p2 = (dir / "fcpd_bench2.csv").string();
  write_bench_csv(records, p1);
  auto back = load_bench_csv(p1);
  REQUIRE(back.size() == records.size());
  write_bench_csv(back, p2);

  std::ifstream f1(p1), f2(p2);
  std::string s1((std::istreambuf_iterator<char>(f1)), {});
  std::string s2((std::istreambuf_iterator<char>(f2)), {});
  CHECK(s1 == s2);

  // written timing columns satisfy the identities in exact decimal
  for (const auto& r : back) {
    CHECK(r.timing.t_f == doctest::Approx(r.timing.t_eig + r.timing.t_iter).epsilon(1e-12));
    CHECK(r.timing.t_total ==
          doctest::Approx(r.timing.t_c + r.timing.t_f + r.timing.t_o).epsilon(1e-12));
  }
}

TEST_CASE("bench plot SVG structure and determinism") {
  PointSet src = testutil::make_torus(100, 96);
  RegistrationConfig cfg;
  cfg.iterations = 2;
  auto records = run_benchmark(src, {30, 50},
                               {SolverVariant::fast, SolverVariant::cpd}, cfg, 3);
  std::string a = svg::bench_plot(records);
  std::string b = svg::bench_plot(records);
  CHECK(a == b);
  // one polyline per variant plus the frame rect
  std::size_t polylines = 0, pos = 0;
  while ((pos = a.find("<path d=\"M ", pos)) != std::string::npos) {
    ++polylines;
    pos += 1;
  }
  CHECK(polylines == 2);
  CHECK(a.find("M (log scale)") != std::string::npos);
  CHECK(a.find("seconds") != std::string::npos);

  // degenerate: no records still yields a valid chart shell
  std::string empty = svg::bench_plot({});
  CHECK(empty.find("<svg") != std::string::npos);
  CHECK(empty.find("<path d=\"M ") == std::string::npos);
}

TEST_CASE("scatter overlay emits both marker kinds") {
  PointSet model = testutil::make_cloud(10, 3, 97);
  PointSet scene = testutil::make_cloud(12, 3, 98);
  std::string s = svg::scatter_overlay(model, scene);
  CHECK(s.find("<circle") != std::string::npos);
  CHECK(s.find("<path") != std::string::npos);
  CHECK(s == svg::scatter_overlay(model, scene));
}
