#include <doctest.h>

#include <cmath>

#include "fastcpd/correspondence.hpp"
#include "test_util.hpp"

using namespace fastcpd;

TEST_CASE("posterior with a single component takes all mass") {
  PointSet x{(Eigen::MatrixXd(1, 2) << 0, 0).finished()};
  PointSet y = testutil::make_cloud(5, 2, 1);
  Correspondence c = posterior(x, y, GmmParams{0.0, 0.5});
  for (Eigen::Index j = 0; j < 5; ++j)
    CHECK(c.p(0, j) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("posterior symmetry for equidistant components") {
  PointSet x{(Eigen::MatrixXd(2, 2) << -1, 0, 1, 0).finished()};
  PointSet y{(Eigen::MatrixXd(1, 2) << 0, 0.3).finished()};
  Correspondence c = posterior(x, y, GmmParams{0.0, 0.25});
  CHECK(c.p(0, 0) == doctest::Approx(0.5));
  CHECK(c.p(1, 0) == doctest::Approx(0.5));
}

TEST_CASE("posterior scalar value with outlier term") {
  // M=N=1, D=1, x=0, y=1, sigma2=1, omega=0.5:
  // p = e^{-1/2} / (e^{-1/2} + sqrt(2 pi))
  PointSet x{(Eigen::MatrixXd(1, 1) << 0).finished()};
  PointSet y{(Eigen::MatrixXd(1, 1) << 1).finished()};
  Correspondence c = posterior(x, y, GmmParams{0.5, 1.0});
  const double e = std::exp(-0.5);
  CHECK(c.p(0, 0) == doctest::Approx(e / (e + std::sqrt(2.0 * M_PI))).epsilon(1e-12));
  CHECK(c.p(0, 0) == doctest::Approx(0.1948).epsilon(1e-3));
}

TEST_CASE("posterior parameter handling") {
  PointSet x = testutil::make_cloud(3, 2, 2);
  PointSet y = testutil::make_cloud(4, 2, 3);
  CHECK_THROWS_AS(posterior(x, y, GmmParams{1.0, 1.0}), ParameterError);
  CHECK_THROWS_AS(posterior(x, y, GmmParams{-0.1, 1.0}), ParameterError);

  Correspondence c = posterior(x, y, GmmParams{0.5, 1e-30});
  CHECK(c.sigma2_clamped);
}

TEST_CASE("posterior column sums") {
  PointSet x = testutil::make_cloud(8, 3, 4);
  PointSet y = testutil::make_cloud(6, 3, 5);

  Correspondence c0 = posterior(x, y, GmmParams{0.0, 0.3});
  for (Eigen::Index j = 0; j < 6; ++j)
    CHECK(c0.p.col(j).sum() == doctest::Approx(1.0).epsilon(1e-10));

  Correspondence c = posterior(x, y, GmmParams{0.7, 0.3});
  for (Eigen::Index j = 0; j < 6; ++j)
    CHECK(c.p.col(j).sum() <= 1.0 + 1e-10);
  CHECK(c.p.minCoeff() >= 0.0);
  CHECK(c.p.maxCoeff() <= 1.0);
}

TEST_CASE("posterior agrees with the unshifted formula on well-scaled input") {
  PointSet x = testutil::make_cloud(5, 2, 6);
  PointSet y = testutil::make_cloud(7, 2, 7);
  const double omega = 0.3, sigma2 = 0.4;
  Correspondence c = posterior(x, y, GmmParams{omega, sigma2});

  const double cc = std::pow(2.0 * M_PI * sigma2, 1.0) * (omega / (1.0 - omega)) *
                    (5.0 / 7.0);  // (2 pi s2)^{D/2}, D=2
  for (Eigen::Index j = 0; j < 7; ++j) {
    double denom = cc;
    for (Eigen::Index i = 0; i < 5; ++i)
      denom += std::exp(-(y.pts.row(j) - x.pts.row(i)).squaredNorm() /
                        (2.0 * sigma2));
    for (Eigen::Index i = 0; i < 5; ++i) {
      const double naive =
          std::exp(-(y.pts.row(j) - x.pts.row(i)).squaredNorm() /
                   (2.0 * sigma2)) /
          denom;
      CHECK(c.p(i, j) == doctest::Approx(naive).epsilon(1e-12));
    }
  }
}

TEST_CASE("enforce_row_constraint normalizes, falls back, and is idempotent") {
  Correspondence raw;
  raw.p.resize(2, 2);
  raw.p << 0.2, 0.2, 0.0, 0.5;
  Correspondence c = enforce_row_constraint(raw);
  CHECK(c.row_constrained);
  CHECK(c.p(0, 0) == doctest::Approx(0.5));
  CHECK(c.p(0, 1) == doctest::Approx(0.5));
  CHECK(c.p(1, 0) == 0.0);
  CHECK(c.p(1, 1) == doctest::Approx(1.0));
  CHECK(c.degenerate_rows.empty());

  Correspondence again = enforce_row_constraint(c);
  CHECK((again.p - c.p).cwiseAbs().maxCoeff() == 0.0);

  Correspondence zero;
  zero.p = Eigen::MatrixXd::Zero(1, 4);
  Correspondence fixed = enforce_row_constraint(zero);
  REQUIRE(fixed.degenerate_rows.size() == 1);
  CHECK(fixed.degenerate_rows[0] == 0);
  for (Eigen::Index j = 0; j < 4; ++j) CHECK(fixed.p(0, j) == 0.25);
}

TEST_CASE("estimated_targets cases and convexity") {
  PointSet y{(Eigen::MatrixXd(2, 2) << 0, 0, 2, 0).finished()};

  Correspondence ident;
  ident.p = Eigen::MatrixXd::Identity(2, 2);
  ident.row_constrained = true;
  CHECK((estimated_targets(ident, y).pts - y.pts).cwiseAbs().maxCoeff() == 0.0);

  Correspondence uniform;
  uniform.p = Eigen::MatrixXd::Constant(1, 2, 0.5);
  uniform.row_constrained = true;
  CHECK(estimated_targets(uniform, y).pts(0, 0) == doctest::Approx(1.0));

  Correspondence weighted;
  weighted.p.resize(1, 2);
  weighted.p << 0.25, 0.75;
  weighted.row_constrained = true;
  PointSet y2{(Eigen::MatrixXd(2, 2) << 0, 0, 4, 0).finished()};
  CHECK(estimated_targets(weighted, y2).pts(0, 0) == doctest::Approx(3.0));

  // any row-constrained P maps into the bounding box of Y
  PointSet ybig = testutil::make_cloud(9, 3, 8);
  Correspondence rc = testutil::random_row_constrained(12, 9, 9);
  PointSet t = estimated_targets(rc, ybig);
  for (Eigen::Index j = 0; j < 3; ++j) {
    CHECK(t.pts.col(j).minCoeff() >= ybig.pts.col(j).minCoeff() - 1e-12);
    CHECK(t.pts.col(j).maxCoeff() <= ybig.pts.col(j).maxCoeff() + 1e-12);
  }

  CHECK_THROWS_AS(estimated_targets(ident, testutil::make_cloud(5, 2, 1)),
                  ParameterError);
}
