// End-to-end checks of the fcpd binary. FCPD_BIN is injected by CMake.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "fastcpd/fastcpd.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;
using namespace fastcpd;

namespace {

const fs::path kWork = fs::temp_directory_path() / "fcpd_cli";

int run(const std::string& args, const std::string& log = "cli.log") {
  fs::create_directories(kWork);
  const std::string cmd = std::string(FCPD_BIN) + " " + args + " > " +
                          (kWork / log).string() + " 2>&1";
  const int rc = std::system(cmd.c_str());
  return rc == -1 ? -1 : WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return std::string((std::istreambuf_iterator<char>(in)), {});
}

std::string path(const std::string& name) { return (kWork / name).string(); }

}  // namespace

TEST_CASE("register on an identical pair succeeds and reduces sigma2") {
  fs::create_directories(kWork);
  PointSet cloud = testutil::make_torus(80, 200);
  write_points(cloud, path("cloud.txt"));

  const int rc = run("register " + path("cloud.txt") + " " + path("cloud.txt") +
                     " --iters 20 --out " + path("reg_out.txt") + " --report " +
                     path("reg_report.txt") + " --svg " + path("reg.svg"));
  REQUIRE(rc == 0);
  CHECK(fs::exists(path("reg_out.txt")));
  CHECK(fs::exists(path("reg.svg")));

  std::string report = slurp(path("reg_report.txt"));
  double initial = -1.0, final_val = -1.0;
  std::istringstream ss(report);
  std::string line;
  while (std::getline(ss, line)) {
    if (line.rfind("sigma2_initial=", 0) == 0)
      initial = std::stod(line.substr(15));
    if (line.rfind("sigma2[19]=", 0) == 0) final_val = std::stod(line.substr(11));
  }
  REQUIRE(initial >= 0.0);
  REQUIRE(final_val >= 0.0);
  CHECK(final_val <= initial);
}

TEST_CASE("register reports a missing scene file by name") {
  fs::create_directories(kWork);
  PointSet cloud = testutil::make_cloud(10, 2, 201);
  write_points(cloud, path("model_only.txt"));
  const int rc = run("register " + path("model_only.txt") + " " +
                         path("no_such_scene.txt"),
                     "missing.log");
  CHECK(rc != 0);
  CHECK(slurp(kWork / "missing.log").find("no_such_scene.txt") !=
        std::string::npos);
}

TEST_CASE("degrade subcommand counts") {
  fs::create_directories(kWork);
  PointSet cloud = testutil::make_cloud(100, 3, 202);
  write_points(cloud, path("deg_in.txt"));

  REQUIRE(run("degrade " + path("deg_in.txt") +
              " --kind noise --stddev 0.1 --out " + path("noisy.txt") +
              " --truth " + path("noisy_truth.txt")) == 0);
  PointSet noisy = load_points(path("noisy.txt"));
  CHECK(noisy.count() == 100);
  CHECK((noisy.pts - cloud.pts).cwiseAbs().maxCoeff() > 0.0);

  REQUIRE(run("degrade " + path("deg_in.txt") +
              " --kind outliers --ratio 0.6 --out " + path("outl.txt") +
              " --truth " + path("outl_truth.txt")) == 0);
  CHECK(load_points(path("outl.txt")).count() == 160);

  // occlusion boundary: 99 removed from 100 leaves a valid 1-point set
  REQUIRE(run("degrade " + path("deg_in.txt") +
              " --kind occlusion --count 99 --out " + path("occ.txt") +
              " --truth " + path("occ_truth.txt")) == 0);
  CHECK(load_points(path("occ.txt")).count() == 1);
  CHECK(load_truth(path("occ_truth.txt")).size() == 1);

  CHECK(run("degrade " + path("deg_in.txt") + " --kind occlusion --count 100") !=
        0);
  CHECK(run("degrade " + path("deg_in.txt") + " --kind blur") != 0);
  CHECK(fs::exists(path("noisy.txt") + ".meta"));
}

TEST_CASE("bench and plot produce CSV and deterministic SVG") {
  fs::create_directories(kWork);
  const int rc = run(
      "bench --synthetic --sizes 40,60 --variants fast,cpd --iters 2 --csv " +
      path("bench.csv") + " --svg " + path("bench.svg"));
  REQUIRE(rc == 0);
  auto records = load_bench_csv(path("bench.csv"));
  CHECK(records.size() == 4);
  CHECK(fs::exists(path("bench.svg")));

  REQUIRE(run("plot " + path("bench.csv") + " --out " + path("plot1.svg")) == 0);
  REQUIRE(run("plot " + path("bench.csv") + " --out " + path("plot2.svg")) == 0);
  CHECK(slurp(path("plot1.svg")) == slurp(path("plot2.svg")));
  CHECK(!slurp(path("plot1.svg")).empty());

  std::ofstream bad(path("bad.csv"));
  bad << "1 2 3\n";
  bad.close();
  CHECK(run("plot " + path("bad.csv")) != 0);  // not a bench CSV
}

TEST_CASE("unknown flags are rejected") {
  CHECK(run("register a b --frobnicate") != 0);
}
