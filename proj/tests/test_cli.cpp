#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "frontlab/runner.hpp"

using namespace frontlab;
namespace fs = std::filesystem;

namespace {

std::string sandbox() {
  static int counter = 0;
  fs::path dir = fs::temp_directory_path() /
                 ("frontlab_cli_test_" + std::to_string(++counter));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir.string();
}

std::string write_config(const std::string& dir, const std::string& text) {
  const std::string path = dir + "/run.toml";
  std::ofstream out(path);
  out << text;
  return path;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunRecord run_sub(const std::string& sub, const std::string& cfg_text,
                  const std::string& dir, int threads = 1) {
  RunOptions opt;
  opt.subcommand = sub;
  opt.config_path = write_config(dir, cfg_text);
  opt.out_dir = dir + "/out";
  opt.threads = threads;
  return run(opt);
}

const char* kEigenConfig = R"(
[medium]
a = "1"
b = "1"
[problem]
d = 1.0
[numerics]
eigen_grid = 200
tol = 1e-9
[experiment]
R = 2.0
)";

const char* kSolveConfig = R"(
[medium]
a = "1"
b = "1"
[problem]
d = 1.0
mu = 1.0
g0 = -1.0
h0 = 1.0
u0 = "cosine_bump"
[numerics]
N = 64
dt = 0.002
T = 0.2
output_count = 10
)";

}  // namespace

TEST_CASE("rstar subcommand reproduces the homogeneous critical radius") {
  const std::string dir = sandbox();
  RunRecord rec = run_sub("rstar", kEigenConfig, dir);
  REQUIRE(rec.exit_code == 0);
  const std::string csv = slurp(dir + "/out/rstar.csv");
  CHECK(csv.rfind("y,Rstar", 0) == 0);
  const double rstar = std::stod(csv.substr(csv.find("\n0,") + 3));
  CHECK(std::fabs(rstar - 1.5707963) < 1e-3);
}

TEST_CASE("malformed coefficient expressions exit with the validation code") {
  const std::string dir = sandbox();
  std::string bad = kEigenConfig;
  bad.replace(bad.find("a = \"1\""), 7, "a = \"1 + cos(\"");
  RunRecord rec = run_sub("eigen", bad, dir);
  CHECK(rec.exit_code == 2);
  CHECK(rec.status == "validation_error");
  CHECK(rec.message.find("position") != std::string::npos);

  // the manifest records the failure
  const std::string manifest = slurp(dir + "/out/manifest.txt");
  CHECK(manifest.find("status = validation_error") != std::string::npos);
}

TEST_CASE("unknown subcommands and missing configs fail with code 2") {
  const std::string dir = sandbox();
  RunRecord rec = run_sub("transmogrify", kEigenConfig, dir);
  CHECK(rec.exit_code == 2);

  RunOptions opt;
  opt.subcommand = "solve";
  opt.config_path = dir + "/does_not_exist.toml";
  opt.out_dir = dir + "/out2";
  CHECK(run(opt).exit_code == 2);
}

TEST_CASE("solve writes a trajectory, summary, plot script, and manifest") {
  const std::string dir = sandbox();
  RunRecord rec = run_sub("solve", kSolveConfig, dir);
  REQUIRE(rec.exit_code == 0);

  const std::string manifest = slurp(dir + "/out/manifest.txt");
  CHECK(manifest.find("status = ok") != std::string::npos);
  CHECK(manifest.find("config_digest = " + rec.config_digest) != std::string::npos);
  // manifest completeness: every artifact the run reports exists and is listed
  for (const auto& f : rec.files) {
    CHECK(fs::exists(dir + "/out/" + f));
    CHECK(manifest.find(f) != std::string::npos);
  }
  const std::string traj = slurp(dir + "/out/trajectory.csv");
  CHECK(traj.rfind("t,g,h,umax,mass,stefan_functional", 0) == 0);
  CHECK(std::count(traj.begin(), traj.end(), '\n') == 12);  // header + 11 rows
}

TEST_CASE("identical configs give byte-identical outputs") {
  const std::string dir_a = sandbox();
  const std::string dir_b = sandbox();
  RunRecord a = run_sub("solve", kSolveConfig, dir_a);
  RunRecord b = run_sub("solve", kSolveConfig, dir_b);
  REQUIRE(a.exit_code == 0);
  REQUIRE(b.exit_code == 0);
  CHECK(a.config_digest == b.config_digest);
  CHECK(slurp(dir_a + "/out/trajectory.csv") == slurp(dir_b + "/out/trajectory.csv"));
}

TEST_CASE("sweep assembles verdicts in parameter order") {
  const std::string dir = sandbox();
  std::string cfg = R"(
[medium]
a = "1"
b = "1"
[problem]
d = 1.0
g0 = -0.5
h0 = 0.5
u0 = "cosine_bump"
u0_amplitude = 0.5
[numerics]
N = 96
dt = 0.002
T = 30.0
[experiment]
T_max = 30.0
mu_values = [0.02, 4.0]
rstar_tol = 0.001
)";
  RunRecord rec = run_sub("sweep", cfg, dir, 2);
  REQUIRE(rec.exit_code == 0);
  const std::string verdicts = slurp(dir + "/out/verdicts.csv");
  const auto v_pos = verdicts.find("Vanishing");
  const auto s_pos = verdicts.find("Spreading");
  REQUIRE(v_pos != std::string::npos);
  REQUIRE(s_pos != std::string::npos);
  CHECK(v_pos < s_pos);  // mu = 0.02 row precedes mu = 4.0
  CHECK(fs::exists(dir + "/out/evidence_000.csv"));
  CHECK(fs::exists(dir + "/out/evidence_001.csv"));
}

TEST_CASE("approx-check reports clean monotonicity on the triangle") {
  const std::string dir = sandbox();
  std::string cfg = R"(
[medium]
a = "1"
b = "1"
[problem]
u0 = "triangle"
g0 = -1.0
h0 = 1.0
[numerics]
N = 96
dt = 0.002
T = 0.5
output_count = 10
[experiment]
levels = [2, 4]
)";
  RunRecord rec = run_sub("approx-check", cfg, dir);
  REQUIRE(rec.exit_code == 0);
  const std::string report = slurp(dir + "/out/approx_report.csv");
  std::istringstream lines(report);
  std::string line;
  std::getline(lines, line);  // header
  while (std::getline(lines, line)) {
    // columns: level,sup_diff_prev,H_emp_left,H_emp_right,mono,front
    const auto last_comma = line.rfind(',');
    const auto prev_comma = line.rfind(',', last_comma - 1);
    CHECK(line.substr(last_comma + 1) == "0");
    CHECK(line.substr(prev_comma + 1, last_comma - prev_comma - 1) == "0");
  }
}
