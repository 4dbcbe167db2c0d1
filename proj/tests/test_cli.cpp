#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "christoffel/csv.hpp"
#include "christoffel/geometry.hpp"
#include "christoffel/rng.hpp"
#include "cli_commands.hpp"

using namespace christoffel;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "christoffel_cli");
  std::ostringstream out, err;
  Result r;
  r.code = cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("christoffel_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

const TempDir& tmp() {
  static TempDir dir;
  return dir;
}

std::string sample_file(const std::string& surface, int n, int seed, const std::string& name) {
  const auto path = tmp() / name;
  if (!fs::exists(path)) {
    REQUIRE(run({"sample", "--surface", surface, "--n", std::to_string(n), "--seed", std::to_string(seed), "--out",
                 path}).code == 0);
  }
  return path;
}

}  // namespace

TEST_CASE("sample writes deterministic headerless CSV") {
  const auto a = tmp() / "s1.csv";
  const auto b = tmp() / "s2.csv";
  REQUIRE(run({"sample", "--surface", "sphere", "--n", "100", "--seed", "7", "--out", a}).code == 0);
  REQUIRE(run({"sample", "--surface", "sphere", "--n", "100", "--seed", "7", "--out", b}).code == 0);
  CHECK(slurp(a) == slurp(b));
  const auto t = read_csv(a);
  CHECK(t.header.empty());
  CHECK(t.data.rows() == 100);
  CHECK(t.data == sample(SurfaceSpec::sphere(3), 100, 7).points());

  const auto stdout_run = run({"sample", "--surface", "sphere", "--n", "100", "--seed", "7"});
  CHECK(stdout_run.out == slurp(a));

  const auto tv = tmp() / "tv.csv";
  REQUIRE(run({"sample", "--surface", "tvscreen", "--n", "20000", "--seed", "1", "--out", tv}).code == 0);
  const auto tvt = read_csv(tv);
  CHECK(tvt.data.rows() == 20000);
  CHECK(tvt.data.cols() == 3);

  const auto cube = run({"sample", "--surface", "cube", "--dim", "4", "--n", "5"});
  std::istringstream cube_in(cube.out);
  CHECK(parse_csv(cube_in).data.cols() == 4);
}

TEST_CASE("sample argument errors") {
  CHECK(run({"sample", "--surface", "torus", "--n", "0"}).code == cli::kUsage);
  CHECK(run({"sample", "--surface", "klein", "--n", "10"}).code == cli::kUsage);
  CHECK(run({"sample", "--n", "10"}).code == cli::kUsage);
  CHECK(run({"sample", "--surface", "torus", "--n", "ten"}).code == cli::kUsage);
  CHECK(run({"sample", "--surface", "torus", "--n", "10", "--major-radius", "0.1"}).code == cli::kUsage);
  CHECK(run({"sample", "--surface", "torus", "--n", "10", "--out", "/nonexistent/dir/x.csv"}).code == cli::kIo);
  CHECK(run({}).code == cli::kUsage);
  CHECK(run({"frobnicate"}).code == cli::kUsage);
  CHECK(run({"--help"}).code == cli::kOk);
}

TEST_CASE("the installed binary reports exit codes") {
  const std::string bin = CLI_BINARY;
  const auto status = [&](const std::string& args) {
    const int raw = std::system((bin + " " + args + " > /dev/null 2>&1").c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  CHECK(status("sample --surface torus --n 0") == 2);
  CHECK(status("sample --surface circle --n 3") == 0);
  CHECK(status("rank-curve --input /nonexistent/file.csv") == 3);
  const auto a = tmp() / "env1.csv";
  const auto b = tmp() / "env2.csv";
  CHECK(status("sample --surface bitorus --n 5000 --seed 3 --out " + a) == 0);
  CHECK(status("sample --surface bitorus --n 5000 --seed 3 --out " + b) == 0);
  CHECK(std::system(("CHRISTOFFEL_THREADS=1 " + bin + " sample --surface bitorus --n 5000 --seed 3 --out " + b).c_str()) == 0);
  CHECK(slurp(a) == slurp(b));
}

TEST_CASE("rank-curve selects the dimension") {
  const auto sphere = run({"rank-curve", "--input", sample_file("sphere", 20000, 1, "sphere.csv"), "--degrees", "5..12"});
  REQUIRE(sphere.code == 0);
  const auto js = json::parse(sphere.out);
  CHECK(js["format_version"] == "1");
  CHECK(js["command"] == "rank-curve");
  CHECK(js["config"]["degrees"] == "5..12");
  CHECK(js["config"]["threshold"] == 1e-10);
  CHECK(js["config"]["threshold_mode"] == "relative");
  CHECK(js["config"]["basis"] == "chebyshev");
  CHECK(js["selected_dimension"] == 2);
  CHECK(js["reliable"] == true);
  REQUIRE(js["curve"].size() == 8);
  for (int i = 0; i < 8; ++i) {
    const int d = 5 + i;
    CHECK(js["curve"][i]["degree"] == d);
    CHECK(js["curve"][i]["rank"] == (d + 1) * (d + 1));
    CHECK(js["curve"][i]["s_of_d"] == binomial(d + 3, 3));
  }
  CHECK(js["residual_by_k"].contains("2"));
  CHECK(js["residual_by_k"]["2"].get<double>() < 1e-6);

  const auto cube = run({"rank-curve", "--input", sample_file("cube", 20000, 1, "cube.csv")});
  REQUIRE(cube.code == 0);
  CHECK(json::parse(cube.out)["selected_dimension"] == 3);

  const auto list = run({"rank-curve", "--input", sample_file("sphere", 20000, 1, "sphere.csv"), "--degrees", "2,4,6,8"});
  REQUIRE(list.code == 0);
  CHECK(json::parse(list.out)["curve"][3]["rank"] == 81);
}

TEST_CASE("rank-curve edge cases and errors") {
  const auto one = tmp() / "one.csv";
  std::ofstream(one) << "x,y,z\n0.1,0.2,0.3\n";
  const auto r = run({"rank-curve", "--input", one});
  REQUIRE(r.code == 0);
  const auto js = json::parse(r.out);
  for (const auto& o : js["curve"]) {
    CHECK(o["rank"] == 1);
    CHECK(o["saturated"] == true);
  }
  CHECK(js["reliable"] == false);
  CHECK_FALSE(js["warnings"].empty());
  CHECK(r.err.find("warning") != std::string::npos);

  const auto ragged = tmp() / "ragged.csv";
  std::ofstream(ragged) << "1,2,3\n4,5\n";
  const auto bad = run({"rank-curve", "--input", ragged});
  CHECK(bad.code == cli::kIo);
  CHECK(bad.err.find(":2") != std::string::npos);
  CHECK(run({"rank-curve", "--input", tmp() / "missing.csv"}).code == cli::kIo);
  CHECK(run({"rank-curve", "--input", one, "--degrees", "5..40"}).code == cli::kUsage);
  CHECK(run({"rank-curve", "--input", one, "--degrees", "9..5"}).code == cli::kUsage);
  CHECK(run({"rank-curve", "--input", one, "--degrees", "a..b"}).code == cli::kUsage);
  CHECK(run({"rank-curve", "--input", one, "--basis", "legendre"}).code == cli::kUsage);
  CHECK(run({"rank-curve", "--input", one, "--threshold-mode", "loose"}).code == cli::kUsage);
}

TEST_CASE("density on a uniform circle") {
  const auto input = sample_file("circle", 20000, 3, "circle.csv");
  const auto out = tmp() / "density.csv";
  const auto summary = tmp() / "density.json";
  const auto r = run({"density", "--input", input, "--surface", "circle", "--degree", "6", "--out", out, "--summary", summary});
  REQUIRE(r.code == 0);
  const auto js = json::parse(slurp(summary));
  CHECK(js["format_version"] == "1");
  CHECK(js["config"]["degree"] == 6);
  CHECK(js["summary"]["N_of_d"] == 13);
  CHECK(js["summary"]["rank"] == 13);
  CHECK(js["summary"]["n"] == 20000);
  CHECK(js["summary"]["min_value"].get<double>() >= 0.8);
  CHECK(js["summary"]["max_value"].get<double>() <= 1.25);
  CHECK(js["summary"]["sample_kappa_mean"].get<double>() == doctest::Approx(13.0).epsilon(1e-6));

  const auto grid = read_csv(out);
  CHECK(grid.header == std::vector<std::string>{"theta", "x1", "x2", "value", "kernel_residual"});
  CHECK(grid.data.rows() == 512);
}

TEST_CASE("angle columns embed to the same density") {
  const auto angles = tmp() / "angles.csv";
  const auto points = tmp() / "points.csv";
  const auto degrees = tmp() / "angles_deg.csv";
  PointMatrix theta(3000, 1);
  RandomStream rng(5, 0);
  for (Eigen::Index i = 0; i < theta.rows(); ++i) theta(i, 0) = rng.uniform(0.0, 2 * std::numbers::pi);
  write_csv_file(angles, {"theta"}, theta);
  write_csv_file(points, {}, embed_angles(theta, SurfaceKind::Circle).points());
  write_csv_file(degrees, {"theta"}, theta * (180.0 / std::numbers::pi));

  const auto a = run({"density", "--input", angles, "--embed", "circle", "--degree", "5", "--out", tmp() / "a.csv"});
  const auto b = run({"density", "--input", points, "--surface", "circle", "--degree", "5", "--out", tmp() / "b.csv"});
  const auto c = run({"density", "--input", degrees, "--embed", "circle", "--angles-in-degrees", "--degree", "5", "--out",
                      tmp() / "c.csv"});
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  REQUIRE(c.code == 0);
  CHECK(slurp(tmp() / "a.csv") == slurp(tmp() / "b.csv"));
  CHECK(json::parse(a.out)["summary"] == json::parse(b.out)["summary"]);
  CHECK(json::parse(c.out)["summary"]["max_value"].get<double>() ==
        doctest::Approx(json::parse(a.out)["summary"]["max_value"].get<double>()).epsilon(1e-9));

  CHECK(run({"density", "--input", angles, "--embed", "bitorus"}).code == cli::kUsage);
  CHECK(run({"density", "--input", angles, "--embed", "circle", "--surface", "sphere"}).code == cli::kUsage);
}

TEST_CASE("density on sphere and bi-torus with default grids") {
  const auto s = run({"density", "--input", sample_file("sphere", 20000, 1, "sphere.csv"), "--surface", "sphere",
                      "--degree", "4", "--out", tmp() / "sphere_grid.csv"});
  REQUIRE(s.code == 0);
  CHECK(read_csv(tmp() / "sphere_grid.csv").data.rows() == 72 * 36);
  CHECK(json::parse(s.out)["summary"]["N_of_d"] == 25);

  const auto bt = run({"density", "--input", sample_file("bitorus", 5000, 2, "bitorus.csv"), "--surface", "bitorus",
                       "--grid", "16x8", "--out", tmp() / "bt_grid.csv"});
  REQUIRE(bt.code == 0);
  const auto grid = read_csv(tmp() / "bt_grid.csv");
  CHECK(grid.data.rows() == 128);
  CHECK(grid.header.front() == "phi");
}

TEST_CASE("density rejects off-surface input") {
  const auto sphere = sample_file("sphere", 20000, 1, "sphere.csv");
  const auto r = run({"density", "--input", sphere, "--surface", "circle"});
  CHECK(r.code == cli::kUsage);
  const auto off = tmp() / "off.csv";
  std::ofstream(off) << "1,0\n0,1.5\n-1,0\n0,-1\n0.6,0.8\n0.8,0.6\n";
  const auto o = run({"density", "--input", off, "--surface", "circle", "--degree", "1"});
  CHECK(o.code == cli::kUsage);
  CHECK(o.err.find("membership residual 1.25") != std::string::npos);
  CHECK(run({"density", "--input", off}).code == cli::kUsage);
  CHECK(run({"density", "--input", off, "--surface", "torus"}).code == cli::kUsage);
  CHECK(run({"density", "--input", off, "--surface", "circle", "--grid", "axb"}).code == cli::kUsage);
}

TEST_CASE("perturb writes one grid per noise level") {
  const auto input = sample_file("circle", 20000, 3, "circle.csv");
  const auto prefix = tmp() / "sweep";
  const auto r = run({"perturb", "--input", input, "--sigmas", "0.2,0.1,0.05,0.01", "--seed", "4", "--out-prefix", prefix,
                      "--grid", "128"});
  REQUIRE(r.code == 0);
  const auto js = json::parse(r.out);
  CHECK(js["command"] == "perturb");
  CHECK(js["config"]["degree"] == 6);
  CHECK(js["config"]["sigmas"].size() == 4);
  REQUIRE(js["levels"].size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(js["levels"][i]["deviation"].get<double>() > 0.0);
    CHECK(fs::exists(prefix + "_sigma_" + std::to_string(i) + ".csv"));
    CHECK(read_csv(prefix + "_sigma_" + std::to_string(i) + ".csv").data.rows() == 128);
  }
  CHECK(fs::exists(prefix + "_reference.csv"));

  const auto zero = run({"perturb", "--input", input, "--sigmas", "0"});
  REQUIRE(zero.code == 0);
  CHECK(json::parse(zero.out)["levels"][0]["deviation"] == 0.0);

  CHECK(run({"perturb", "--input", input, "--sigmas", ""}).code == cli::kUsage);
  CHECK(run({"perturb", "--input", input}).code == cli::kUsage);
  CHECK(run({"perturb", "--input", input, "--sigmas", "0.1,0.2"}).code == cli::kUsage);
  CHECK(run({"perturb", "--input", input, "--sigmas", "0.1,x"}).code == cli::kUsage);
}

TEST_CASE("christoffel-eval with a moment cache") {
  const auto input = sample_file("circle", 20000, 3, "circle.csv");
  const auto cache = tmp() / "circle.cmom";
  const auto a = run({"christoffel-eval", "--input", input, "--degree", "3", "--x", "1,0", "--x", "2,0", "--moments-out", cache});
  REQUIRE(a.code == 0);
  const auto b = run({"christoffel-eval", "--moments-in", cache, "--x", "1,0", "--x", "2,0"});
  REQUIRE(b.code == 0);
  const auto ja = json::parse(a.out), jb = json::parse(b.out);
  CHECK(ja["points"] == jb["points"]);
  CHECK(ja["rank"] == 7);
  CHECK(jb["config"]["degree"] == 3);
  CHECK(ja["points"][0]["on_support"] == true);
  CHECK(ja["points"][0]["lambda"].get<double>() * ja["points"][0]["kappa"].get<double>() ==
        doctest::Approx(1.0).epsilon(1e-8));
  CHECK(ja["points"][0]["kappa"].get<double>() == doctest::Approx(7.0).epsilon(0.1));
  CHECK(ja["points"][1]["on_support"] == false);
  CHECK(ja["points"][1]["lambda"] == 0.0);
  CHECK(ja["points"][1]["kernel_residual"].get<double>() > 1e-6);

  CHECK(run({"christoffel-eval", "--moments-in", cache, "--x", "1,0,0"}).code == cli::kUsage);
  CHECK(run({"christoffel-eval", "--moments-in", cache, "--input", input, "--x", "1,0"}).code == cli::kUsage);
  CHECK(run({"christoffel-eval", "--x", "1,0"}).code == cli::kUsage);
  CHECK(run({"christoffel-eval", "--moments-in", input, "--x", "1,0"}).code == cli::kIo);
  CHECK(run({"christoffel-eval", "--moments-in", cache}).code == cli::kUsage);
}

TEST_CASE("sample output feeds every analysis command") {
  const auto input = sample_file("circle", 3000, 8, "roundtrip.csv");
  CHECK(run({"rank-curve", "--input", input, "--degrees", "1..6"}).code == 0);
  CHECK(run({"density", "--input", input, "--surface", "circle"}).code == 0);
  CHECK(run({"perturb", "--input", input, "--sigmas", "0.1"}).code == 0);
  CHECK(run({"christoffel-eval", "--input", input, "--x", "0,1"}).code == 0);
}
