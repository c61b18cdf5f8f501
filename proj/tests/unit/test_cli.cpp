#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("wkbgo_cli_" + std::to_string(::getpid())) / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

Run run(const std::string& args, const fs::path& dir) {
  const fs::path o = dir / "stdout.txt", e = dir / "stderr.txt";
  const std::string cmd = std::string("\"") + WKBGO_CLI + "\" " + args + " >\"" + o.string() + "\" 2>\"" + e.string() + "\"";
  const int st = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  r.out = slurp(o);
  r.err = slurp(e);
  return r;
}

std::string scenario(const std::string& name) { return std::string(WKBGO_SCENARIOS) + "/" + name; }
std::string data(const std::string& name) { return std::string(WKBGO_TEST_DATA) + "/" + name; }

std::string write_tmp(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "scenario.json";
  std::ofstream(p) << text;
  return p.string();
}

}  // namespace

TEST_CASE("closure reports") {
  const fs::path d = scratch("closure");
  Run r = run("closure --scenario " + data("example_zero_mode.json") + " --out " + d.string(), d);
  CHECK(r.code == 0);
  CHECK(r.out.find("created (0,0) at generation 1") != std::string::npos);
  CHECK(fs::exists(d / "closure.json"));
  CHECK(fs::exists(d / "closure_generations.csv"));
  CHECK(fs::exists(d / "closure_edges.csv"));
  r = run("closure --scenario " + data("cubic_line.json") + " --out " + d.string(), d);
  CHECK(r.code == 0);
  CHECK(r.out.find("saturated, no new vectors") != std::string::npos);
}

TEST_CASE("reports are byte identical across runs and job counts") {
  const fs::path a = scratch("repro_a"), b = scratch("repro_b");
  const std::string sc = scenario("convergence_1d_torus.json");
  REQUIRE(run("converge --scenario " + sc + " --out " + a.string() + " --jobs 1", a).code == 0);
  REQUIRE(run("converge --scenario " + sc + " --out " + b.string() + " --jobs 3", b).code == 0);
  CHECK(slurp(a / "convergence.json") == slurp(b / "convergence.json"));
  CHECK(slurp(a / "convergence.csv") == slurp(b / "convergence.csv"));
  const auto j = nlohmann::json::parse(slurp(a / "convergence.json"));
  CHECK(j["tool"] == "wkbgo");
  CHECK(j["command"] == "converge");
  CHECK(j["scenario_sha256"].get<std::string>().size() == 64);
  CHECK(j["results"]["rows"].size() == 4);
  CHECK(fs::exists(a / "converge_runtimes.json"));
}

TEST_CASE("assert-order") {
  const fs::path d = scratch("assert");
  CHECK(run("converge --scenario " + scenario("convergence_1d_torus.json") + " --out " + d.string() + " --assert-order 0.9", d).code == 0);
  const Run r = run("converge --scenario " + scenario("convergence_1d_torus.json") + " --out " + d.string() + " --assert-order 1.5", d);
  CHECK(r.code == 1);
  CHECK(r.err.find("FAIL") != std::string::npos);
  const Run f = run("converge --scenario " + scenario("converge_linear.json") + " --out " + d.string() + " --assert-order 1", d);
  CHECK(f.code == 0);
  CHECK(f.out.find("n/a (floor)") != std::string::npos);
}

TEST_CASE("usage and parse errors exit with 2") {
  const fs::path d = scratch("usage");
  CHECK(run("converge", d).code == 2);
  CHECK(run("frobnicate --scenario x.json", d).code == 2);
  CHECK(run("converge --scenario " + scenario("convergence_1d_torus.json") + " --jobs 0", d).code == 2);
  const std::string bad_eps = write_tmp(d, R"({"schema": "wkbgo-scenario/1", "dimension": 1,
    "modes": [{"kappa": [1], "amplitude": 1}],
    "experiment": {"converge": {"eps_list": [0.3]}}})");
  Run r = run("converge --scenario " + bad_eps + " --out " + d.string(), d);
  CHECK(r.code == 2);
  CHECK(r.err.find("eps_list") != std::string::npos);
  const std::string bad_arity = write_tmp(d, R"({"schema": "wkbgo-scenario/1", "dimension": 2,
    "modes": [{"kappa": [1], "amplitude": 1}], "experiment": {"closure": {}}})");
  r = run("closure --scenario " + bad_arity + " --out " + d.string(), d);
  CHECK(r.code == 2);
  CHECK(r.err.find("modes[0].kappa") != std::string::npos);
  CHECK(run("closure --scenario " + d.string() + "/missing.json --out " + d.string(), d).code == 2);
  // Command and experiment must agree.
  CHECK(run("converge --scenario " + data("cubic_line.json") + " --out " + d.string(), d).code == 2);
}

TEST_CASE("profiles against the closed forms") {
  const fs::path d = scratch("profiles");
  Run r = run("profiles --scenario " + scenario("profiles_1d_torus.json") + " --out " + d.string(), d);
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(slurp(d / "profiles.json"));
  CHECK(j["results"]["oracle"]["max_deviation"].get<double>() <= 1e-8);
  CHECK(fs::exists(d / "profiles_trajectory.csv"));
  r = run("profiles --scenario " + scenario("profiles_1d_euclid.json") + " --out " + d.string(), d);
  REQUIRE(r.code == 0);
  const auto e = nlohmann::json::parse(slurp(d / "profiles.json"));
  CHECK(e["results"]["oracle"]["max_deviation"].get<double>() <= 1e-6);
  CHECK(fs::exists(d / "snapshots" / "profile_s0_j0.wkbf"));
}

TEST_CASE("smalldiv and instability") {
  const fs::path d = scratch("smalldiv");
  Run r = run("smalldiv --scenario " + scenario("smalldiv_zero_mode.json") + " --out " + d.string(), d);
  CHECK(r.code == 0);
  CHECK(r.out.find("min_delta >= 1: pass") != std::string::npos);
  CHECK(fs::exists(d / "smalldiv_bounds.csv"));
  r = run("smalldiv --scenario " + scenario("smalldiv_gram.json") + " --out " + d.string(), d);
  CHECK(r.code == 0);
  CHECK(r.out.find("gram probe") != std::string::npos);
  r = run("instability --scenario " + scenario("instability_cubic.json") + " --out " + d.string(), d);
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(slurp(d / "instability.json"));
  CHECK(j["results"]["gap"].get<double>() >= 0.5);
  CHECK(fs::exists(d / "instability_gap.csv"));
}
