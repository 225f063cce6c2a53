#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "proxsweep/proxsweep.hpp"

using namespace proxsweep;
namespace fs = std::filesystem;

namespace {
std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  REQUIRE(is);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) : path(fs::temp_directory_path() / tag) {
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
};
}  // namespace

TEST_CASE("scenario construction") {
  SystemConfig a = make_example(2.0, 0.0, 10.0, 1.0);
  CHECK(a.cert.applicable);
  CHECK(a.cert.alpha_bar == Catch::Approx(-0.037750).margin(1e-6));
  CHECK(a.default_h == 0.01);
  CHECK_FALSE(a.period.has_value());
  CHECK(a.label == "example(beta=2,delta=0,T=10,alpha=1)");
  REQUIRE(a.constants.has_value());
  CHECK(a.constants->M_f == 2.5);
  CHECK(a.field.bound_Mf() == 2.5);

  SystemConfig b = make_example(2.1, 0.2, 10.0, 1.0);
  CHECK(b.cert.applicable);
  CHECK(b.period == 10.0);
  CHECK(b.cert.alpha_bar == Catch::Approx(-0.163249).margin(1e-6));

  // shrinking the hole below the working radius kills the certificate
  SystemConfig neg = make_example(1.9, 0.2, 10.0, 1.0);
  CHECK_FALSE(neg.cert.applicable);

  SystemConfig k = make_crowd_two(0.5, 1.0);
  CHECK_FALSE(k.cert.applicable);
  CHECK(k.cert.M_f == 2.0);
  CHECK(k.cert.eta == Catch::Approx(0.7071067811865476).margin(1e-15));
  CHECK(k.default_h == 1e-3);

  CHECK_THROWS_AS(make_crowd_two(0.5, 0.9), ContractViolation);
  CHECK_THROWS_AS(make_example(0.9, 0.0, 10.0, 1.0), ContractViolation);
  CHECK_THROWS_AS(make_example(2.0, 0.0, 10.0, 0.0), ContractViolation);
}

TEST_CASE("constants agree with the closed forms") {
  SystemConfig b = make_example(2.1, 0.2, 10.0, 1.0);
  ExampleConstants ref = example_constants(2.1, 0.2 * kPi / 10.0, 1.0);
  REQUIRE(b.constants.has_value());
  CHECK(b.constants->L_C == ref.L_C);
  CHECK(b.constants->eta == ref.eta);
  CHECK(b.constants->M_f == ref.M_f);
  CHECK(b.cert.alpha_bar == ref.cert.alpha_bar);
}

TEST_CASE("simulate request produces a feasible endpoint and artifacts") {
  TempDir dir("proxsweep_sim_test");
  SystemConfig cfg = make_example(2.0, 0.0, 10.0, 1.0);
  RunParams p;
  p.t0 = 0.0;
  p.t1 = 30.0;
  p.x0 = vec2(-2.2, 0.4);
  p.out_dir = dir.path.string();

  json s = run(cfg, Request::simulate, p);
  CHECK(s["command"] == "simulate");
  CHECK(s["steps"] == 3000);
  const double fx = s["final_state"][0].get<double>();
  const double fy = s["final_state"][1].get<double>();
  CHECK((vec2(fx, fy) - vec2(-1.0, 0.0)).norm() <= 2e-3);

  CHECK(fs::exists(dir.path / "trajectory.csv"));
  CHECK(fs::exists(dir.path / "manifest.json"));

  // header and row shape
  std::string csv = slurp(dir.path / "trajectory.csv");
  CHECK(csv.rfind("t,x1,x2,residual\n", 0) == 0);
}

TEST_CASE("artifact bundles are reproducible byte for byte") {
  TempDir d1("proxsweep_rep_a"), d2("proxsweep_rep_b");
  SystemConfig cfg = make_example(2.1, 0.2, 10.0, 1.0);
  RunParams p;
  p.t1 = 5.0;
  p.x0 = vec2(-1.8, 0.3);

  p.out_dir = d1.path.string();
  run(cfg, Request::simulate, p);
  p.out_dir = d2.path.string();
  run(cfg, Request::simulate, p);

  CHECK(slurp(d1.path / "trajectory.csv") == slurp(d2.path / "trajectory.csv"));
  CHECK(slurp(d1.path / "manifest.json") == slurp(d2.path / "manifest.json"));
}

TEST_CASE("serialized configs rebuild the same artifacts") {
  TempDir d1("proxsweep_ser_a"), d2("proxsweep_ser_b");
  SystemConfig cfg = make_example(2.1, 0.2, 10.0, 1.0);

  // round-trip through the flat key-value format
  const std::string text = serialize_config(cfg);
  fs::create_directories(d1.path);
  std::ofstream(d1.path / "scenario.cfg") << text;
  auto kv = parse_config_file((d1.path / "scenario.cfg").string());
  CHECK(kv.at("scenario") == "example");
  SystemConfig rebuilt =
      make_example(std::stod(kv.at("beta")), std::stod(kv.at("delta")),
                   std::stod(kv.at("period")), std::stod(kv.at("alpha")));

  RunParams p;
  p.t1 = 5.0;
  p.x0 = vec2(-1.8, 0.3);
  p.out_dir = (d1.path / "out").string();
  run(cfg, Request::simulate, p);
  p.out_dir = (d2.path / "out").string();
  run(rebuilt, Request::simulate, p);
  CHECK(slurp(d1.path / "out" / "trajectory.csv") == slurp(d2.path / "out" / "trajectory.csv"));
  CHECK(slurp(d1.path / "out" / "manifest.json") == slurp(d2.path / "out" / "manifest.json"));
}

TEST_CASE("certify request") {
  SystemConfig cfg = make_example(1.9, 0.2, 10.0, 1.0);
  json s = run(cfg, Request::certify, RunParams{});
  CHECK(s["certificate"]["applicable"] == false);  // negative control

  SystemConfig b = make_example(2.1, 0.2, 10.0, 1.0);
  s = run(b, Request::certify, RunParams{});
  CHECK(s["certificate"]["applicable"] == true);
  CHECK(s["certificate"]["alpha_bar"].get<double>() ==
        Catch::Approx(-0.163249).margin(1e-6));
  CHECK(s["certificate"]["provenance"]["eta"] == "closed_form");
}

TEST_CASE("contract request") {
  SystemConfig cfg = make_example(2.1, 0.2, 10.0, 1.0);
  RunParams p;
  p.t1 = 10.0;
  p.h = 1e-3;
  p.x0 = vec2(-1.8, 0.3);
  p.x0b = vec2(-2.2, -0.2);
  json s = run(cfg, Request::contract, p);
  CHECK(s["envelope_violations"] == 0);
  CHECK(s["fitted_rate"].get<double>() <= -0.147);
  CHECK(s["applicable"] == true);
}

TEST_CASE("periodic request uses the scenario period") {
  SystemConfig cfg = make_example(2.1, 0.2, 10.0, 1.0);
  RunParams p;
  p.h = 1e-2;
  json s = run(cfg, Request::periodic, p);
  CHECK(s["T"] == 10.0);
  CHECK(s["converged"] == true);
  CHECK(s["iterations"].get<int>() <= 15);
}

TEST_CASE("projection battery request") {
  SystemConfig cfg = make_example(2.0, 0.0, 10.0, 1.0);
  RunParams p;
  p.n_queries = 60;
  p.resolution = 0.02;
  p.refine_iters = 100;
  json s = run(cfg, Request::project_test, p);
  CHECK(s["n_queries"] == 60);
  CHECK(s["max_dist_err"].get<double>() <= 1e-6);
  CHECK(s["max_point_err"].get<double>() <= 1e-4);
  CHECK(s["tube_count"].get<int>() > 0);
}

TEST_CASE("pullback request") {
  SystemConfig cfg = make_example(2.1, 0.2, 10.0, 1.0);
  RunParams p;
  p.t_eval = 0.0;
  p.horizons = {20.0, 40.0, 60.0};
  p.h = 1e-2;
  json s = run(cfg, Request::pullback, p);
  auto gaps = s["successive_gaps"].get<std::vector<double>>();
  REQUIRE(gaps.size() == 2);
  CHECK(gaps[1] <= 0.057 * gaps[0] + 1e-15);
}

TEST_CASE("config file parsing") {
  TempDir dir("proxsweep_cfg_test");
  fs::create_directories(dir.path);
  const fs::path p = dir.path / "demo.cfg";
  std::ofstream(p) << "# demo scenario\n"
                      "scenario = example\n"
                      "beta = 2.1\n"
                      "delta = 0.2   # swing\n"
                      "\n"
                      "period = 10\n";
  auto kv = parse_config_file(p.string());
  CHECK(kv.at("scenario") == "example");
  CHECK(kv.at("beta") == "2.1");
  CHECK(kv.at("delta") == "0.2");
  CHECK(kv.at("period") == "10");

  std::ofstream(p) << "scenario example\n";
  CHECK_THROWS_AS(parse_config_file(p.string()), ContractViolation);
  CHECK_THROWS_AS(parse_config_file((dir.path / "missing.cfg").string()), ContractViolation);
}

TEST_CASE("run validates its inputs") {
  SystemConfig cfg = make_example(2.0, 0.0, 10.0, 1.0);
  CHECK_THROWS_AS(run(cfg, Request::simulate, RunParams{}), ContractViolation);  // no x0
  CHECK_THROWS_AS(run(cfg, Request::pullback, RunParams{}), ContractViolation);  // no horizons
  RunParams p;
  p.x0 = vec2(-1.8, 0.3);
  CHECK_THROWS_AS(run(cfg, Request::contract, p), ContractViolation);  // no second start
  CHECK_THROWS_AS(run(cfg, Request::periodic, p), ContractViolation);  // no period anywhere
}
