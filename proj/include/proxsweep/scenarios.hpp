#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "proxsweep/analysis.hpp"
#include "proxsweep/core.hpp"
#include "proxsweep/field.hpp"
#include "proxsweep/io.hpp"
#include "proxsweep/oracle.hpp"
#include "proxsweep/periodic.hpp"
#include "proxsweep/rng.hpp"
#include "proxsweep/sets.hpp"
#include "proxsweep/sweep.hpp"

namespace proxsweep {

struct SystemConfig {
  MovingSet set;
  VectorField field;
  std::optional<double> period;
  std::string label;
  double default_h;
  std::optional<ExampleConstants> constants;
  StabilityCertificate cert;
  std::uint64_t seed = kDefaultSeed;
};

namespace detail {
inline std::string fmtg(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}
}  // namespace detail

inline SystemConfig make_example(double beta, double delta, double T, double alpha) {
  if (!(beta >= 1.0)) throw ContractViolation("make_example: beta must be >= 1");
  if (!(delta >= 0.0)) throw ContractViolation("make_example: delta must be >= 0");
  if (!(T > 0.0)) throw ContractViolation("make_example: period must be positive");
  if (!(alpha > 0.0)) throw ContractViolation("make_example: alpha must be positive");

  BProfile prof = delta == 0.0 ? BProfile::constant(beta) : BProfile::sinusoidal(beta, delta, T);
  SystemConfig cfg{EllipseExteriorBall(prof), VectorField::linear(alpha), std::nullopt,
                   "", 0.0, std::nullopt, {}, kDefaultSeed};
  cfg.field.set_bound_Mf(2.5 * alpha);
  if (delta > 0.0) cfg.period = T;
  cfg.constants = example_constants(beta, prof.lipschitz(), alpha);
  cfg.cert = cfg.constants->cert;
  const double denom = cfg.constants->M_f + cfg.constants->L_C;
  cfg.default_h = cfg.constants->eta > 0.0
                      ? std::min(0.01, 0.9 * cfg.constants->eta / denom)
                      : 0.01;
  cfg.label = "example(beta=" + detail::fmtg(beta) + ",delta=" + detail::fmtg(delta) +
              ",T=" + detail::fmtg(T) + ",alpha=" + detail::fmtg(alpha) + ")";
  return cfg;
}

inline SystemConfig make_crowd_two(double r, double box) {
  if (!(r > 0.0)) throw ContractViolation("make_crowd_two: radius must be positive");
  if (!(box >= 2.0 * r)) throw ContractViolation("make_crowd_two: box must be >= 2r");
  SystemConfig cfg{CrowdDisks(2, r, box), VectorField::crowd_spontaneous(), std::nullopt,
                   "", 1e-3, std::nullopt, {}, kDefaultSeed};
  cfg.field.set_bound_Mf(2.0 * box);
  cfg.cert = certificate(1.0, 0.0, 2.0 * box, r * std::sqrt(2.0));
  cfg.label = "crowd(n=2,r=" + detail::fmtg(r) + ",box=" + detail::fmtg(box) + ")";
  return cfg;
}

// ---------------------------------------------------------------------------

enum class Request { simulate, certify, contract, periodic, project_test, pullback };

struct RunParams {
  double t0 = 0.0;
  double t1 = 10.0;
  double h = 0.0;  // 0: use the scenario default
  Vec x0;
  Vec x0b;
  double T = 0.0;  // 0: use the scenario period
  double tol = 1e-6;
  int max_iter = 25;
  std::vector<double> horizons;
  double t_eval = 0.0;
  int n_queries = 1000;
  double resolution = 5e-3;
  int refine_iters = 80;
  double slack = 1.05;
  std::string out_dir;
};

struct ProjectionBattery {
  int n_queries = 0;
  int tube_count = 0;
  double max_dist_err = 0.0;
  double max_point_err = 0.0;  // over in-tube queries only
};

// Seeded battery of exact-vs-oracle projection comparisons. Even queries are
// uniform over the bounding box inflated by 30% per side; odd queries perturb
// a boundary sample (for the disk ensemble that means near-contact states,
// the regime where a projection bug would actually bite).
inline ProjectionBattery projection_battery(const MovingSet& set, double t, int n_queries,
                                            double resolution, int refine_iters,
                                            std::uint64_t seed) {
  Rng rng(seed);
  const auto [lo, hi] = bounding_box(set, t);
  const int d = dim(set);
  const auto boundary = boundary_samples(set, t, std::max(4, n_queries / 2));
  const double eta = claimed_eta(set);

  ProjectionBattery out;
  for (int k = 0; k < n_queries; ++k) {
    Vec q(d);
    if (k % 2 == 0) {
      for (int i = 0; i < d; ++i) {
        const double span = hi[i] - lo[i];
        q[i] = rng.uniform(lo[i] - 0.3 * span, hi[i] + 0.3 * span);
      }
    } else {
      q = boundary[(k / 2) % boundary.size()];
      const double diam = (hi - lo).norm();
      q += (0.05 * diam * rng.uniform01()) * rng.direction(d);
    }
    const ProjectionResult pr = project(set, t, q);
    const ProjectionResult od = project_oracle(set, t, q, resolution, refine_iters);
    ++out.n_queries;
    out.max_dist_err = std::max(out.max_dist_err, std::abs(pr.distance - od.distance));
    if (pr.unique && std::isfinite(eta) && pr.distance < 0.9 * eta && pr.distance > 0.0) {
      ++out.tube_count;
      out.max_point_err = std::max(out.max_point_err, (pr.point - od.point).norm());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace detail {

inline json vec_json(const Vec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

inline double pick_h(const SystemConfig& cfg, const RunParams& p) {
  return p.h > 0.0 ? p.h : cfg.default_h;
}

inline json constants_json(const SystemConfig& cfg) {
  json prov;
  json body = certificate_json(cfg.cert);
  for (const char* k : {"alpha", "L_C", "M_f", "eta"}) prov[k] = "closed_form";
  body["provenance"] = prov;
  body["seed"] = cfg.seed;
  if (cfg.constants) {
    body["beta"] = cfg.constants->beta;
    body["L_b"] = cfg.constants->L_b;
  }
  return body;
}

}  // namespace detail

// Executes one request against a scenario. The returned summary and any
// artifacts written to params.out_dir are a pure function of
// (config, request, params), so replaying a serialized configuration
// reproduces the bundle byte for byte.
inline json run(const SystemConfig& cfg, Request request, const RunParams& p) {
  const bool emit = !p.out_dir.empty();
  std::optional<ArtifactSink> sink;
  if (emit) sink.emplace(p.out_dir);
  json summary{{"label", cfg.label}, {"seed", cfg.seed}};

  switch (request) {
    case Request::simulate: {
      if (p.x0.size() == 0) throw ContractViolation("run: simulate needs a start state");
      const double h = detail::pick_h(cfg, p);
      const Trajectory traj = integrate(cfg.set, cfg.field, p.t0, p.x0, p.t1, h);
      summary["command"] = "simulate";
      summary["t0"] = traj.t0;
      summary["t1"] = traj.final_time();
      summary["h"] = h;
      summary["steps"] = traj.states.size() - 1;
      summary["final_state"] = detail::vec_json(traj.final_state());
      summary["max_residual"] = discrete_velocity_bound(traj, cfg.field, cfg.set);
      if (emit) sink->add("trajectory.csv", trajectory_csv(traj));
      break;
    }
    case Request::certify: {
      summary["command"] = "certify";
      summary["certificate"] = detail::constants_json(cfg);
      if (emit) sink->add("certificate.json", summary["certificate"].dump(2) + "\n");
      break;
    }
    case Request::contract: {
      if (p.x0.size() == 0 || p.x0b.size() == 0)
        throw ContractViolation("run: contract needs two start states");
      const double h = detail::pick_h(cfg, p);
      const Trajectory a = integrate(cfg.set, cfg.field, p.t0, p.x0, p.t1, h);
      const Trajectory b = integrate(cfg.set, cfg.field, p.t0, p.x0b, p.t1, h);
      const ContractionReport rep = verify_contraction(a, b, cfg.cert.alpha_bar, p.slack);
      summary["command"] = "contract";
      summary["alpha_bar"] = cfg.cert.alpha_bar;
      summary["applicable"] = cfg.cert.applicable;
      summary["slack"] = p.slack;
      summary["envelope_violations"] = rep.envelope_violations;
      summary["fitted_rate"] = rep.fitted_rate;
      summary["initial_gap"] = rep.gaps.front().second;
      summary["final_gap"] = rep.gaps.back().second;
      if (emit) {
        sink->add("trajectory_a.csv", trajectory_csv(a));
        sink->add("trajectory_b.csv", trajectory_csv(b));
        std::string gaps = "t,gap\n";
        for (const auto& [t, g] : rep.gaps) gaps += fmt17(t) + "," + fmt17(g) + "\n";
        sink->add("gaps.csv", gaps);
      }
      break;
    }
    case Request::periodic: {
      double T = p.T > 0.0 ? p.T : cfg.period.value_or(0.0);
      if (!(T > 0.0)) throw ContractViolation("run: periodic needs a period");
      const double h = detail::pick_h(cfg, p);
      const Vec a0 = p.x0.size() > 0 ? p.x0 : project(cfg.set, 0.0, Vec::Zero(dim(cfg.set))).point;
      const PeriodicOrbitResult orb =
          find_periodic_orbit(cfg.set, cfg.field, T, a0, p.tol, p.max_iter, h);
      summary["command"] = "periodic";
      summary["T"] = T;
      summary["h"] = h;
      summary["anchor"] = detail::vec_json(orb.anchor);
      summary["residual"] = orb.residual;
      summary["iterations"] = orb.iterations;
      summary["contraction_factors"] = orb.contraction_factors;
      summary["converged"] = orb.residual <= p.tol;
      if (emit) sink->add("orbit.json", summary.dump(2) + "\n");
      break;
    }
    case Request::project_test: {
      const ProjectionBattery b = projection_battery(cfg.set, p.t0, p.n_queries, p.resolution,
                                                     p.refine_iters, cfg.seed);
      summary["command"] = "project_test";
      summary["n_queries"] = b.n_queries;
      summary["tube_count"] = b.tube_count;
      summary["max_dist_err"] = b.max_dist_err;
      summary["max_point_err"] = b.max_point_err;
      if (emit) sink->add("project_test.json", summary.dump(2) + "\n");
      break;
    }
    case Request::pullback: {
      if (p.horizons.empty()) throw ContractViolation("run: pullback needs horizons");
      const double h = detail::pick_h(cfg, p);
      const PullbackReport rep = pullback_solution(cfg.set, cfg.field, p.t_eval, p.horizons, h);
      summary["command"] = "pullback";
      summary["t_eval"] = rep.t_eval;
      summary["horizons"] = rep.horizons;
      json states = json::array();
      for (const Vec& s : rep.states) states.push_back(detail::vec_json(s));
      summary["states"] = states;
      summary["successive_gaps"] = rep.successive_gaps;
      if (emit) sink->add("pullback.json", summary.dump(2) + "\n");
      break;
    }
  }

  if (emit) {
    json options{{"t0", p.t0}, {"t1", p.t1}, {"h", detail::pick_h(cfg, p)}};
    sink->write_manifest(summary.value("command", "unknown"), options, cfg.seed);
  }
  return summary;
}

// ---------------------------------------------------------------------------
// Flat key-value scenario files: one `key = value` per line, '#' comments.

inline std::map<std::string, std::string> parse_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ContractViolation("cannot open config file " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    const auto b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
  };
  while (std::getline(is, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      if (!trim(line).empty())
        throw ContractViolation("config line is not key = value: " + line);
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty()) throw ContractViolation("config line has empty key: " + line);
    kv[key] = val;
  }
  return kv;
}

inline std::string serialize_config(const SystemConfig& cfg) {
  std::string out = "label = " + cfg.label + "\n";
  if (cfg.constants) {
    out += "scenario = example\n";
    out += "beta = " + fmt17(cfg.constants->beta) + "\n";
    const auto& e = std::get<EllipseExteriorBall>(cfg.set);
    out += "delta = " + fmt17(e.profile().delta) + "\n";
    out += "period = " + fmt17(cfg.period.value_or(e.profile().period)) + "\n";
    out += "alpha = " + fmt17(cfg.constants->alpha) + "\n";
  } else {
    const auto& c = std::get<CrowdDisks>(cfg.set);
    out += "scenario = crowd\n";
    out += "r = " + fmt17(c.r()) + "\n";
    out += "box = " + fmt17(c.box_bound()) + "\n";
  }
  out += "h = " + fmt17(cfg.default_h) + "\n";
  out += "seed = " + std::to_string(cfg.seed) + "\n";
  return out;
}

}  // namespace proxsweep
