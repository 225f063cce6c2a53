// Command line front end: builds a scenario from flags or a flat key-value
// config file and dispatches one request. Diagnostics go to stderr, artifacts
// to --out, and the summary JSON to stdout. Exit codes: 0 success, 2 bad
// input, 3 numeric breakdown.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "proxsweep/proxsweep.hpp"

namespace {

using namespace proxsweep;

struct Opts {
  std::string scenario = "example";
  double beta = 2.0;
  double delta = 0.0;
  double period = 10.0;
  double alpha = 1.0;
  double r = 0.5;
  double box = 1.0;
  double h = 0.0;
  std::uint64_t seed = env_seed();
  double t0 = 0.0;
  double t1 = 10.0;
  std::string x0, x0b;
  double T = 0.0;
  double tol = 1e-6;
  int max_iter = 25;
  std::string horizons;
  double t_eval = 0.0;
  int n_queries = 1000;
  double resolution = 5e-3;
  int refine_iters = 80;
  double slack = 1.05;
  std::string out;
  std::string config_path;
};

std::vector<double> parse_list(const std::string& s, const char* what) {
  std::vector<double> vals;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const auto comma = s.find(',', pos);
    const std::string tok = s.substr(pos, comma == std::string::npos ? comma : comma - pos);
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0')
      throw ContractViolation(std::string(what) + ": cannot parse number '" + tok + "'");
    vals.push_back(v);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return vals;
}

Vec parse_vec(const std::string& s, const char* what) {
  const auto vals = parse_list(s, what);
  Vec v(static_cast<Eigen::Index>(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i) v[static_cast<Eigen::Index>(i)] = vals[i];
  return v;
}

// Config file fills defaults; any flag given on the command line wins because
// CLI11 only touches bound variables for flags actually present.
void apply_config(Opts& o) {
  if (o.config_path.empty()) return;
  const auto kv = parse_config_file(o.config_path);
  auto num = [&](const char* k, double& dst) {
    if (auto it = kv.find(k); it != kv.end()) dst = std::strtod(it->second.c_str(), nullptr);
  };
  if (auto it = kv.find("scenario"); it != kv.end()) o.scenario = it->second;
  num("beta", o.beta);
  num("delta", o.delta);
  num("period", o.period);
  num("alpha", o.alpha);
  num("r", o.r);
  num("box", o.box);
  num("h", o.h);
  num("t0", o.t0);
  num("t1", o.t1);
  if (auto it = kv.find("seed"); it != kv.end())
    o.seed = std::strtoull(it->second.c_str(), nullptr, 0);
  if (auto it = kv.find("x0"); it != kv.end()) o.x0 = it->second;
}

SystemConfig build(const Opts& o) {
  SystemConfig cfg = o.scenario == "crowd" ? make_crowd_two(o.r, o.box)
                     : o.scenario == "example"
                         ? make_example(o.beta, o.delta, o.period, o.alpha)
                         : throw ContractViolation("unknown scenario: " + o.scenario);
  cfg.seed = o.seed;
  if (o.h > 0.0) cfg.default_h = o.h;
  return cfg;
}

RunParams params_from(const Opts& o) {
  RunParams p;
  p.t0 = o.t0;
  p.t1 = o.t1;
  p.h = o.h;
  if (!o.x0.empty()) p.x0 = parse_vec(o.x0, "--x0");
  if (!o.x0b.empty()) p.x0b = parse_vec(o.x0b, "--x0b");
  p.T = o.T > 0.0 ? o.T : o.period;
  p.tol = o.tol;
  p.max_iter = o.max_iter;
  if (!o.horizons.empty()) p.horizons = parse_list(o.horizons, "--horizons");
  p.t_eval = o.t_eval;
  p.n_queries = o.n_queries;
  p.resolution = o.resolution;
  p.refine_iters = o.refine_iters;
  p.slack = o.slack;
  p.out_dir = o.out;
  return p;
}

void add_common(CLI::App* cmd, Opts& o) {
  cmd->set_help_flag("--help", "print this help");  // frees -h / --h for the step size
  cmd->add_option("--scenario", o.scenario, "example | crowd");
  cmd->add_option("--beta", o.beta, "minimum minor axis, >= 1");
  cmd->add_option("--delta", o.delta, "minor axis swing, >= 0");
  cmd->add_option("--period", o.period, "profile period");
  cmd->add_option("--alpha", o.alpha, "field monotonicity constant");
  cmd->add_option("--r", o.r, "disk radius");
  cmd->add_option("--box", o.box, "sampling box half-width");
  cmd->add_option("--h", o.h, "step size (0 = scenario default)");
  cmd->add_option("--seed", o.seed, "RNG seed (also SWEEP_SEED env)");
  cmd->add_option("--out", o.out, "artifact output directory");
  cmd->add_option("--config", o.config_path, "flat key = value config file");
}

int dispatch(const SystemConfig& cfg, Request req, const RunParams& p) {
  const json summary = run(cfg, req, p);
  std::cout << summary.dump(2) << "\n";
  return 0;
}

// Symmetric two-disk push: report the contact behavior the closed-form
// projection guarantees (no overlap, mirror symmetry of the two centers).
int run_crowd_report(const Opts& o) {
  SystemConfig cfg = make_crowd_two(o.r, o.box);
  cfg.seed = o.seed;
  const double h = o.h > 0.0 ? o.h : cfg.default_h;
  Vec x0 = o.x0.empty() ? vec4(0.8, 0.0, -0.8, 0.0) : parse_vec(o.x0, "--x0");
  const Trajectory traj = integrate(cfg.set, cfg.field, o.t0, x0, o.t1, h);

  double min_gap = kInf, max_violation = 0.0, max_asym = 0.0;
  double contact_time = -1.0;
  const double target = 2.0 * o.r;
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const Vec& x = traj.states[k];
    const double gap = (x.head(2) - x.tail(2)).norm();
    min_gap = std::min(min_gap, gap);
    max_violation = std::max(max_violation, target - gap);
    if (contact_time < 0.0 && gap <= target + 1e-9) contact_time = traj.times[k];
    max_asym = std::max(max_asym, (x.head(2) + x.tail(2)).norm());
  }

  json summary{{"label", cfg.label},
               {"seed", cfg.seed},
               {"command", "crowd"},
               {"h", h},
               {"steps", traj.states.size() - 1},
               {"min_gap", min_gap},
               {"max_violation", max_violation},
               {"contact_time", contact_time},
               {"max_mirror_asymmetry", max_asym},
               {"final_state", {traj.final_state()[0], traj.final_state()[1],
                                traj.final_state()[2], traj.final_state()[3]}}};
  if (!o.out.empty()) {
    ArtifactSink sink(o.out);
    sink.add("trajectory.csv", trajectory_csv(traj));
    sink.add("crowd.json", summary.dump(2) + "\n");
    sink.write_manifest("crowd", json{{"t0", o.t0}, {"t1", o.t1}, {"h", h}}, cfg.seed);
  }
  std::cout << summary.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sweeping process simulator and verification toolkit"};
  app.set_help_flag("--help", "print this help");
  app.require_subcommand(1);
  Opts o;

  // Pre-scan for --config so file values land in o before CLI11 parses; the
  // bound variables then act as defaults and explicit flags override them.
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--config" && i + 1 < argc)
      o.config_path = argv[i + 1];
    else if (a.rfind("--config=", 0) == 0)
      o.config_path = a.substr(9);
  }
  try {
    apply_config(o);
  } catch (const ContractViolation& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  }

  CLI::App* c_sim = app.add_subcommand("simulate", "integrate one trajectory");
  c_sim->add_option("--x0", o.x0, "start state, comma separated");
  c_sim->add_option("--t0", o.t0, "start time");
  c_sim->add_option("--t1", o.t1, "end time");
  add_common(c_sim, o);

  CLI::App* c_cert = app.add_subcommand("certify", "closed-form stability certificate");
  add_common(c_cert, o);

  CLI::App* c_con = app.add_subcommand("contract", "two-trajectory envelope audit");
  c_con->add_option("--x0", o.x0, "first start state");
  c_con->add_option("--x0b", o.x0b, "second start state");
  c_con->add_option("--t0", o.t0, "start time");
  c_con->add_option("--t1", o.t1, "end time");
  c_con->add_option("--slack", o.slack, "envelope slack factor");
  add_common(c_con, o);

  CLI::App* c_per = app.add_subcommand("periodic", "Picard search for a periodic orbit");
  c_per->add_option("--x0", o.x0, "initial anchor (default: projected origin)");
  c_per->add_option("--T", o.T, "orbit period (default: scenario period)");
  c_per->add_option("--tol", o.tol, "anchor displacement tolerance");
  c_per->add_option("--max-iter", o.max_iter, "iteration budget");
  add_common(c_per, o);

  CLI::App* c_proj = app.add_subcommand("project-test", "exact vs grid-oracle projections");
  c_proj->add_option("--t0", o.t0, "evaluation time");
  c_proj->add_option("--n-queries", o.n_queries, "number of queries");
  c_proj->add_option("--resolution", o.resolution, "oracle grid resolution");
  c_proj->add_option("--refine-iters", o.refine_iters, "oracle refinement iterations");
  add_common(c_proj, o);

  CLI::App* c_pull = app.add_subcommand("pullback", "pullback attraction probe");
  c_pull->add_option("--t-eval", o.t_eval, "common evaluation time");
  c_pull->add_option("--horizons", o.horizons, "comma separated, strictly increasing");
  add_common(c_pull, o);

  CLI::App* c_crowd = app.add_subcommand("crowd", "two-disk contact run with symmetry report");
  c_crowd->add_option("--x0", o.x0, "stacked start state (default symmetric)");
  c_crowd->add_option("--t0", o.t0, "start time");
  c_crowd->add_option("--t1", o.t1, "end time");
  add_common(c_crowd, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  try {
    if (c_crowd->parsed()) {
      o.scenario = "crowd";
      return run_crowd_report(o);
    }
    const SystemConfig cfg = build(o);
    const RunParams p = params_from(o);
    if (c_sim->parsed()) return dispatch(cfg, Request::simulate, p);
    if (c_cert->parsed()) return dispatch(cfg, Request::certify, p);
    if (c_con->parsed()) return dispatch(cfg, Request::contract, p);
    if (c_per->parsed()) return dispatch(cfg, Request::periodic, p);
    if (c_proj->parsed()) return dispatch(cfg, Request::project_test, p);
    if (c_pull->parsed()) return dispatch(cfg, Request::pullback, p);
    std::cerr << "no subcommand\n";
    return 2;
  } catch (const ContractViolation& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const NumericFailure& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
