#pragma once

#include <cmath>
#include <cstdio>
#include <vector>

#include "proxsweep/core.hpp"
#include "proxsweep/field.hpp"
#include "proxsweep/sets.hpp"
#include "proxsweep/sweep.hpp"

namespace proxsweep {

// One full period of the discrete flow from anchor a at t = 0. Defined as the
// final state of integrate, nothing else, so fixed points of this map are
// exactly the T-periodic discrete trajectories.
inline Vec period_map(const MovingSet& set, const VectorField& field, double T, const Vec& a,
                      double h) {
  if (!(T > 0.0)) throw ContractViolation("period_map: period must be positive");
  if (!periodic_with(set, T))
    throw ContractViolation("period_map: set is not T-periodic for the given T");
  if (!field.periodic_with(T))
    throw ContractViolation("period_map: field is not T-periodic for the given T");
  if (!contains(set, 0.0, a)) throw ContractViolation("period_map: anchor not in C(0)");
  return integrate(set, field, 0.0, a, T, h).states.back();
}

struct PeriodicOrbitResult {
  Vec anchor;
  double residual;  // ||period_map(anchor) - anchor||
  int iterations;
  std::vector<double> contraction_factors;  // displacement ratios, from iterate 2 on
};

// Plain Picard iteration on the period map. Succeeds when the displacement
// falls below tol; reports divergence (and refuses to fabricate an anchor)
// when the budget runs out while the last two displacement ratios exceed 1.
inline PeriodicOrbitResult find_periodic_orbit(const MovingSet& set, const VectorField& field,
                                               double T, const Vec& a0, double tol,
                                               int max_iter, double h) {
  if (!(tol > 0.0)) throw ContractViolation("find_periodic_orbit: tol must be positive");
  if (max_iter < 1) throw ContractViolation("find_periodic_orbit: max_iter must be >= 1");
  if (field.bound_Mf()) {
    const double eta = claimed_eta(set);
    if (std::isfinite(eta) &&
        !(field.bound_Mf().value() + claimed_L_C(set) - eta * field.alpha() < 0.0))
      std::fprintf(stderr,
                   "find_periodic_orbit: contraction certificate does not apply; "
                   "convergence is not guaranteed\n");
  }

  PeriodicOrbitResult res;
  res.anchor = a0;
  res.iterations = 0;
  res.residual = kInf;
  double prev_disp = -1.0;
  for (int k = 0; k < max_iter; ++k) {
    const Vec next = period_map(set, field, T, res.anchor, h);
    const double disp = (next - res.anchor).norm();
    ++res.iterations;
    if (prev_disp > 0.0) res.contraction_factors.push_back(disp / prev_disp);
    prev_disp = disp;
    res.anchor = next;
    res.residual = disp;  // displacement into the reported anchor
    if (disp <= tol) return res;
  }
  const auto& f = res.contraction_factors;
  if (f.size() >= 2 && f[f.size() - 1] > 1.0 && f[f.size() - 2] > 1.0)
    throw DivergenceError(f, res.iterations);
  return res;  // budget exhausted but not diverging; residual > tol tells the caller
}

struct PullbackReport {
  double t_eval;
  std::vector<double> horizons;
  std::vector<Vec> states;           // state at t_eval, one per horizon
  std::vector<double> successive_gaps;
};

// Pullback attractor probe: start ever earlier (t_eval - horizon), always from
// the projection of the origin onto the set at the start time, and compare the
// states reached at the common evaluation time.
inline PullbackReport pullback_solution(const MovingSet& set, const VectorField& field,
                                        double t_eval, const std::vector<double>& horizons,
                                        double h) {
  if (horizons.empty()) throw ContractViolation("pullback_solution: no horizons");
  for (std::size_t i = 0; i < horizons.size(); ++i) {
    if (!(horizons[i] > 0.0)) throw ContractViolation("pullback_solution: horizons must be positive");
    if (i > 0 && !(horizons[i] > horizons[i - 1]))
      throw ContractViolation("pullback_solution: horizons must increase strictly");
  }

  PullbackReport rep;
  rep.t_eval = t_eval;
  rep.horizons = horizons;
  const Vec origin = Vec::Zero(dim(set));
  for (double H : horizons) {
    const double start = t_eval - H;
    const Vec seed = project(set, start, origin).point;
    rep.states.push_back(integrate(set, field, start, seed, t_eval, h).states.back());
  }
  for (std::size_t i = 1; i < rep.states.size(); ++i)
    rep.successive_gaps.push_back((rep.states[i] - rep.states[i - 1]).norm());
  return rep;
}

}  // namespace proxsweep
