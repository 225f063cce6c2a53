#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "proxsweep/core.hpp"
#include "proxsweep/field.hpp"
#include "proxsweep/sets.hpp"

namespace proxsweep {

struct Trajectory {
  double t0 = 0.0;
  double h = 0.0;
  std::vector<double> times;
  std::vector<Vec> states;
  std::vector<double> residuals;          // ||(x_{k+1}-x_k)/h_k + f(t_k,x_k)||
  std::vector<ActiveTag> projection_flags;

  const Vec& final_state() const { return states.back(); }
  double final_time() const { return times.back(); }
};

// One catching-up step: explicit free step, then projection onto the next set.
// The guard dist(x - h f, C(t+h)) < 0.9 * claimed_eta keeps the projection in
// the regime where it is provably single-valued; violating it throws
// StepTooLarge so the caller can halve h.
inline std::pair<Vec, ProjectionResult> step(const MovingSet& set, const VectorField& field,
                                             double t, const Vec& x, double h) {
  if (!(h > 0.0)) throw ContractViolation("step: h must be positive");
  if (!contains(set, t, x)) throw ContractViolation("step: state is not a member of C(t)");
  const Vec y = x - h * field(t, x);
  const ProjectionResult pr = project(set, t + h, y);
  const double limit = 0.9 * claimed_eta(set);
  if (!(pr.distance < limit)) throw StepTooLarge(pr.distance, limit);
  return {pr.point, pr};
}

namespace detail {

// Advance by h, recursively splitting in two when the guard trips. Depth is
// capped at 6 halvings; substates between grid points are discarded.
inline std::pair<Vec, ActiveTag> advance(const MovingSet& set, const VectorField& field,
                                         double t, const Vec& x, double h, int depth) {
  try {
    auto [xn, pr] = step(set, field, t, x, h);
    return {std::move(xn), pr.active};
  } catch (const StepTooLarge&) {
    if (depth >= 6) throw IntegrationFailure(t);
    auto mid = advance(set, field, t, x, 0.5 * h, depth + 1);
    return advance(set, field, t + 0.5 * h, mid.first, 0.5 * h, depth + 1);
  }
}

}  // namespace detail

// Uniform grid from t0 to t1 (the last step is shortened when h does not
// divide the span); states land on the grid only.
inline Trajectory integrate(const MovingSet& set, const VectorField& field, double t0,
                            const Vec& x0, double t1, double h) {
  if (!contains(set, t0, x0))
    throw ContractViolation("integrate: x0 is not a member of C(t0)");
  if (t1 < t0) throw ContractViolation("integrate: t1 must not precede t0");
  if (!(h > 0.0)) throw ContractViolation("integrate: h must be positive");

  Trajectory tr;
  tr.t0 = t0;
  tr.h = h;
  tr.times.push_back(t0);
  tr.states.push_back(x0);
  if (t1 == t0) return tr;

  const double span = t1 - t0;
  long n = std::lround(span / h);
  bool uniform = n >= 1 && std::abs(n * h - span) <= 1e-12 * std::max(1.0, span);
  if (!uniform) n = static_cast<long>(std::floor(span / h));

  Vec x = x0;
  for (long k = 0; k < n; ++k) {
    const double t = t0 + k * h;
    auto [xn, tag] = detail::advance(set, field, t, x, h, 0);
    tr.residuals.push_back(((xn - x) / h + field(t, x)).norm());
    tr.projection_flags.push_back(tag);
    tr.times.push_back(t0 + (k + 1) * h);
    tr.states.push_back(xn);
    x = std::move(xn);
  }
  if (!uniform) {
    const double t = t0 + n * h;
    const double hs = t1 - t;
    if (hs > 1e-15) {
      auto [xn, tag] = detail::advance(set, field, t, x, hs, 0);
      tr.residuals.push_back(((xn - x) / hs + field(t, x)).norm());
      tr.projection_flags.push_back(tag);
      tr.times.push_back(t1);
      tr.states.push_back(std::move(xn));
    }
  }
  return tr;
}

// Max recorded discrete velocity residual; bounded by M_f + L_C + K h.
inline double discrete_velocity_bound(const Trajectory& traj, const VectorField&,
                                      const MovingSet&) {
  if (traj.states.empty()) throw ContractViolation("discrete_velocity_bound: empty trajectory");
  double m = 0.0;
  for (double r : traj.residuals) m = std::max(m, r);
  return m;
}

// Scheme constant behind the residual contract, from one trajectory:
// K = max(0, max residual - (M_f + L_C)) / h.
inline double scheme_constant(const Trajectory& traj, double M_f, double L_C) {
  if (!(traj.h > 0.0)) throw ContractViolation("scheme_constant: trajectory has no step");
  double m = 0.0;
  for (double r : traj.residuals) m = std::max(m, r);
  return std::max(0.0, m - (M_f + L_C)) / traj.h;
}

}  // namespace proxsweep
