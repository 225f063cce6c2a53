#pragma once

#include <cmath>
#include <vector>

#include "proxsweep/core.hpp"
#include "proxsweep/rng.hpp"
#include "proxsweep/sets.hpp"

namespace proxsweep {

// Brute-force nearest-member search, used as a reference for the analytic
// projections. Scans a uniform grid over the set's bounding box keeping the
// best feasible point, then polishes it by pattern search over coordinate,
// diagonal, and seeded random directions with a shrinking step. Only
// membership queries are used, so the oracle shares no code path with the
// candidate-based projection it checks.
inline ProjectionResult project_oracle(const MovingSet& set, double t, const Vec& z,
                                       double resolution, int refine_iters) {
  if (!(resolution > 0.0))
    throw ContractViolation("project_oracle: resolution must be positive");
  if (std::holds_alternative<CrowdDisks>(set) &&
      std::get<CrowdDisks>(set).people() != 2)
    throw ContractViolation("project_oracle: crowd grids support two disks only");

  ProjectionResult r;
  if (contains(set, t, z)) {
    r.point = z;
    r.distance = 0.0;
    r.active = ActiveTag::none;
    r.unique = true;
    return r;
  }

  const int d = dim(set);
  const auto [lo, hi] = bounding_box(set, t);
  std::vector<int> counts(d);
  for (int i = 0; i < d; ++i)
    counts[i] = std::max(2, static_cast<int>(std::floor((hi[i] - lo[i]) / resolution)) + 1);

  Vec best;
  double best_d2 = kInf;
  std::vector<int> idx(d, 0);
  Vec p(d);
  while (true) {
    for (int i = 0; i < d; ++i)
      p[i] = lo[i] + (hi[i] - lo[i]) * idx[i] / (counts[i] - 1);
    if (contains(set, t, p)) {
      const double d2 = (p - z).squaredNorm();
      if (d2 < best_d2) {
        best_d2 = d2;
        best = p;
      }
    }
    int axis = 0;
    while (axis < d && ++idx[axis] == counts[axis]) idx[axis++] = 0;
    if (axis == d) break;
  }
  if (!(best_d2 < kInf))
    throw ResolutionTooCoarse("project_oracle: no feasible grid point at this resolution");

  // Pattern search with chord snapping. Every feasible candidate is also
  // pulled to the earliest feasible point of the segment from the query,
  // which lands exactly on the boundary where the minimizer lives; without
  // the snap the search crawls tangentially and stalls far from the surface.
  // Random directions come from a fixed stream so the oracle stays a pure
  // function of its arguments.
  Rng rng(0x09ACE);
  Vec move_best;
  double move_d2 = best_d2;
  auto record = [&](const Vec& q) {
    const double d2 = (q - z).squaredNorm();
    if (d2 < move_d2) {
      move_d2 = d2;
      move_best = q;
    }
  };
  // earliest feasible point of the segment from infeasible a to feasible b
  auto crossing = [&](const Vec& a, const Vec& b) {
    double lo_l = 0.0, hi_l = 1.0;
    for (int i = 0; i < 46; ++i) {
      const double mid = 0.5 * (lo_l + hi_l);
      if (contains(set, t, a + mid * (b - a)))
        hi_l = mid;
      else
        lo_l = mid;
    }
    return Vec(a + hi_l * (b - a));
  };
  auto consider = [&](const Vec& q) {
    if (contains(set, t, q)) {
      record(q);
      record(crossing(z, q));
    } else {
      // an infeasible probe still marks a direction: its crossing toward the
      // incumbent lies on the boundary near the probe's angle, which is how
      // the search slides around a curved surface instead of bouncing off it
      const Vec s = crossing(q, best);
      record(s);
      record(crossing(z, s));
    }
  };

  consider(best);  // snap the raw grid point first
  if (move_d2 < best_d2) {
    best_d2 = move_d2;
    best = move_best;
  }
  double step = resolution;
  for (int round = 0; round < refine_iters && step > 1e-12; ++round) {
    Vec cand(d);
    move_d2 = best_d2;
    for (int i = 0; i < d; ++i) {
      cand = best;
      cand[i] += step;
      consider(cand);
      cand = best;
      cand[i] -= step;
      consider(cand);
    }
    // two-coordinate diagonals move a coordinate pair without shifting its
    // midpoint, the slide a coupled pair constraint needs; without them the
    // search stalls in the flat valley around a nearly non-unique projection
    const double diag = step / std::sqrt(2.0);
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j)
        for (int si : {-1, 1})
          for (int sj : {-1, 1}) {
            cand = best;
            cand[i] += si * diag;
            cand[j] += sj * diag;
            consider(cand);
          }
    // toward the query plus a few random probes; the pure coordinate pattern
    // can wedge against a curved or cornered boundary
    consider(best + step * (z - best).normalized());
    for (int k = 0; k < 6; ++k) consider(best + step * rng.direction(d));
    if (move_d2 < best_d2) {
      const double gained = best_d2 - move_d2;
      best_d2 = move_d2;
      best = move_best;
      // a gain far below the step's quadratic scale means the walk is circling
      // the minimizer, not sliding toward it; tighten instead of crawling
      if (gained < 1e-3 * step * step) step *= 0.6;
    } else {
      step *= 0.6;
    }
  }

  r.point = best;
  r.distance = std::sqrt(best_d2);
  r.active = ActiveTag::none;
  r.unique = r.distance < claimed_eta(set);
  return r;
}

}  // namespace proxsweep
