#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "proxsweep/bprofile.hpp"
#include "proxsweep/core.hpp"
#include "proxsweep/rng.hpp"

namespace proxsweep {

// Which constraint surface the returned projection sits on.
enum class ActiveTag { none, ball_boundary, ellipse_arc, corner, pair };

struct ProjectionResult {
  Vec point;
  double distance = 0.0;
  ActiveTag active = ActiveTag::none;
  int pair_i = -1;  // populated only for ActiveTag::pair
  int pair_j = -1;
  bool unique = true;
};

struct NormalSample {
  Vec base;
  Vec direction;       // unit vector
  double scale_limit;  // largest validated s with base == proj(base + s*direction)
};

// Prox-regularity radius of the ball/ellipse intersection as a function of the
// profile infimum. Zero at beta = 1 (the certificate degenerates there).
inline double eta_formula(double beta) {
  double a = std::pow(beta, 4.0 / 3.0) - std::pow(beta, -2.0 / 3.0);
  return a <= 0.0 ? 0.0 : std::pow(a, 1.5);
}

namespace detail {

struct EllipseNearest {
  Vec point;
  // Set when a symmetric second minimizer exists; callers decide whether the
  // alternative is feasible for their set before declaring a tie.
  std::optional<Vec> tie_point;
};

// Nearest point on the full ellipse {x1^2 + x2^2/b^2 = 1}, b >= 1.
//
// Generic queries solve the Lagrange scalar equation
//   F(t) = (z1/(1+t))^2 + (z2 b/(b^2+t))^2 - 1 = 0
// on (-1, inf), where F is strictly decreasing and convex, so Newton started
// on the F >= 0 side converges monotonically; a bisection fallback guards the
// exceptional steps. Axis queries take exact branches: interior points of the
// x-axis map to the near vertex bit-exactly, which downstream code relies on
// (the equilibrium of the worked example sits at that vertex).
inline EllipseNearest ellipse_nearest_detail(double b, const Vec& z) {
  if (!(b >= 1.0)) throw ContractViolation("ellipse_nearest_point: b must be >= 1");
  const double u = z[0], v = z[1];

  if (b == 1.0) {
    const double n = std::hypot(u, v);
    if (n < 1e-300) return {vec2(-1.0, 0.0), vec2(1.0, 0.0)};
    return {vec2(u / n, v / n), std::nullopt};
  }

  if (v == 0.0) {
    if (u == 0.0) return {vec2(-1.0, 0.0), vec2(1.0, 0.0)};  // center: vertex tie
    // The y != 0 stationary pair sits across the center and is never closer,
    // so interior and exterior x-axis points both project to the near vertex.
    const double s = u > 0.0 ? 1.0 : -1.0;
    return {vec2(s, 0.0), std::nullopt};
  }

  if (u == 0.0) {
    const double av = std::abs(v), sv = v > 0.0 ? 1.0 : -1.0;
    const double cusp = (b * b - 1.0) / b;  // evolute cusp on the major axis
    if (av >= cusp) return {vec2(0.0, sv * b), std::nullopt};
    const double y = sv * av * b * b / (b * b - 1.0);
    const double x = std::sqrt(std::max(0.0, 1.0 - (y / b) * (y / b)));
    // Two symmetric minimizers; deterministic preference for the smaller x1.
    return {vec2(-x, y), vec2(x, y)};
  }

  const double au = std::abs(u), av = std::abs(v);
  const double b2 = b * b;
  double t = std::max(au - 1.0, av * b - b2);  // F(t) >= 0 at both anchors
  double lo = t;                               // F(lo) >= 0
  double hi = t + 1.0;
  while (true) {  // bracket the root from above
    const double xe = au / (1.0 + hi), ye = av * b / (b2 + hi);
    if (xe * xe + ye * ye - 1.0 < 0.0) break;
    lo = hi;
    hi = 2.0 * hi - t + 1.0;
  }
  for (int it = 0; it < 200; ++it) {
    const double xe = au / (1.0 + t), ye = av * b / (b2 + t);
    const double F = xe * xe + ye * ye - 1.0;
    if (std::abs(F) <= 1e-15) break;
    if (F > 0.0) lo = std::max(lo, t); else hi = std::min(hi, t);
    const double dF = -2.0 * xe * xe / (1.0 + t) - 2.0 * ye * ye / (b2 + t);
    double tn = t - F / dF;
    if (!(tn > lo && tn < hi)) tn = 0.5 * (lo + hi);
    if (std::abs(tn - t) <= 1e-17 * (1.0 + std::abs(t))) { t = tn; break; }
    t = tn;
  }
  const double x = au / (1.0 + t), y = av * b2 / (b2 + t);
  return {vec2(u > 0.0 ? x : -x, v > 0.0 ? y : -y), std::nullopt};
}

}  // namespace detail

// Spec'd surface: nearest point only. Axis ties resolve to the negative-x side.
inline Vec ellipse_nearest_point(double b, const Vec& z) {
  return detail::ellipse_nearest_detail(b, z).point;
}

// Intersection of the container circle (x1+1.5)^2 + x2^2 = 1 with the ellipse
// x1^2 + x2^2/b^2 = 1, upper half plane. Eliminating x2^2 leaves
// (b^2-1)p^2 - 3p - (1.25 + b^2) = 0; the rationalized root below avoids the
// cancellation at b near 1, where the quadratic degenerates to -3p = 2.25.
// One Newton polish on the defining pair drives both residuals to round-off.
inline std::pair<Vec, Vec> corner_points_for_b(double b) {
  if (!(b >= 1.0)) throw ContractViolation("corner_points: b must be >= 1");
  const double b2 = b * b;
  const double c = 1.25 + b2;
  double p = -2.0 * c / (3.0 + std::sqrt(9.0 + 4.0 * (b2 - 1.0) * c));
  double q = std::sqrt(std::max(0.0, 1.0 - (p + 1.5) * (p + 1.5)));
  for (int it = 0; it < 2; ++it) {
    const double f1 = (p + 1.5) * (p + 1.5) + q * q - 1.0;
    const double f2 = p * p + q * q / b2 - 1.0;
    const double j11 = 2.0 * (p + 1.5), j12 = 2.0 * q;
    const double j21 = 2.0 * p, j22 = 2.0 * q / b2;
    const double det = j11 * j22 - j12 * j21;
    if (std::abs(det) < 1e-300) break;
    p -= (f1 * j22 - f2 * j12) / det;
    q -= (j11 * f2 - j21 * f1) / det;
  }
  return {vec2(p, q), vec2(p, -q)};
}

// ---------------------------------------------------------------------------

// Fixed ball, optionally translating at constant velocity. Convex, so the
// claimed prox-regularity radius is infinite.
class Ball {
 public:
  Ball(Vec center, double radius)
      : center0_(std::move(center)), radius_(radius), drift_(Vec::Zero(center0_.size())) {
    if (!(radius > 0.0)) throw ContractViolation("Ball: radius must be positive");
  }

  Ball(Vec center, double radius, Vec drift)
      : center0_(std::move(center)), radius_(radius), drift_(std::move(drift)) {
    if (!(radius > 0.0)) throw ContractViolation("Ball: radius must be positive");
    if (drift_.size() != center0_.size())
      throw ContractViolation("Ball: drift dimension mismatch");
  }

  int dim() const { return static_cast<int>(center0_.size()); }
  double radius() const { return radius_; }
  Vec center(double t) const { return center0_ + t * drift_; }
  const Vec& drift() const { return drift_; }

  bool contains(double t, const Vec& x) const {
    return (x - center(t)).norm() - radius_ <= kMembershipTol;
  }

  ProjectionResult project(double t, const Vec& z) const {
    ProjectionResult r;
    const Vec c = center(t);
    const double d = (z - c).norm();
    if (d - radius_ <= kMembershipTol) {
      r.point = z;
      r.distance = 0.0;
      r.active = ActiveTag::none;
      r.unique = true;
      return r;
    }
    r.point = c + (radius_ / d) * (z - c);
    r.distance = (z - r.point).norm();
    r.active = ActiveTag::ball_boundary;
    r.unique = true;
    return r;
  }

  double claimed_eta() const { return kInf; }
  double claimed_L_C() const { return drift_.norm(); }

  std::pair<Vec, Vec> bounding_box(double t) const {
    const Vec c = center(t);
    return {c.array() - radius_, c.array() + radius_};
  }

  // Equally spaced angles for dim 2 (k = 0 points along +x, so translations
  // along a coordinate axis are sampled at their extreme points exactly);
  // fixed-seed random directions otherwise.
  std::vector<Vec> boundary_samples(double t, int n) const {
    std::vector<Vec> out;
    out.reserve(n);
    const Vec c = center(t);
    if (dim() == 2) {
      for (int k = 0; k < n; ++k) {
        const double a = 2.0 * kPi * k / n;
        out.push_back(c + radius_ * vec2(std::cos(a), std::sin(a)));
      }
    } else {
      Rng rng(0x9A11);
      for (int k = 0; k < n; ++k) out.push_back(c + radius_ * rng.direction(dim()));
    }
    return out;
  }

  std::vector<Vec> normal_directions(double t, const Vec& x) const {
    const Vec c = center(t);
    const double d = (x - c).norm();
    if (std::abs(d - radius_) > 1e-9)
      throw ContractViolation("normal_directions: point not on the ball boundary");
    return {Vec((x - c) / d)};
  }

 private:
  Vec center0_;
  double radius_;
  Vec drift_;
};

// ---------------------------------------------------------------------------

// C(t) = closed ball of radius 1 around (-1.5, 0), intersected with the
// exterior of the open ellipse hole {x1^2 + x2^2/b(t)^2 < 1}.
class EllipseExteriorBall {
 public:
  static constexpr double kBallCx = -1.5;
  static constexpr double kBallR = 1.0;

  explicit EllipseExteriorBall(BProfile profile) : profile_(profile) {
    if (!(profile_.beta >= 1.0))
      throw ContractViolation("EllipseExteriorBall: beta must be >= 1");
  }

  int dim() const { return 2; }
  const BProfile& profile() const { return profile_; }
  double b(double t) const { return profile_(t); }

  static Vec ball_center() { return vec2(kBallCx, 0.0); }

  bool contains(double t, const Vec& x) const {
    if ((x - ball_center()).norm() - kBallR > kMembershipTol) return false;
    const double bv = b(t);
    return x[0] * x[0] + x[1] * x[1] / (bv * bv) >= 1.0 - kMembershipTol;
  }

  std::pair<Vec, Vec> corners(double t) const { return corner_points_for_b(b(t)); }

  // Corner angle in the arc parameterization P(phi) = (-cos phi, b sin phi);
  // the feasible arc is |phi| <= phi0.
  double phi0(double t) const {
    const auto [cp, cm] = corners(t);
    return std::atan2(cp[1] / b(t), -cp[0]);
  }

  ProjectionResult project(double t, const Vec& z) const {
    ProjectionResult r;
    if (contains(t, z)) {
      r.point = z;
      r.distance = 0.0;
      r.active = ActiveTag::none;
      r.unique = true;
      return r;
    }

    const double bv = b(t);
    const Vec cB = ball_center();

    struct Candidate {
      Vec p;
      ActiveTag tag;
    };
    std::vector<Candidate> cands;
    cands.reserve(5);

    // (1) radial point of the container ball, feasible only outside the hole
    {
      const double d = (z - cB).norm();
      if (d > 1e-300) {
        Vec p = cB + (kBallR / d) * (z - cB);
        if (p[0] * p[0] + p[1] * p[1] / (bv * bv) >= 1.0 - kMembershipTol)
          cands.push_back({p, ActiveTag::ball_boundary});
      }
    }

    // (2) nearest point of the full ellipse, feasible only inside the ball
    auto en = detail::ellipse_nearest_detail(bv, z);
    const bool en_in_ball = (en.point - cB).norm() - kBallR <= kMembershipTol;
    if (en_in_ball) cands.push_back({en.point, ActiveTag::ellipse_arc});

    // (3) the two corners, always feasible
    const auto [cp, cm] = corners(t);
    cands.push_back({cp, ActiveTag::corner});
    cands.push_back({cm, ActiveTag::corner});

    // (4) minimizer over the feasible arc. Needed for queries whose full-ellipse
    // nearest point falls outside the ball: the optimum can then sit strictly
    // between vertex and corner, where none of the candidates above land.
    cands.push_back({arc_nearest(bv, phi0(t), z), ActiveTag::ellipse_arc});

    std::size_t best = 0;
    double best_d = (z - cands[0].p).norm();
    for (std::size_t i = 1; i < cands.size(); ++i) {
      const double d = (z - cands[i].p).norm();
      if (d < best_d) {
        best = i;
        best_d = d;
      }
    }

    bool tie = false;
    for (std::size_t i = 0; i < cands.size(); ++i) {
      if (i == best) continue;
      if ((z - cands[i].p).norm() - best_d <= 1e-9 &&
          (cands[i].p - cands[best].p).norm() > 1e-6)
        tie = true;
    }
    // A second full-ellipse minimizer only matters if it is itself feasible.
    if (en.tie_point && ((*en.tie_point) - cB).norm() - kBallR <= kMembershipTol &&
        ((*en.tie_point) - cands[best].p).norm() > 1e-6)
      tie = true;

    // Deterministic preference under ties: smaller x1, then smaller x2.
    if (tie) {
      for (std::size_t i = 0; i < cands.size(); ++i) {
        if (i == best) continue;
        if ((z - cands[i].p).norm() - best_d > 1e-9) continue;
        const Vec& a = cands[i].p;
        const Vec& bb = cands[best].p;
        if (a[0] < bb[0] - 1e-12 || (std::abs(a[0] - bb[0]) <= 1e-12 && a[1] < bb[1]))
          best = i;
      }
      best_d = (z - cands[best].p).norm();
    }

    r.point = cands[best].p;
    r.distance = best_d;
    r.active = cands[best].tag;
    r.unique = best_d < claimed_eta() && !tie;
    return r;
  }

  double claimed_eta() const { return eta_formula(profile_.beta); }

  double claimed_L_C() const {
    const double beta = profile_.beta;
    return 4.0 * profile_.lipschitz() / (3.0 * beta * beta * beta);
  }

  std::pair<Vec, Vec> bounding_box(double) const {
    return {vec2(-2.5, -1.0), vec2(-0.5, 1.0)};
  }

  // Half the samples on the feasible elliptical arc (endpoints are the
  // corners), half on the feasible circular arc of the container.
  std::vector<Vec> boundary_samples(double t, int n) const {
    std::vector<Vec> out;
    out.reserve(n);
    const double bv = b(t);
    const double p0 = phi0(t);
    const auto [cp, cm] = corners(t);
    const double psi_c = std::atan2(cp[1], cp[0] - kBallCx);
    const int n_arc = n / 2;
    const int n_ball = n - n_arc;
    for (int k = 0; k < n_arc; ++k) {
      const double phi = n_arc == 1 ? 0.0 : -p0 + 2.0 * p0 * k / (n_arc - 1);
      out.push_back(vec2(-std::cos(phi), bv * std::sin(phi)));
    }
    for (int k = 0; k < n_ball; ++k) {
      const double psi =
          n_ball == 1 ? kPi : psi_c + (2.0 * kPi - 2.0 * psi_c) * k / (n_ball - 1);
      out.push_back(vec2(kBallCx + std::cos(psi), std::sin(psi)));
    }
    return out;
  }

  std::vector<Vec> member_samples(double t, int n, Rng& rng) const {
    std::vector<Vec> out;
    out.reserve(n);
    int misses = 0;
    while (static_cast<int>(out.size()) < n) {
      Vec x = vec2(rng.uniform(-2.5, -0.5), rng.uniform(-1.0, 1.0));
      if (contains(t, x)) {
        out.push_back(std::move(x));
        misses = 0;
      } else if (++misses > 100000) {
        throw NumericFailure("member sampling: feasible region too thin");
      }
    }
    return out;
  }

  // Analytic unit proximal normals at a boundary point: outward radial on the
  // container circle, hole-ward -grad g on the arc, and at a corner a fan
  // through the cone spanned by those two.
  std::vector<Vec> normal_directions(double t, const Vec& x) const {
    const double bv = b(t);
    const bool on_ball = std::abs((x - ball_center()).norm() - kBallR) <= 1e-9;
    const double g = x[0] * x[0] + x[1] * x[1] / (bv * bv);
    const bool on_arc = std::abs(g - 1.0) <= 1e-9;
    if (!on_ball && !on_arc)
      throw ContractViolation("normal_directions: point not on the boundary");

    Vec n_ball_dir = Vec::Zero(2), n_arc_dir = Vec::Zero(2);
    if (on_ball) {
      n_ball_dir = x - ball_center();
      n_ball_dir /= n_ball_dir.norm();
    }
    if (on_arc) {
      Vec grad = vec2(2.0 * x[0], 2.0 * x[1] / (bv * bv));
      n_arc_dir = -grad / grad.norm();
    }
    if (on_ball && on_arc) {
      std::vector<Vec> fan;
      const int k = 9;
      for (int i = 0; i < k; ++i) {
        const double lam = static_cast<double>(i) / (k - 1);
        Vec d = lam * n_ball_dir + (1.0 - lam) * n_arc_dir;
        const double nd = d.norm();
        if (nd > 1e-12) fan.push_back(d / nd);
      }
      return fan;
    }
    if (on_ball) return {n_ball_dir};
    return {n_arc_dir};
  }

 private:
  // Golden-section minimization of the distance to the arc P(phi), phi in
  // [-phi0, phi0], seeded by a coarse scan so the global valley is bracketed.
  static Vec arc_nearest(double bv, double p0, const Vec& z) {
    auto dist2 = [&](double phi) {
      const double dx = -std::cos(phi) - z[0];
      const double dy = bv * std::sin(phi) - z[1];
      return dx * dx + dy * dy;
    };
    const int kScan = 65;
    int best = 0;
    double bd = dist2(-p0);
    for (int i = 1; i < kScan; ++i) {
      const double phi = -p0 + 2.0 * p0 * i / (kScan - 1);
      const double d = dist2(phi);
      if (d < bd) {
        bd = d;
        best = i;
      }
    }
    double lo = -p0 + 2.0 * p0 * std::max(0, best - 1) / (kScan - 1);
    double hi = -p0 + 2.0 * p0 * std::min(kScan - 1, best + 1) / (kScan - 1);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, bqq = hi;
    double x1 = bqq - gr * (bqq - a), x2 = a + gr * (bqq - a);
    double f1 = dist2(x1), f2 = dist2(x2);
    for (int it = 0; it < 90 && bqq - a > 1e-14; ++it) {
      if (f1 <= f2) {
        bqq = x2;
        x2 = x1;
        f2 = f1;
        x1 = bqq - gr * (bqq - a);
        f1 = dist2(x1);
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + gr * (bqq - a);
        f2 = dist2(x2);
      }
    }
    const double phi = 0.5 * (a + bqq);
    return vec2(-std::cos(phi), bv * std::sin(phi));
  }

  BProfile profile_;
};

// ---------------------------------------------------------------------------

// Stacked centers of n disks of common radius r that must not overlap:
// ||x_i - x_j|| >= 2r for all pairs. The box bound is not part of the set;
// it only tells bound estimators where to sample (the set itself is unbounded).
class CrowdDisks {
 public:
  CrowdDisks(int n_people, double r, double box_bound = 1.0)
      : n_(n_people), r_(r), box_(box_bound) {
    if (n_ < 2) throw ContractViolation("CrowdDisks: need at least two disks");
    if (!(r_ > 0.0)) throw ContractViolation("CrowdDisks: radius must be positive");
    if (!(box_ > 0.0)) throw ContractViolation("CrowdDisks: box bound must be positive");
  }

  int dim() const { return 2 * n_; }
  int people() const { return n_; }
  double r() const { return r_; }
  double box_bound() const { return box_; }

  bool contains(double, const Vec& x) const {
    for (int i = 0; i < n_; ++i)
      for (int j = i + 1; j < n_; ++j)
        if (gap(x, i, j) < 2.0 * r_ - kMembershipTol) return false;
    return true;
  }

  ProjectionResult project(double t, const Vec& z) const {
    ProjectionResult res;
    if (contains(t, z)) {
      res.point = z;
      res.distance = 0.0;
      res.active = ActiveTag::none;
      res.unique = true;
      return res;
    }
    if (n_ == 2) {
      const Vec x1 = z.segment(0, 2), x2 = z.segment(2, 2);
      const double d = (x1 - x2).norm();
      if (d < 1e-14)
        throw DegenerateDirection("crowd projection: coincident centers");
      const Vec m = 0.5 * (x1 + x2);
      const Vec u = (x1 - x2) / d;
      Vec p(4);
      p.segment(0, 2) = m + r_ * u;
      p.segment(2, 2) = m - r_ * u;
      res.point = p;
      res.distance = (z - p).norm();
      res.active = ActiveTag::pair;
      res.pair_i = 0;
      res.pair_j = 1;
      res.unique = res.distance < claimed_eta();
      return res;
    }
    // Exploratory path for n > 2: cyclic projection over violated pairs.
    Vec x = z;
    bool feasible = false;
    for (int sweep = 0; sweep < 10000 && !feasible; ++sweep) {
      feasible = true;
      for (int i = 0; i < n_; ++i) {
        for (int j = i + 1; j < n_; ++j) {
          const double d = gap(x, i, j);
          if (d >= 2.0 * r_ - 1e-10) continue;
          if (d < 1e-14)
            throw DegenerateDirection("crowd projection: coincident centers");
          feasible = false;
          const Vec xi = x.segment(2 * i, 2), xj = x.segment(2 * j, 2);
          const Vec m = 0.5 * (xi + xj);
          const Vec u = (xi - xj) / d;
          x.segment(2 * i, 2) = m + r_ * u;
          x.segment(2 * j, 2) = m - r_ * u;
        }
      }
    }
    res.point = x;
    res.distance = (z - x).norm();
    res.active = ActiveTag::pair;
    for (int i = 0; i < n_ && res.pair_i < 0; ++i)
      for (int j = i + 1; j < n_; ++j)
        if (std::abs(gap(x, i, j) - 2.0 * r_) <= 1e-9) {
          res.pair_i = i;
          res.pair_j = j;
          break;
        }
    res.unique = false;  // approximate by construction
    return res;
  }

  double claimed_eta() const {
    if (n_ == 2) return r_ * std::sqrt(2.0);
    return r_ * std::sqrt(2.0) / n_;  // conservative heuristic beyond two disks
  }

  double claimed_L_C() const { return 0.0; }

  std::pair<Vec, Vec> bounding_box(double) const {
    Vec lo = Vec::Constant(dim(), -box_), hi = Vec::Constant(dim(), box_);
    return {lo, hi};
  }

  // Contact configurations (two disks exactly touching) spread quasi-randomly
  // over midpoints in the box and contact angles. Two-disk variant only.
  std::vector<Vec> boundary_samples(double, int n) const {
    if (n_ != 2)
      throw ContractViolation("boundary sampling supports two disks only");
    std::vector<Vec> out;
    out.reserve(n);
    auto frac = [](double x) { return x - std::floor(x); };
    for (int i = 0; i < n; ++i) {
      const double th = 2.0 * kPi * frac(0.6180339887498949 * (i + 1));
      const double mx = box_ * (2.0 * frac(0.7548776662466927 * (i + 1)) - 1.0);
      const double my = box_ * (2.0 * frac(0.5698402909980532 * (i + 1)) - 1.0);
      const Vec u = vec2(std::cos(th), std::sin(th));
      Vec x(4);
      x.segment(0, 2) = vec2(mx, my) + r_ * u;
      x.segment(2, 2) = vec2(mx, my) - r_ * u;
      out.push_back(std::move(x));
    }
    return out;
  }

  std::vector<Vec> member_samples(double t, int n, Rng& rng) const {
    std::vector<Vec> out;
    out.reserve(n);
    int misses = 0;
    while (static_cast<int>(out.size()) < n) {
      Vec x(dim());
      for (int i = 0; i < dim(); ++i) x[i] = rng.uniform(-box_, box_);
      if (contains(t, x)) {
        out.push_back(std::move(x));
        misses = 0;
      } else if (++misses > 100000) {
        throw NumericFailure("member sampling: feasible region too thin");
      }
    }
    return out;
  }

  std::vector<Vec> normal_directions(double, const Vec& x) const {
    std::vector<Vec> out;
    for (int i = 0; i < n_; ++i) {
      for (int j = i + 1; j < n_; ++j) {
        const double d = gap(x, i, j);
        if (std::abs(d - 2.0 * r_) > 1e-9) continue;
        const Vec u = (x.segment(2 * i, 2) - x.segment(2 * j, 2)) / d;
        Vec dir = Vec::Zero(dim());
        dir.segment(2 * i, 2) = -u;
        dir.segment(2 * j, 2) = u;
        out.push_back(dir / std::sqrt(2.0));
      }
    }
    if (out.empty())
      throw ContractViolation("normal_directions: no contact active at this point");
    return out;
  }

 private:
  static double gap(const Vec& x, int i, int j) {
    return (x.segment(2 * i, 2) - x.segment(2 * j, 2)).norm();
  }

  int n_;
  double r_;
  double box_;
};

// ---------------------------------------------------------------------------

using MovingSet = std::variant<Ball, EllipseExteriorBall, CrowdDisks>;

inline int dim(const MovingSet& s) {
  return std::visit([](const auto& v) { return v.dim(); }, s);
}

inline bool contains(const MovingSet& s, double t, const Vec& x) {
  if (x.size() != dim(s))
    throw ContractViolation("contains: dimension mismatch");
  return std::visit([&](const auto& v) { return v.contains(t, x); }, s);
}

inline ProjectionResult project(const MovingSet& s, double t, const Vec& z) {
  if (z.size() != dim(s)) throw ContractViolation("project: dimension mismatch");
  if (!z.allFinite()) throw ContractViolation("project: query must be finite");
  return std::visit([&](const auto& v) { return v.project(t, z); }, s);
}

inline double claimed_eta(const MovingSet& s) {
  return std::visit([](const auto& v) { return v.claimed_eta(); }, s);
}

inline double claimed_L_C(const MovingSet& s) {
  return std::visit([](const auto& v) { return v.claimed_L_C(); }, s);
}

inline std::pair<Vec, Vec> bounding_box(const MovingSet& s, double t) {
  return std::visit([&](const auto& v) { return v.bounding_box(t); }, s);
}

inline std::vector<Vec> boundary_samples(const MovingSet& s, double t, int n) {
  return std::visit([&](const auto& v) { return v.boundary_samples(t, n); }, s);
}

inline std::vector<Vec> member_samples(const MovingSet& s, double t, int n, Rng& rng) {
  return std::visit(
      [&](const auto& v) -> std::vector<Vec> {
        if constexpr (std::is_same_v<std::decay_t<decltype(v)>, Ball>) {
          std::vector<Vec> out;
          out.reserve(n);
          const auto [lo, hi] = v.bounding_box(t);
          int misses = 0;
          while (static_cast<int>(out.size()) < n) {
            Vec x(v.dim());
            for (int i = 0; i < v.dim(); ++i) x[i] = rng.uniform(lo[i], hi[i]);
            if (v.contains(t, x)) {
              out.push_back(std::move(x));
              misses = 0;
            } else if (++misses > 100000) {
              throw NumericFailure("member sampling: feasible region too thin");
            }
          }
          return out;
        } else {
          return v.member_samples(t, n, rng);
        }
      },
      s);
}

inline std::vector<Vec> normal_directions(const MovingSet& s, double t, const Vec& x) {
  return std::visit([&](const auto& v) { return v.normal_directions(t, x); }, s);
}

inline bool periodic_with(const MovingSet& s, double T) {
  if (const auto* e = std::get_if<EllipseExteriorBall>(&s))
    return e->profile().periodic_with(T);
  if (const auto* b = std::get_if<Ball>(&s)) return b->drift().norm() == 0.0;
  return true;  // crowd sets are static
}

// Validated proximal normals at a boundary point. Every analytic candidate is
// checked against the projection definition x == proj(x + s*v) at
// s = min(max_norm, 0.9*claimed_eta); a failing candidate is retried at halved
// scales and dropped (with a note on stderr) if none validates.
inline std::vector<NormalSample> proximal_normals(const MovingSet& s, double t,
                                                  const Vec& x, double max_norm) {
  if (!contains(s, t, x))
    throw ContractViolation("proximal_normals: point is not a member");
  const auto dirs = normal_directions(s, t, x);  // throws if not on the boundary
  const double eta = claimed_eta(s);
  const double s0 = std::isfinite(eta) ? std::min(max_norm, 0.9 * eta) : max_norm;

  std::vector<NormalSample> out;
  out.reserve(dirs.size());
  for (const auto& d : dirs) {
    if (s0 <= 0.0) {
      out.push_back({x, d, 0.0});
      continue;
    }
    double sc = s0;
    bool ok = false;
    for (int halve = 0; halve <= 40 && !ok; ++halve, sc *= 0.5) {
      const auto pr = project(s, t, x + sc * d);
      if ((pr.point - x).norm() <= 1e-8 * (1.0 + sc)) {
        out.push_back({x, d, sc});
        ok = true;
      }
    }
    if (!ok)
      std::fprintf(stderr,
                   "proximal_normals: candidate normal failed validation and was "
                   "dropped (base near [%g, %g])\n",
                   x[0], x.size() > 1 ? x[1] : 0.0);
  }
  return out;
}

}  // namespace proxsweep
