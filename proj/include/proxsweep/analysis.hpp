#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "proxsweep/core.hpp"
#include "proxsweep/field.hpp"
#include "proxsweep/rng.hpp"
#include "proxsweep/sets.hpp"
#include "proxsweep/sweep.hpp"

namespace proxsweep {

struct StabilityCertificate {
  double alpha;
  double L_C;
  double M_f;
  double eta;
  double alpha_bar;
  bool applicable;
};

// Everything downstream of the sign decision is derived from the single
// expression s = M_f + L_C - eta*alpha evaluated once, so the three published
// views (applicable flag, sign of alpha_bar, the inequality itself) can never
// disagree on a razor-thin operand tuple.
inline StabilityCertificate certificate(double alpha, double L_C, double M_f, double eta) {
  if (L_C < 0.0 || M_f < 0.0) throw ContractViolation("certificate: negative constant");
  StabilityCertificate c{alpha, L_C, M_f, eta, 0.0, false};
  if (std::isinf(eta)) {
    // Convex limit: external tangent balls of every radius, alpha_bar -> -alpha.
    c.alpha_bar = -alpha;
    c.applicable = alpha > 0.0;
    return c;
  }
  if (!(eta >= 0.0)) throw ContractViolation("certificate: eta must be >= 0");
  if (eta == 0.0) {
    c.alpha_bar = kInf;
    c.applicable = false;  // vacuous tube; flagged by the infinite exponent
    return c;
  }
  const double s = M_f + L_C - eta * alpha;
  c.alpha_bar = s / eta;
  c.applicable = c.alpha_bar < 0.0;
  return c;
}

struct ExampleConstants {
  double beta;
  double L_b;
  double alpha;
  double L_C;   // 4 L_b / (3 beta^3)
  double eta;   // (beta^{4/3} - beta^{-2/3})^{3/2}
  double M_f;   // 2.5 alpha
  StabilityCertificate cert;
};

inline ExampleConstants example_constants(double beta, double L_b, double alpha) {
  if (!(beta >= 1.0)) throw ContractViolation("example_constants: beta must be >= 1");
  if (!(L_b >= 0.0)) throw ContractViolation("example_constants: L_b must be >= 0");
  if (!(alpha > 0.0)) throw ContractViolation("example_constants: alpha must be positive");
  ExampleConstants e;
  e.beta = beta;
  e.L_b = L_b;
  e.alpha = alpha;
  e.L_C = 4.0 * L_b / (3.0 * beta * beta * beta);
  e.eta = eta_formula(beta);
  e.M_f = 2.5 * alpha;
  e.cert = certificate(alpha, e.L_C, e.M_f, e.eta);
  return e;
}

// Radius of curvature of the arc parameterization P(phi) = (-cos phi, b sin phi).
inline double ellipse_curvature(double b, double phi) {
  if (!(b >= 1.0)) throw ContractViolation("ellipse_curvature: b must be >= 1");
  const double s = std::sin(phi), c = std::cos(phi);
  return std::pow(s * s + b * b * c * c, 1.5) / b;
}

// ---------------------------------------------------------------------------

// Hausdorff distance between C(t1) and C(t2): boundary samples on each side,
// exact nearest-point queries against the other side. Symmetric by
// construction (the same two directed terms in either call order).
inline double hausdorff(const MovingSet& set, double t1, double t2, int n_boundary) {
  if (n_boundary < 100) throw ContractViolation("hausdorff: n_boundary must be >= 100");
  auto directed = [&](double ta, double tb) {
    double sup = 0.0;
    for (const Vec& x : boundary_samples(set, ta, n_boundary))
      sup = std::max(sup, project(set, tb, x).distance);
    return sup;
  };
  return std::max(directed(t1, t2), directed(t2, t1));
}

// Sup of hausdorff(t,s)/|t-s| over sampled pairs. Half the pairs are adjacent
// (separation exactly 1e-3, phase-swept across the window) to capture the
// local slope; the rest are random with the same minimum separation, which
// avoids dividing sampling noise by a vanishing time difference.
inline double estimate_L_C(const MovingSet& set, double t_lo, double t_hi, int n_pairs,
                           int n_boundary, std::uint64_t seed = kDefaultSeed) {
  if (!(t_hi > t_lo)) throw ContractViolation("estimate_L_C: empty time window");
  if (n_pairs < 1) throw ContractViolation("estimate_L_C: need at least one pair");
  Rng rng(seed);
  double sup = 0.0;
  const int m = std::max(1, n_pairs / 2);
  for (int i = 0; i < m; ++i) {
    double t = t_lo + (i + 0.5) * (t_hi - t_lo) / m;
    double s = t + 1e-3 <= t_hi ? t + 1e-3 : t - 1e-3;
    sup = std::max(sup, hausdorff(set, t, s, n_boundary) / std::abs(t - s));
  }
  for (int i = m; i < n_pairs; ++i) {
    double t = rng.uniform(t_lo, t_hi), s = rng.uniform(t_lo, t_hi);
    for (int tries = 0; std::abs(t - s) < 1e-3 && tries < 100; ++tries)
      s = rng.uniform(t_lo, t_hi);
    if (std::abs(t - s) < 1e-3) continue;
    sup = std::max(sup, hausdorff(set, t, s, n_boundary) / std::abs(t - s));
  }
  return sup;
}

// ---------------------------------------------------------------------------

// Empirical prox-regularity radius. For every probe (boundary point, validated
// unit normal) the largest radius in `radii` is found whose tangent external
// ball contains no sampled member except the base point; the estimate is the
// min over probes. The member pool mixes rejection-sampled interior points
// with boundary samples: tangency violations open up as thin slivers along
// the boundary first, and interior sampling alone is too sparse to see them.
inline double estimate_eta(const MovingSet& set, double t, int n_points,
                           std::vector<double> radii, std::uint64_t seed = kDefaultSeed) {
  if (radii.empty()) throw ContractViolation("estimate_eta: radii list is empty");
  std::sort(radii.begin(), radii.end());
  if (!(radii.front() > 0.0)) throw ContractViolation("estimate_eta: radii must be positive");

  Rng rng(seed);
  const int n_interior = n_points / 2;
  std::vector<Vec> members = member_samples(set, t, n_interior, rng);
  for (Vec& b : boundary_samples(set, t, n_points - n_interior))
    members.push_back(std::move(b));

  const int n_probe = 1000;
  const double max_r = radii.back();
  double estimate = kInf;
  bool any_probe = false;
  for (const Vec& x : boundary_samples(set, t, n_probe)) {
    std::vector<NormalSample> normals;
    try {
      normals = proximal_normals(set, t, x, max_r);
    } catch (const ContractViolation&) {
      continue;  // sample drifted off the active surface; skip
    }
    for (const auto& ns : normals) {
      any_probe = true;
      // Per member m with w = m - x: the tangent ball of radius s swallows m
      // exactly when s exceeds (|w|^2 - tol^2) / (2(w.dir - tol)), tol = 1e-9.
      double s_ok = kInf;
      for (const Vec& m : members) {
        const Vec w = m - x;
        const double wn2 = w.squaredNorm();
        if (wn2 <= 1e-18) continue;  // the base point itself
        const double a = w.dot(ns.direction) - 1e-9;
        if (a <= 0.0) continue;  // never swallowed at any radius
        s_ok = std::min(s_ok, (wn2 - 1e-18) / (2.0 * a));
      }
      double largest = 0.0;
      for (double s : radii)
        if (s <= s_ok) largest = s;
      estimate = std::min(estimate, largest);
    }
  }
  if (!any_probe) throw NumericFailure("estimate_eta: no validated normals at any probe");
  return std::min(estimate, max_r);
}

struct HypoReport {
  double min_slack;
  long violations;
};

// Samples pairs of validated normals scaled to norm <= eta and audits
// <v - v', x - x'> + ||x - x'||^2 >= 0, counting dips below -1e-9. The scaled
// norms test the *requested* eta, so calling with an inflated value probes
// whether the set could be that regular (it cannot, and violations appear).
inline HypoReport check_hypomonotonicity(const MovingSet& set, double t, double eta,
                                         int n_pairs, std::uint64_t seed = kDefaultSeed) {
  Rng rng(seed);
  const int pool_n = 400;
  std::vector<NormalSample> pool;
  for (const Vec& x : boundary_samples(set, t, pool_n)) {
    std::vector<NormalSample> ns;
    try {
      ns = proximal_normals(set, t, x, std::isfinite(eta) ? eta : 1.0);
    } catch (const ContractViolation&) {
      continue;
    }
    for (auto& n : ns) pool.push_back(std::move(n));
  }
  if (pool.size() < 2) throw NumericFailure("check_hypomonotonicity: empty normal pool");

  HypoReport rep{kInf, 0};
  for (int k = 0; k < n_pairs; ++k) {
    const auto& a = pool[rng.index(pool.size())];
    const auto& b = pool[rng.index(pool.size())];
    const double sa = (k % 8 == 0) ? eta : eta * rng.uniform01();
    const double sb = (k % 8 == 0) ? eta : eta * rng.uniform01();
    const Vec dx = a.base - b.base;
    const double slack = (sa * a.direction - sb * b.direction).dot(dx) + dx.squaredNorm();
    rep.min_slack = std::min(rep.min_slack, slack);
    if (slack < -1e-9) ++rep.violations;
  }
  return rep;
}

// ---------------------------------------------------------------------------

// Max of ||f(t,x)|| over sampled members, boundary samples, and the feasible
// corners of the estimation box (linear growth peaks on corners, which pure
// interior sampling undershoots). The linear-field/ellipse pairing has the
// exact answer 2.5*alpha: the farthest member from the origin is (-2.5, 0).
inline double estimate_M_f(const VectorField& field, const MovingSet& set, int t_samples,
                           int x_samples, std::uint64_t seed = kDefaultSeed) {
  if (field.kind() == VectorField::Kind::linear &&
      std::holds_alternative<EllipseExteriorBall>(set))
    return 2.5 * field.alpha();

  std::vector<double> ts{0.0};
  if (const auto* e = std::get_if<EllipseExteriorBall>(&set)) {
    if (e->profile().kind == BProfile::Kind::sinusoidal) {
      ts.clear();
      const int n = std::max(2, t_samples);
      for (int i = 0; i < n; ++i) ts.push_back(e->profile().period * i / (n - 1));
    }
  }

  Rng rng(seed);
  double sup = 0.0;
  const int d = dim(set);
  for (double t : ts) {
    for (const Vec& x : member_samples(set, t, x_samples, rng))
      sup = std::max(sup, field(t, x).norm());
    for (const Vec& x : boundary_samples(set, t, std::max(64, x_samples / 8)))
      if (contains(set, t, x)) sup = std::max(sup, field(t, x).norm());
    const auto [lo, hi] = bounding_box(set, t);
    if (d <= 16) {
      for (long mask = 0; mask < (1L << d); ++mask) {
        Vec c(d);
        for (int i = 0; i < d; ++i) c[i] = (mask >> i) & 1 ? hi[i] : lo[i];
        if (contains(set, t, c)) sup = std::max(sup, field(t, c).norm());
      }
    }
  }
  return sup;
}

// Min of the monotonicity quotient over sampled pairs; exact for the linear
// kind by definition.
inline double estimate_alpha(const VectorField& field, int n_pairs,
                             const std::pair<Vec, Vec>& domain_box,
                             std::uint64_t seed = kDefaultSeed) {
  if (field.kind() == VectorField::Kind::linear) return field.alpha();
  const Vec& lo = domain_box.first;
  const Vec& hi = domain_box.second;
  const int d = static_cast<int>(lo.size());
  Rng rng(seed);
  double inf = kInf;
  for (int k = 0; k < n_pairs; ++k) {
    Vec x(d), y(d);
    for (int i = 0; i < d; ++i) x[i] = rng.uniform(lo[i], hi[i]);
    for (int i = 0; i < d; ++i) y[i] = rng.uniform(lo[i], hi[i]);
    const Vec dx = x - y;
    const double n2 = dx.squaredNorm();
    if (n2 < 1e-18) continue;
    inf = std::min(inf, (field(0.0, x) - field(0.0, y)).dot(dx) / n2);
  }
  if (!std::isfinite(inf)) throw NumericFailure("estimate_alpha: no usable pairs");
  return inf;
}

// ---------------------------------------------------------------------------

struct ContractionReport {
  double tau;
  std::vector<std::pair<double, double>> gaps;  // (t, ||x1(t) - x2(t)||)
  long envelope_violations;
  double fitted_rate;
};

// Envelope audit gap(t) <= e^{alpha_bar (t - tau)} gap(tau) * slack on a
// common grid, plus a least-squares log-gap slope over the window
// gap in (1e-12, gap(tau)] so the round-off floor and any transient above the
// initial gap stay out of the fit.
inline ContractionReport verify_contraction(const Trajectory& A, const Trajectory& B,
                                            double alpha_bar, double slack) {
  if (A.t0 != B.t0 || A.h != B.h || A.states.size() != B.states.size())
    throw ContractViolation("verify_contraction: trajectories are on different grids");

  ContractionReport rep;
  rep.tau = A.t0;
  rep.envelope_violations = 0;
  const std::size_t n = A.states.size();
  rep.gaps.reserve(n);
  for (std::size_t k = 0; k < n; ++k)
    rep.gaps.emplace_back(A.times[k], (A.states[k] - B.states[k]).norm());

  const double g0 = rep.gaps.front().second;
  for (const auto& [t, g] : rep.gaps)
    if (g > std::exp(alpha_bar * (t - rep.tau)) * g0 * slack) ++rep.envelope_violations;

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  long m = 0;
  for (const auto& [t, g] : rep.gaps) {
    if (!(g > 1e-12) || g > g0) continue;
    const double y = std::log(g);
    sx += t;
    sy += y;
    sxx += t * t;
    sxy += t * y;
    ++m;
  }
  const double den = m * sxx - sx * sx;
  rep.fitted_rate = (m >= 2 && std::abs(den) > 0.0) ? (m * sxy - sx * sy) / den : 0.0;
  return rep;
}

struct GronwallInputs {
  double a0;
  double lambda;
  std::vector<std::pair<double, double>> b_samples;  // (t, b(t)), t ascending from 0
};

// Bound e^{lambda t} a0 + integral of e^{lambda (t-s)} b(s) ds, the integral
// taken by the trapezoid rule between sample nodes with the exact integrating
// factor at the nodes.
inline std::vector<std::pair<double, double>> gronwall_envelope(const GronwallInputs& in) {
  const auto& bs = in.b_samples;
  if (bs.empty() || bs.front().first != 0.0)
    throw ContractViolation("gronwall_envelope: samples must start at t = 0");
  for (std::size_t i = 1; i < bs.size(); ++i)
    if (!(bs[i].first > bs[i - 1].first))
      throw ContractViolation("gronwall_envelope: sample times must increase strictly");

  std::vector<std::pair<double, double>> out;
  out.reserve(bs.size());
  double E = in.a0;
  out.emplace_back(0.0, E);
  for (std::size_t i = 1; i < bs.size(); ++i) {
    const double dt = bs[i].first - bs[i - 1].first;
    const double ef = std::exp(in.lambda * dt);
    E = ef * E + 0.5 * dt * (ef * bs[i - 1].second + bs[i].second);
    out.emplace_back(bs[i].first, E);
  }
  return out;
}

}  // namespace proxsweep
