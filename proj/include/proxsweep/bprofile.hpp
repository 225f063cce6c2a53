#pragma once

#include <cmath>

#include "proxsweep/core.hpp"

namespace proxsweep {

// Minor-axis profile b(t) of the elliptical hole. Two shapes are supported:
// constant b = beta and the sinusoid beta + (delta/2)(1 + sin(2 pi t / period)).
// The sinusoid is chosen so that inf_t b(t) = beta exactly and the global
// Lipschitz bound |b'| <= delta*pi/period is exact, keeping every constant
// derived from the profile in closed form.
struct BProfile {
  enum class Kind { constant, sinusoidal };

  Kind kind = Kind::constant;
  double beta = 2.0;
  double delta = 0.0;
  double period = 1.0;

  static BProfile constant(double beta) {
    if (!(beta >= 1.0)) throw ContractViolation("BProfile: beta must be >= 1");
    BProfile p;
    p.kind = Kind::constant;
    p.beta = beta;
    p.delta = 0.0;
    return p;
  }

  static BProfile sinusoidal(double beta, double delta, double period) {
    if (!(beta >= 1.0)) throw ContractViolation("BProfile: beta must be >= 1");
    if (!(delta >= 0.0)) throw ContractViolation("BProfile: delta must be >= 0");
    if (period <= 0.0) throw ContractViolation("BProfile: period must be positive");
    BProfile p;
    p.kind = Kind::sinusoidal;
    p.beta = beta;
    p.delta = delta;
    p.period = period;
    return p;
  }

  double operator()(double t) const {
    if (kind == Kind::constant || delta == 0.0) return beta;
    return beta + 0.5 * delta * (1.0 + std::sin(2.0 * kPi * t / period));
  }

  double lipschitz() const {
    return (kind == Kind::constant || delta == 0.0) ? 0.0 : delta * kPi / period;
  }

  double inf_value() const { return beta; }
  double sup_value() const { return beta + delta; }

  // Constant profiles are periodic with every T.
  bool periodic_with(double T) const {
    if (kind == Kind::constant || delta == 0.0) return true;
    return std::abs(period - T) <= 1e-12;
  }
};

}  // namespace proxsweep
