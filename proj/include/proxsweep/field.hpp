#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <utility>

#include "proxsweep/core.hpp"

namespace proxsweep {

// Perturbation f(t, x) together with its declared constants: the strong
// monotonicity modulus alpha, the Lipschitz constant in x, an optional uniform
// bound over the relevant region, and an optional period in t.
class VectorField {
 public:
  enum class Kind { linear, crowd_spontaneous, custom };

  // f(t, x) = alpha * x; monotone with modulus alpha exactly
  static VectorField linear(double alpha) {
    if (!(alpha > 0.0)) throw ContractViolation("VectorField::linear: alpha must be positive");
    VectorField f;
    f.kind_ = Kind::linear;
    f.alpha_ = alpha;
    f.lipschitz_f_ = alpha;
    return f;
  }

  // f(t, x) = x, the negated spontaneous-velocity potential gradient
  static VectorField crowd_spontaneous() {
    VectorField f;
    f.kind_ = Kind::crowd_spontaneous;
    f.alpha_ = 1.0;
    f.lipschitz_f_ = 1.0;
    return f;
  }

  static VectorField custom(std::function<Vec(double, const Vec&)> fn, double alpha,
                            double lipschitz_f, std::optional<double> bound_Mf = {},
                            std::optional<double> period = {}) {
    VectorField f;
    f.kind_ = Kind::custom;
    f.fn_ = std::move(fn);
    f.alpha_ = alpha;
    f.lipschitz_f_ = lipschitz_f;
    f.bound_Mf_ = bound_Mf;
    f.period_ = period;
    return f;
  }

  Vec operator()(double t, const Vec& x) const {
    switch (kind_) {
      case Kind::linear:
        return alpha_ * x;
      case Kind::crowd_spontaneous:
        return x;
      case Kind::custom:
        return fn_(t, x);
    }
    throw NumericFailure("VectorField: unreachable kind");
  }

  Kind kind() const { return kind_; }
  double alpha() const { return alpha_; }
  double lipschitz_f() const { return lipschitz_f_; }
  std::optional<double> bound_Mf() const { return bound_Mf_; }
  std::optional<double> period() const { return period_; }

  void set_bound_Mf(double m) { bound_Mf_ = m; }

  // Autonomous fields are periodic with every T.
  bool periodic_with(double T) const {
    if (kind_ != Kind::custom || !period_) return true;
    return std::abs(*period_ - T) <= 1e-12;
  }

 private:
  Kind kind_ = Kind::linear;
  std::function<Vec(double, const Vec&)> fn_;
  double alpha_ = 1.0;
  double lipschitz_f_ = 1.0;
  std::optional<double> bound_Mf_;
  std::optional<double> period_;
};

}  // namespace proxsweep
