#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace proxsweep {

using Vec = Eigen::VectorXd;

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Membership tolerance on defining inequalities, shared by every set variant.
inline constexpr double kMembershipTol = 1e-12;

inline Vec vec2(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}

inline Vec vec4(double a, double b, double c, double d) {
  Vec v(4);
  v << a, b, c, d;
  return v;
}

// Caller broke a documented precondition; maps to process exit code 2.
struct ContractViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The computation itself broke down; maps to process exit code 3.
struct NumericFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Free step left the well-posedness tube; the integrator catches this and halves h.
struct StepTooLarge : NumericFailure {
  double distance;
  double limit;
  StepTooLarge(double d, double lim)
      : NumericFailure("free step lands at distance " + std::to_string(d) +
                       " from the next set, guard " + std::to_string(lim)),
        distance(d),
        limit(lim) {}
};

struct IntegrationFailure : NumericFailure {
  double time;
  explicit IntegrationFailure(double t)
      : NumericFailure("step halving exhausted near t = " + std::to_string(t)), time(t) {}
};

// Two disk centers coincide: the contact normal has no direction to point along.
struct DegenerateDirection : NumericFailure {
  using NumericFailure::NumericFailure;
};

// Grid oracle found no feasible grid point at the requested resolution.
struct ResolutionTooCoarse : NumericFailure {
  using NumericFailure::NumericFailure;
};

// Picard iteration expanded twice in a row with the budget exhausted.
struct DivergenceError : NumericFailure {
  std::vector<double> factors;
  int iterations;
  DivergenceError(std::vector<double> f, int it)
      : NumericFailure("period map iteration diverges (last factors > 1)"),
        factors(std::move(f)),
        iterations(it) {}
};

}  // namespace proxsweep
