#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "proxsweep/oracle.hpp"
#include "proxsweep/proxsweep.hpp"

using namespace proxsweep;

namespace {
MovingSet ellipse_set(double b) { return EllipseExteriorBall(BProfile::constant(b)); }

double ellipse_g(double b, const Vec& p) {
  return p[0] * p[0] + p[1] * p[1] / (b * b) - 1.0;
}
}  // namespace

TEST_CASE("b profile values and exact Lipschitz bound") {
  BProfile p = BProfile::sinusoidal(2.1, 0.2, 10.0);
  CHECK(p(0.0) == Catch::Approx(2.2).margin(1e-15));
  CHECK(p(2.5) == Catch::Approx(2.3).margin(1e-15));
  CHECK(p(7.5) == Catch::Approx(2.1).margin(1e-15));
  CHECK(p.lipschitz() == 0.2 * kPi / 10.0);

  // sampled slope never beats the claimed bound
  for (int i = 0; i < 2000; ++i) {
    double t = 10.0 * i / 2000.0, s = t + 1e-4;
    CHECK(std::abs(p(t) - p(s)) <= p.lipschitz() * 1e-4 * (1.0 + 1e-9));
  }

  CHECK(BProfile::constant(2.0).lipschitz() == 0.0);
  CHECK(BProfile::constant(2.0).periodic_with(3.7));
  CHECK(p.periodic_with(10.0));
  CHECK_FALSE(p.periodic_with(7.0));
  CHECK_THROWS_AS(BProfile::sinusoidal(0.9, 0.2, 10.0), ContractViolation);
  CHECK_THROWS_AS(BProfile::sinusoidal(2.0, -0.1, 10.0), ContractViolation);
}

TEST_CASE("prox-regularity radius formula") {
  CHECK(eta_formula(1.0) == 0.0);
  CHECK(eta_formula(2.0) == Catch::Approx(2.59807621135).margin(1e-9));
  CHECK(eta_formula(1.5) == Catch::Approx(0.931694990625).margin(1e-9));
  CHECK(eta_formula(3.0) == Catch::Approx(7.54247233266).margin(1e-9));
  double prev = 0.0;
  for (int i = 1; i <= 400; ++i) {
    double v = eta_formula(1.0 + i * 0.02);
    CHECK(v > prev);  // strictly increasing on [1, 9]
    prev = v;
  }
}

TEST_CASE("membership for the elliptical-hole disk") {
  MovingSet C = ellipse_set(2.0);
  CHECK(contains(C, 0.0, vec2(-1.5, 0.0)));
  CHECK_FALSE(contains(C, 0.0, vec2(0.0, 0.0)));
  CHECK(contains(C, 0.0, vec2(-0.914213562373, 0.810465452374)));  // corner
  CHECK_FALSE(contains(C, 0.0, vec2(-2.6, 0.0)));                  // outside the disk
  CHECK_FALSE(contains(C, 0.0, vec2(-0.9, 0.0)));                  // inside the hole

  Vec bad(3);
  bad << 0, 0, 0;
  CHECK_THROWS_AS(contains(C, 0.0, bad), ContractViolation);
}

TEST_CASE("membership for balls and disk ensembles") {
  MovingSet B = Ball(vec2(0.0, 0.0), 1.0);
  CHECK(contains(B, 0.0, vec2(1.0, 0.0)));
  CHECK_FALSE(contains(B, 0.0, vec2(1.1, 0.0)));

  MovingSet K = CrowdDisks(2, 0.5);
  CHECK(contains(K, 0.0, vec4(0.5, 0.0, -0.5, 0.0)));
  CHECK_FALSE(contains(K, 0.0, vec4(0.3, 0.0, -0.3, 0.0)));
}

TEST_CASE("nearest point on the ellipse") {
  CHECK(ellipse_nearest_point(2.0, vec2(-0.5, 0.0)) == vec2(-1.0, 0.0));  // bit-exact
  CHECK(ellipse_nearest_point(2.0, vec2(0.0, 3.0)) == vec2(0.0, 2.0));
  CHECK(ellipse_nearest_point(2.0, vec2(0.0, 0.0)) == vec2(-1.0, 0.0));  // center tie rule

  Vec p = ellipse_nearest_point(2.0, vec2(-0.3, 0.5));
  CHECK(p[0] == Catch::Approx(-0.953406091027).margin(1e-9));
  CHECK(p[1] == Catch::Approx(0.603379898881).margin(1e-9));
  CHECK((p - vec2(-0.3, 0.5)).norm() == Catch::Approx(0.661533765792).margin(1e-9));
}

TEST_CASE("ellipse nearest point satisfies the surface and optimality residuals") {
  Rng rng(0xE111);
  for (double b : {1.0, 1.3, 2.0, 3.5, 8.0}) {
    for (int k = 0; k < 400; ++k) {
      Vec z = vec2(rng.uniform(-3.0, 3.0), rng.uniform(-6.0, 6.0));
      Vec p = ellipse_nearest_point(b, z);
      CHECK(std::abs(ellipse_g(b, p)) <= 1e-12);
      // offset parallel to the gradient: zero cross product
      Vec grad = vec2(2.0 * p[0], 2.0 * p[1] / (b * b));
      Vec off = z - p;
      CHECK(std::abs(grad[0] * off[1] - grad[1] * off[0]) <= 1e-10 * (1.0 + off.norm()));
    }
  }
}

TEST_CASE("corner intersection points") {
  auto [c1u, c1l] = corner_points_for_b(1.0);
  CHECK(c1u[0] == Catch::Approx(-0.75).margin(1e-12));
  CHECK(c1u[1] == Catch::Approx(0.661437827766).margin(1e-9));
  CHECK(c1l[1] == Catch::Approx(-0.661437827766).margin(1e-9));

  auto [c2u, c2l] = corner_points_for_b(2.0);
  CHECK(c2u[0] == Catch::Approx(-0.914213562373).margin(1e-9));
  CHECK(c2u[1] == Catch::Approx(0.810465452374).margin(1e-9));

  // x1 decreases toward -1 as the hole stretches
  double prev = -0.5;
  for (double b : {1.0, 2.0, 4.0, 8.0}) {
    auto [cu, cl] = corner_points_for_b(b);
    CHECK(cu[0] < prev);
    CHECK(cu[0] > -1.0);
    prev = cu[0];
  }

  // both defining equations hold along a b sweep
  for (int i = 0; i <= 100; ++i) {
    double b = 1.0 + 7.0 * i / 100.0;
    auto [cu, cl] = corner_points_for_b(b);
    for (const Vec& c : {cu, cl}) {
      double circle = (c[0] + 1.5) * (c[0] + 1.5) + c[1] * c[1] - 1.0;
      CHECK(std::abs(circle) <= 1e-12);
      CHECK(std::abs(ellipse_g(b, c)) <= 1e-12);
    }
  }
}

TEST_CASE("projection worked examples") {
  MovingSet C = ellipse_set(2.0);

  ProjectionResult pr = project(C, 0.0, vec2(0.0, 0.0));
  CHECK(pr.point == vec2(-1.0, 0.0));
  CHECK(pr.distance == 1.0);
  CHECK(pr.unique);  // the symmetric vertex (1,0) is outside the disk

  pr = project(C, 0.0, vec2(-1.5, 0.0));  // member: identity
  CHECK(pr.point == vec2(-1.5, 0.0));
  CHECK(pr.distance == 0.0);
  CHECK(pr.active == ActiveTag::none);

  pr = project(C, 0.0, vec2(-2.6, 0.0));
  CHECK((pr.point - vec2(-2.5, 0.0)).norm() <= 1e-12);
  CHECK(pr.distance == Catch::Approx(0.1).margin(1e-12));
  CHECK(pr.active == ActiveTag::ball_boundary);
}

TEST_CASE("projection for two disks") {
  MovingSet K = CrowdDisks(2, 0.5);
  ProjectionResult pr = project(K, 0.0, vec4(0.3, 0.0, -0.3, 0.0));
  CHECK((pr.point - vec4(0.5, 0.0, -0.5, 0.0)).norm() <= 1e-15);
  CHECK(pr.distance == Catch::Approx(0.282842712474619).margin(1e-12));
  CHECK(pr.active == ActiveTag::pair);

  CHECK_THROWS_AS(project(K, 0.0, vec4(0.1, 0.2, 0.1, 0.2)), DegenerateDirection);

  // member identity
  pr = project(K, 0.0, vec4(0.8, 0.0, -0.8, 0.0));
  CHECK(pr.distance == 0.0);
  CHECK(pr.point == vec4(0.8, 0.0, -0.8, 0.0));
}

TEST_CASE("grid oracle agrees on worked queries") {
  MovingSet C = ellipse_set(2.0);
  ProjectionResult od = project_oracle(C, 0.0, vec2(0.0, 0.0), 1e-3, 120);
  CHECK(od.distance == Catch::Approx(1.0).margin(5e-4));

  od = project_oracle(C, 0.0, vec2(-1.5, 0.0), 1e-3, 120);
  CHECK(od.distance == 0.0);

  MovingSet K = CrowdDisks(2, 0.5);
  od = project_oracle(K, 0.0, vec4(0.3, 0.0, -0.3, 0.0), 0.05, 200);
  CHECK(od.distance == Catch::Approx(0.282843).margin(1e-3));
}

TEST_CASE("projection feasibility, idempotence, and oracle agreement") {
  Rng rng(0xFEA5);
  for (double b : {1.0, 1.5, 2.0, 3.0}) {
    MovingSet C = ellipse_set(b);
    for (int k = 0; k < 250; ++k) {
      Vec z = vec2(rng.uniform(-3.0, 0.5), rng.uniform(-1.5, 1.5));
      ProjectionResult pr = project(C, 0.0, z);
      CHECK(contains(C, 0.0, pr.point));
      ProjectionResult again = project(C, 0.0, pr.point);
      CHECK(again.point == pr.point);  // members project to themselves exactly
      CHECK(again.distance == 0.0);
    }
  }
}

TEST_CASE("disk ensemble projection matches the oracle") {
  Rng rng(0xC301);
  MovingSet K = CrowdDisks(2, 0.5);
  for (int k = 0; k < 250; ++k) {
    Vec z(4);
    for (int i = 0; i < 4; ++i) z[i] = rng.uniform(-1.0, 1.0);
    ProjectionResult pr;
    try {
      pr = project(K, 0.0, z);
    } catch (const DegenerateDirection&) {
      continue;
    }
    ProjectionResult od = project_oracle(K, 0.0, z, 0.1, 100);
    CHECK(std::abs(pr.distance - od.distance) <= 1e-4);
    CHECK(contains(K, 0.0, pr.point));
    ProjectionResult again = project(K, 0.0, pr.point);
    CHECK(again.point == pr.point);
  }
}

TEST_CASE("vertex equilibrium projects to itself from the inside axis") {
  MovingSet C = ellipse_set(2.0);
  // free points of the stationary state land on the axis inside the hole
  for (double u : {-0.99, -0.9, -0.5, -0.1}) {
    ProjectionResult pr = project(C, 0.0, vec2(u, 0.0));
    CHECK(pr.point == vec2(-1.0, 0.0));  // bit-exact, or the equilibrium drifts
  }
}

TEST_CASE("boundary samples are members on the active surface") {
  for (double b : {1.0, 2.0, 3.0}) {
    MovingSet C = ellipse_set(b);
    auto pts = boundary_samples(C, 0.0, 300);
    REQUIRE(pts.size() >= 300);
    for (const Vec& x : pts) {
      CHECK(contains(C, 0.0, x));
      double circle = (x[0] + 1.5) * (x[0] + 1.5) + x[1] * x[1] - 1.0;
      bool on_ball = std::abs(circle) <= 1e-9;
      bool on_arc = std::abs(ellipse_g(b, x)) <= 1e-9;
      CHECK((on_ball || on_arc));
    }
  }

  MovingSet K = CrowdDisks(2, 0.5);
  for (const Vec& x : boundary_samples(K, 0.0, 64)) {
    CHECK(contains(K, 0.0, x));
    CHECK((x.head(2) - x.tail(2)).norm() == Catch::Approx(1.0).margin(1e-9));
  }
}

TEST_CASE("proximal normals validate against the projection definition") {
  MovingSet C = ellipse_set(2.0);

  auto at = [&](double x, double y) { return proximal_normals(C, 0.0, vec2(x, y), 2.0); };

  auto ns = at(-2.5, 0.0);
  REQUIRE(ns.size() == 1);
  CHECK((ns[0].direction - vec2(-1.0, 0.0)).norm() <= 1e-12);
  CHECK(ns[0].scale_limit > 0.0);

  ns = at(-1.0, 0.0);  // vertex: inward into the hole
  REQUIRE(ns.size() == 1);
  CHECK((ns[0].direction - vec2(1.0, 0.0)).norm() <= 1e-12);

  auto [cu, cl] = corner_points_for_b(2.0);
  auto fan = proximal_normals(C, 0.0, cu, 2.0);
  CHECK(fan.size() >= 3);  // a corner carries a cone, not a single ray
  for (const auto& n : fan) {
    CHECK(std::abs(n.direction.norm() - 1.0) <= 1e-12);
    CHECK(n.scale_limit > 0.0);
  }

  CHECK_THROWS_AS(proximal_normals(C, 0.0, vec2(0.0, 0.0), 1.0), ContractViolation);
}

TEST_CASE("claimed constants per variant") {
  CHECK(claimed_eta(ellipse_set(2.0)) == Catch::Approx(2.59807621135).margin(1e-9));
  CHECK(claimed_eta(ellipse_set(1.0)) == 0.0);
  CHECK(claimed_L_C(ellipse_set(2.0)) == 0.0);

  MovingSet B = Ball(vec2(0, 0), 1.0);
  CHECK(std::isinf(claimed_eta(B)));
  CHECK(claimed_L_C(B) == 0.0);
  MovingSet Bd = Ball(vec2(0, 0), 1.0, vec2(0.3, 0.0));
  CHECK(claimed_L_C(Bd) == 0.3);

  MovingSet K = CrowdDisks(2, 0.5);
  CHECK(claimed_eta(K) == Catch::Approx(0.5 * std::sqrt(2.0)).margin(1e-15));
  CHECK(claimed_L_C(K) == 0.0);

  BProfile moving = BProfile::sinusoidal(2.1, 0.2, 10.0);
  MovingSet Cm = EllipseExteriorBall(moving);
  CHECK(claimed_L_C(Cm) == Catch::Approx(4.0 * moving.lipschitz() / (3.0 * 2.1 * 2.1 * 2.1))
                               .margin(1e-15));
}

TEST_CASE("oracle rejects an unresolvable grid") {
  MovingSet C = ellipse_set(2.0);
  CHECK_THROWS_AS(project_oracle(C, 0.0, vec2(0.0, 0.0), 50.0, 10), ResolutionTooCoarse);
}
