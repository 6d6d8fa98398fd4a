#include <cmath>

#include "doctest.h"
#include "mso/geometry.hpp"

using namespace mso;

TEST_CASE("ball surface area and diameter") {
  Domain ball = build_domain("ball(1.0)", 3);
  CHECK(ball.surface_area() == doctest::Approx(4.0 * kPi).epsilon(2e-2));
  // diameter is the bounding-box diagonal, used as a coarse length scale
  CHECK(ball.diameter() == doctest::Approx(2.0 * std::sqrt(3.0)).epsilon(1e-2));
  CHECK(ball.inside(Vec3(0.3, 0.2, -0.4)));
  CHECK(!ball.inside(Vec3(1.2, 0, 0)));
}

TEST_CASE("profile parsing rejects malformed specs") {
  CHECK_THROWS_AS(build_domain("ball(1.0", 2), GeometryError);
  CHECK_THROWS_AS(build_domain("torus(1,2)", 2), GeometryError);
  CHECK_THROWS_AS(build_domain("ellipsoid(1.0)", 2), GeometryError);
}

TEST_CASE("convex hull distance of a sphere") {
  Domain ball = build_domain("ball(1.0)", 3);
  CHECK(convex_hull_distance(ball, Vec3(-3, 0, 0)) ==
        doctest::Approx(2.0).epsilon(5e-3));
  CHECK_THROWS_AS(validate_observation(ball, {Vec3(0.5, 0, 0), 0.05}),
                  GeometryError);
}

TEST_CASE("front/back split covers the boundary") {
  Domain ball = build_domain("ball(1.0)", 3);
  FrontBackSplit s = front_back_split(ball, {Vec3(-3, 0, 0), 0.05});
  CHECK(s.area_front + s.area_back ==
        doctest::Approx(ball.surface_area()).epsilon(1e-9));
  CHECK(s.area_front > 0.0);
  CHECK(s.area_back > 0.0);
  CHECK(s.area_f_eps >= s.area_front);  // the margin only adds boundary
}

TEST_CASE("direction cone admits its reference direction") {
  Domain ball = build_domain("ball(1.0)", 3);
  ObservationPoint obs{Vec3(-3, 0, 0), 0.05};
  DirectionCone cone = build_direction_cone(ball, obs);
  CHECK(cone.admissible(cone.omega0));
  CHECK(cone.in_gamma(cone.axis));
  CHECK(std::abs(cone.omega0.dot(cone.axis)) < 1e-9);
  // every boundary direction from x0 lies in the cone
  for (const auto& n : ball.boundary())
    CHECK(cone.in_gamma((n.pos - obs.x0).normalized()));
}

TEST_CASE("frame normalizes x0 to the origin and omega to e1") {
  ObservationPoint obs{Vec3(1, 2, -1), 0.05};
  Vec3 omega = Vec3(0, 1, 1).normalized();
  Frame fr = normalize_frame(obs, omega);
  CHECK(fr.to_normalized(obs.x0).norm() == doctest::Approx(0.0));
  CHECK((fr.to_normalized(obs.x0 + omega) - Vec3(1, 0, 0)).norm() ==
        doctest::Approx(0.0).epsilon(1e-12));
  Vec3 p(0.3, -0.7, 0.4);
  CHECK((fr.to_scenario(fr.to_normalized(p)) - p).norm() ==
        doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("axial slice of the unit ball") {
  Domain ball = build_domain("ball(1.0)", 3);
  ObservationPoint obs{Vec3(-3, 0, 0), 0.05};
  DirectionCone cone = build_direction_cone(ball, obs);
  Frame fr = normalize_frame(obs, cone.omega0, &cone);
  SliceSpec s = slice(ball, fr, Vec2(1, 0), 0.02);
  double area = s.integrate([](const Vec2&) { return 1.0; });
  CHECK(area == doctest::Approx(s.polygon_area()).epsilon(1e-3));
  CHECK(area == doctest::Approx(kPi).epsilon(1e-3));
  CHECK(s.polygon_perimeter() == doctest::Approx(2.0 * kPi).epsilon(1e-3));
  // slice plane really contains the cylindrical axis coordinates
  Vec3 x = s.to_3d(Vec2(0.1, 2.9));
  Vec3 y = fr.to_normalized(x);
  CHECK(std::hypot(y[1], y[2]) == doctest::Approx(2.9).epsilon(1e-12));
}

TEST_CASE("slice volumes assemble the ball volume") {
  Domain ball = build_domain("ball(1.0)", 3);
  ObservationPoint obs{Vec3(-3, 0, 0), 0.05};
  DirectionCone cone = build_direction_cone(ball, obs);
  Frame fr = normalize_frame(obs, cone.omega0, &cone);
  double vol = slice_volume_estimate(ball, fr, 64, 0.02);
  CHECK(vol == doctest::Approx(4.0 * kPi / 3.0).epsilon(1e-2));
}

TEST_CASE("boundary interpolation reproduces nodal data") {
  Domain ball = build_domain("ball(1.0)", 3);
  const auto& nodes = ball.boundary();
  VecXc vals(nodes.size());
  for (size_t i = 0; i < nodes.size(); ++i)
    vals[static_cast<int>(i)] = cdouble(nodes[i].pos[0], nodes[i].pos[1]);
  for (int i = 0; i < 20; ++i) {
    const auto& n = nodes[i * 7];
    cdouble v = ball.interpolate_boundary(vals, n.pos);
    CHECK(std::abs(v - cdouble(n.pos[0], n.pos[1])) < 1e-10);
  }
}
