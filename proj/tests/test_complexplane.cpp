#include <cmath>

#include "doctest.h"
#include "mso/complexplane.hpp"
#include "mso/dbar.hpp"

using namespace mso;

namespace {

std::vector<Vec2> circle(int n, double cy = 0.0, double r = 1.0) {
  std::vector<Vec2> out(n);
  for (int k = 0; k < n; ++k)
    out[k] = Vec2(r * std::cos(2 * kPi * k / n), cy + r * std::sin(2 * kPi * k / n));
  return out;
}

// unit-disk slice grid centered at (0, cy)
SliceSpec disk_slice(int n, double cy) {
  SliceSpec s;
  s.theta = Vec2(1, 0);
  s.grid_step = 2.4 / n;
  s.grid_origin = Vec2(-1.2, cy - 1.2);
  s.nt = s.nr = n;
  s.polygon = circle(512, cy);
  s.cell_fraction = MatX::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Vec2 p = s.cell_center(i, j);
      s.cell_fraction(i, j) = std::hypot(p[0], p[1] - cy) < 1.0 ? 1.0 : 0.0;
    }
  return s;
}

}  // namespace

TEST_CASE("cell kernel integral matches the far-field expansion") {
  double h = 0.01;
  cdouble z(0.3, 0.2);
  cdouble v = cell_kernel_integral(z, h);
  CHECK(std::abs(v - h * h / (-z)) < 1e-3 * std::abs(h * h / z));
}

TEST_CASE("disk indicator transform is zbar inside") {
  int n = 128;
  SliceSpec s = disk_slice(n, 3.0);
  MatXc f = MatXc::Ones(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (s.cell_fraction(i, j) == 0.0) f(i, j) = 0.0;
  MatXc t = cauchy_transform(s, f);
  // dbar(zbar) = 1, so T of the indicator equals zbar plus a holomorphic part
  // fixed by decay; on the disk it is exactly zbar - conj(center)
  double err = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Vec2 p = s.cell_center(i, j);
      if (std::hypot(p[0], p[1] - 3.0) > 0.95) continue;
      cdouble z(p[0], p[1]);
      err = std::max(err, std::abs(t(i, j) - (std::conj(z) - cdouble(0, -3))));
    }
  CHECK(err < 1e-2);
}

TEST_CASE("dbar of the transform returns the density") {
  int n = 96;
  SliceSpec s = disk_slice(n, 3.0);
  MatXc f(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Vec2 p = s.cell_center(i, j);
      f(i, j) = std::exp(-2.0 * (p[0] * p[0] + (p[1] - 3) * (p[1] - 3)));
    }
  MatXc t = cauchy_transform(s, f, true);
  MatXc d = dbar_apply(s, t);
  double err = 0;
  for (int i = 4; i < n - 4; ++i)
    for (int j = 4; j < n - 4; ++j)
      err = std::max(err, std::abs(d(i, j) - f(i, j)));
  CHECK(err < 2e-3);
}

TEST_CASE("cauchy integral of holomorphic data") {
  auto one = BoundaryFunction::from_polygon(circle(512),
                                            [](cdouble) { return cdouble(1.0); });
  CHECK(std::abs(cauchy_integral(one, {0.3, 0}) - 1.0) < 1e-10);
  CHECK(std::abs(cauchy_integral(one, {2, 0})) < 1e-12);
  auto fz = BoundaryFunction::from_polygon(circle(512),
                                           [](cdouble z) { return std::conj(z); });
  CHECK(std::abs(cauchy_integral(fz, {0.3, 0})) < 1e-10);
  CHECK(std::abs(cauchy_integral(fz, {2, 0}) - cdouble(-0.5, 0)) < 1e-10);
}

TEST_CASE("one-sided limits satisfy the jump relation") {
  auto fz = BoundaryFunction::from_polygon(circle(512),
                                           [](cdouble z) { return std::conj(z); });
  auto [in, out] = plemelj_jump(fz, 100);
  cdouble z0 = fz.z[100];
  CHECK(std::abs(in) < 1e-5);                          // zbar = 1/z: no interior part
  CHECK(std::abs(out - (-std::conj(z0))) < 1e-5);
  CHECK(std::abs(in - out - std::conj(z0)) < 1e-5);    // jump equals the data
}

TEST_CASE("winding numbers") {
  auto fid = BoundaryFunction::from_polygon(circle(512),
                                            [](cdouble z) { return z; });
  auto one = BoundaryFunction::from_polygon(circle(512),
                                            [](cdouble) { return cdouble(1.0); });
  CHECK(winding_number(fid) == 1);
  CHECK(winding_number(one) == 0);
  cdouble closure;
  log_branch(fid, &closure);
  CHECK(std::abs(closure - cdouble(0, 2 * kPi)) < 1e-10);  // 2 pi i * winding
  log_branch(one, &closure);
  CHECK(std::abs(closure) < 1e-10);
}

TEST_CASE("holomorphic extension of e^z and moment rejection") {
  int n = 96;
  SliceSpec s = disk_slice(n, 3.0);
  auto fe = BoundaryFunction::from_polygon(circle(512, 3.0),
                                           [](cdouble z) { return std::exp(z); });
  HolomorphicExtension ext = holomorphic_extend(fe, s);
  double err = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (s.cell_fraction(i, j) < 0.5) continue;
      Vec2 p = s.cell_center(i, j);
      err = std::max(err, std::abs(ext.interior(i, j) - std::exp(cdouble(p[0], p[1]))));
    }
  CHECK(err < 1e-6);
  CHECK(ext.boundary_match_error < 1e-5);
  CHECK(ext.winding == 0);

  auto fbad = BoundaryFunction::from_polygon(
      circle(512, 3.0), [](cdouble z) { return std::conj(z - cdouble(0, 3)); });
  CHECK_THROWS_AS(holomorphic_extend(fbad, s), GeometryError);
}
