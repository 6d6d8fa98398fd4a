#include <cmath>

#include "doctest.h"
#include "mso/recovery.hpp"

using namespace mso;

namespace {

Potentials gaussian_pot(double a1, double a2, double a3, double q,
                        const std::string& id) {
  auto mk = [](double c) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%.3f*exp(-2.5*((x-4)^2+y^2+z^2))", c);
    return std::string(buf);
  };
  return Potentials(mk(a1), mk(a2), mk(a3), mk(q), "0", id);
}

}  // namespace

TEST_CASE("richardson extrapolation recovers a quadratic limit") {
  std::vector<double> h{0.4, 0.2, 0.1};
  std::vector<cdouble> s;
  cdouble s0(1.7, -0.3);
  for (double x : h) s.push_back(s0 + cdouble(0.5, 0.2) * x * x);
  double p = 0;
  cdouble lim = richardson_limit(h, s, &p);
  CHECK(std::abs(lim - s0) < 1e-10);
  CHECK(p == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("identity vanishes for identical potentials") {
  Domain dom(RadialProfile::ball(1.0), Vec3(4, 0, 0), 3);
  Potentials pot = gaussian_pot(0.3, 0.2, 0.1, 0.5, "same");
  CgoSetup s = build_cgo_setup(dom, pot, pot, {Vec3::Zero(), 0.05},
                               Vec3(0, 1, 0), 32, 0.05, 0.12);
  IdentityReport r = evaluate_identity(s, 0.2);
  CHECK(r.residual < 1e-8);
  CHECK(std::abs(r.rhs_zeroth) < 1e-12);
  CHECK(std::abs(r.rhs_first) < 1e-12);
}

TEST_CASE("setup validates its inputs") {
  Domain dom(RadialProfile::ball(1.0), Vec3(4, 0, 0), 3);
  Potentials pot = gaussian_pot(0.3, 0.2, 0.1, 0.5, "p");
  // x0 inside the hull is rejected by the observation validator
  CHECK_THROWS(build_cgo_setup(dom, pot, pot, {Vec3(4, 0, 0), 0.05},
                               Vec3(0, 1, 0), 32, 0.05, 0.12));
}

TEST_CASE("short h sweeps are rejected") {
  Domain dom(RadialProfile::ball(1.0), Vec3(4, 0, 0), 3);
  Potentials pot = gaussian_pot(0.3, 0.2, 0.1, 0.5, "p");
  CgoSetup s = build_cgo_setup(dom, pot, pot, {Vec3::Zero(), 0.05},
                               Vec3(0, 1, 0), 32, 0.05, 0.12);
  CHECK_THROWS_AS(scaled_limit_A(s, {0.4, 0.2}), RecoveryError);
  CHECK_THROWS_AS(plane_integral_q(s, 0, 5.0, {0.4, 0.2}), RecoveryError);
}

TEST_CASE("per-slice q integrals require equal magnetic potentials") {
  Domain dom(RadialProfile::ball(1.0), Vec3(4, 0, 0), 3);
  Potentials pot1 = gaussian_pot(0.3, 0.2, 0.1, 0.5, "p1");
  Potentials pot2 = gaussian_pot(0.25, 0.3, 0.15, 0.4, "p2");
  CgoSetup s = build_cgo_setup(dom, pot1, pot2, {Vec3::Zero(), 0.05},
                               Vec3(0, 1, 0), 32, 0.05, 0.12);
  CHECK_THROWS_AS(plane_integral_q(s, 0, 5.0, {0.4, 0.2, 0.1}), RecoveryError);
}

TEST_CASE("cancelling amplitude localizes the product") {
  Domain dom(RadialProfile::ball(1.0), Vec3(4, 0, 0), 3);
  Potentials qa("0", "0", "0", "0.5*exp(-2.5*((x-4)^2+y^2+z^2))", "0", "qa");
  CgoSetup s = build_cgo_setup(dom, qa, qa, {Vec3::Zero(), 0.05}, Vec3(0, 1, 0),
                               32, 0.05, 0.12);
  double kappa = 5.0;
  Amplitude ca = cancelling_amplitude(*s.amp1, *s.amp2, 0, kappa);
  const SliceSpec& s0 = s.amp2->slices[s.amp2->slot[0]].slice;
  double th0 = std::atan2(s0.theta[1], s0.theta[0]);
  double norm = 0;
  const int nq = 4096;
  for (int i = 0; i < nq; ++i)
    norm += std::exp(kappa * (std::cos(2 * kPi * i / nq - th0) - 1.0)) * 2 *
            kPi / nq;
  double worst = 0;
  for (int n = 0; n < s.mask->count(); n += 17) {
    Vec3 x = s.mask->point(n);
    Vec3 y = ca.frame.to_normalized(x);
    double r = std::hypot(y[1], y[2]);
    double th = std::atan2(y[2], y[1]);
    double chi = std::exp(kappa * (std::cos(th - th0) - 1.0)) / norm;
    cdouble prod = ca.eval(x) * std::conj(s.amp1->eval(x));
    cdouble want = chi / (cdouble(0, 2) * r);
    worst = std::max(worst, std::abs(prod - want) / std::abs(want));
  }
  // the window profile is interpolated between slices, so allow a few percent
  CHECK(worst < 0.1);
}

TEST_CASE("2d filtered back projection on a gaussian") {
  double R = 2.0;
  int na = 64, ns = 128, n = 96;
  MatX sino(na, ns);
  // analytic parallel-beam data of exp(-3 |x|^2): a 1D gaussian in the offset
  for (int a = 0; a < na; ++a)
    for (int s = 0; s < ns; ++s) {
      double off = -R + 2.0 * R * s / (ns - 1);
      sino(a, s) = std::sqrt(kPi / 3.0) * std::exp(-3.0 * off * off);
    }
  MatX img = fbp2d(sino, R, n);
  double num = 0, den = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double x = -R + 2.0 * R * i / (n - 1), y = -R + 2.0 * R * j / (n - 1);
      if (x * x + y * y > 1.5 * 1.5) continue;
      double t = std::exp(-3.0 * (x * x + y * y));
      num += (img(i, j) - t) * (img(i, j) - t);
      den += t * t;
    }
  CHECK(std::sqrt(num / den) < 0.1);
}

TEST_CASE("longitudinal ray data is blind to gradients") {
  // field = grad of a bump supported inside the ball
  auto grad_psi = [](const Vec3& x) {
    double r2 = x.squaredNorm();
    double f = std::exp(-6.0 * r2);
    return Vec3(-1.2 * x[0] * f, -1.2 * x[1] * f, -1.2 * x[2] * f);
  };
  RaySinogram rs = make_ray_sinogram(grad_psi, Vec3::Zero(), Mat3::Identity(),
                                     16, {0.0, 0.3}, 24, 2.0);
  double worst = 0;
  for (double v : rs.data) worst = std::max(worst, std::abs(v));
  CHECK(worst < 1e-9);
}

TEST_CASE("plane sinogram offsets integrate to the volume integral") {
  auto f = [](const Vec3& x) { return std::exp(-3.0 * x.squaredNorm()); };
  double R = 2.0;
  PlaneSinogram ps = make_plane_sinogram(f, Vec3::Zero(), Mat3::Identity(), 4,
                                         4, 128, R);
  double total = std::pow(kPi / 3.0, 1.5);  // gaussian volume integral
  for (int b = 0; b < ps.n_beta; ++b)
    for (int t = 0; t < ps.n_theta; ++t) {
      double sum = 0;
      for (int s = 0; s < ps.n_s; ++s) sum += ps.at(b, t, s);
      sum *= 2.0 * R / (ps.n_s - 1);
      CHECK(sum == doctest::Approx(total).epsilon(1e-3));
    }
}
