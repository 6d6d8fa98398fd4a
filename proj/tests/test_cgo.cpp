#include <cmath>

#include "doctest.h"
#include "mso/cgo.hpp"

using namespace mso;

namespace {

struct FarSetup {
  Domain dom = build_domain("ball(2.0)", 3);
  // keep the ball far from the observation point so the weight varies slowly
  FarSetup() : dom(RadialProfile::ball(2.0), Vec3(40, 0, 0), 3) {}
  ObservationPoint obs{Vec3::Zero(), 0.05};
  Vec3 omega = Vec3(0, 1, 0);
  Frame frame = normalize_frame(obs, omega);
};

Potentials far_potentials() {
  return Potentials("0.3*exp(-0.4*((x-40)^2+y^2+z^2))",
                    "0.2*sin(y)*exp(-0.4*((x-40)^2+y^2+z^2))",
                    "0.1*exp(-0.4*((x-40)^2+y^2+z^2))",
                    "0.5*exp(-0.4*((x-40)^2+y^2+z^2))", "0", "far");
}

}  // namespace

TEST_CASE("transport right-hand side closed form for A = 0") {
  FarSetup fs;
  SliceSpec sp = slice(fs.dom, fs.frame, Vec2(1, 0), 0.04);
  MatXc rhs = transport_rhs(Potentials(), sp, +1);
  for (int i = 0; i < sp.nt; i += 7)
    for (int j = 0; j < sp.nr; j += 7) {
      Vec2 p = sp.cell_center(i, j);
      cdouble z(p[0], p[1]);
      cdouble want = 1.0 / (2.0 * (z - std::conj(z)));  // (n-2)/(2(z-zbar)), n=3
      CHECK(std::abs(rhs(i, j) - want) < 1e-12);
    }
}

TEST_CASE("amplitude transport residual and continuity across slices") {
  FarSetup fs;
  Potentials pot = far_potentials();
  for (int sign : {-1, +1}) {
    Amplitude amp = build_amplitude(pot, fs.dom, fs.frame, 32, sign, 0.04);
    double dres = 0;
    for (const auto& s : amp.slices) dres = std::max(dres, s.dbar_residual);
    CHECK(dres < 1e-3);
    CHECK(amp.slice_jump() < 5e-2);
    CHECK(amp.sign == sign);
  }
}

TEST_CASE("conjugated solve leaves the remainder bounded") {
  FarSetup fs;
  Potentials pot = far_potentials();
  auto amp = std::make_shared<Amplitude>(
      build_amplitude(pot, fs.dom, fs.frame, 32, +1, 0.04));
  CarlemanWeight w{fs.obs.x0};
  AngularPhase ph{fs.obs.x0, fs.omega};
  auto mask = std::make_shared<GridMask>(fs.dom, 0.2);
  CgoSolution c = build_cgo(fs.dom, pot, w, ph, 0.4, +1, amp, mask);
  CHECK(std::isfinite(c.diag.residual_norm));
  CHECK(c.diag.r_h1_scl > 0.0);
  CHECK(c.diag.r_h1_scl < 100.0);
  // b = a + h r on the grid, by construction of the remainder
  double err = 0;
  for (int n = 0; n < mask->count(); ++n) {
    Vec3 x = mask->point(n);
    err = std::max(err, std::abs(c.b.values[n] - amp->eval(x) -
                                 c.h * c.r.values[n]));
  }
  CHECK(err < 1e-12);
}

TEST_CASE("quadrature norms scale with the domain volume") {
  FarSetup fs;
  auto mask = std::make_shared<GridMask>(fs.dom, 0.2);
  GridField one{mask, VecXc::Ones(mask->count())};
  double vol = 4.0 * kPi / 3.0 * 8.0;  // ball of radius 2
  CHECK(l2_norm(one) == doctest::Approx(std::sqrt(vol)).epsilon(2e-2));
  CHECK(h1_scl_norm(one, 0.3) >= l2_norm(one));
}
