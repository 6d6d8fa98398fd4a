// End-to-end acceptance suite: twelve pinned checks, one summary line each.
// Configurations are frozen; any failure exits nonzero.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <vector>

#include "mso/complexplane.hpp"
#include "mso/recovery.hpp"

using namespace mso;
using Clock = std::chrono::steady_clock;

namespace {

bool g_all_pass = true;

void report(int n, bool pass, const std::string& detail, Clock::time_point t0) {
  double s = std::chrono::duration<double>(Clock::now() - t0).count();
  std::printf("criterion %2d: %s  %s (%.1fs)\n", n, pass ? "PASS" : "FAIL",
              detail.c_str(), s);
  std::fflush(stdout);
  g_all_pass = g_all_pass && pass;
}

std::string fmt(const char* f, ...) {
  char buf[256];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof(buf), f, ap);
  va_end(ap);
  return buf;
}

Vec3 random_interior(const Domain& dom, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Box3& box = dom.bounding_box();
  for (;;) {
    Vec3 x(box.lo[0] + unit(rng) * (box.hi[0] - box.lo[0]),
           box.lo[1] + unit(rng) * (box.hi[1] - box.lo[1]),
           box.lo[2] + unit(rng) * (box.hi[2] - box.lo[2]));
    if (dom.inside(x)) return x;
  }
}

// weight pair closed forms: eikonal system and the convexity bracket
void criteria_1_2() {
  auto t0 = Clock::now();
  Domain ball = build_domain("ball(1.0)", 3);
  ObservationPoint obs{Vec3(-3, 0, 0), 0.05};
  DirectionCone cone = build_direction_cone(ball, obs);
  CarlemanWeight w{obs.x0};
  AngularPhase ph{obs.x0, cone.omega0};
  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss;
  double eik = 0, lcw = 0;
  for (int s = 0; s < 1000; ++s) {
    Vec3 x = random_interior(ball, rng);
    Vec3 g = w.grad(x);
    double g2 = g.squaredNorm();
    auto [r1, r2] = eikonal_residual(w, ph, x, &cone);
    eik = std::max(eik, std::max(std::abs(r1), std::abs(r2)) / g2);
    Vec3 xi(gauss(rng), gauss(rng), gauss(rng));
    xi -= xi.dot(g) / g2 * g;
    xi *= std::sqrt(g2) / xi.norm();
    lcw = std::max(lcw, std::abs(lcw_condition_residual(w, x, xi)) / (g2 * g2));
  }
  report(1, eik <= 1e-12, fmt("eikonal residual %.2e (rel, 1000 pts)", eik), t0);
  report(2, lcw <= 1e-12, fmt("convexity bracket %.2e (rel, 1000 pts)", lcw), t0);
}

void criterion_3() {
  auto t0 = Clock::now();
  Domain ball = build_domain("ball(1.0)", 3);
  Potentials pot("0.3*x2", "0.1*x1", "0.2*x3", "1+0.5*x1", "0", "mfg");
  expr::Expr u_re("exp(-((x1-0.2)^2+x2^2+x3^2))"), u_im("sin(x1+0.5*x2)");
  auto u_exact = [&](const Vec3& x) { return cdouble(u_re(x), u_im(x)); };
  double steps[3] = {1.0 / 8, 1.0 / 12, 1.0 / 16};
  double errs[3];
  for (int s = 0; s < 3; ++s) {
    DiscreteOperator op(ball, pot, steps[s]);
    int n = op.mask()->count();
    VecXc f(n);
    for (int m = 0; m < n; ++m) {
      Vec3 x = op.mask()->point(m);
      f[m] = pot.apply(u_re, x) + kI * pot.apply(u_im, x);
    }
    GridField uh = op.solve(u_exact);
    GridField up = op.solve_rhs(f);
    double num = 0, den = 0;
    for (int m = 0; m < n; ++m) {
      double wq = op.mask()->quad_weight(m);
      cdouble d = uh.values[m] + up.values[m] - u_exact(op.mask()->point(m));
      num += wq * std::norm(d);
      den += wq * std::norm(u_exact(op.mask()->point(m)));
    }
    errs[s] = std::sqrt(num / den);
  }
  double slope = std::log(errs[0] / errs[2]) / std::log(steps[0] / steps[2]);
  report(3, slope >= 1.8,
         fmt("manufactured-solution order %.3f (err %.2e -> %.2e)", slope,
             errs[0], errs[2]),
         t0);
}

void criterion_4() {
  auto t0 = Clock::now();
  Domain coarse = build_domain("ball(1.0)", 2);
  Potentials pot("0.3*x2", "0.1*x1", "0", "1", "0", "g4");
  double step = 1.0 / 12;
  DnMap base = dn_map(coarse, pot, step);
  // discretization scale: the zero-potential map against itself one grid
  // refinement away
  DnMap zf = dn_map(coarse, Potentials(), step);
  DnMap zc = dn_map(coarse, Potentials(), 1.0 / 8);
  double ref = zc.relative_distance(zf);
  const char* psis[3] = {"(1-(x1*x1+x2*x2+x3*x3))*x1",
                         "(1-(x1*x1+x2*x2+x3*x3))*sin(x2)",
                         "(1-(x1*x1+x2*x2+x3*x3))^2*0.5"};
  double worst = 0;
  for (const char* p : psis) {
    Potentials gp = gauge_transform(pot, expr::Expr(p), coarse);
    DnMap gm = dn_map(coarse, gp, step);
    worst = std::max(worst, gm.relative_distance(base) / ref);
  }
  report(4, worst <= 10.0,
         fmt("gauge DN distance / discretization scale %.2f (ref %.2e)", worst,
             ref),
         t0);
}

std::vector<Vec2> circle(int n, double cy, double r = 1.0) {
  std::vector<Vec2> out(n);
  for (int k = 0; k < n; ++k)
    out[k] =
        Vec2(r * std::cos(2 * kPi * k / n), cy + r * std::sin(2 * kPi * k / n));
  return out;
}

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

void criterion_5() {
  auto t0 = Clock::now();
  int n = 128;
  SliceSpec s = disk_slice(n, 3.0);
  MatXc f = MatXc::Ones(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (s.cell_fraction(i, j) == 0.0) f(i, j) = 0.0;
  MatXc t = cauchy_transform(s, f);
  double err = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Vec2 p = s.cell_center(i, j);
      if (std::hypot(p[0], p[1] - 3.0) > 0.95) continue;
      cdouble z(p[0], p[1]);
      err = std::max(err, std::abs(t(i, j) - (std::conj(z) - cdouble(0, -3))));
    }
  auto fz = BoundaryFunction::from_polygon(
      circle(512, 0.0), [](cdouble z) { return std::conj(z); });
  auto [in, out] = plemelj_jump(fz, 100);
  cdouble z0 = fz.z[100];
  double perr = std::max(std::abs(in), std::abs(in - out - std::conj(z0)));
  bool ok = err <= 1e-2 && perr <= 1e-5;
  report(5, ok,
         fmt("disk transform err %.2e, one-sided jump err %.2e", err, perr),
         t0);
}

void criteria_6_7() {
  auto t0 = Clock::now();
  double D = 40.0, R = 2.0;
  Domain dom(RadialProfile::ball(R), Vec3(D, 0, 0), 3);
  ObservationPoint obs{Vec3::Zero(), 0.05};
  DirectionCone cone = build_direction_cone(dom, obs);
  Vec3 omega(0, 1, 0);
  Frame frame = normalize_frame(obs, omega, &cone);
  Potentials pot("0.3*exp(-0.4*((x-40)^2+y^2+z^2))",
                 "0.2*sin(y)*exp(-0.4*((x-40)^2+y^2+z^2))",
                 "0.1*exp(-0.4*((x-40)^2+y^2+z^2))",
                 "0.5*exp(-0.4*((x-40)^2+y^2+z^2))", "0", "far");
  CarlemanWeight w{obs.x0};
  AngularPhase ph{obs.x0, omega};
  double hs[4] = {0.4, 0.2, 0.1, 0.05};
  double st[4] = {0.2, 0.15, 0.11, 0.08};
  double worst_slope = 1e9, worst_ratio = 0;
  for (int sign : {-1, +1}) {
    auto amp = std::make_shared<Amplitude>(
        build_amplitude(pot, dom, frame, 32, sign, 0.04));
    double rh[4], rn[4];
    for (int s = 0; s < 4; ++s) {
      auto mask = std::make_shared<GridMask>(dom, st[s]);
      CgoSolution c = build_cgo(dom, pot, w, ph, hs[s], sign, amp, mask);
      rh[s] = c.diag.r_h1_scl;
      rn[s] = c.diag.residual_norm;
    }
    double slope = std::log(rn[0] / rn[3]) / std::log(hs[0] / hs[3]);
    double med = 0.5 * (rh[1] + rh[2]);
    for (double v : rh)
      worst_ratio = std::max(worst_ratio, std::max(v / med, med / v));
    worst_slope = std::min(worst_slope, slope);
  }
  report(6, worst_slope >= 1.8,
         fmt("conjugated residual decay order %.3f (both signs)", worst_slope),
         t0);
  report(7, worst_ratio <= 3.0,
         fmt("remainder variation across h: %.2fx of median", worst_ratio), t0);
}

Potentials near_pot(double a1, double a2, double a3, double q,
                    const std::string& id) {
  auto mk = [](double c) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%.3f*exp(-2.5*((x-4)^2+y^2+z^2))", c);
    return std::string(buf);
  };
  return Potentials(mk(a1), mk(a2), mk(a3), mk(q), "0", id);
}

void criteria_8_to_11() {
  Domain dom(RadialProfile::ball(1.0), Vec3(4, 0, 0), 3);
  ObservationPoint obs{Vec3::Zero(), 0.05};
  Vec3 omega(0, 1, 0);
  Potentials pot1 = near_pot(0.3, 0.2, 0.1, 0.5, "p1");
  Potentials pot2 = near_pot(0.25, 0.3, 0.15, 0.4, "p2");
  Potentials pot3("0.200*sin(y)*exp(-2.5*((x-4)^2+y^2+z^2))",
                  "0.100*exp(-2.5*((x-4)^2+y^2+z^2))",
                  "0.200*exp(-2.5*((x-4)^2+y^2+z^2))",
                  "0.300*exp(-2.5*((x-4)^2+y^2+z^2))", "0", "p3");
  // gauge partner of pot1: A1 + grad Psi, Psi = -0.1 (rho^2 - 1), zero on the
  // boundary sphere
  Potentials pot1g("0.300*exp(-2.5*((x-4)^2+y^2+z^2))-0.2*(x-4)",
                   "0.200*exp(-2.5*((x-4)^2+y^2+z^2))-0.2*y",
                   "0.100*exp(-2.5*((x-4)^2+y^2+z^2))-0.2*z",
                   "0.500*exp(-2.5*((x-4)^2+y^2+z^2))", "0", "p1g");
  Potentials qa("0", "0", "0", "0.500*exp(-2.5*((x-4)^2+y^2+z^2))", "0", "qa");
  Potentials qb("0", "0", "0", "0.400*exp(-2.5*((x-4)^2+y^2+z^2))", "0", "qb");

  // criterion 8: identity residual against its scale, three pairs, one grid
  // refinement
  auto t0 = Clock::now();
  double worst_rs = 0;
  CgoSetup s12 = build_cgo_setup(dom, pot1, pot2, obs, omega, 32, 0.03, 0.08);
  CgoSetup sq = build_cgo_setup(dom, qa, qb, obs, omega, 32, 0.03, 0.08);
  CgoSetup s13 = build_cgo_setup(dom, pot1, pot3, obs, omega, 32, 0.03, 0.08);
  double rs12 = 0;
  for (CgoSetup* s : {&s12, &sq, &s13}) {
    IdentityReport r = evaluate_identity(*s, 0.2);
    double rs = r.residual / r.scale;
    if (s == &s12) rs12 = rs;
    worst_rs = std::max(worst_rs, rs);
  }
  CgoSetup fine =
      build_cgo_setup(dom, pot1, pot2, obs, omega, 32, 0.021, 0.056);
  IdentityReport rf = evaluate_identity(fine, 0.2);
  double ratio = rs12 / (rf.residual / rf.scale);
  bool ok8 = worst_rs <= 5e-2 && ratio >= 1.5;
  report(8, ok8,
         fmt("identity residual/scale %.2e (3 pairs), refinement gain %.2fx",
             worst_rs, ratio),
         t0);

  // criterion 9: everything that must vanish, relative to the matching
  // non-degenerate magnitude
  t0 = Clock::now();
  CgoSetup s11 = build_cgo_setup(dom, pot1, pot1, obs, omega, 32, 0.03, 0.08);
  CgoSetup s1g = build_cgo_setup(dom, pot1, pot1g, obs, omega, 32, 0.03, 0.08);
  auto gz = [](cdouble z) { return z; };
  double worst9 = 0;
  for (int k = 0; k < s11.amp2->n_theta; ++k) {
    if (s11.amp2->slot[k] < 0) continue;
    SliceMoment m0 = slice_moment(*s11.amp1, *s11.amp2, k, gz);
    SliceMoment m1 = slice_moment(*s12.amp1, *s12.amp2, k, gz);
    worst9 = std::max(worst9, std::abs(m0.boundary) / m1.scale);
  }
  const SliceSpec& sl0 = s11.amp2->slices[1].slice;
  cdouble pfg = plane_functional_A(s1g.pot1, s1g.pot2, sl0);
  cdouble pfgen = plane_functional_A(s12.pot1, s12.pot2, sl0);
  worst9 = std::max(worst9, std::abs(pfg) / std::abs(pfgen));
  cdouble dag = plane_functional_dA(s1g.pot1, s1g.pot2, dom, s1g.amp2->frame,
                                    sl0.theta, 0.01, 0.02);
  cdouble dagen = plane_functional_dA(s12.pot1, s12.pot2, dom,
                                      s12.amp2->frame, sl0.theta, 0.01, 0.02);
  worst9 = std::max(worst9, std::abs(dag) / std::abs(dagen));
  std::vector<double> hq{0.4, 0.2, 0.1};
  CgoSetup sqq = build_cgo_setup(dom, qa, qa, obs, omega, 32, 0.03, 0.08);
  PlaneIntegralQ pq0 = plane_integral_q(sqq, 0, 5.0, hq);
  PlaneIntegralQ pqn = plane_integral_q(sq, 0, 5.0, hq);
  worst9 = std::max(worst9, std::abs(pq0.boundary_value) /
                                std::abs(pqn.boundary_value));
  report(9, worst9 <= 1e-4,
         fmt("degenerate-pair functionals %.2e of generic magnitude", worst9),
         t0);

  // criterion 10: electric difference from boundary data, slice by slice,
  // then the full reconstruction
  t0 = Clock::now();
  double worst_mm = pqn.mismatch;
  for (int k = 1; k < sq.amp2->n_theta; ++k) {
    if (sq.amp2->slot[k] < 0) continue;
    worst_mm = std::max(worst_mm, plane_integral_q(sq, k, 5.0, hq).mismatch);
  }
  PlaneIntegralSet set = collect_plane_integrals(qa, qb, dom.center(),
                                                 Mat3::Identity(), 1.8, 32, 32,
                                                 64, {}, 0);
  RadonResult rec = radon_invert(set, RadonTarget::QDiff, 64);
  const Box3& box = dom.bounding_box();
  double num = 0, den = 0;
  const int nl = 28;
  for (int i = 0; i < nl; ++i)
    for (int j = 0; j < nl; ++j)
      for (int k = 0; k < nl; ++k) {
        Vec3 x = box.lo + Vec3((i + 0.5) / nl * (box.hi[0] - box.lo[0]),
                               (j + 0.5) / nl * (box.hi[1] - box.lo[1]),
                               (k + 0.5) / nl * (box.hi[2] - box.lo[2]));
        if (!dom.inside(x)) continue;
        double t = (qa.q(x) - qb.q(x)).real();
        double d = t - rec.q_diff.sample(x);
        num += d * d;
        den += t * t;
      }
  double qerr = std::sqrt(num / den);
  bool ok10 = worst_mm <= 5e-2 && qerr <= 0.10;
  report(10, ok10,
         fmt("plane integrals %.2e worst mismatch, q field rel L2 %.2e",
             worst_mm, qerr),
         t0);

  // criterion 11: magnetic field reconstruction and gradient invisibility
  t0 = Clock::now();
  Potentials da1("0.2*y*exp(-2.5*((x-4)^2+y^2+z^2))",
                 "exp(-2.5*((x-4)^2+y^2+z^2))",
                 "-0.3*(x-4)*exp(-2.5*((x-4)^2+y^2+z^2))",
                 "0", "0", "da1");
  Potentials da2("0", "0", "0", "0", "0", "da2");
  std::vector<double> tilts{-0.4, -0.2, 0.0, 0.2, 0.4};
  PlaneIntegralSet dset = collect_plane_integrals(
      da1, da2, dom.center(), Mat3::Identity(), 1.8, 32, 32, 64, tilts, 64);
  RadonResult drec = radon_invert(dset, RadonTarget::DADiff, 64);
  auto curl = [&](const Vec3& x) {
    Mat3 j = da1.jacobian_A(x) - da2.jacobian_A(x);
    return Vec3(j(2, 1) - j(1, 2), j(0, 2) - j(2, 0), j(1, 0) - j(0, 1));
  };
  num = den = 0;
  double rec_l2 = 0;
  for (int i = 0; i < nl; ++i)
    for (int j = 0; j < nl; ++j)
      for (int k = 0; k < nl; ++k) {
        Vec3 x = box.lo + Vec3((i + 0.5) / nl * (box.hi[0] - box.lo[0]),
                               (j + 0.5) / nl * (box.hi[1] - box.lo[1]),
                               (k + 0.5) / nl * (box.hi[2] - box.lo[2]));
        if (!dom.inside(x)) continue;
        num += (curl(x) - drec.dA_diff.sample(x)).squaredNorm();
        den += curl(x).squaredNorm();
        rec_l2 += drec.dA_diff.sample(x).squaredNorm();
      }
  double derr = std::sqrt(num / den);
  // gradient pair: identical curls, so the reconstruction must vanish
  PlaneIntegralSet gset = collect_plane_integrals(
      pot1, pot1g, dom.center(), Mat3::Identity(), 1.8, 32, 32, 64, tilts, 64);
  RadonResult grec = radon_invert(gset, RadonTarget::DADiff, 64);
  double g_l2 = 0;
  for (int i = 0; i < nl; ++i)
    for (int j = 0; j < nl; ++j)
      for (int k = 0; k < nl; ++k) {
        Vec3 x = box.lo + Vec3((i + 0.5) / nl * (box.hi[0] - box.lo[0]),
                               (j + 0.5) / nl * (box.hi[1] - box.lo[1]),
                               (k + 0.5) / nl * (box.hi[2] - box.lo[2]));
        if (!dom.inside(x)) continue;
        g_l2 += grec.dA_diff.sample(x).squaredNorm();
      }
  double grel = std::sqrt(g_l2 / rec_l2);
  bool ok11 = derr <= 0.15 && grel <= 1e-3;
  report(11, ok11,
         fmt("dA field rel L2 %.2e, gradient-pair leakage %.2e", derr, grel),
         t0);
}

void criterion_12() {
  auto t0 = Clock::now();
  Domain ball = build_domain("ball(1.0)", 3);
  CarlemanWeight w{Vec3(-1.2, 0, 0)};
  Potentials pot("0.3*x2", "0.1*x1", "0", "1", "0", "cc");
  std::vector<double> hs{0.2, 0.1, 0.05, 0.025};
  std::vector<double> cs;
  for (double h : hs) cs.push_back(carleman_constant(ball, pot, w, h, 50, 42, 0.03));
  double sxx = 0, sxy = 0, sx = 0, sy = 0;
  int n = static_cast<int>(hs.size());
  for (int i = 0; i < n; ++i) {
    double x = std::log(hs[i]), y = std::log(cs[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  report(12, slope >= -0.1,
         fmt("estimate constant log-log trend %.3f over h in [0.025, 0.2]",
             slope),
         t0);
}

}  // namespace

int main() {
  setvbuf(stdout, nullptr, _IONBF, 0);
  criteria_1_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criteria_6_7();
  criteria_8_to_11();
  criterion_12();
  std::printf("acceptance: %s\n", g_all_pass ? "ALL PASS" : "FAILURES");
  return g_all_pass ? 0 : 1;
}
