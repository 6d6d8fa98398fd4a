#include "mso/weights.hpp"

#include <cmath>
#include <random>

namespace mso {

std::pair<double, double> eikonal_residual(const CarlemanWeight& w,
                                           const AngularPhase& p, const Vec3& x,
                                           const DirectionCone* cone) {
  if (cone && !cone->in_gamma((x - w.x0).normalized()))
    throw GeometryError("eikonal_residual: point direction outside Gamma");
  Vec3 gphi = w.grad(x);
  Vec3 gpsi = p.grad(x);
  return {gpsi.squaredNorm() - gphi.squaredNorm(), gphi.dot(gpsi)};
}

double lcw_condition_residual(const CarlemanWeight& w, const Vec3& x, const Vec3& xi) {
  Vec3 gphi = w.grad(x);
  double g2 = gphi.squaredNorm();
  if (std::abs(xi.squaredNorm() - g2) > 1e-12 * g2 ||
      std::abs(gphi.dot(xi)) > 1e-12 * g2)
    throw GeometryError("lcw_condition_residual: xi violates |xi|=|grad phi|, "
                        "xi.grad phi=0");
  Mat3 hess = w.hessian(x);
  return gphi.dot(hess * gphi) + xi.dot(hess * xi);
}

namespace {

using expr::NodePtr;

// exp(-((x1-c1)^2 + (x2-c2)^2 + (x3-c3)^2) / w^2)
NodePtr gaussian_bump(const Vec3& c, double w) {
  NodePtr s = expr::constant(0.0);
  for (int i = 0; i < 3; ++i) {
    NodePtr d = expr::sub(expr::variable(i), expr::constant(c[i]));
    s = expr::add(s, expr::mul(d, d));
  }
  auto n = std::make_shared<expr::Node>();
  n->op = expr::Op::Exp;
  n->a = expr::div(expr::sub(expr::constant(0.0), s), expr::constant(w * w));
  return n;
}

}  // namespace

double carleman_constant(const Domain& domain, const Potentials& pot,
                         const CarlemanWeight& w, double h, int samples,
                         unsigned seed, double grid_step) {
  const Box3& box = domain.bounding_box();
  double diam = domain.diameter();
  if (grid_step <= 0.0) grid_step = diam / 48.0;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // Quadrature nodes: interior grid points, trapezoid-free midpoint weights.
  std::vector<Vec3> nodes;
  for (double x = box.lo[0] + 0.5 * grid_step; x < box.hi[0]; x += grid_step)
    for (double y = box.lo[1] + 0.5 * grid_step; y < box.hi[1]; y += grid_step)
      for (double z = box.lo[2] + 0.5 * grid_step; z < box.hi[2]; z += grid_step) {
        Vec3 p(x, y, z);
        if (domain.inside(p)) nodes.push_back(p);
      }
  double phimax = -1e300;
  for (const auto& p : nodes) phimax = std::max(phimax, w.phi(p));

  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    // 2 to 4 bumps, centers kept several widths away from the boundary so the
    // support is compact to machine precision.
    int nb = 2 + static_cast<int>(unit(rng) * 3.0);
    NodePtr u_node = expr::constant(0.0);
    for (int b = 0; b < nb; ++b) {
      double width = (0.06 + 0.06 * unit(rng)) * diam;
      Vec3 c;
      for (int tries = 0;; ++tries) {
        c = Vec3(box.lo[0] + unit(rng) * (box.hi[0] - box.lo[0]),
                 box.lo[1] + unit(rng) * (box.hi[1] - box.lo[1]),
                 box.lo[2] + unit(rng) * (box.hi[2] - box.lo[2]));
        if (domain.delta(c) < -5.0 * width) break;
        if (tries > 4000) {
          width *= 0.7;
          tries = 0;
        }
      }
      double amp = 2.0 * unit(rng) - 1.0;
      u_node = expr::add(u_node, expr::mul(expr::constant(amp), gaussian_bump(c, width)));
    }
    expr::Expr u(u_node);

    double n_u = 0.0, n_gu = 0.0, n_lu = 0.0;
    for (const auto& p : nodes) {
      double wt = std::exp((w.phi(p) - phimax) / h);
      double w2 = wt * wt;
      n_u += w2 * u(p) * u(p);
      n_gu += w2 * u.gradient(p).squaredNorm();
      n_lu += w2 * std::norm(pot.apply(u, p));
    }
    double vol = grid_step * grid_step * grid_step;
    n_u = std::sqrt(n_u * vol);
    n_gu = std::sqrt(n_gu * vol);
    n_lu = std::sqrt(n_lu * vol);
    if (n_lu <= 0.0) continue;
    worst = std::max(worst, (n_u + h * n_gu) / (h * n_lu));
  }
  return worst;
}

}  // namespace mso
