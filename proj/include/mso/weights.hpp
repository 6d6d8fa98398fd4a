#pragma once

// The logarithmic weight phi = log|x - x0|, its orthogonal angular companion
// psi, the eikonal and convexity-bracket residuals, and an empirical weighted
// a-priori-estimate constant.

#include <utility>

#include "mso/geometry.hpp"
#include "mso/potentials.hpp"
#include "mso/types.hpp"

namespace mso {

struct CarlemanWeight {
  Vec3 x0;

  double phi(const Vec3& x) const { return 0.5 * std::log((x - x0).squaredNorm()); }
  Vec3 grad(const Vec3& x) const {
    Vec3 y = x - x0;
    return y / y.squaredNorm();
  }
  Mat3 hessian(const Vec3& x) const {
    Vec3 y = x - x0;
    double r2 = y.squaredNorm();
    return (Mat3::Identity() - 2.0 * (y * y.transpose()) / r2) / r2;
  }
};

struct AngularPhase {
  Vec3 x0;
  Vec3 omega;  // unit

  // Geodesic distance on S^2 between (x-x0)/|x-x0| and omega, in (0, pi).
  double psi(const Vec3& x) const {
    Vec3 y = x - x0;
    double dot = omega.dot(y);
    return std::atan2((y - dot * omega).norm(), dot);
  }
  Vec3 grad(const Vec3& x) const {
    Vec3 y = x - x0;
    double r = y.norm();
    Vec3 d = y / r;
    double g = omega.dot(d);
    Vec3 tang = omega - g * d;
    double tn = tang.norm();
    return -tang / (tn * r);
  }
};

// ((grad psi)^2 - (grad phi)^2, grad phi . grad psi) from the closed forms.
// If a cone is supplied, x must have direction (x-x0)/|x-x0| in Gamma.
std::pair<double, double> eikonal_residual(const CarlemanWeight& w,
                                           const AngularPhase& p, const Vec3& x,
                                           const DirectionCone* cone = nullptr);

// <phi'' grad phi, grad phi> + <phi'' xi, xi> for xi with |xi| = |grad phi|
// and xi . grad phi = 0 (validated); identically zero for the log weight.
double lcw_condition_residual(const CarlemanWeight& w, const Vec3& x, const Vec3& xi);

// Empirical constant of the weighted estimate
//   ||e^{phi/h} u|| + h ||e^{phi/h} grad u|| <= C h ||e^{phi/h} L_{A,q} u||
// over random smooth bump combinations u with (numerically) compact support
// inside the domain; all derivatives of u are symbolic, integrals by grid
// quadrature. Returns the maximum ratio over the samples.
double carleman_constant(const Domain& domain, const Potentials& pot,
                         const CarlemanWeight& w, double h, int samples,
                         unsigned seed, double grid_step = 0.0);

}  // namespace mso
