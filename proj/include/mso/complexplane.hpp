#pragma once

// Boundary Cauchy integrals on slice polygons: one-sided limits, winding
// numbers, moment tests and holomorphic extension of boundary data.

#include <functional>
#include <vector>

#include "mso/geometry.hpp"
#include "mso/types.hpp"

namespace mso {

struct BoundaryFunction {
  std::vector<cdouble> z;   // polygon nodes, positively oriented closed curve
  VecXc values;             // f at the nodes
  std::vector<cdouble> dz;  // trapezoidal tangent increments (z_{k+1}-z_{k-1})/2
  std::vector<double> w;    // arclength weights |dz|

  static BoundaryFunction from_polygon(
      const std::vector<Vec2>& polygon,
      const std::function<cdouble(cdouble)>& f);
  static BoundaryFunction from_slice(const SliceSpec& slice,
                                     const std::function<cdouble(cdouble)>& f);

  int size() const { return static_cast<int>(z.size()); }
  double perimeter() const;
  double max_abs() const;
  double spacing() const;  // max node spacing
};

// (1/2pi i) contour integral of f(zeta)/(zeta - z); z at least 2 node
// spacings away from the curve.
cdouble cauchy_integral(const BoundaryFunction& f, cdouble z);

// One-sided limits (interior, exterior) at polygon node k via singularity
// subtraction.
std::pair<cdouble, cdouble> plemelj_jump(const BoundaryFunction& f, int k);

// Contour moment of f against a holomorphic test function g.
cdouble contour_moment(const BoundaryFunction& f,
                       const std::function<cdouble(cdouble)>& g);

// (1/2pi) total argument variation of f along the curve, rounded.
int winding_number(const BoundaryFunction& f);

// Continuous branch of log f along the polygon; returns per-node values plus
// the closure defect (end minus start minus 2 pi i winding is ~0; the raw
// closure equals 2 pi i * winding).
std::vector<cdouble> log_branch(const BoundaryFunction& f, cdouble* closure);

struct HolomorphicExtension {
  MatXc interior;               // on the slice grid; zero outside the region
  double boundary_match_error = 0.0;
  double exterior_norm = 0.0;
  int winding = 0;
};

// Extends boundary data into the slice by the Cauchy integral after checking
// that moments against monomials of degree <= moment_degree vanish.
HolomorphicExtension holomorphic_extend(const BoundaryFunction& f,
                                        const SliceSpec& slice,
                                        double moment_tol = 1e-6,
                                        int moment_degree = 12);

}  // namespace mso
