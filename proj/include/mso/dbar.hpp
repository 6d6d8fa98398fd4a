#pragma once

// Solid Cauchy transform on half-plane slice grids: the area-integral inverse
// of d/dzbar, discretized with exact per-cell kernel integrals and evaluated
// as a fast convolution.

#include "mso/geometry.hpp"
#include "mso/types.hpp"

namespace mso {

// T f(z) = -(1/pi) int_{slice} f(zeta) / (zeta - z) dA(zeta), evaluated at
// every cell center of the slice grid. f holds cell-center samples; cells are
// weighted by their inside-area fraction unless whole_grid is set, in which
// case the integral runs over the full rectangle (useful when f extends
// smoothly past the region and a kink-free particular solution is wanted).
MatXc cauchy_transform(const SliceSpec& slice, const MatXc& f,
                       bool whole_grid = false);

// Discrete d/dzbar = (d/dt + i d/dr)/2 on the slice grid (central differences,
// one-sided at the grid edges).
MatXc dbar_apply(const SliceSpec& slice, const MatXc& u);

// Exact integral of 1/(w - z) over an axis-aligned square cell of side h
// centered at the origin (z may lie inside the cell).
cdouble cell_kernel_integral(cdouble z, double h);

}  // namespace mso
