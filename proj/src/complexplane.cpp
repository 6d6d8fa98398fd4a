#include "mso/complexplane.hpp"

#include <cmath>

namespace mso {

BoundaryFunction BoundaryFunction::from_polygon(
    const std::vector<Vec2>& polygon, const std::function<cdouble(cdouble)>& f) {
  BoundaryFunction bf;
  const int n = static_cast<int>(polygon.size());
  bf.z.resize(n);
  bf.values.resize(n);
  bf.dz.resize(n);
  bf.w.resize(n);
  for (int k = 0; k < n; ++k) {
    bf.z[k] = {polygon[k][0], polygon[k][1]};
    bf.values[k] = f(bf.z[k]);
  }
  for (int k = 0; k < n; ++k) {
    // Sixth-order central tangent increments keep the trapezoid rule
    // spectrally accurate on smooth closed curves.
    auto at = [&](int m) { return bf.z[(k + m + 3 * n) % n]; };
    bf.dz[k] = (45.0 * (at(1) - at(-1)) - 9.0 * (at(2) - at(-2)) +
                (at(3) - at(-3))) / 60.0;
    bf.w[k] = std::abs(bf.dz[k]);
  }
  return bf;
}

BoundaryFunction BoundaryFunction::from_slice(
    const SliceSpec& slice, const std::function<cdouble(cdouble)>& f) {
  return from_polygon(slice.polygon, f);
}

double BoundaryFunction::perimeter() const {
  double s = 0.0;
  for (double x : w) s += x;
  return s;
}

double BoundaryFunction::max_abs() const {
  double s = 0.0;
  for (int k = 0; k < size(); ++k) s = std::max(s, std::abs(values[k]));
  return s;
}

double BoundaryFunction::spacing() const {
  double s = 0.0;
  const int n = size();
  for (int k = 0; k < n; ++k) s = std::max(s, std::abs(z[(k + 1) % n] - z[k]));
  return s;
}

cdouble cauchy_integral(const BoundaryFunction& f, cdouble zp) {
  double dist = 1e300;
  for (const auto& zk : f.z) dist = std::min(dist, std::abs(zk - zp));
  if (dist < 2.0 * f.spacing())
    throw GeometryError("cauchy_integral: point too close to the contour; "
                        "use the jump-aware evaluator");
  cdouble num = 0.0, den = 0.0;
  for (int k = 0; k < f.size(); ++k) {
    cdouble kern = f.dz[k] / (f.z[k] - zp);
    num += f.values[k] * kern;
    den += kern;
  }
  // den is 2 pi i times the winding of the curve about zp; for interior
  // points normalize by it (the pole-dominated quadrature errors of num and
  // den cancel), for exterior points it vanishes and the plain rule is used.
  if (std::abs(den) > kPi) return num / den;
  return (num - den * f.values[0]) / (2.0 * kPi * kI);
}

namespace {

// (1/2pi i) contour integral of (f - f0)/(zeta - z0) with the removable node
// handled by a central-difference derivative.
cdouble subtracted_integral(const BoundaryFunction& f, cdouble z0, cdouble f0,
                            int skip) {
  const int n = f.size();
  cdouble s = 0.0;
  for (int k = 0; k < n; ++k) {
    if (k == skip) {
      cdouble df = (f.values[(k + 1) % n] - f.values[(k + n - 1) % n]) /
                   (f.z[(k + 1) % n] - f.z[(k + n - 1) % n]);
      s += df * f.dz[k];
    } else {
      s += (f.values[k] - f0) / (f.z[k] - z0) * f.dz[k];
    }
  }
  return s / (2.0 * kPi * kI);
}

}  // namespace

std::pair<cdouble, cdouble> plemelj_jump(const BoundaryFunction& f, int k) {
  cdouble sm = subtracted_integral(f, f.z[k], f.values[k], k);
  return {sm + f.values[k], sm};
}

cdouble contour_moment(const BoundaryFunction& f,
                       const std::function<cdouble(cdouble)>& g) {
  cdouble s = 0.0;
  for (int k = 0; k < f.size(); ++k) s += g(f.z[k]) * f.values[k] * f.dz[k];
  return s;
}

int winding_number(const BoundaryFunction& f) {
  const int n = f.size();
  double total = 0.0;
  for (int k = 0; k < n; ++k) {
    cdouble a = f.values[k], b = f.values[(k + 1) % n];
    if (std::abs(a) < 1e-12 || std::abs(b) < 1e-12)
      throw GeometryError("winding_number: |f| vanishes at a node");
    total += std::arg(b / a);
  }
  double turns = total / (2.0 * kPi);
  if (std::abs(turns - std::round(turns)) > 0.1)
    throw GeometryError("winding_number: argument variation not close to an "
                        "integer (under-resolved data)");
  return static_cast<int>(std::lround(turns));
}

std::vector<cdouble> log_branch(const BoundaryFunction& f, cdouble* closure) {
  const int n = f.size();
  std::vector<cdouble> out(n);
  out[0] = std::log(f.values[0]);
  cdouble total = 0.0;
  for (int k = 0; k < n; ++k) {
    cdouble inc = std::log(f.values[(k + 1) % n] / f.values[k]);
    total += inc;
    if (k + 1 < n) out[k + 1] = out[k] + inc;
  }
  if (closure) *closure = total;
  return out;
}

HolomorphicExtension holomorphic_extend(const BoundaryFunction& f,
                                        const SliceSpec& slice,
                                        double moment_tol, int moment_degree) {
  // Moment preconditions against scaled monomials.
  cdouble c = 0.0;
  for (const auto& zk : f.z) c += zk;
  c /= static_cast<double>(f.size());
  double rad = 0.0;
  for (const auto& zk : f.z) rad = std::max(rad, std::abs(zk - c));
  double scale = f.max_abs() * f.perimeter();
  for (int k = 0; k <= moment_degree; ++k) {
    cdouble m = contour_moment(f, [&](cdouble z) {
      return std::pow((z - c) / rad, static_cast<double>(k));
    });
    if (std::abs(m) > moment_tol * scale)
      throw GeometryError(
          "holomorphic_extend: data has non-holomorphic content (moment " +
          std::to_string(k) + " = " + std::to_string(std::abs(m)) + ")");
  }

  HolomorphicExtension ext;
  ext.winding = winding_number(f);
  ext.interior = MatXc::Zero(slice.nt, slice.nr);
  for (int i = 0; i < slice.nt; ++i)
    for (int j = 0; j < slice.nr; ++j) {
      if (slice.cell_fraction(i, j) < 0.5) continue;
      Vec2 p = slice.cell_center(i, j);
      cdouble zp(p[0], p[1]);
      cdouble num = 0.0, den = 0.0;
      for (int k = 0; k < f.size(); ++k) {
        cdouble kern = f.dz[k] / (f.z[k] - zp);
        num += f.values[k] * kern;
        den += kern;
      }
      // Normalized interior evaluator: robust arbitrarily close to the curve.
      ext.interior(i, j) = std::abs(den) > kPi ? num / den : cdouble(0.0);
    }

  for (int k = 0; k < f.size(); ++k) {
    auto [in, out] = plemelj_jump(f, k);
    ext.boundary_match_error =
        std::max(ext.boundary_match_error, std::abs(in - f.values[k]));
  }

  // Exterior probe ring a few spacings outside the curve.
  const int n = f.size();
  for (int k = 0; k < n; ++k) {
    cdouble t = f.dz[k] / std::abs(f.dz[k]);
    cdouble out_n = -kI * t;  // outward normal of a positively oriented curve
    cdouble zp = f.z[k] + 3.0 * f.spacing() * out_n;
    cdouble s = 0.0;
    for (int m = 0; m < n; ++m) s += f.values[m] / (f.z[m] - zp) * f.dz[m];
    ext.exterior_norm =
        std::max(ext.exterior_norm, std::abs(s / (2.0 * kPi * kI)));
  }
  return ext;
}

}  // namespace mso
