#pragma once

// Plane-integral tomography. Scalar fields are recovered from plane-integral
// sinograms by a two-stage filtered back-projection (planes containing a
// direction omega give the 2D Radon transform of the omega projection; omega
// sweeping a circle gives per-slab parallel-beam data). The curl of a vector
// field is recovered from longitudinal line integrals collected over a tilted
// band of directions, assembled in Fourier space.

#include <functional>
#include <vector>

#include "mso/types.hpp"

namespace mso {

struct PlaneSinogram {
  Vec3 center;
  Mat3 axes;       // rows u, v, a; omega(beta) = cos(beta) u + sin(beta) v
  int n_beta = 0;  // betas uniform over [0, pi)
  int n_theta = 0; // plane normals within omega-perp, uniform over [0, pi)
  int n_s = 0;     // offsets uniform over [-radius, radius]
  double radius = 0.0;
  std::vector<double> data;  // [beta][theta][s]

  double& at(int b, int t, int s) {
    return data[(static_cast<size_t>(b) * n_theta + t) * n_s + s];
  }
  double at(int b, int t, int s) const {
    return data[(static_cast<size_t>(b) * n_theta + t) * n_s + s];
  }
  double s_value(int s) const { return -radius + (2.0 * radius * s) / (n_s - 1); }
};

// Direct-quadrature sinogram of f over planes (verification provenance).
PlaneSinogram make_plane_sinogram(const std::function<double(const Vec3&)>& f,
                                  const Vec3& center, const Mat3& axes,
                                  int n_beta, int n_theta, int n_s,
                                  double radius, int quad_pts = 96);

// Ram-Lak with cosine taper; sino rows are angles, columns offsets over
// [-radius, radius]. angles empty means uniform over [0, pi). Returns an n x n
// image over [-radius, radius]^2, pixel (i, j) at coordinates
// (-radius + 2 radius i/(n-1), same in j).
MatX fbp2d(const MatX& sino, double radius, int n,
           const std::vector<double>& angles = {});

struct ScalarField3 {
  Vec3 center;
  Mat3 axes;
  double radius = 0.0;
  int n = 0;
  std::vector<double> values;  // [iu][iv][ia]

  double& at(int i, int j, int k) {
    return values[(static_cast<size_t>(i) * n + j) * n + k];
  }
  double at(int i, int j, int k) const {
    return values[(static_cast<size_t>(i) * n + j) * n + k];
  }
  double coord(int i) const { return -radius + (2.0 * radius * i) / (n - 1); }
  double sample(const Vec3& x) const;  // trilinear in scenario coordinates
};

// Two-stage inversion of a scalar plane sinogram on an n^3 grid.
// Throws std::runtime_error if n_beta < 16.
ScalarField3 radon_invert_scalar(const PlaneSinogram& sino, int n);

struct RaySinogram {
  Vec3 center;
  Mat3 axes;                  // rows u, v, a
  int n_beta = 0;             // over [0, pi)
  std::vector<double> tilts;  // omega = cos(t)(cos b u + sin b v) + sin(t) a
  int ny = 0;                 // y grid over [-radius, radius]^2
  double radius = 0.0;
  // [beta][tilt][iy1][iy2]; line x = center + y1 m + y2 p + t omega with
  // p = normalized(a - (a.omega) omega), m = p x omega.
  std::vector<double> data;

  double& at(int b, int t, int i, int j) {
    return data[((static_cast<size_t>(b) * tilts.size() + t) * ny + i) * ny + j];
  }
  double at(int b, int t, int i, int j) const {
    return data[((static_cast<size_t>(b) * tilts.size() + t) * ny + i) * ny + j];
  }
  Vec3 omega(int b, int t) const;
  void basis(int b, int t, Vec3* m, Vec3* p) const;
};

// Longitudinal line integrals of a vector field (verification provenance).
RaySinogram make_ray_sinogram(const std::function<Vec3(const Vec3&)>& field,
                              const Vec3& center, const Mat3& axes, int n_beta,
                              const std::vector<double>& tilts, int ny,
                              double radius, int quad_pts = 96);

struct VectorField3 {
  ScalarField3 comp[3];  // scenario-frame components
  Vec3 sample(const Vec3& x) const {
    return Vec3(comp[0].sample(x), comp[1].sample(x), comp[2].sample(x));
  }
};

// curl of the sampled field from its longitudinal ray transform, via a
// Fourier-space least-squares assembly (the data determine the solenoidal
// part, which carries the full curl). Throws if n_beta < 16.
VectorField3 radon_invert_curl(const RaySinogram& sino, int n);

}  // namespace mso
