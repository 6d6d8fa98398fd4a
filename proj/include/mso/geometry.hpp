#pragma once

// Star-shaped domains with analytic radial profiles, boundary sampling on a
// subdivided icosahedron, front/back boundary splits, admissible direction
// cones and the cylindrical slicing into half-planes.

#include <array>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mso/expr.hpp"
#include "mso/types.hpp"

namespace mso {

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// rho(d) > 0 on S^2 plus its gradient with respect to the direction (a full
// R^3 gradient; only the tangential part matters and callers project).
struct RadialProfile {
  std::string name;
  std::function<double(const Vec3&)> rho;
  std::function<Vec3(const Vec3&)> drho;
  // Smooth global defining function w(x) for the boundary as an expression
  // tree (w = 0 on the boundary, w < 0 inside, grad w parallel to the outward
  // normal there); parametrized by the domain center.
  std::function<expr::NodePtr(const Vec3& center)> defining;

  static RadialProfile ball(double radius);
  static RadialProfile ellipsoid(double a, double b, double c);
  // Gaussian-in-angle bump of height `amplitude` about direction `axis`.
  static RadialProfile bumped_ball(double radius, double amplitude,
                                   const Vec3& axis = Vec3::UnitX(),
                                   double width = 0.35);
};

struct BoundaryNode {
  Vec3 pos;
  Vec3 normal;      // outward unit normal
  double dsigma;    // surface quadrature weight
  Vec3 dir;         // unit direction from the center
};

struct Box3 {
  Vec3 lo, hi;
  bool contains(const Vec3& x) const {
    return (x.array() >= lo.array()).all() && (x.array() <= hi.array()).all();
  }
};

class Domain {
 public:
  Domain(RadialProfile profile, const Vec3& center, int subdivision_level = 4);

  // Signed "radial distance" |x-c| - rho(dir); negative inside.
  double delta(const Vec3& x) const;
  Vec3 grad_delta(const Vec3& x) const;
  bool inside(const Vec3& x) const { return delta(x) < 0.0; }

  const std::vector<BoundaryNode>& boundary() const { return nodes_; }
  const std::vector<std::array<int, 3>>& faces() const { return faces_; }
  const Box3& bounding_box() const { return box_; }
  const Vec3& center() const { return center_; }
  const RadialProfile& profile() const { return profile_; }
  double surface_area() const;
  double diameter() const;

  // Boundary point in direction d from the center.
  Vec3 boundary_point(const Vec3& d) const;

  // Barycentric interpolation of per-node values at an arbitrary boundary
  // point (identified by its direction from the center).
  struct InterpWeights {
    std::array<int, 3> node;
    std::array<double, 3> w;
  };
  InterpWeights interp_weights(const Vec3& x) const;
  cdouble interpolate_boundary(const VecXc& nodal, const Vec3& x) const;

 private:
  RadialProfile profile_;
  Vec3 center_;
  std::vector<BoundaryNode> nodes_;
  std::vector<std::array<int, 3>> faces_;
  std::vector<std::vector<int>> vert_faces_;
  Box3 box_;
};

Domain build_domain(const std::string& profile_spec, int subdivision_level = 4);

struct ObservationPoint {
  Vec3 x0;
  double epsilon = 0.05;
};

// Distance from x0 to the convex hull of the boundary nodes, with the hull
// point realizing it (Frank-Wolfe on the support function).
double convex_hull_distance(const Domain& domain, const Vec3& x0, Vec3* closest = nullptr);

void validate_observation(const Domain& domain, const ObservationPoint& obs);

enum class Side { Front, Back };

struct FrontBackSplit {
  std::vector<Side> side;          // per boundary node
  std::vector<bool> in_f_eps;      // node in F_eps
  double area_front = 0.0, area_back = 0.0, area_f_eps = 0.0;
};

FrontBackSplit front_back_split(const Domain& domain, const ObservationPoint& obs);

struct DirectionCone {
  Vec3 axis;            // cone axis (unit), pointing from x0 towards the domain
  double cos_half;      // cos of the Gamma half-angle
  double r0;            // closed domain contained in B(x0, r0)
  Vec3 hyperplane_normal;
  double hyperplane_offset;   // H = { x : n.x = offset }, domain side n.x > offset
  Vec3 omega0;          // admissible reference direction, perpendicular to axis
  double gamma0_margin; // angular half-width of the admissible band about the equator

  bool in_gamma(const Vec3& theta) const {
    return theta.dot(axis) > cos_half;
  }
  bool in_gamma_or_check(const Vec3& theta) const {
    return std::abs(theta.dot(axis)) > cos_half;
  }
  bool admissible(const Vec3& omega) const {
    return std::abs(omega.dot(axis)) < std::sin(gamma0_margin);
  }
};

DirectionCone build_direction_cone(const Domain& domain, const ObservationPoint& obs);

// Rigid motion y = R (x - x0): takes x0 to the origin and omega to e1.
struct Frame {
  Mat3 rot = Mat3::Identity();
  Vec3 x0 = Vec3::Zero();
  Vec3 to_normalized(const Vec3& x) const { return rot * (x - x0); }
  Vec3 to_scenario(const Vec3& y) const { return rot.transpose() * y + x0; }
};

Frame normalize_frame(const ObservationPoint& obs, const Vec3& omega,
                      const DirectionCone* cone = nullptr);

// Half-plane slice Omega_theta in (t, r) coordinates of the normalized frame.
struct SliceSpec {
  Vec2 theta;                  // unit vector on S^1 (the S^{n-2} for n = 3)
  Frame frame;
  std::vector<Vec2> polygon;   // positively oriented boundary curve, r > 0
  // uniform grid covering the slice (cell centers at origin + (i+1/2, j+1/2) h)
  Vec2 grid_origin;
  double grid_step = 0.0;
  int nt = 0, nr = 0;
  MatX cell_fraction;          // nt x nr, inside-area fraction per cell

  Vec3 to_3d(const Vec2& tr) const {
    Vec3 y(tr[0], tr[1] * theta[0], tr[1] * theta[1]);
    return frame.to_scenario(y);
  }
  Vec2 cell_center(int i, int j) const {
    return grid_origin + Vec2((i + 0.5) * grid_step, (j + 0.5) * grid_step);
  }
  double polygon_area() const;
  double polygon_perimeter() const;
  // Integral of f over the slice region (cut-cell quadrature).
  double integrate(const std::function<double(const Vec2&)>& f) const;
  cdouble integrate_complex(const std::function<cdouble(const Vec2&)>& f) const;
};

SliceSpec slice(const Domain& domain, const Frame& frame, const Vec2& theta,
                double resolution, int polygon_nodes = 512, int grid_cells = 128);

// Whether the half-plane at this theta meets the domain at all.
bool half_plane_hits(const Domain& domain, const Frame& frame, const Vec2& theta);

// Coarea check helper: sum over theta of (slice first moment in r) d(theta).
double slice_volume_estimate(const Domain& domain, const Frame& frame,
                             int n_theta, double resolution);

}  // namespace mso
