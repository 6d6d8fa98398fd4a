#pragma once

// Uniform Cartesian grids masked to a domain, with curved-boundary arm
// geometry for Shortley-Weller stencils, cut-cell quadrature weights, and a
// simple binary dump format.

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "mso/geometry.hpp"
#include "mso/types.hpp"

namespace mso {

struct Grid3 {
  Vec3 origin;
  double step = 0.0;
  int nx = 0, ny = 0, nz = 0;

  Vec3 point(int i, int j, int k) const {
    return origin + step * Vec3(i, j, k);
  }
  bool valid(int i, int j, int k) const {
    return i >= 0 && j >= 0 && k >= 0 && i < nx && j < ny && k < nz;
  }
};

// Interior grid nodes of a domain plus, per node and axis direction, either
// the interior neighbour or the boundary crossing of the shortened arm.
class GridMask {
 public:
  struct Arm {
    int neighbor = -1;   // unknown id, or -1 when the arm hits the boundary
    double alpha = 1.0;  // arm length as a fraction of the grid step
    Vec3 crossing;       // boundary point for cut arms
  };

  GridMask(const Domain& domain, double step);

  const Grid3& grid() const { return grid_; }
  const Domain& domain() const { return *domain_; }
  int count() const { return static_cast<int>(cells_.size()); }
  int id(int i, int j, int k) const {
    return grid_.valid(i, j, k) ? index_[(k * grid_.ny + j) * grid_.nx + i] : -1;
  }
  const Eigen::Vector3i& cell(int n) const { return cells_[n]; }
  Vec3 point(int n) const {
    const auto& c = cells_[n];
    return grid_.point(c[0], c[1], c[2]);
  }
  // arms ordered -x,+x,-y,+y,-z,+z
  const std::array<Arm, 6>& arms(int n) const { return arms_[n]; }
  double quad_weight(int n) const { return quad_[n]; }
  double total_volume() const;

 private:
  const Domain* domain_;
  Grid3 grid_;
  std::vector<int> index_;
  std::vector<Eigen::Vector3i> cells_;
  std::vector<std::array<Arm, 6>> arms_;
  std::vector<double> quad_;
};

struct GridField {
  std::shared_ptr<const GridMask> mask;
  VecXc values;  // one value per unknown

  cdouble at(int n) const { return values[n]; }
  // Trilinear sample; every corner of the containing cell must be interior.
  cdouble sample(const Vec3& x) const;
  bool sampleable(const Vec3& x) const;
};

void write_grid_field(const std::string& path, const GridField& f);
GridField read_grid_field(const std::string& path,
                          std::shared_ptr<const GridMask> mask);

}  // namespace mso
