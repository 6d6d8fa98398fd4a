#include "mso/grid.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

namespace mso {

GridMask::GridMask(const Domain& domain, double step) : domain_(&domain) {
  if (step <= 0.0) throw GeometryError("grid step must be positive");
  const Box3& box = domain.bounding_box();
  if (domain.diameter() / step < 8.0)
    throw GeometryError("grid too coarse: fewer than 8 cells across the domain");
  grid_.step = step;
  grid_.origin = box.lo - Vec3::Constant(step);
  Vec3 ext = box.hi - grid_.origin;
  grid_.nx = static_cast<int>(std::ceil(ext[0] / step)) + 2;
  grid_.ny = static_cast<int>(std::ceil(ext[1] / step)) + 2;
  grid_.nz = static_cast<int>(std::ceil(ext[2] / step)) + 2;

  index_.assign(static_cast<size_t>(grid_.nx) * grid_.ny * grid_.nz, -1);
  for (int k = 0; k < grid_.nz; ++k)
    for (int j = 0; j < grid_.ny; ++j)
      for (int i = 0; i < grid_.nx; ++i)
        if (domain.inside(grid_.point(i, j, k))) {
          index_[(static_cast<size_t>(k) * grid_.ny + j) * grid_.nx + i] =
              static_cast<int>(cells_.size());
          cells_.emplace_back(i, j, k);
        }

  static const int dir[6][3] = {{-1, 0, 0}, {1, 0, 0}, {0, -1, 0},
                                {0, 1, 0},  {0, 0, -1}, {0, 0, 1}};
  arms_.resize(cells_.size());
  quad_.resize(cells_.size());
  for (size_t n = 0; n < cells_.size(); ++n) {
    const auto& c = cells_[n];
    Vec3 p = grid_.point(c[0], c[1], c[2]);
    for (int d = 0; d < 6; ++d) {
      Arm& a = arms_[n][d];
      int ni = c[0] + dir[d][0], nj = c[1] + dir[d][1], nk = c[2] + dir[d][2];
      a.neighbor = id(ni, nj, nk);
      if (a.neighbor >= 0) continue;
      // Bisect the boundary crossing along the shortened arm.
      Vec3 e(dir[d][0], dir[d][1], dir[d][2]);
      double lo = 0.0, hi = 1.0;
      for (int it = 0; it < 60; ++it) {
        double mid = 0.5 * (lo + hi);
        (domain.delta(p + mid * step * e) < 0.0 ? lo : hi) = mid;
      }
      a.alpha = std::max(0.5 * (lo + hi), 1e-3);
      a.crossing = p + a.alpha * step * e;
    }
    // Cut-cell quadrature weight by 3x3x3 subsampling of the dual cell.
    bool clipped = false;
    for (int d = 0; d < 6; ++d)
      if (arms_[n][d].neighbor < 0) clipped = true;
    if (!clipped) {
      quad_[n] = step * step * step;
    } else {
      int in = 0;
      for (int a = -1; a <= 1; ++a)
        for (int b = -1; b <= 1; ++b)
          for (int cc = -1; cc <= 1; ++cc)
            if (domain.inside(p + (step / 3.0) * Vec3(a, b, cc))) ++in;
      quad_[n] = step * step * step * in / 27.0;
    }
  }
}

double GridMask::total_volume() const {
  double v = 0.0;
  for (double w : quad_) v += w;
  return v;
}

bool GridField::sampleable(const Vec3& x) const {
  const Grid3& g = mask->grid();
  Vec3 t = (x - g.origin) / g.step;
  int i = static_cast<int>(std::floor(t[0]));
  int j = static_cast<int>(std::floor(t[1]));
  int k = static_cast<int>(std::floor(t[2]));
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        if (mask->id(i + a, j + b, k + c) < 0) return false;
  return true;
}

cdouble GridField::sample(const Vec3& x) const {
  const Grid3& g = mask->grid();
  Vec3 t = (x - g.origin) / g.step;
  int i = static_cast<int>(std::floor(t[0]));
  int j = static_cast<int>(std::floor(t[1]));
  int k = static_cast<int>(std::floor(t[2]));
  Vec3 f = t - Vec3(i, j, k);
  cdouble s = 0.0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c) {
        int n = mask->id(i + a, j + b, k + c);
        if (n < 0)
          throw GeometryError("grid sample touches a non-interior node");
        double w = (a ? f[0] : 1.0 - f[0]) * (b ? f[1] : 1.0 - f[1]) *
                   (c ? f[2] : 1.0 - f[2]);
        s += w * values[n];
      }
  return s;
}

namespace {
constexpr char kMagic[8] = {'M', 'S', 'G', 'R', 'I', 'D', '0', '1'};
}

void write_grid_field(const std::string& path, const GridField& f) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  const Grid3& g = f.mask->grid();
  char header[64] = {};
  std::memcpy(header, kMagic, 8);
  int32_t dims[3] = {g.nx, g.ny, g.nz};
  std::memcpy(header + 8, dims, 12);
  double geo[4] = {g.origin[0], g.origin[1], g.origin[2], g.step};
  std::memcpy(header + 20, geo, 32);
  int64_t count = f.mask->count();
  std::memcpy(header + 52, &count, 8);
  out.write(header, 64);
  for (int n = 0; n < f.mask->count(); ++n) {
    const auto& c = f.mask->cell(n);
    int32_t ijk[3] = {c[0], c[1], c[2]};
    double v[2] = {f.values[n].real(), f.values[n].imag()};
    out.write(reinterpret_cast<const char*>(ijk), 12);
    out.write(reinterpret_cast<const char*>(v), 16);
  }
}

GridField read_grid_field(const std::string& path,
                          std::shared_ptr<const GridMask> mask) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  char header[64];
  in.read(header, 64);
  if (!in || std::memcmp(header, kMagic, 8) != 0)
    throw std::runtime_error(path + ": bad grid file header");
  int64_t count = 0;
  std::memcpy(&count, header + 52, 8);
  if (count != mask->count())
    throw std::runtime_error(path + ": grid file does not match the mask");
  GridField f;
  f.mask = std::move(mask);
  f.values.resize(count);
  for (int64_t n = 0; n < count; ++n) {
    int32_t ijk[3];
    double v[2];
    in.read(reinterpret_cast<char*>(ijk), 12);
    in.read(reinterpret_cast<char*>(v), 16);
    f.values[n] = {v[0], v[1]};
  }
  if (!in) throw std::runtime_error(path + ": truncated grid file");
  return f;
}

}  // namespace mso
