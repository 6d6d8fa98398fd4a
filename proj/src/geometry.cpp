#include "mso/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace mso {

namespace {

Vec3 any_perpendicular(const Vec3& u) {
  int k = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(u[i]) < std::abs(u[k])) k = i;
  Vec3 e = Vec3::Zero();
  e[k] = 1.0;
  return (e - e.dot(u) * u).normalized();
}

// Spherical triangle area (unit vectors a, b, c).
double spherical_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  double num = std::abs(a.dot(b.cross(c)));
  double den = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
  return 2.0 * std::atan2(num, den);
}

struct IcoSphere {
  std::vector<Vec3> verts;
  std::vector<std::array<int, 3>> faces;
};

IcoSphere make_icosphere(int level) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> v = {
      {-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0},
      {0, -1, t}, {0, 1, t}, {0, -1, -t}, {0, 1, -t},
      {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (auto& x : v) x.normalize();
  std::vector<std::array<int, 3>> f = {
      {0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11},
      {1, 5, 9}, {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8}, {3, 8, 9},
      {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1}};
  for (int l = 0; l < level; ++l) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      int idx = static_cast<int>(v.size());
      v.push_back(((v[a] + v[b]) * 0.5).normalized());
      midpoint.emplace(key, idx);
      return idx;
    };
    std::vector<std::array<int, 3>> nf;
    nf.reserve(f.size() * 4);
    for (const auto& tri : f) {
      int ab = mid(tri[0], tri[1]), bc = mid(tri[1], tri[2]), ca = mid(tri[2], tri[0]);
      nf.push_back({tri[0], ab, ca});
      nf.push_back({tri[1], bc, ab});
      nf.push_back({tri[2], ca, bc});
      nf.push_back({ab, bc, ca});
    }
    f = std::move(nf);
  }
  return {std::move(v), std::move(f)};
}

double half_plane_depth(const Domain& domain, const Frame& frame,
                        const Vec2& theta, Vec2* argmin);

// |x - c|^2 as an expression tree.
expr::NodePtr r2_node(const Vec3& c) {
  expr::NodePtr s = expr::constant(0.0);
  for (int i = 0; i < 3; ++i) {
    auto d = expr::sub(expr::variable(i), expr::constant(c[i]));
    s = expr::add(s, expr::mul(d, d));
  }
  return s;
}

expr::NodePtr fn_node(expr::Op op, expr::NodePtr a) {
  auto n = std::make_shared<expr::Node>();
  n->op = op;
  n->a = std::move(a);
  return n;
}

}  // namespace

RadialProfile RadialProfile::ball(double radius) {
  if (radius <= 0.0) throw GeometryError("ball radius must be positive");
  RadialProfile p;
  p.name = "ball";
  p.rho = [radius](const Vec3&) { return radius; };
  p.drho = [](const Vec3&) { return Vec3::Zero(); };
  p.defining = [radius](const Vec3& c) {
    return expr::div(expr::sub(r2_node(c), expr::constant(radius * radius)),
                     expr::constant(2.0 * radius));
  };
  return p;
}

RadialProfile RadialProfile::ellipsoid(double a, double b, double c) {
  if (a <= 0.0 || b <= 0.0 || c <= 0.0)
    throw GeometryError("ellipsoid semi-axes must be positive");
  RadialProfile p;
  p.name = "ellipsoid";
  Vec3 inv2(1.0 / (a * a), 1.0 / (b * b), 1.0 / (c * c));
  p.rho = [inv2](const Vec3& d) {
    return 1.0 / std::sqrt(d.array().square().matrix().dot(inv2));
  };
  p.drho = [inv2](const Vec3& d) {
    double s = d.array().square().matrix().dot(inv2);
    Vec3 ds = 2.0 * d.cwiseProduct(inv2);
    return Vec3(-0.5 * std::pow(s, -1.5) * ds);
  };
  double scale = 0.5 * std::min({a, b, c});
  p.defining = [inv2, scale](const Vec3& c) {
    expr::NodePtr s = expr::constant(-1.0);
    for (int i = 0; i < 3; ++i) {
      auto d = expr::sub(expr::variable(i), expr::constant(c[i]));
      s = expr::add(s, expr::mul(expr::constant(inv2[i]), expr::mul(d, d)));
    }
    return expr::mul(expr::constant(scale), s);
  };
  return p;
}

RadialProfile RadialProfile::bumped_ball(double radius, double amplitude,
                                         const Vec3& axis, double width) {
  if (radius <= 0.0) throw GeometryError("bumped_ball radius must be positive");
  if (std::abs(amplitude) >= radius / 4.0)
    throw GeometryError("bumped_ball: bump amplitude must stay below radius/4 "
                        "(non-star-shaped parameter range)");
  Vec3 u = axis.normalized();
  double w2 = width * width;
  RadialProfile p;
  p.name = "bumped_ball";
  p.rho = [=](const Vec3& d) {
    double s = 1.0 - d.dot(u);
    return radius + amplitude * std::exp(-s * s / w2);
  };
  p.drho = [=](const Vec3& d) {
    double s = 1.0 - d.dot(u);
    return Vec3(amplitude * std::exp(-s * s / w2) * (2.0 * s / w2) * u);
  };
  p.defining = [=](const Vec3& c) {
    // |y|^2 - rho(y/|y|)^2 with the bump argument written rationally:
    // (|y| - y.u)^2 / (w^2 |y|^2) = (1 - d.u)^2 / w^2 exactly on any ray.
    auto r2 = r2_node(c);
    expr::NodePtr ydotu = expr::constant(0.0);
    for (int i = 0; i < 3; ++i)
      ydotu = expr::add(ydotu,
                        expr::mul(expr::constant(u[i]),
                                  expr::sub(expr::variable(i), expr::constant(c[i]))));
    auto s = expr::sub(fn_node(expr::Op::Sqrt, r2), ydotu);
    auto arg = expr::div(expr::mul(s, s), expr::mul(expr::constant(w2), r2));
    auto rho = expr::add(expr::constant(radius),
                         expr::mul(expr::constant(amplitude),
                                   fn_node(expr::Op::Exp,
                                           expr::sub(expr::constant(0.0), arg))));
    return expr::div(expr::sub(r2, expr::mul(rho, rho)),
                     expr::constant(2.0 * radius));
  };
  return p;
}

Domain::Domain(RadialProfile profile, const Vec3& center, int subdivision_level)
    : profile_(std::move(profile)), center_(center) {
  IcoSphere ico = make_icosphere(subdivision_level);
  faces_ = ico.faces;

  std::vector<double> sphere_weight(ico.verts.size(), 0.0);
  for (const auto& f : ico.faces) {
    double area = spherical_area(ico.verts[f[0]], ico.verts[f[1]], ico.verts[f[2]]);
    for (int k : f) sphere_weight[k] += area / 3.0;
  }

  nodes_.reserve(ico.verts.size());
  Vec3 lo = center, hi = center;
  for (size_t i = 0; i < ico.verts.size(); ++i) {
    const Vec3& d = ico.verts[i];
    double r = profile_.rho(d);
    if (!(r > 0.0)) throw GeometryError("radial profile not positive");
    BoundaryNode n;
    n.dir = d;
    n.pos = center_ + r * d;
    n.normal = grad_delta(n.pos).normalized();
    double cosg = d.dot(n.normal);
    if (cosg <= 0.0)
      throw GeometryError("profile is not star-shaped: (x-c).nu <= 0 on the boundary");
    n.dsigma = sphere_weight[i] * r * r / cosg;
    lo = lo.cwiseMin(n.pos);
    hi = hi.cwiseMax(n.pos);
    nodes_.push_back(n);
  }
  double pad = 1e-6 * (hi - lo).norm();
  box_ = {lo.array() - pad, hi.array() + pad};

  vert_faces_.resize(nodes_.size());
  for (size_t f = 0; f < faces_.size(); ++f)
    for (int k : faces_[f]) vert_faces_[k].push_back(static_cast<int>(f));
}

double Domain::delta(const Vec3& x) const {
  Vec3 y = x - center_;
  double r = y.norm();
  if (r < 1e-14) return -profile_.rho(Vec3::UnitX());
  return r - profile_.rho(y / r);
}

Vec3 Domain::grad_delta(const Vec3& x) const {
  Vec3 y = x - center_;
  double r = y.norm();
  Vec3 d = y / r;
  Vec3 g = profile_.drho(d);
  // Tangential projection of drho, pushed through the direction Jacobian.
  Vec3 gt = (g - d * d.dot(g)) / r;
  return d - gt;
}

double Domain::surface_area() const {
  double s = 0.0;
  for (const auto& n : nodes_) s += n.dsigma;
  return s;
}

double Domain::diameter() const {
  return (box_.hi - box_.lo).norm();
}

Vec3 Domain::boundary_point(const Vec3& d) const {
  Vec3 u = d.normalized();
  return center_ + profile_.rho(u) * u;
}

Domain::InterpWeights Domain::interp_weights(const Vec3& x) const {
  Vec3 d = (x - center_).normalized();

  auto bary = [&](int f, Vec3* b) {
    const auto& tri = faces_[f];
    Mat3 m;
    m.col(0) = nodes_[tri[0]].dir;
    m.col(1) = nodes_[tri[1]].dir;
    m.col(2) = nodes_[tri[2]].dir;
    *b = m.partialPivLu().solve(d);
    double s = b->sum();
    if (std::abs(s) < 1e-12) return -1e30;
    *b /= s;
    return b->minCoeff();
  };

  // The containing face is (almost always) adjacent to the nearest vertex.
  int nearest = 0;
  double best_dot = -2.0;
  for (size_t i = 0; i < nodes_.size(); ++i) {
    double v = d.dot(nodes_[i].dir);
    if (v > best_dot) {
      best_dot = v;
      nearest = static_cast<int>(i);
    }
  }
  int best_f = -1;
  double best_min = -1e30;
  Vec3 best_b = Vec3::Zero();
  for (int f : vert_faces_[nearest]) {
    Vec3 b;
    double mn = bary(f, &b);
    if (mn > best_min) {
      best_min = mn;
      best_f = f;
      best_b = b;
    }
  }
  if (best_min < -1e-9) {
    for (size_t f = 0; f < faces_.size(); ++f) {
      Vec3 b;
      double mn = bary(static_cast<int>(f), &b);
      if (mn > best_min) {
        best_min = mn;
        best_f = static_cast<int>(f);
        best_b = b;
      }
      if (best_min >= -1e-12) break;
    }
  }
  if (best_f < 0) throw GeometryError("boundary interpolation failed");
  const auto& tri = faces_[best_f];
  return {{tri[0], tri[1], tri[2]}, {best_b[0], best_b[1], best_b[2]}};
}

cdouble Domain::interpolate_boundary(const VecXc& nodal, const Vec3& x) const {
  InterpWeights iw = interp_weights(x);
  return iw.w[0] * nodal[iw.node[0]] + iw.w[1] * nodal[iw.node[1]] +
         iw.w[2] * nodal[iw.node[2]];
}

Domain build_domain(const std::string& spec, int subdivision_level) {
  std::string name = spec.substr(0, spec.find('('));
  std::vector<double> args;
  auto open = spec.find('(');
  if (open != std::string::npos) {
    auto close = spec.rfind(')');
    if (close == std::string::npos || close < open)
      throw GeometryError("malformed profile spec: " + spec);
    std::stringstream ss(spec.substr(open + 1, close - open - 1));
    std::string tok;
    while (std::getline(ss, tok, ',')) args.push_back(std::stod(tok));
  }
  if (name == "ball") {
    if (args.size() != 1) throw GeometryError("ball(radius) expects 1 parameter");
    return Domain(RadialProfile::ball(args[0]), Vec3::Zero(), subdivision_level);
  }
  if (name == "ellipsoid") {
    if (args.size() != 3) throw GeometryError("ellipsoid(a,b,c) expects 3 parameters");
    return Domain(RadialProfile::ellipsoid(args[0], args[1], args[2]), Vec3::Zero(),
                  subdivision_level);
  }
  if (name == "bumped_ball") {
    if (args.size() != 2)
      throw GeometryError("bumped_ball(radius,amplitude) expects 2 parameters");
    return Domain(RadialProfile::bumped_ball(args[0], args[1]), Vec3::Zero(),
                  subdivision_level);
  }
  throw GeometryError("unknown profile: " + name);
}

double convex_hull_distance(const Domain& domain, const Vec3& x0, Vec3* closest) {
  const auto& nodes = domain.boundary();
  Vec3 y = nodes[0].pos;
  for (const auto& n : nodes)
    if ((n.pos - x0).squaredNorm() < (y - x0).squaredNorm()) y = n.pos;
  for (int iter = 0; iter < 300; ++iter) {
    Vec3 g = y - x0;
    const BoundaryNode* s = &nodes[0];
    double best = g.dot(nodes[0].pos);
    for (const auto& n : nodes) {
      double v = g.dot(n.pos);
      if (v < best) {
        best = v;
        s = &n;
      }
    }
    Vec3 dxy = s->pos - y;
    double denom = dxy.squaredNorm();
    if (denom < 1e-30) break;
    double gamma = std::clamp(-g.dot(dxy) / denom, 0.0, 1.0);
    if (gamma <= 0.0) break;
    y += gamma * dxy;
  }
  if (closest) *closest = y;
  return (y - x0).norm();
}

void validate_observation(const Domain& domain, const ObservationPoint& obs) {
  double d = convex_hull_distance(domain, obs.x0);
  if (d <= 1e-9 * domain.diameter())
    throw GeometryError("x0_in_convex_hull: observation point must lie strictly "
                        "outside the closed convex hull of the domain");
  if (obs.epsilon < 0.0) throw GeometryError("epsilon must be nonnegative");
}

FrontBackSplit front_back_split(const Domain& domain, const ObservationPoint& obs) {
  validate_observation(domain, obs);
  FrontBackSplit out;
  const auto& nodes = domain.boundary();
  out.side.resize(nodes.size());
  out.in_f_eps.resize(nodes.size());
  for (size_t i = 0; i < nodes.size(); ++i) {
    Vec3 y = nodes[i].pos - obs.x0;
    double dot = y.dot(nodes[i].normal);
    bool front = dot <= 0.0;
    out.side[i] = front ? Side::Front : Side::Back;
    out.in_f_eps[i] = dot < obs.epsilon * y.squaredNorm();
    if (front) out.area_front += nodes[i].dsigma;
    else out.area_back += nodes[i].dsigma;
    if (out.in_f_eps[i]) out.area_f_eps += nodes[i].dsigma;
  }
  return out;
}

DirectionCone build_direction_cone(const Domain& domain, const ObservationPoint& obs) {
  validate_observation(domain, obs);
  Vec3 p;
  double dist = convex_hull_distance(domain, obs.x0, &p);
  DirectionCone cone;
  cone.axis = (p - obs.x0).normalized();
  double rmax = 0.0;
  for (const auto& n : domain.boundary())
    rmax = std::max(rmax, (n.pos - obs.x0).norm());
  cone.r0 = 1.02 * rmax;
  cone.hyperplane_normal = cone.axis;
  cone.hyperplane_offset = cone.axis.dot(obs.x0) + 0.5 * dist;
  cone.cos_half = 0.5 * dist / cone.r0;
  cone.omega0 = any_perpendicular(cone.axis);
  cone.gamma0_margin = 0.95 * std::asin(std::min(1.0, cone.cos_half));
  return cone;
}

Frame normalize_frame(const ObservationPoint& obs, const Vec3& omega,
                      const DirectionCone* cone) {
  Vec3 w = omega.normalized();
  if (cone && !cone->admissible(w))
    throw GeometryError("omega outside the admissible neighborhood Gamma_0");
  Frame f;
  f.x0 = obs.x0;
  Vec3 b = any_perpendicular(w);
  Vec3 c = w.cross(b);
  f.rot.row(0) = w.transpose();
  f.rot.row(1) = b.transpose();
  f.rot.row(2) = c.transpose();
  return f;
}

double SliceSpec::polygon_area() const {
  double a = 0.0;
  size_t n = polygon.size();
  for (size_t i = 0; i < n; ++i) {
    const Vec2& p = polygon[i];
    const Vec2& q = polygon[(i + 1) % n];
    a += p[0] * q[1] - q[0] * p[1];
  }
  return 0.5 * a;
}

double SliceSpec::polygon_perimeter() const {
  double s = 0.0;
  size_t n = polygon.size();
  for (size_t i = 0; i < n; ++i) s += (polygon[(i + 1) % n] - polygon[i]).norm();
  return s;
}

namespace {

// Area fraction of the square [0,1]^2 on the side {n.x + c <= 0}.
double square_halfplane_fraction(const Vec2& n, double c) {
  std::vector<Vec2> poly = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  std::vector<Vec2> out;
  size_t m = poly.size();
  for (size_t i = 0; i < m; ++i) {
    Vec2 a = poly[i], b = poly[(i + 1) % m];
    double da = n.dot(a) + c, db = n.dot(b) + c;
    if (da <= 0.0) out.push_back(a);
    if ((da < 0.0) != (db < 0.0)) {
      double t = da / (da - db);
      out.push_back(a + t * (b - a));
    }
  }
  double area = 0.0;
  for (size_t i = 0; i + 1 < out.size(); ++i) {
    size_t j = (i + 1);
    area += out[i][0] * out[j][1] - out[j][0] * out[i][1];
  }
  if (out.size() >= 3)
    area += out.back()[0] * out.front()[1] - out.front()[0] * out.back()[1];
  return std::abs(area) * 0.5;
}

}  // namespace

double SliceSpec::integrate(const std::function<double(const Vec2&)>& f) const {
  double s = 0.0;
  double h2 = grid_step * grid_step;
  for (int i = 0; i < nt; ++i)
    for (int j = 0; j < nr; ++j) {
      double w = cell_fraction(i, j);
      if (w <= 0.0) continue;
      s += w * h2 * f(cell_center(i, j));
    }
  return s;
}

cdouble SliceSpec::integrate_complex(const std::function<cdouble(const Vec2&)>& f) const {
  cdouble s = 0.0;
  double h2 = grid_step * grid_step;
  for (int i = 0; i < nt; ++i)
    for (int j = 0; j < nr; ++j) {
      double w = cell_fraction(i, j);
      if (w <= 0.0) continue;
      s += w * h2 * f(cell_center(i, j));
    }
  return s;
}

SliceSpec slice(const Domain& domain, const Frame& frame, const Vec2& theta,
                double resolution, int polygon_nodes, int grid_cells) {
  SliceSpec spec;
  spec.theta = theta.normalized();
  spec.frame = frame;

  auto delta2 = [&](const Vec2& tr) { return domain.delta(spec.to_3d(tr)); };

  // Deepest interior sample as the ray-casting origin.
  Vec2 p0;
  double best = half_plane_depth(domain, frame, spec.theta, &p0);
  if (best >= 0.0)
    throw GeometryError("empty slice: half-plane misses the domain at this theta");

  Vec3 c = frame.to_normalized(domain.center());
  double rad = 0.0;
  for (const auto& n : domain.boundary())
    rad = std::max(rad, (n.pos - domain.center()).norm());
  spec.polygon.resize(polygon_nodes);
  double reach = 2.0 * rad + std::hypot(c[1], c[2]);
  for (int k = 0; k < polygon_nodes; ++k) {
    double phi = 2.0 * kPi * k / polygon_nodes;
    Vec2 dir(std::cos(phi), std::sin(phi));
    double lo = 0.0, hi = reach;
    // Grow hi until outside (the region is star-shaped about p0 for the
    // shipped analytic profiles).
    while (delta2(p0 + hi * dir) < 0.0 && hi < 8.0 * reach) hi *= 1.5;
    for (int it = 0; it < 80; ++it) {
      double mid = 0.5 * (lo + hi);
      (delta2(p0 + mid * dir) < 0.0 ? lo : hi) = mid;
    }
    spec.polygon[k] = p0 + 0.5 * (lo + hi) * dir;
    if (spec.polygon[k][1] <= 0.0)
      throw GeometryError("slice touches the axis r = 0 (inadmissible frame)");
  }

  // Uniform grid over the padded polygon bounding box.
  Vec2 lo = spec.polygon[0], hi = spec.polygon[0];
  for (const auto& p : spec.polygon) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  double step = resolution > 0.0
                    ? resolution
                    : (hi - lo).maxCoeff() / std::max(grid_cells, 8);
  spec.grid_step = step;
  spec.grid_origin = lo - Vec2(2 * step, 2 * step);
  spec.nt = static_cast<int>(std::ceil((hi[0] - lo[0]) / step)) + 4;
  spec.nr = static_cast<int>(std::ceil((hi[1] - lo[1]) / step)) + 4;
  spec.cell_fraction = MatX::Zero(spec.nt, spec.nr);

  for (int i = 0; i < spec.nt; ++i)
    for (int j = 0; j < spec.nr; ++j) {
      Vec2 cc = spec.cell_center(i, j);
      double d0 = delta2(cc);
      double eps = 0.5 * step;
      double dt = (delta2(cc + Vec2(eps, 0)) - delta2(cc - Vec2(eps, 0))) / (2 * eps);
      double dr = (delta2(cc + Vec2(0, eps)) - delta2(cc - Vec2(0, eps))) / (2 * eps);
      Vec2 g(dt, dr);
      double gn = g.norm();
      if (gn < 1e-12) {
        spec.cell_fraction(i, j) = d0 < 0.0 ? 1.0 : 0.0;
        continue;
      }
      double sd = d0 / gn;  // approximate signed distance in (t, r)
      if (sd < -0.8 * step) {
        spec.cell_fraction(i, j) = 1.0;
      } else if (sd > 0.8 * step) {
        spec.cell_fraction(i, j) = 0.0;
      } else {
        // Linear interface cut: fraction of the cell on the inside.
        Vec2 n = g / gn;
        spec.cell_fraction(i, j) = square_halfplane_fraction(n, sd / step);
      }
    }
  return spec;
}

namespace {

// Deepest sample of the domain's signed distance over the half-plane.
double half_plane_depth(const Domain& domain, const Frame& frame,
                        const Vec2& theta, Vec2* argmin) {
  SliceSpec probe;
  probe.theta = theta.normalized();
  probe.frame = frame;
  Vec3 c = frame.to_normalized(domain.center());
  double rad = 0.0;
  for (const auto& n : domain.boundary())
    rad = std::max(rad, (n.pos - domain.center()).norm());
  double tmin = c[0] - rad, tmax = c[0] + rad;
  double rc = std::hypot(c[1], c[2]);
  double rmin = std::max(1e-9, rc - rad), rmax = rc + rad;
  double best = 1e300;
  const int scan = 64;
  for (int i = 0; i <= scan; ++i)
    for (int j = 0; j <= scan; ++j) {
      Vec2 tr(tmin + (tmax - tmin) * i / scan, rmin + (rmax - rmin) * j / scan);
      double d = domain.delta(probe.to_3d(tr));
      if (d < best) {
        best = d;
        if (argmin) *argmin = tr;
      }
    }
  return best;
}

}  // namespace

bool half_plane_hits(const Domain& domain, const Frame& frame, const Vec2& theta) {
  return half_plane_depth(domain, frame, theta, nullptr) < -1e-6;
}

double slice_volume_estimate(const Domain& domain, const Frame& frame,
                             int n_theta, double resolution) {
  double vol = 0.0;
  for (int k = 0; k < n_theta; ++k) {
    double ang = 2.0 * kPi * k / n_theta;
    Vec2 theta(std::cos(ang), std::sin(ang));
    if (!half_plane_hits(domain, frame, theta)) continue;
    SliceSpec s = slice(domain, frame, theta, resolution);
    vol += s.integrate([](const Vec2& tr) { return tr[1]; }) * (2.0 * kPi / n_theta);
  }
  return vol;
}

}  // namespace mso
