#include "mso/forward.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <cmath>
#include <complex>
#include <fstream>
#include <random>

namespace mso {

DiscreteOperator::DiscreteOperator(const Domain& domain, const Potentials& pot,
                                   double grid_step)
    : domain_(&domain), pot_(pot),
      mask_(std::make_shared<GridMask>(domain, grid_step)) {
  const int n = mask_->count();
  const double h = mask_->grid().step;
  std::vector<Eigen::Triplet<cdouble>> trip;
  trip.reserve(static_cast<size_t>(n) * 7);

  for (int row = 0; row < n; ++row) {
    Vec3 p = mask_->point(row);
    Vec3 a = pot_.A(p);
    cdouble diag = -kI * pot_.div_A(p) + a.squaredNorm() + pot_.q(p);
    const auto& arms = mask_->arms(row);
    for (int axis = 0; axis < 3; ++axis) {
      const GridMask::Arm& am = arms[2 * axis];
      const GridMask::Arm& ap = arms[2 * axis + 1];
      double hm = am.alpha * h, hp = ap.alpha * h;
      // -d^2/dx^2 on the nonuniform 3-point stencil
      double cm2 = -2.0 / (hm * (hm + hp));
      double cp2 = -2.0 / (hp * (hm + hp));
      // d/dx on the same stencil
      double cm1 = -hp / (hm * (hm + hp));
      double cp1 = hm / (hp * (hm + hp));
      double c01 = (hp - hm) / (hm * hp);
      cdouble conv = -2.0 * kI * a[axis];
      cdouble cm = cm2 + conv * cm1;
      cdouble cp = cp2 + conv * cp1;
      diag += -(cm2 + cp2) + conv * c01;
      if (am.neighbor >= 0) trip.emplace_back(row, am.neighbor, cm);
      else links_.push_back({row, am.crossing, cm});
      if (ap.neighbor >= 0) trip.emplace_back(row, ap.neighbor, cp);
      else links_.push_back({row, ap.crossing, cp});
    }
    trip.emplace_back(row, row, diag);
  }
  mat_.resize(n, n);
  mat_.setFromTriplets(trip.begin(), trip.end());
  mat_.makeCompressed();
}

VecXc DiscreteOperator::boundary_rhs(const BoundaryData& g) const {
  VecXc b = VecXc::Zero(mask_->count());
  for (const auto& l : links_) b[l.row] -= l.coeff * g(l.point);
  return b;
}

VecXc DiscreteOperator::apply(const VecXc& u, const BoundaryData& g) const {
  VecXc y = mat_ * u;
  for (const auto& l : links_) y[l.row] += l.coeff * g(l.point);
  return y;
}

void DiscreteOperator::factorize() const {
  if (lu_) return;
  lu_ = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<cdouble>>>();
  lu_->compute(mat_);
  if (lu_->info() != Eigen::Success) {
    lu_.reset();
    throw SolveError("sparse LU factorization failed (possible eigenvalue hit)", {});
  }
}

VecXc DiscreteOperator::solve_linear(const VecXc& b) const {
  if (lu_) return lu_->solve(b);
  Eigen::BiCGSTAB<Eigen::SparseMatrix<cdouble>,
                  Eigen::DiagonalPreconditioner<cdouble>>
      it(mat_);
  it.setTolerance(1e-12);
  it.setMaxIterations(20000);
  VecXc x = it.solve(b);
  double bn = b.norm();
  double rel = bn > 0.0 ? (mat_ * x - b).norm() / bn : 0.0;
  if (it.info() == Eigen::Success && rel < 1e-10) return x;
  // Iteration stalled: factorize and retry directly.
  factorize();
  x = lu_->solve(b);
  rel = bn > 0.0 ? (mat_ * x - b).norm() / bn : 0.0;
  if (rel > 1e-8)
    throw SolveError("Dirichlet solve did not converge (relative residual " +
                         std::to_string(rel) + ")",
                     {it.error(), rel});
  return x;
}

GridField DiscreteOperator::solve(const BoundaryData& g) const {
  GridField f;
  f.mask = mask_;
  f.values = solve_linear(boundary_rhs(g));
  return f;
}

GridField DiscreteOperator::solve_rhs(const VecXc& b) const {
  GridField f;
  f.mask = mask_;
  f.values = solve_linear(b);
  return f;
}

namespace {

struct TriPlan {
  int id[8];
  double w[8];
};

bool trilinear_plan(const GridMask& mask, const Vec3& x, TriPlan* plan) {
  const Grid3& g = mask.grid();
  Vec3 t = (x - g.origin) / g.step;
  int i = static_cast<int>(std::floor(t[0]));
  int j = static_cast<int>(std::floor(t[1]));
  int k = static_cast<int>(std::floor(t[2]));
  Vec3 f = t - Vec3(i, j, k);
  int m = 0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c, ++m) {
        int n = mask.id(i + a, j + b, k + c);
        if (n < 0) return false;
        plan->id[m] = n;
        plan->w[m] = (a ? f[0] : 1.0 - f[0]) * (b ? f[1] : 1.0 - f[1]) *
                     (c ? f[2] : 1.0 - f[2]);
      }
  return true;
}

cdouble eval_plan(const TriPlan& plan, const VecXc& v) {
  cdouble s = 0.0;
  for (int m = 0; m < 8; ++m) s += plan.w[m] * v[plan.id[m]];
  return s;
}

struct FluxPlan {
  double s = 0.0;
  TriPlan p1, p2;
};

FluxPlan flux_plan(const GridMask& mask, const BoundaryNode& node) {
  double h = mask.grid().step;
  FluxPlan fp;
  for (double beta = 2.0; beta <= 8.0; beta *= 1.25) {
    fp.s = beta * h;
    if (trilinear_plan(mask, node.pos - fp.s * node.normal, &fp.p1) &&
        trilinear_plan(mask, node.pos - 2.0 * fp.s * node.normal, &fp.p2))
      return fp;
  }
  throw GeometryError("boundary flux: no interior samples along the normal "
                      "(grid too coarse)");
}

}  // namespace

cdouble boundary_flux(const GridField& u, const BoundaryData& g,
                      const Potentials& pot, const BoundaryNode& node) {
  FluxPlan fp = flux_plan(*u.mask, node);
  cdouble v0 = g(node.pos);
  cdouble v1 = eval_plan(fp.p1, u.values);
  cdouble v2 = eval_plan(fp.p2, u.values);
  cdouble dn = (3.0 * v0 - 4.0 * v1 + v2) / (2.0 * fp.s);
  return dn + kI * pot.A(node.pos).dot(node.normal) * v0;
}

DnMap dn_map(const Domain& domain, const Potentials& pot, double grid_step) {
  DiscreteOperator op(domain, pot, grid_step);
  op.factorize();
  const auto& nodes = domain.boundary();
  const int m = static_cast<int>(nodes.size());
  const int n = op.mask()->count();

  // Hat-data right-hand sides for every boundary basis function at once.
  Eigen::SparseMatrix<cdouble> rhs(n, m);
  {
    std::vector<Eigen::Triplet<cdouble>> trip;
    for (const auto& l : op.links()) {
      Domain::InterpWeights iw = domain.interp_weights(l.point);
      for (int t = 0; t < 3; ++t)
        trip.emplace_back(l.row, iw.node[t], -l.coeff * iw.w[t]);
    }
    rhs.setFromTriplets(trip.begin(), trip.end());
  }

  std::vector<FluxPlan> plans;
  plans.reserve(m);
  for (const auto& node : nodes) plans.push_back(flux_plan(*op.mask(), node));

  DnMap out;
  out.basis = nodes;
  out.grid_step = grid_step;
  out.potentials_id = pot.id();
  out.matrix.resize(m, m);
  VecXc b(n);
  for (int j = 0; j < m; ++j) {
    b = rhs.col(j);
    GridField u = op.solve_rhs(b);
    for (int i = 0; i < m; ++i) {
      double v0 = (i == j) ? 1.0 : 0.0;
      cdouble v1 = eval_plan(plans[i].p1, u.values);
      cdouble v2 = eval_plan(plans[i].p2, u.values);
      cdouble dn = (3.0 * v0 - 4.0 * v1 + v2) / (2.0 * plans[i].s);
      out.matrix(i, j) = dn + kI * pot.A(nodes[i].pos).dot(nodes[i].normal) * v0;
    }
  }
  return out;
}

double DnMap::relative_distance(const DnMap& other) const {
  double num = 0.0, den = 0.0;
  for (int i = 0; i < matrix.rows(); ++i)
    for (int j = 0; j < matrix.cols(); ++j) {
      double w = basis[i].dsigma * basis[j].dsigma;
      num += w * std::norm(matrix(i, j) - other.matrix(i, j));
      den += w * std::norm(other.matrix(i, j));
    }
  return std::sqrt(num / den);
}

Potentials gauge_transform(const Potentials& pot, const expr::Expr& psi,
                           const Domain& domain) {
  double worst = 0.0;
  for (const auto& node : domain.boundary())
    worst = std::max(worst, std::abs(psi(node.pos)));
  if (worst > 1e-8)
    throw GeometryError("gauge_transform: psi does not vanish on the boundary "
                        "(max |psi| = " + std::to_string(worst) + ")");
  std::array<expr::Expr, 3> a{
      expr::Expr(expr::add(pot.component(0).root(), expr::diff(psi.root(), 0))),
      expr::Expr(expr::add(pot.component(1).root(), expr::diff(psi.root(), 1))),
      expr::Expr(expr::add(pot.component(2).root(), expr::diff(psi.root(), 2)))};
  return Potentials(std::move(a), pot.q_real_part(), pot.q_imag_part(),
                    pot.id().empty() ? "" : pot.id() + "+gauge");
}

std::pair<Potentials, Potentials> normalize_normal_component(
    const Potentials& pot1, const Potentials& pot2, const Domain& domain) {
  double jump = 0.0;
  for (const auto& node : domain.boundary())
    jump = std::max(jump, std::abs((pot2.A(node.pos) - pot1.A(node.pos))
                                       .dot(node.normal)));
  if (jump <= 1e-10) return {pot1, pot2};

  if (!domain.profile().defining)
    throw GeometryError("normalize_normal_component: profile has no smooth "
                        "defining function");
  expr::NodePtr w = domain.profile().defining(domain.center());
  expr::NodePtr dw[3] = {expr::diff(w, 0), expr::diff(w, 1), expr::diff(w, 2)};

  // psi = w (dA . grad w) H(w) / (|grad w|^2 + eps) so that psi = 0 and
  // d_nu psi = dA.nu on the boundary; H confines psi to a boundary collar.
  expr::Expr gw0(dw[0]), gw1(dw[1]), gw2(dw[2]);
  double gscale = 0.0;
  for (const auto& node : domain.boundary())
    gscale += Vec3(gw0(node.pos), gw1(node.pos), gw2(node.pos)).norm();
  gscale /= static_cast<double>(domain.boundary().size());
  // Wide collar: the regularized denominator already tames interior critical
  // points, and a tight bump would put large high-order derivatives next to
  // the boundary where flux stencils sample.
  double s0 = 0.5 * domain.diameter() * gscale;

  // Regularize |grad w|^2 with a multiple of w^2: zero on the boundary, so
  // d_nu psi stays exact there, but order one at interior critical points of
  // the defining function where grad w vanishes.
  auto ws = expr::div(w, expr::constant(s0));
  expr::NodePtr dot = expr::constant(0.0);
  expr::NodePtr g2 =
      expr::mul(expr::constant(gscale * gscale), expr::mul(ws, ws));
  for (int i = 0; i < 3; ++i) {
    dot = expr::add(dot, expr::mul(expr::sub(pot2.component(i).root(),
                                             pot1.component(i).root()),
                                   dw[i]));
    g2 = expr::add(g2, expr::mul(dw[i], dw[i]));
  }
  auto bump = std::make_shared<expr::Node>();
  bump->op = expr::Op::Exp;
  bump->a = expr::sub(expr::constant(0.0), expr::mul(ws, ws));
  expr::Expr psi(
      expr::div(expr::mul(expr::mul(w, dot), expr::NodePtr(bump)), g2));

  return {gauge_transform(pot1, psi, domain), pot2};
}

double check_assumption_1(const Domain& domain, const Potentials& pot,
                          double coarse_step) {
  DiscreteOperator op(domain, pot, coarse_step);
  op.factorize();
  const int n = op.mask()->count();
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> gauss;
  VecXc x(n);
  for (int i = 0; i < n; ++i) x[i] = {gauss(rng), gauss(rng)};
  x.normalize();
  cdouble mu = 0.0;
  for (int it = 0; it < 80; ++it) {
    VecXc y = op.solve_rhs(x).values;
    mu = x.dot(y);  // x^H y, dominant eigenvalue of the inverse
    x = y / y.norm();
  }
  return 1.0 / std::abs(mu);
}

cdouble green_residual(const Domain& domain, const Potentials& pot,
                       const GridField& u, const BoundaryData& g_u,
                       const GridField& v, const BoundaryData& g_v) {
  double step = u.mask->grid().step;
  DiscreteOperator op(domain, pot, step);
  Potentials pot_conj(
      {pot.component(0), pot.component(1), pot.component(2)},
      pot.q_real_part(),
      expr::Expr(expr::sub(expr::constant(0.0), pot.q_imag_part().root())),
      pot.id());
  DiscreteOperator op_conj(domain, pot_conj, step);

  VecXc lu = op.apply(u.values, g_u);
  VecXc lv = op_conj.apply(v.values, g_v);
  cdouble vol_lu_v = 0.0, vol_u_lv = 0.0;
  const GridMask& mask = *u.mask;
  for (int i = 0; i < mask.count(); ++i) {
    double w = mask.quad_weight(i);
    vol_lu_v += w * lu[i] * std::conj(v.values[i]);
    vol_u_lv += w * u.values[i] * std::conj(lv[i]);
  }

  cdouble bnd = 0.0;
  for (const auto& node : domain.boundary()) {
    cdouble fu = boundary_flux(u, g_u, pot, node);
    cdouble fv = boundary_flux(v, g_v, pot, node);
    bnd += node.dsigma * (g_u(node.pos) * std::conj(fv) -
                          fu * std::conj(g_v(node.pos)));
  }
  return vol_lu_v - vol_u_lv - bnd;
}

namespace {
constexpr char kDnMagic[8] = {'M', 'S', 'D', 'N', 'M', 'P', '0', '1'};
}

void write_dn_map(const std::string& path, const DnMap& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  char header[64] = {};
  std::memcpy(header, kDnMagic, 8);
  int64_t count = static_cast<int64_t>(m.basis.size());
  std::memcpy(header + 8, &count, 8);
  std::memcpy(header + 16, &m.grid_step, 8);
  out.write(header, 64);
  // basis ordering: node positions then the row-major complex matrix
  for (const auto& node : m.basis) {
    double rec[7] = {node.pos[0], node.pos[1], node.pos[2], node.normal[0],
                     node.normal[1], node.normal[2], node.dsigma};
    out.write(reinterpret_cast<const char*>(rec), sizeof(rec));
  }
  for (int i = 0; i < m.matrix.rows(); ++i)
    for (int j = 0; j < m.matrix.cols(); ++j) {
      double v[2] = {m.matrix(i, j).real(), m.matrix(i, j).imag()};
      out.write(reinterpret_cast<const char*>(v), 16);
    }
}

DnMap read_dn_map(const std::string& path, const Domain& domain) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  char header[64];
  in.read(header, 64);
  if (!in || std::memcmp(header, kDnMagic, 8) != 0)
    throw std::runtime_error(path + ": bad flux map header");
  int64_t count = 0;
  std::memcpy(&count, header + 8, 8);
  DnMap m;
  std::memcpy(&m.grid_step, header + 16, 8);
  m.basis.resize(count);
  for (auto& node : m.basis) {
    double rec[7];
    in.read(reinterpret_cast<char*>(rec), sizeof(rec));
    node.pos = Vec3(rec[0], rec[1], rec[2]);
    node.normal = Vec3(rec[3], rec[4], rec[5]);
    node.dsigma = rec[6];
    node.dir = (node.pos - domain.center()).normalized();
  }
  m.matrix.resize(count, count);
  for (int i = 0; i < count; ++i)
    for (int j = 0; j < count; ++j) {
      double v[2];
      in.read(reinterpret_cast<char*>(v), 16);
      m.matrix(i, j) = {v[0], v[1]};
    }
  if (!in) throw std::runtime_error(path + ": truncated flux map file");
  return m;
}

void write_dn_map_csv(const std::string& path, const DnMap& m) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "i,j,re,im\n";
  for (int i = 0; i < m.matrix.rows(); ++i)
    for (int j = 0; j < m.matrix.cols(); ++j)
      out << i << ',' << j << ',' << m.matrix(i, j).real() << ','
          << m.matrix(i, j).imag() << '\n';
}

void write_boundary_csv(const std::string& path, const Domain& domain,
                        const FrontBackSplit* split) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "x,y,z,nx,ny,nz,dsigma,side\n";
  const auto& nodes = domain.boundary();
  for (size_t i = 0; i < nodes.size(); ++i) {
    const auto& n = nodes[i];
    out << n.pos[0] << ',' << n.pos[1] << ',' << n.pos[2] << ',' << n.normal[0]
        << ',' << n.normal[1] << ',' << n.normal[2] << ',' << n.dsigma << ',';
    if (!split) out << "none";
    else if (split->in_f_eps[i]) out << "front_eps";
    else out << (split->side[i] == Side::Front ? "front" : "back");
    out << '\n';
  }
}

}  // namespace mso
