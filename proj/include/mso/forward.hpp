#pragma once

// Finite-difference discretization of the magnetic Schrodinger operator
//   L u = -Lap u - 2i A.grad u - i (div A) u + (|A|^2 + q) u
// on a masked Cartesian grid with Shortley-Weller stencils at the curved
// boundary, plus Dirichlet solves, boundary flux maps, gauge transformations
// and the bilinear-identity residual check.

#include <Eigen/Sparse>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "mso/grid.hpp"
#include "mso/potentials.hpp"

namespace mso {

class SolveError : public std::runtime_error {
 public:
  SolveError(const std::string& what, std::vector<double> history)
      : std::runtime_error(what), residual_history(std::move(history)) {}
  std::vector<double> residual_history;
};

using BoundaryData = std::function<cdouble(const Vec3&)>;

class DiscreteOperator {
 public:
  struct Link {
    int row;
    Vec3 point;      // boundary crossing carrying Dirichlet data
    cdouble coeff;   // stencil coefficient of that data in row `row`
  };

  DiscreteOperator(const Domain& domain, const Potentials& pot, double grid_step);

  const std::shared_ptr<const GridMask>& mask() const { return mask_; }
  const Eigen::SparseMatrix<cdouble>& matrix() const { return mat_; }
  const std::vector<Link>& links() const { return links_; }
  const Potentials& potentials() const { return pot_; }
  const Domain& domain() const { return *domain_; }
  double grid_step() const { return mask_->grid().step; }

  // Dirichlet contribution moved to the right-hand side: L u = boundary_rhs(g).
  VecXc boundary_rhs(const BoundaryData& g) const;
  // L applied to interior values with boundary closure g.
  VecXc apply(const VecXc& u, const BoundaryData& g) const;

  GridField solve(const BoundaryData& g) const;
  // L u = b with zero Dirichlet data.
  GridField solve_rhs(const VecXc& b) const;

  // Cache a sparse LU factorization for repeated solves.
  void factorize() const;

 private:
  VecXc solve_linear(const VecXc& b) const;

  const Domain* domain_;
  Potentials pot_;
  std::shared_ptr<const GridMask> mask_;
  Eigen::SparseMatrix<cdouble> mat_;
  std::vector<Link> links_;
  mutable std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<cdouble>>> lu_;
};

struct DnMap {
  std::vector<BoundaryNode> basis;
  MatXc matrix;  // column j = boundary flux of the solve with hat data at j
  double grid_step = 0.0;
  std::string potentials_id;

  // dsigma-weighted Frobenius distance scaled by the norm of `other`.
  double relative_distance(const DnMap& other) const;
};

DnMap dn_map(const Domain& domain, const Potentials& pot, double grid_step);

void write_dn_map(const std::string& path, const DnMap& m);
DnMap read_dn_map(const std::string& path, const Domain& domain);
void write_dn_map_csv(const std::string& path, const DnMap& m);
void write_boundary_csv(const std::string& path, const Domain& domain,
                        const FrontBackSplit* split = nullptr);

// (d_nu + i A.nu) u at a boundary node: one-sided quadratic fit along the
// inward normal through the boundary value and two interior samples.
cdouble boundary_flux(const GridField& u, const BoundaryData& g,
                      const Potentials& pot, const BoundaryNode& node);

// A -> A + grad psi with psi vanishing on the boundary (validated).
Potentials gauge_transform(const Potentials& pot, const expr::Expr& psi,
                           const Domain& domain);

// Gauge the first pair member so both share boundary normal components.
std::pair<Potentials, Potentials> normalize_normal_component(
    const Potentials& pot1, const Potentials& pot2, const Domain& domain);

// Smallest-magnitude eigenvalue of the coarse zero-Dirichlet operator
// (inverse power iteration).
double check_assumption_1(const Domain& domain, const Potentials& pot,
                          double coarse_step);

// (L u|v) - (u|L_bar v) - [(u|flux v) - (flux u|v)]_{boundary}.
cdouble green_residual(const Domain& domain, const Potentials& pot,
                       const GridField& u, const BoundaryData& g_u,
                       const GridField& v, const BoundaryData& g_v);

}  // namespace mso
