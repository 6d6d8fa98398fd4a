#pragma once

// Oscillatory solutions u = e^{(sigma phi + i psi)/h} (e^Phi + h r): slice
// transport solves for the amplitude Phi, the lift back to 3D, and the exact
// discrete remainder r from a conjugated zero-Dirichlet solve. All grid
// fields are stored in conjugated variables (the e^{P/h} factor is never
// materialized; it cancels in every inner product used downstream).

#include <Eigen/Sparse>
#include <functional>
#include <memory>
#include <optional>

#include "mso/dbar.hpp"
#include "mso/forward.hpp"
#include "mso/weights.hpp"

namespace mso {

// Right-hand side of the slice transport equation, sampled on the whole slice
// grid (the potentials extend smoothly past the region, which keeps the
// particular solution kink-free).
//   sign +1: dbar Phi2      = (n-2)/(2(z-zbar)) - (i/2) A.(e1 + i e_r)
//   sign -1: dbar Phi1_bar  = (n-2)/(2(z-zbar)) + (i/2) A.(e1 + i e_r)
// (the sign -1 solve is conjugated afterwards to produce Phi1).
MatXc transport_rhs(const Potentials& pot, const SliceSpec& slice, int sign);

struct SlicePhi {
  SliceSpec slice;
  MatXc lam;                       // Phi plus log of the gauge factor
  MatXc lam_t, lam_r, lam_tt, lam_rr;  // tabulated in-slice derivatives
  double dbar_residual = 0.0;      // interior discrete residual of the solve
};

class Amplitude {
 public:
  int sign = +1;
  Frame frame;
  int n_theta = 0;
  std::string potentials_id;
  std::vector<int> slot;           // theta index -> slices index or -1 (empty)
  std::vector<SlicePhi> slices;

  struct Jet {
    cdouble lam = 0.0;
    cdouble lam_t = 0.0, lam_r = 0.0, lam_tt = 0.0, lam_rr = 0.0;
    cdouble lam_th = 0.0, lam_thth = 0.0;
    cdouble a = 0.0;               // e^lam
  };
  Jet jet(const Vec3& x) const;
  cdouble eval(const Vec3& x) const { return jet(x).a; }
  cdouble lam_at(const Vec3& x) const { return jet(x).lam; }

  // Max value jump between adjacent-theta slices at shared points (C0
  // smoothness diagnostic).
  double slice_jump() const;
};

Amplitude build_amplitude(
    const Potentials& pot, const Domain& domain, const Frame& frame,
    int n_theta, int sign, double slice_resolution,
    const std::function<cdouble(cdouble)>& gauge_g = nullptr);

// e^{-P} L e^{P} on the masked grid, P supplied nodewise; only exponent
// differences between neighbouring nodes enter the matrix.
class ConjugatedOperator {
 public:
  ConjugatedOperator(const Domain& domain, const Potentials& pot,
                     std::shared_ptr<const GridMask> mask,
                     const std::function<cdouble(const Vec3&)>& P);

  const std::shared_ptr<const GridMask>& mask() const { return mask_; }
  GridField solve(const BoundaryData& b_tilde) const;  // Dirichlet data for b
  GridField solve_rhs(const VecXc& rhs) const;         // zero Dirichlet
  VecXc apply(const VecXc& b, const BoundaryData& b_tilde) const;

 private:
  std::shared_ptr<const GridMask> mask_;
  Eigen::SparseMatrix<cdouble> mat_;
  std::vector<DiscreteOperator::Link> links_;
  mutable std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<cdouble>>> lu_;
};

struct CgoDiagnostics {
  double residual_norm = 0.0;     // ||e^{-sigma phi/h} h^2 L u0||_L2
  double transport_norm = 0.0;    // first-order part alone
  double r_l2 = 0.0;
  double r_h1_scl = 0.0;
  double amplitude_jump = 0.0;
};

struct CgoSolution {
  CarlemanWeight weight;
  AngularPhase phase;
  double h = 0.0;
  int sign = +1;
  std::shared_ptr<const Amplitude> amplitude;
  GridField b;   // u = e^{P} b with P = (sigma phi + i psi)/h; b = a + h r
  GridField r;
  CgoDiagnostics diag;

  cdouble P(const Vec3& x) const {
    return cdouble(sign * weight.phi(x), phase.psi(x)) / h;
  }
  // boundary trace of the conjugated field (= amplitude on the boundary)
  cdouble b_boundary(const Vec3& x) const { return amplitude->eval(x); }
};

CgoSolution build_cgo(const Domain& domain, const Potentials& pot,
                      const CarlemanWeight& weight, const AngularPhase& phase,
                      double h, int sign,
                      std::shared_ptr<const Amplitude> amplitude,
                      std::shared_ptr<const GridMask> mask);

// Quadrature-weighted norms on masked grids.
double l2_norm(const GridField& f);
double h1_scl_norm(const GridField& f, double h);

}  // namespace mso
