#pragma once

// The boundary identity linking the Dirichlet flux of a pair of oscillatory
// solutions to volume integrals of the potential differences, its scaled
// small-h limits, and the per-slice functionals those limits localize to.
// Everything is evaluated in conjugated variables; the exponential factors of
// the two solutions cancel exactly by construction.

#include <memory>
#include <vector>

#include "mso/cgo.hpp"
#include "mso/radon.hpp"

namespace mso {

class RecoveryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Everything needed to evaluate the identity for one potential pair and one
// direction: normalized potentials, the weight pair, both amplitudes (sign -1
// built for the first pair member, sign +1 for the second) and a shared grid.
struct CgoSetup {
  const Domain* domain = nullptr;
  Potentials pot1, pot2;   // boundary normal components matched
  Potentials pot1_adj;     // (A1, conj q1): the sign -1 solution solves this
  ObservationPoint obs;
  Vec3 omega;
  CarlemanWeight weight;
  AngularPhase phase;
  std::shared_ptr<const Amplitude> amp1;  // sign -1
  std::shared_ptr<const Amplitude> amp2;  // sign +1
  std::shared_ptr<const GridMask> mask;
  int n_theta = 0;
  double slice_resolution = 0.0;
};

CgoSetup build_cgo_setup(
    const Domain& domain, const Potentials& pot1, const Potentials& pot2,
    const ObservationPoint& obs, const Vec3& omega, int n_theta,
    double slice_resolution, double grid_step,
    const std::function<cdouble(cdouble)>& gauge_g = nullptr);

struct IdentityReport {
  double h = 0.0;
  cdouble lhs_boundary;         // flux integral over the accessible part
  cdouble lhs_f_eps;            // dropped near-front part, kept as diagnostic
  cdouble rhs_zeroth;           // (A2^2 - A1^2 + q2 - q1) u2 conj(u1)
  cdouble rhs_first;            // (A2 - A1).(D u2 conj(u1) + u2 conj(D u1))
  cdouble boundary_normal_term; // (A2 - A1).nu u2 conj(u1) on the boundary
  double residual = 0.0;            // full-boundary Green identity mismatch
  double residual_restricted = 0.0; // with the near-front flux dropped
  double scale = 0.0;
};

// u2 is the sign +1 solution of the second pair member, u1 the sign -1
// solution of the adjoint first member, w the classical solve of the first
// member with Dirichlet trace u2. All three share the grid of the setup.
IdentityReport evaluate_identity(const CgoSetup& setup, double h);

struct ScaledLimit {
  cdouble limit;                // extrapolated h (rhs_zeroth + rhs_first)
  cdouble target;               // -2i int (A2-A1).(grad phi + i grad psi) a2 conj(a1)
  double mismatch = 0.0;        // relative difference of the two
  double lhs_decay_exponent = 0.0;  // slope of log|h lhs| against log h
  std::vector<IdentityReport> reports;
};

// Richardson extrapolation of the first-order identity content over the h
// sweep (smallest three h values, fitted order). Throws RecoveryError if
// fewer than three h values are supplied.
ScaledLimit scaled_limit_A(const CgoSetup& setup,
                           const std::vector<double>& h_sweep);

struct SliceMoment {
  cdouble boundary;   // contour integral of g E (z - zbar) dz
  cdouble interior;   // area integral of g (dbar - 1/(z-zbar)) E (z-zbar) dzbar dz
  double agreement = 0.0;  // |boundary - interior|
  double scale = 0.0;
};

// E = exp(conj(lam1) + lam2) on the slice at theta index k; the two forms
// agree by Stokes and both vanish when the transport content cancels.
SliceMoment slice_moment(const Amplitude& amp1, const Amplitude& amp2, int k,
                         const std::function<cdouble(cdouble)>& gauge_g = nullptr);

// integral of g (A1 - A2).(e1 + i e_r) dzbar dz over the slice region
// (dzbar dz = 2i dt dr).
cdouble plane_functional_A(const Potentials& pot1, const Potentials& pot2,
                           const SliceSpec& slice,
                           const std::function<cdouble(cdouble)>& gauge_g = nullptr);

// Plane integral of the in-slice curl of A1 - A2 via central differences of
// translated plane functionals at offset delta (the derivative relation; it
// matches the direct curl quadrature and, by Stokes, the edge-line integral).
cdouble plane_functional_dA(const Potentials& pot1, const Potentials& pot2,
                            const Domain& domain, const Frame& frame,
                            const Vec2& theta, double resolution, double delta);

// Sign +1 amplitude that makes a2 conj(a1) = chi(theta) / (z - zbar) with a
// von-Mises theta window exp(kappa (cos(theta - theta_k) - 1)) normalized to
// unit integral; requires equal magnetic potentials (the gauge it encodes is
// only holomorphic then). kappa <= 0 gives the flat window 1/(2 pi).
Amplitude cancelling_amplitude(const Amplitude& amp1, const Amplitude& amp2,
                               int k, double kappa);

struct PlaneIntegralQ {
  cdouble boundary_value;  // 2i times the extrapolated accessible-flux limit
  cdouble direct_value;    // quadrature of (q2 - q1) dt dr over the slice
  double mismatch = 0.0;
  std::vector<IdentityReport> reports;
};

// Per-slice electric difference integral from boundary data, using the
// cancelling amplitude localized at slice k. Requires A1 = A2; with distinct
// magnetic potentials the first-order term couples the two unknowns and the
// localization gauge stops being holomorphic, so this errors out.
PlaneIntegralQ plane_integral_q(const CgoSetup& setup, int k, double kappa,
                                const std::vector<double>& h_sweep);

enum class RadonTarget { QDiff, DADiff };

// Tomographic data for one reconstruction: plane integrals of q1 - q2 and
// longitudinal edge-line integrals of A1 - A2 over a direction band.
struct PlaneIntegralSet {
  std::string provenance;  // "direct-quadrature" or "boundary-data"
  PlaneSinogram q_planes;
  RaySinogram a_rays;
};

PlaneIntegralSet collect_plane_integrals(const Potentials& pot1,
                                         const Potentials& pot2,
                                         const Vec3& center, const Mat3& axes,
                                         double radius, int n_beta, int n_theta,
                                         int n_s, const std::vector<double>& tilts,
                                         int ny);

struct RadonResult {
  RadonTarget target;
  ScalarField3 q_diff;   // filled for QDiff
  VectorField3 dA_diff;  // filled for DADiff
};

RadonResult radon_invert(const PlaneIntegralSet& planes, RadonTarget target,
                         int grid);

// S(h) -> S0 + c h^p fit through the three smallest h values; p bracketed in
// [0.2, 4], falling back to p = 1 when the ratios leave the bracket.
cdouble richardson_limit(std::vector<double> h, std::vector<cdouble> s,
                         double* exponent = nullptr);

}  // namespace mso
