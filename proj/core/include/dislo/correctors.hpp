#pragma once

#include <memory>
#include <vector>

#include "dislo/interp.hpp"
#include "dislo/layer.hpp"
#include "dislo/potential.hpp"
#include "dislo/report.hpp"

namespace dislo {

// Boundary corrector: harmonic in the bulk with an affine-in-psi Neumann
// condition at y=0 driven by the layer; decays at infinity.
class PsiProfile {
 public:
  double trace(double x) const;        // psi(x, 0)
  double trace_deriv(double x) const;
  double value(double x, double y) const;
  double deriv_x(double x, double y) const;
  double deriv_y(double x, double y) const;  // y=0 uses the boundary identity

  double tail_coefficient() const { return tail_c_; }  // c in the c/x tail
  double residual_sup() const { return residual_sup_; }
  double grid_halfwidth() const { return grid_halfwidth_; }

  friend PsiProfile solve_psi(const LayerProfile&, const PotentialSpec&,
                              double, double, const Grid1D&);

 private:
  CubicSpline spline_;
  double grid_halfwidth_ = 0.0;
  double tail_c_ = 0.0, tail_d_ = 0.0;
  double residual_sup_ = 0.0;
  double c0_ = 0.0, alpha_ = 1.0;
  std::shared_ptr<const LayerProfile> layer_;
  PotentialSpec potential_ = PotentialSpec::sinusoidal();
};

// Collocation solve of the psi boundary equation on a symmetric periodic
// grid; the translation mode is pinned through a bordered system.  Throws
// ConvergenceError when the bordered matrix is numerically singular.
PsiProfile solve_psi(const LayerProfile& layer, const PotentialSpec& potential,
                     double c0, double alpha, const Grid1D& grid);

// Solves (half-Laplacian + W''(phi)) u = rhs with the same bordered pinning;
// exposed so linearity of the boundary equation can be checked directly.
std::vector<double> solve_psi_linear(const LayerProfile& layer,
                                     const PotentialSpec& potential,
                                     const Grid1D& grid,
                                     const std::vector<double>& rhs);

// Half-plane Dirichlet Green function by the method of images,
//   G(Z', Z) = (ln|Z' - Z~| - ln|Z' - Z|) / (2 pi),  Z~ = (x, -y).
double green_half_plane(double source_x, double source_y, double target_x,
                        double target_y);

// Smooth cutoff: 1 on [0, R/2], 0 beyond R, exponential-type bridge.
double cutoff_g(double y, double R);

// Bulk corrector q solving -Laplace(q) = dphi/dx * g(y) with q(x,0)=0,
// realized as a Green-function integral.  For the explicit arctan layer the
// x'-integration collapses analytically and evaluation is a 1-D quadrature;
// values inside the primed window come from a graded lattice cache.
class QField {
 public:
  double R() const { return R_; }
  double eps() const { return eps_; }
  double b() const { return b_; }

  double value(double X, double Y) const;
  double deriv_x(double X, double Y) const;
  double deriv_y(double X, double Y) const;

  // Quadrature evaluation bypassing the lattice cache.
  double value_direct(double X, double Y) const;
  double deriv_x_direct(double X, double Y) const;
  double deriv_y_direct(double X, double Y) const;

  friend QField build_q(const LayerProfile&, double, double, double, double);

 private:
  double R_ = 0.0, eps_ = 0.0, b_ = 0.0;
  std::shared_ptr<const LayerProfile> layer_;
  GradedLattice2D lattice_;
};

// R = 2*eps^{-b}; requires b in (0,1).  The lattice covers
// |X| <= x_span, Y <= y_span (defaults sized for barrier evaluation).
QField build_q(const LayerProfile& layer, double eps, double b,
               double x_span = 0.0, double y_span = 0.0);

// Independent slow route: nested adaptive quadrature of the Green integral
// for a general layer, with the target singularity handled by splitting.
double q_value_quadrature2d(const LayerProfile& layer, double R, double X,
                            double Y, double abs_tol = 1e-6);

// Fits the minimal constants of all decay estimates for q and psi and
// checks them against an admissible ceiling.
Report verify_corrector_bounds(const QField& q, const PsiProfile& psi,
                               double admissible_C = 100.0);

}  // namespace dislo
