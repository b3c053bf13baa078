#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "dislo/interp.hpp"
#include "dislo/potential.hpp"
#include "dislo/report.hpp"

namespace dislo {

// Symmetric periodic solve grid on [-half_width, half_width).
struct Grid1D {
  double half_width = 200.0;
  int n = 2048;
  double node(int j) const { return -half_width + 2.0 * half_width * j / n; }
  double spacing() const { return 2.0 * half_width / n; }
};

// Explicit layer for the sinusoidal potential:
//   Phi(x,y) = arctan(x/(y+1))/pi + 1/2.
double phi_explicit(double x, double y);
// (d/dx, d/dy) of the explicit layer.
std::pair<double, double> phi_explicit_gradient(double x, double y);

// Monotone transition profile connecting 0 to 1, harmonic in the bulk.
// Either the closed-form arctan layer or a tabulated boundary trace from
// the general solver; beyond the tabulation it follows the asymptote
// H(x) - 1/(alpha*pi*x).
class LayerProfile {
 public:
  enum class Kind { ExplicitArctan, Tabulated };

  static LayerProfile explicit_arctan();
  static LayerProfile tabulated(std::vector<double> x, std::vector<double> phi0,
                                double c0, double alpha, PotentialSpec potential);

  Kind kind() const { return kind_; }
  double c0() const { return c0_; }
  double alpha() const { return alpha_; }
  // Coefficient of the 1/x term in H(x) - phi(x,0).
  double tail_constant() const;
  double trace_halfwidth() const { return grid_halfwidth_; }

  double trace(double x) const;
  double trace_deriv(double x) const;

  double value(double x, double y) const;
  std::pair<double, double> gradient(double x, double y) const;

  // CSV (x, phi0) plus a small metadata JSON next to it.
  void save(const std::string& path_base) const;

 private:
  Kind kind_ = Kind::ExplicitArctan;
  double c0_ = 0.0, alpha_ = 1.0, grid_halfwidth_ = 0.0;
  CubicSpline trace_;
  PotentialSpec potential_ = PotentialSpec::sinusoidal();
};

// c0 = 1 / Int (d/dx phi(x,0))^2 dx with analytic tail correction beyond the
// tabulated window; alpha = W''(0).
std::pair<double, double> compute_constants(const LayerProfile& layer,
                                            const PotentialSpec& potential);

// Harmonic extension of a bounded boundary trace to (x, y>0) through the
// Poisson kernel.  The trace callable must be defined on all of R.
double poisson_extend(const std::function<double(double)>& trace, double x,
                      double y);

// Fits the smallest constant C for the two-sided arctan bracketing of the
// rescaled layer phi(x/eps, y/eps) on the supplied points and reports it
// against the default admissible value.
Report scaled_layer_bound_check(const LayerProfile& layer, double eps,
                                const std::vector<std::pair<double, double>>& points,
                                double admissible_C = 5.0);

// Damped Newton for the boundary trace of the standing layer for a general
// potential; tail-matched arctan template plus a periodic spectral
// correction.  Throws ConvergenceError with the residual history on failure.
LayerProfile solve_layer_general(const PotentialSpec& potential,
                                 const Grid1D& grid);

}  // namespace dislo
