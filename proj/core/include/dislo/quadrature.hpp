#pragma once

#include <functional>
#include <vector>

namespace dislo {

// Gauss-Legendre rule on [-1,1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Nodes by Newton iteration on the Legendre recurrence; cached per n.
const GaussRule& gauss_legendre(int n);

// Composite Gauss-Legendre over [a,b] with `panels` equal panels.
double integrate_panels(const std::function<double(double)>& f, double a,
                        double b, int panels, int points_per_panel = 16);

// Adaptive Simpson with Richardson error control; absolute tolerance.
double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double abs_tol, int max_depth = 30);

// Convolution against the half-plane Poisson kernel at height y > 0,
//   (1/pi) * Int f(z) * y / ((x-z)^2 + y^2) dz,
// evaluated through the substitution z = x + y*tan(u), which flattens the
// kernel exactly; f must be defined on all of R (callers extend by their
// asymptote).  `panels` controls the composite rule on u in (-pi/2, pi/2).
double poisson_convolve(const std::function<double(double)>& f, double x,
                        double y, int panels = 24, int points_per_panel = 16);

// d/dx and d/dy of the same convolution (smooth kernels after the tan
// substitution; both vanish for constant f).
double poisson_convolve_dx(const std::function<double(double)>& f, double x,
                           double y, int panels = 24, int points_per_panel = 16);
double poisson_convolve_dy(const std::function<double(double)>& f, double x,
                           double y, int panels = 24, int points_per_panel = 16);

}  // namespace dislo
