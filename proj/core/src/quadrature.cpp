#include "dislo/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "dislo/errors.hpp"

namespace dislo {

static GaussRule make_gauss(int n) {
  GaussRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    // Chebyshev initial guess, Newton on P_n.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    double dp = n * (x * p1 - p0) / (x * x - 1.0);
    r.nodes[i] = x;
    r.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

const GaussRule& gauss_legendre(int n) {
  static std::map<int, GaussRule> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make_gauss(n)).first;
  return it->second;
}

double integrate_panels(const std::function<double(double)>& f, double a,
                        double b, int panels, int points_per_panel) {
  const GaussRule& g = gauss_legendre(points_per_panel);
  const double h = (b - a) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    double c = a + (p + 0.5) * h;
    double s = 0.0;
    for (size_t i = 0; i < g.nodes.size(); ++i)
      s += g.weights[i] * f(c + 0.5 * h * g.nodes[i]);
    total += 0.5 * h * s;
  }
  return total;
}

namespace {

double adaptive_step(const std::function<double(double)>& f, double a,
                     double b, double fa, double fm, double fb, double whole,
                     double tol, int depth, int max_depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double delta = left + right - whole;
  if (depth >= max_depth || std::fabs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adaptive_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1, max_depth) +
         adaptive_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1, max_depth);
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double abs_tol, int max_depth) {
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_step(f, a, b, fa, fm, fb, whole, abs_tol, 0, max_depth);
}

double poisson_convolve(const std::function<double(double)>& f, double x,
                        double y, int panels, int points_per_panel) {
  if (!(y > 0.0)) throw DomainError("poisson_convolve: y must be positive");
  const double half = std::numbers::pi / 2;
  auto g = [&](double u) { return f(x + y * std::tan(u)); };
  return integrate_panels(g, -half, half, panels, points_per_panel) /
         std::numbers::pi;
}

double poisson_convolve_dx(const std::function<double(double)>& f, double x,
                           double y, int panels, int points_per_panel) {
  if (!(y > 0.0)) throw DomainError("poisson_convolve_dx: y must be positive");
  const double half = std::numbers::pi / 2;
  auto g = [&](double u) { return f(x + y * std::tan(u)) * std::sin(2.0 * u); };
  return integrate_panels(g, -half, half, panels, points_per_panel) /
         (std::numbers::pi * y);
}

double poisson_convolve_dy(const std::function<double(double)>& f, double x,
                           double y, int panels, int points_per_panel) {
  if (!(y > 0.0)) throw DomainError("poisson_convolve_dy: y must be positive");
  const double half = std::numbers::pi / 2;
  auto g = [&](double u) { return f(x + y * std::tan(u)) * std::cos(2.0 * u); };
  return -integrate_panels(g, -half, half, panels, points_per_panel) /
         (std::numbers::pi * y);
}

}  // namespace dislo
