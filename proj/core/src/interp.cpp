#include "dislo/interp.hpp"

#include <algorithm>
#include <cmath>

#include "dislo/errors.hpp"

namespace dislo {

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  const size_t n = x_.size();
  if (n < 3 || y_.size() != n)
    throw DomainError("CubicSpline: need >= 3 matching nodes");
  for (size_t i = 1; i < n; ++i)
    if (!(x_[i] > x_[i - 1]))
      throw DomainError("CubicSpline: abscissae must be strictly increasing");

  // Natural boundary conditions; Thomas algorithm for second derivatives.
  m_.assign(n, 0.0);
  std::vector<double> diag(n, 0.0), rhs(n, 0.0), upper(n, 0.0);
  diag[0] = 1.0;
  for (size_t i = 1; i + 1 < n; ++i) {
    double hl = x_[i] - x_[i - 1], hr = x_[i + 1] - x_[i];
    diag[i] = 2.0 * (hl + hr);
    upper[i] = hr;
    rhs[i] = 6.0 * ((y_[i + 1] - y_[i]) / hr - (y_[i] - y_[i - 1]) / hl);
  }
  diag[n - 1] = 1.0;
  // forward elimination (lower entry of row i is hl)
  for (size_t i = 1; i + 1 < n; ++i) {
    double hl = x_[i] - x_[i - 1];
    double w = (i == 1) ? 0.0 : hl / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  for (size_t i = n - 2; i >= 1; --i) {
    m_[i] = (rhs[i] - upper[i] * m_[i + 1]) / diag[i];
    if (i == 1) break;
  }
}

size_t CubicSpline::interval(double x) const {
  auto it = std::upper_bound(x_.begin(), x_.end(), x);
  size_t i = static_cast<size_t>(it - x_.begin());
  if (i == 0) return 0;
  if (i >= x_.size()) return x_.size() - 2;
  return i - 1;
}

double CubicSpline::value(double x) const {
  size_t i = interval(x);
  double h = x_[i + 1] - x_[i];
  double a = (x_[i + 1] - x) / h, b = (x - x_[i]) / h;
  return a * y_[i] + b * y_[i + 1] +
         ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
}

double CubicSpline::deriv(double x) const {
  size_t i = interval(x);
  double h = x_[i + 1] - x_[i];
  double a = (x_[i + 1] - x) / h, b = (x - x_[i]) / h;
  return (y_[i + 1] - y_[i]) / h +
         ((3.0 * b * b - 1.0) * m_[i + 1] - (3.0 * a * a - 1.0) * m_[i]) * h / 6.0;
}

double CubicSpline::deriv2(double x) const {
  size_t i = interval(x);
  double h = x_[i + 1] - x_[i];
  double a = (x_[i + 1] - x) / h, b = (x - x_[i]) / h;
  return a * m_[i] + b * m_[i + 1];
}

PeriodicCubicSpline::PeriodicCubicSpline(std::vector<double> values,
                                         double period)
    : y_(std::move(values)), period_(period) {
  const size_t n = y_.size();
  if (n < 4) throw DomainError("PeriodicCubicSpline: need >= 4 nodes");
  if (!(period > 0.0)) throw DomainError("PeriodicCubicSpline: period > 0");
  h_ = period_ / static_cast<double>(n);

  // Cyclic tridiagonal system m[i-1] + 4*m[i] + m[i+1] = rhs[i] solved by
  // Sherman-Morrison around a plain Thomas sweep.
  std::vector<double> rhs(n);
  for (size_t i = 0; i < n; ++i) {
    double ym = y_[(i + n - 1) % n], yp = y_[(i + 1) % n];
    rhs[i] = 6.0 * (yp - 2.0 * y_[i] + ym) / (h_ * h_);
  }
  const double alpha = 1.0, beta = 1.0, gamma = -4.0;
  std::vector<double> d(n, 4.0);
  d[0] -= gamma;
  d[n - 1] -= alpha * beta / gamma;
  auto thomas = [&](const std::vector<double>& dd, std::vector<double> rr) {
    std::vector<double> c(n), x(n);
    c[0] = 1.0 / dd[0];
    rr[0] /= dd[0];
    for (size_t i = 1; i < n; ++i) {
      double m = 1.0 / (dd[i] - c[i - 1]);
      c[i] = m;
      rr[i] = (rr[i] - rr[i - 1]) * m;
    }
    x[n - 1] = rr[n - 1];
    for (size_t i = n - 1; i-- > 0;) x[i] = rr[i] - c[i] * x[i + 1];
    return x;
  };
  std::vector<double> u(n, 0.0);
  u[0] = gamma;
  u[n - 1] = alpha;
  std::vector<double> x = thomas(d, rhs);
  std::vector<double> z = thomas(d, u);
  double fact = (x[0] + beta * x[n - 1] / gamma) /
                (1.0 + z[0] + beta * z[n - 1] / gamma);
  m_.resize(n);
  for (size_t i = 0; i < n; ++i) m_[i] = x[i] - fact * z[i];
}

double PeriodicCubicSpline::value(double x) const {
  const size_t n = y_.size();
  double t = std::fmod(x, period_);
  if (t < 0) t += period_;
  size_t i = std::min(static_cast<size_t>(t / h_), n - 1);
  size_t ip = (i + 1) % n;
  double a = ((i + 1) * h_ - t) / h_, b = (t - i * h_) / h_;
  return a * y_[i] + b * y_[ip] +
         ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[ip]) * h_ * h_ / 6.0;
}

double PeriodicCubicSpline::deriv(double x) const {
  const size_t n = y_.size();
  double t = std::fmod(x, period_);
  if (t < 0) t += period_;
  size_t i = std::min(static_cast<size_t>(t / h_), n - 1);
  size_t ip = (i + 1) % n;
  double a = ((i + 1) * h_ - t) / h_, b = (t - i * h_) / h_;
  return (y_[ip] - y_[i]) / h_ +
         ((3.0 * b * b - 1.0) * m_[ip] - (3.0 * a * a - 1.0) * m_[i]) * h_ / 6.0;
}

double PeriodicCubicSpline::deriv2(double x) const {
  const size_t n = y_.size();
  double t = std::fmod(x, period_);
  if (t < 0) t += period_;
  size_t i = std::min(static_cast<size_t>(t / h_), n - 1);
  size_t ip = (i + 1) % n;
  double a = ((i + 1) * h_ - t) / h_, b = (t - i * h_) / h_;
  return a * m_[i] + b * m_[ip];
}

GradedLattice2D::GradedLattice2D(double x_max, double y_max, int nx, int ny,
                                 double kappa_x, double kappa_y)
    : x_max_(x_max), y_max_(y_max), kx_(kappa_x), ky_(kappa_y), nx_(nx), ny_(ny) {
  if (nx < 4 || ny < 4) throw DomainError("GradedLattice2D: need >= 4x4 nodes");
  v_.assign(static_cast<size_t>(nx) * ny, 0.0);
}

double GradedLattice2D::node_x(int i) const {
  double s = -1.0 + 2.0 * i / (nx_ - 1);
  return x_max_ * std::sinh(kx_ * s) / std::sinh(kx_);
}

double GradedLattice2D::node_y(int j) const {
  double s = static_cast<double>(j) / (ny_ - 1);
  return y_max_ * std::sinh(ky_ * s) / std::sinh(ky_);
}

double GradedLattice2D::sx_of_x(double x) const {
  return std::asinh(x * std::sinh(kx_) / x_max_) / kx_;
}

double GradedLattice2D::sy_of_y(double y) const {
  return std::asinh(y * std::sinh(ky_) / y_max_) / ky_;
}

bool GradedLattice2D::contains(double x, double y) const {
  return std::fabs(x) <= x_max_ && y >= 0.0 && y <= y_max_;
}

namespace {
inline double catmull_rom(double p0, double p1, double p2, double p3, double t) {
  return 0.5 * (2.0 * p1 + (-p0 + p2) * t +
                (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * t * t +
                (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * t * t * t);
}
}  // namespace

double GradedLattice2D::value(double x, double y) const {
  double sx = (sx_of_x(x) + 1.0) * 0.5 * (nx_ - 1);
  double sy = sy_of_y(y) * (ny_ - 1);
  sx = std::clamp(sx, 0.0, static_cast<double>(nx_ - 1));
  sy = std::clamp(sy, 0.0, static_cast<double>(ny_ - 1));
  int i = std::min(static_cast<int>(sx), nx_ - 2);
  int j = std::min(static_cast<int>(sy), ny_ - 2);
  double tx = sx - i, ty = sy - j;
  auto cx = [&](int jj) {
    int i0 = std::max(i - 1, 0), i2 = std::min(i + 1, nx_ - 1),
        i3 = std::min(i + 2, nx_ - 1);
    return catmull_rom(at(i0, jj), at(i, jj), at(i2, jj), at(i3, jj), tx);
  };
  int j0 = std::max(j - 1, 0), j2 = std::min(j + 1, ny_ - 1),
      j3 = std::min(j + 2, ny_ - 1);
  return catmull_rom(cx(j0), cx(j), cx(j2), cx(j3), ty);
}

}  // namespace dislo
