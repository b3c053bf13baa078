#pragma once

#include <cstddef>
#include <vector>

namespace dislo {

// Natural cubic spline on a strictly increasing, possibly nonuniform grid.
class CubicSpline {
 public:
  CubicSpline() = default;
  CubicSpline(std::vector<double> x, std::vector<double> y);

  double value(double x) const;
  double deriv(double x) const;
  double deriv2(double x) const;

  double x_min() const { return x_.front(); }
  double x_max() const { return x_.back(); }
  bool empty() const { return x_.empty(); }

 private:
  size_t interval(double x) const;
  std::vector<double> x_, y_, m_;  // m_ = second derivatives at nodes
};

// C^2 periodic cubic spline on a uniform grid over one period [0, P).
// Node j carries the value at x = j*P/n.
class PeriodicCubicSpline {
 public:
  PeriodicCubicSpline() = default;
  PeriodicCubicSpline(std::vector<double> values, double period);

  double value(double x) const;
  double deriv(double x) const;
  double deriv2(double x) const;
  double period() const { return period_; }

 private:
  std::vector<double> y_, m_;
  double period_ = 1.0, h_ = 1.0;
};

// Value table on a sinh-graded rectangle, evaluated with Catmull-Rom
// bicubic interpolation in the uniform transformed coordinates.  The grid
// clusters nodes near X=0 and Y=0 where the profiles vary fastest.
//   X(s) = Xmax * sinh(kx*s)/sinh(kx),  s in [-1,1]
//   Y(s) = Ymax * sinh(ky*s)/sinh(ky),  s in [0,1]
class GradedLattice2D {
 public:
  GradedLattice2D() = default;
  GradedLattice2D(double x_max, double y_max, int nx, int ny,
                  double kappa_x = 3.0, double kappa_y = 3.0);

  double node_x(int i) const;
  double node_y(int j) const;
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double x_max() const { return x_max_; }
  double y_max() const { return y_max_; }
  bool contains(double x, double y) const;

  double& at(int i, int j) { return v_[static_cast<size_t>(j) * nx_ + i]; }
  double at(int i, int j) const { return v_[static_cast<size_t>(j) * nx_ + i]; }

  double value(double x, double y) const;

 private:
  double sx_of_x(double x) const;
  double sy_of_y(double y) const;
  double x_max_ = 0, y_max_ = 0, kx_ = 3.0, ky_ = 3.0;
  int nx_ = 0, ny_ = 0;
  std::vector<double> v_;
};

}  // namespace dislo
