#pragma once

#include <string>
#include <vector>

#include "dislo/interp.hpp"
#include "dislo/report.hpp"

namespace dislo {

// 1-periodic multi-well misfit potential: zero on the integers, positive in
// between, with a nondegenerate well at 0.  The default sinusoidal form is
//   W(u)  = (1 - cos(2 pi u)) / (4 pi^2)
//   W'(u) = sin(2 pi u) / (2 pi)
//   W''(u)= cos(2 pi u)
// Tabulated potentials interpolate (u, W) samples on a uniform grid over
// one period with a C^2 periodic cubic spline.
class PotentialSpec {
 public:
  enum class Kind { Sinusoidal, UserTabulated };

  static PotentialSpec sinusoidal();
  // `u` must be uniform over one period starting at 0; throws FormatError
  // otherwise.
  static PotentialSpec tabulated(const std::vector<double>& u,
                                 const std::vector<double>& w);
  // "sine" or a path to a CSV with header and columns (u, W).
  static PotentialSpec from_config(const std::string& value);

  Kind kind() const { return kind_; }
  double period() const { return 1.0; }

  double w_value(double u) const;
  double w_prime(double u) const;
  double w_double_prime(double u) const;

 private:
  Kind kind_ = Kind::Sinusoidal;
  PeriodicCubicSpline table_;
};

// Checks every defining property of the potential on a sample grid and
// reports worst-case violations per condition.
Report validate_potential(const PotentialSpec& spec, int samples);

}  // namespace dislo
