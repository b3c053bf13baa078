#include "dislo/potential.hpp"

#include <cmath>
#include <numbers>

#include "dislo/errors.hpp"
#include "dislo/io.hpp"

namespace dislo {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_finite(double u, const char* who) {
  if (!std::isfinite(u)) throw DomainError(std::string(who) + ": non-finite input");
}
}  // namespace

PotentialSpec PotentialSpec::sinusoidal() {
  PotentialSpec p;
  p.kind_ = Kind::Sinusoidal;
  return p;
}

PotentialSpec PotentialSpec::tabulated(const std::vector<double>& u,
                                       const std::vector<double>& w) {
  if (u.size() != w.size() || u.size() < 8)
    throw FormatError("tabulated potential: need >= 8 matching samples");
  const size_t n = u.size();
  const double h = 1.0 / static_cast<double>(n);
  for (size_t i = 0; i < n; ++i) {
    if (std::fabs(u[i] - i * h) > 1e-9 * std::max(1.0, std::fabs(u[i])))
      throw FormatError(
          "tabulated potential: samples must be uniform over one period "
          "starting at u=0");
  }
  PotentialSpec p;
  p.kind_ = Kind::UserTabulated;
  p.table_ = PeriodicCubicSpline(w, 1.0);
  return p;
}

PotentialSpec PotentialSpec::from_config(const std::string& value) {
  if (value == "sine") return sinusoidal();
  CsvTable t = read_csv(value);
  if (t.cols() < 2)
    throw FormatError("potential CSV needs columns (u, W): " + value);
  std::vector<double> u, w;
  u.reserve(t.rows.size());
  w.reserve(t.rows.size());
  for (const auto& row : t.rows) {
    u.push_back(row[0]);
    w.push_back(row[1]);
  }
  return tabulated(u, w);
}

double PotentialSpec::w_value(double u) const {
  check_finite(u, "w_value");
  if (kind_ == Kind::Sinusoidal)
    return (1.0 - std::cos(kTwoPi * u)) / (4.0 * std::numbers::pi * std::numbers::pi);
  return table_.value(u);
}

double PotentialSpec::w_prime(double u) const {
  check_finite(u, "w_prime");
  if (kind_ == Kind::Sinusoidal) return std::sin(kTwoPi * u) / kTwoPi;
  return table_.deriv(u);
}

double PotentialSpec::w_double_prime(double u) const {
  check_finite(u, "w_double_prime");
  if (kind_ == Kind::Sinusoidal) return std::cos(kTwoPi * u);
  return table_.deriv2(u);
}

Report validate_potential(const PotentialSpec& spec, int samples) {
  if (samples < 100) throw DomainError("validate_potential: samples >= 100");
  Report rep;
  rep.title = "potential validation";
  const double tol_per =
      spec.kind() == PotentialSpec::Kind::Sinusoidal ? 1e-12 : 1e-8;

  double worst_periodicity = 0.0;
  double min_interior = 1e300;
  double worst_zero = 0.0;
  double worst_fd = 0.0;
  for (int i = 0; i <= samples; ++i) {
    double u = -2.0 + 4.0 * i / samples;
    worst_periodicity =
        std::max(worst_periodicity, std::fabs(spec.w_value(u + 1.0) - spec.w_value(u)));
    double frac = u - std::floor(u);
    if (frac > 0.05 && frac < 0.95)
      min_interior = std::min(min_interior, spec.w_value(u));
    const double h = 1e-4;
    double fd = (spec.w_value(u + h) - spec.w_value(u - h)) / (2.0 * h);
    worst_fd = std::max(worst_fd, std::fabs(spec.w_prime(u) - fd));
  }
  for (int k = -2; k <= 2; ++k)
    worst_zero = std::max(worst_zero, std::fabs(spec.w_value(k)));

  rep.add_le("periodicity |W(u+1)-W(u)|", worst_periodicity, tol_per);
  rep.add_le("zeros on integers |W(k)|", worst_zero, tol_per);
  rep.add_ge("positivity min W on wells' complement", min_interior, 1e-12);
  rep.add_ge("well nondegeneracy W''(0)", spec.w_double_prime(0.0), 1e-12);
  // Centered difference of a C^2 function carries an O(h^2) error; 1e-6
  // leaves two orders of headroom at h=1e-4.
  rep.add_le("derivative consistency |W' - FD(W)|", worst_fd, 1e-6);
  return rep;
}

}  // namespace dislo
