#include "dislo/layer.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "dislo/errors.hpp"
#include "dislo/io.hpp"
#include "dislo/quadrature.hpp"
#include "dislo/spectral.hpp"

namespace dislo {

namespace {
constexpr double kPi = std::numbers::pi;

void require_upper_half(double y, const char* who) {
  if (!(y >= 0.0)) throw DomainError(std::string(who) + ": y must be >= 0");
  if (!std::isfinite(y)) throw DomainError(std::string(who) + ": non-finite y");
}
}  // namespace

double phi_explicit(double x, double y) {
  require_upper_half(y, "phi_explicit");
  return std::atan(x / (y + 1.0)) / kPi + 0.5;
}

std::pair<double, double> phi_explicit_gradient(double x, double y) {
  require_upper_half(y, "phi_explicit_gradient");
  double p = y + 1.0;
  double denom = kPi * (p * p + x * x);
  return {p / denom, -x / denom};
}

LayerProfile LayerProfile::explicit_arctan() {
  LayerProfile l;
  l.kind_ = Kind::ExplicitArctan;
  l.c0_ = 2.0 * kPi;
  l.alpha_ = 1.0;
  l.grid_halfwidth_ = 0.0;
  return l;
}

LayerProfile LayerProfile::tabulated(std::vector<double> x,
                                     std::vector<double> phi0, double c0,
                                     double alpha, PotentialSpec potential) {
  LayerProfile l;
  l.kind_ = Kind::Tabulated;
  l.c0_ = c0;
  l.alpha_ = alpha;
  l.grid_halfwidth_ = std::min(std::fabs(x.front()), std::fabs(x.back()));
  l.trace_ = CubicSpline(std::move(x), std::move(phi0));
  l.potential_ = std::move(potential);
  return l;
}

double LayerProfile::tail_constant() const { return 1.0 / (alpha_ * kPi); }

double LayerProfile::trace(double x) const {
  if (kind_ == Kind::ExplicitArctan) return phi_explicit(x, 0.0);
  if (std::fabs(x) <= grid_halfwidth_) return trace_.value(x);
  double heaviside = x > 0.0 ? 1.0 : 0.0;
  return heaviside - tail_constant() / x;
}

double LayerProfile::trace_deriv(double x) const {
  if (kind_ == Kind::ExplicitArctan) return phi_explicit_gradient(x, 0.0).first;
  if (std::fabs(x) <= grid_halfwidth_) return trace_.deriv(x);
  return tail_constant() / (x * x);
}

double LayerProfile::value(double x, double y) const {
  require_upper_half(y, "LayerProfile::value");
  if (kind_ == Kind::ExplicitArctan) return phi_explicit(x, y);
  if (y == 0.0) return trace(x);
  return poisson_convolve([this](double z) { return trace(z); }, x, y);
}

std::pair<double, double> LayerProfile::gradient(double x, double y) const {
  require_upper_half(y, "LayerProfile::gradient");
  if (kind_ == Kind::ExplicitArctan) return phi_explicit_gradient(x, y);
  if (y == 0.0) {
    // d/dy at the boundary from the nonlinear Neumann condition.
    return {trace_deriv(x), potential_.w_prime(trace(x))};
  }
  auto f = [this](double z) { return trace(z); };
  return {poisson_convolve_dx(f, x, y), poisson_convolve_dy(f, x, y)};
}

void LayerProfile::save(const std::string& path_base) const {
  CsvTable t;
  t.header = {"x", "phi0"};
  if (kind_ == Kind::Tabulated) {
    const int n = 2001;
    for (int i = 0; i < n; ++i) {
      double x = -grid_halfwidth_ + 2.0 * grid_halfwidth_ * i / (n - 1);
      t.rows.push_back({x, trace(x)});
    }
  } else {
    for (int i = 0; i < 2001; ++i) {
      double x = -100.0 + 0.1 * i;
      t.rows.push_back({x, trace(x)});
    }
  }
  write_csv(path_base + ".csv", t);
  std::ostringstream os;
  os << "{\"c0\":" << format_double(c0_) << ",\"alpha\":" << format_double(alpha_)
     << ",\"grid_halfwidth\":" << format_double(grid_halfwidth_) << ",\"kind\":\""
     << (kind_ == Kind::ExplicitArctan ? "explicit" : "tabulated") << "\"}\n";
  write_text_file(path_base + ".json", os.str());
}

std::pair<double, double> compute_constants(const LayerProfile& layer,
                                            const PotentialSpec& potential) {
  // x = tan(u) maps R to (-pi/2, pi/2); the 1/x^2 derivative tail (analytic
  // beyond the tabulated window) makes the transformed integrand smooth and
  // vanishing at the ends, so a composite Gauss rule is exact to roundoff.
  auto integrand = [&](double u) {
    double x = std::tan(u);
    double d = layer.trace_deriv(x);
    double sec = 1.0 / std::cos(u);
    return d * d * sec * sec;
  };
  double total = integrate_panels(integrand, -kPi / 2, kPi / 2, 96, 16);
  if (!std::isfinite(total) || total <= 0.0)
    throw ConvergenceError("compute_constants: non-integrable trace derivative");
  double c0 = 1.0 / total;
  double alpha = potential.w_double_prime(0.0);
  return {c0, alpha};
}

double poisson_extend(const std::function<double(double)>& trace, double x,
                      double y) {
  if (!(y > 0.0)) throw DomainError("poisson_extend: y must be positive");
  // Adaptive rule on the flattened integrand so that traces with kinks or
  // jumps still converge; smooth traces exit at shallow depth.
  auto g = [&](double u) { return trace(x + y * std::tan(u)); };
  double v = integrate_adaptive(g, -kPi / 2 + 1e-15, kPi / 2 - 1e-15, 1e-10, 45) /
             kPi;
  if (!std::isfinite(v) || std::fabs(v) > 1e12)
    throw DomainError("poisson_extend: trace appears unbounded");
  return v;
}

Report scaled_layer_bound_check(const LayerProfile& layer, double eps,
                                const std::vector<std::pair<double, double>>& points,
                                double admissible_C) {
  if (!(eps > 0.0 && eps < 1.0))
    throw DomainError("scaled_layer_bound_check: eps in (0,1)");
  Report rep;
  rep.title = "rescaled layer arctan bracketing";
  const double se = std::sqrt(eps);
  double fitted_C = 0.0;
  for (auto [x, y] : points) {
    if (!(y > 0.0)) throw DomainError("scaled_layer_bound_check: y > 0 required");
    double phi = layer.value(x / eps, y / eps);
    double lower0 = (kPi / 2.0 + std::atan((x - se) / y)) / kPi;
    double upper0 = (kPi / 2.0 + std::atan((x + se) / y)) / kPi;
    // Smallest C making both one-sided bounds hold at this point.
    double need_low = (lower0 - phi) / se;
    double need_up = (phi - upper0) / se;
    fitted_C = std::max({fitted_C, need_low, need_up, 0.0});
  }
  rep.add_le("fitted bracketing constant C", fitted_C, admissible_C);
  return rep;
}

LayerProfile solve_layer_general(const PotentialSpec& potential,
                                 const Grid1D& grid) {
  const int n = grid.n;
  const double L = grid.half_width;
  const double alpha = potential.w_double_prime(0.0);
  if (!(alpha > 0.0))
    throw DomainError("solve_layer_general: potential must have W''(0) > 0");
  const double s = 1.0 / alpha;  // template scale matching the 1/x tail

  auto template_trace = [&](double x) { return std::atan(x / s) / kPi + 0.5; };
  auto template_halflap = [&](double x) { return x / (kPi * (s * s + x * x)); };
  auto template_deriv = [&](double x) { return s / (kPi * (s * s + x * x)); };

  HalfLaplacianPeriodic K(n, 2.0 * L);
  const std::vector<double>& row0 = K.first_row();

  std::vector<double> xs(n);
  for (int j = 0; j < n; ++j) xs[j] = grid.node(j);

  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  std::vector<double> residual_history;

  auto phi_at = [&](int j, const Eigen::VectorXd& vv) {
    return template_trace(xs[j]) + vv[j];
  };
  auto residual = [&](const Eigen::VectorXd& vv, Eigen::VectorXd& F) {
    std::vector<double> Kv(n);
    K.apply(vv.data(), Kv.data());
    for (int j = 0; j < n; ++j)
      F[j] = Kv[j] + potential.w_prime(phi_at(j, vv)) + template_halflap(xs[j]);
  };

  // Shift so that phi(0) = 1/2; v is re-sampled through its periodic spline.
  auto recenter = [&](Eigen::VectorXd& vv) {
    std::vector<double> vals(vv.data(), vv.data() + n);
    PeriodicCubicSpline vs(vals, 2.0 * L);
    auto phi_interp = [&](double x) {
      return template_trace(x) + vs.value(x + L);  // spline parameterized from -L
    };
    double lo = -1.0, hi = 1.0;
    while (phi_interp(lo) > 0.5 && lo > -L / 2) lo *= 2.0;
    while (phi_interp(hi) < 0.5 && hi < L / 2) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
      double mid = 0.5 * (lo + hi);
      if (phi_interp(mid) < 0.5)
        lo = mid;
      else
        hi = mid;
      if (hi - lo < 1e-14) break;
    }
    double xstar = 0.5 * (lo + hi);
    if (std::fabs(xstar) < 1e-14) return;
    for (int j = 0; j < n; ++j)
      vv[j] = phi_interp(xs[j] + xstar) - template_trace(xs[j]);
  };

  Eigen::VectorXd F(n);
  residual(v, F);
  double res = F.lpNorm<Eigen::Infinity>();
  residual_history.push_back(res);

  const int max_iter = 40;
  Eigen::MatrixXd J(n + 1, n + 1);
  Eigen::VectorXd rhs(n + 1), kernel(n);
  for (int iter = 0; iter < max_iter && res > 1e-12; ++iter) {
    for (int j = 0; j < n; ++j)
      kernel[j] = template_deriv(xs[j]);  // translation mode direction
    J.setZero();
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) J(i, j) = row0[(j - i + n) % n];
      J(i, i) += potential.w_double_prime(phi_at(i, v));
      J(i, n) = kernel[i];
      J(n, i) = kernel[i];
    }
    rhs.head(n) = -F;
    rhs[n] = 0.0;
    Eigen::VectorXd d = J.partialPivLu().solve(rhs);

    double step = 1.0;
    Eigen::VectorXd v_try(n), F_try(n);
    double res_try = res;
    for (int back = 0; back < 8; ++back) {
      v_try = v + step * d.head(n);
      residual(v_try, F_try);
      res_try = F_try.lpNorm<Eigen::Infinity>();
      if (res_try < res) break;
      step *= 0.5;
    }
    v = v_try;
    recenter(v);
    residual(v, F);
    res = F.lpNorm<Eigen::Infinity>();
    residual_history.push_back(res);
  }

  if (res > 1e-8) {
    std::ostringstream os;
    for (double r : residual_history) os << r << " ";
    throw ConvergenceError("solve_layer_general: residual " +
                           std::to_string(res) + " after Newton iterations",
                           os.str());
  }

  std::vector<double> trace_x(xs), trace_v(n);
  for (int j = 0; j < n; ++j) trace_v[j] = phi_at(j, v);
  // Drop the outermost 2% of nodes where the periodic wrap leaks in.
  int skip = std::max(2, n / 50);
  std::vector<double> tx(trace_x.begin() + skip, trace_x.end() - skip);
  std::vector<double> tv(trace_v.begin() + skip, trace_v.end() - skip);

  LayerProfile out = LayerProfile::tabulated(tx, tv, 0.0, alpha, potential);
  auto [c0, a] = compute_constants(out, potential);
  return LayerProfile::tabulated(std::move(tx), std::move(tv), c0, a, potential);
}

}  // namespace dislo
