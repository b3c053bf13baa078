#include "dislo/correctors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "dislo/errors.hpp"
#include "dislo/quadrature.hpp"
#include "dislo/spectral.hpp"

namespace dislo {

namespace {
constexpr double kPi = std::numbers::pi;
}

// ---------------------------------------------------------------------------
// psi

double PsiProfile::trace(double x) const {
  if (std::fabs(x) <= grid_halfwidth_) return spline_.value(x);
  return tail_c_ / x + tail_d_ / (x * x);
}

double PsiProfile::trace_deriv(double x) const {
  if (std::fabs(x) <= grid_halfwidth_) return spline_.deriv(x);
  return -tail_c_ / (x * x) - 2.0 * tail_d_ / (x * x * x);
}

double PsiProfile::value(double x, double y) const {
  if (!(y >= 0.0)) throw DomainError("PsiProfile::value: y must be >= 0");
  if (y == 0.0) return trace(x);
  return poisson_convolve([this](double z) { return trace(z); }, x, y, 32, 16);
}

double PsiProfile::deriv_x(double x, double y) const {
  if (!(y >= 0.0)) throw DomainError("PsiProfile::deriv_x: y must be >= 0");
  if (y == 0.0) return trace_deriv(x);
  return poisson_convolve_dx([this](double z) { return trace(z); }, x, y, 32, 16);
}

double PsiProfile::deriv_y(double x, double y) const {
  if (!(y >= 0.0)) throw DomainError("PsiProfile::deriv_y: y must be >= 0");
  if (y == 0.0) {
    double phi0 = layer_->trace(x);
    double wpp = potential_.w_double_prime(phi0);
    return wpp * trace(x) + (wpp - alpha_) / (alpha_ * c0_) +
           layer_->trace_deriv(x);
  }
  return poisson_convolve_dy([this](double z) { return trace(z); }, x, y, 32, 16);
}

std::vector<double> solve_psi_linear(const LayerProfile& layer,
                                     const PotentialSpec& potential,
                                     const Grid1D& grid,
                                     const std::vector<double>& rhs) {
  const int n = grid.n;
  if (static_cast<int>(rhs.size()) != n)
    throw DomainError("solve_psi_linear: rhs size mismatch");
  HalfLaplacianPeriodic K(n, 2.0 * grid.half_width);
  const std::vector<double>& row0 = K.first_row();

  Eigen::MatrixXd A(n + 1, n + 1);
  Eigen::VectorXd b(n + 1);
  A.setZero();
  for (int i = 0; i < n; ++i) {
    double x = grid.node(i);
    for (int j = 0; j < n; ++j) A(i, j) = row0[(j - i + n) % n];
    A(i, i) += potential.w_double_prime(layer.trace(x));
    double k = layer.trace_deriv(x);
    A(i, n) = k;
    A(n, i) = k;
    b[i] = rhs[i];
  }
  b[n] = 0.0;

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  Eigen::VectorXd sol = lu.solve(b);
  double check = (A * sol - b).lpNorm<Eigen::Infinity>() /
                 std::max(1.0, b.lpNorm<Eigen::Infinity>());
  if (!std::isfinite(check) || check > 1e-8) {
    std::ostringstream os;
    os << "solve_psi_linear: bordered system near-singular, backsolve residual "
       << check << "; translation mode magnitude " << sol[n];
    throw ConvergenceError(os.str());
  }
  return std::vector<double>(sol.data(), sol.data() + n);
}

PsiProfile solve_psi(const LayerProfile& layer, const PotentialSpec& potential,
                     double c0, double alpha, const Grid1D& grid) {
  const int n = grid.n;
  std::vector<double> rhs(n);
  for (int i = 0; i < n; ++i) {
    double x = grid.node(i);
    double wpp = potential.w_double_prime(layer.trace(x));
    rhs[i] = -((wpp - alpha) / (alpha * c0) + layer.trace_deriv(x));
  }
  std::vector<double> psi0 = solve_psi_linear(layer, potential, grid, rhs);

  // Discrete residual of the boundary equation itself.
  HalfLaplacianPeriodic K(n, 2.0 * grid.half_width);
  std::vector<double> Kpsi = K.apply(psi0);
  double res = 0.0;
  for (int i = 0; i < n; ++i) {
    double x = grid.node(i);
    double r = Kpsi[i] + potential.w_double_prime(layer.trace(x)) * psi0[i] - rhs[i];
    res = std::max(res, std::fabs(r));
  }

  // Tail fit psi ~ c/x + d/x^2 on 20 <= |x| <= min(100, 0.45 L).
  double fit_lo = 20.0, fit_hi = std::min(100.0, 0.45 * grid.half_width);
  Eigen::Matrix2d M = Eigen::Matrix2d::Zero();
  Eigen::Vector2d v = Eigen::Vector2d::Zero();
  for (int i = 0; i < n; ++i) {
    double x = grid.node(i);
    double ax = std::fabs(x);
    if (ax < fit_lo || ax > fit_hi) continue;
    double b1 = 1.0 / x, b2 = 1.0 / (x * x);
    M(0, 0) += b1 * b1;
    M(0, 1) += b1 * b2;
    M(1, 0) += b1 * b2;
    M(1, 1) += b2 * b2;
    v[0] += b1 * psi0[i];
    v[1] += b2 * psi0[i];
  }
  Eigen::Vector2d cd = M.ldlt().solve(v);

  int skip = std::max(2, n / 50);
  std::vector<double> xs, vs;
  xs.reserve(n - 2 * skip);
  for (int i = skip; i < n - skip; ++i) {
    xs.push_back(grid.node(i));
    vs.push_back(psi0[i]);
  }

  PsiProfile out;
  out.spline_ = CubicSpline(xs, vs);
  out.grid_halfwidth_ = std::min(std::fabs(xs.front()), std::fabs(xs.back()));
  out.tail_c_ = cd[0];
  out.tail_d_ = cd[1];
  out.residual_sup_ = res;
  out.c0_ = c0;
  out.alpha_ = alpha;
  out.layer_ = std::make_shared<LayerProfile>(layer);
  out.potential_ = potential;
  return out;
}

// ---------------------------------------------------------------------------
// Green function and cutoff

double green_half_plane(double source_x, double source_y, double target_x,
                        double target_y) {
  if (!(source_y > 0.0))
    throw DomainError("green_half_plane: source must be strictly interior");
  if (!(target_y >= 0.0)) throw DomainError("green_half_plane: target y >= 0");
  double dx = source_x - target_x;
  double dym = source_y - target_y;
  double dyp = source_y + target_y;
  double r2 = dx * dx + dym * dym;
  if (r2 == 0.0) throw SingularityError("green_half_plane: source == target");
  double rr2 = dx * dx + dyp * dyp;
  return 0.25 / kPi * (std::log(rr2) - std::log(r2));
}

double cutoff_g(double y, double R) {
  if (!(R > 2.0)) throw DomainError("cutoff_g: R must exceed 2");
  if (!(y >= 0.0)) throw DomainError("cutoff_g: y must be >= 0");
  if (y <= 0.5 * R) return 1.0;
  if (y >= R) return 0.0;
  double t = (R - y) / (0.5 * R);  // in (0,1)
  auto sigma = [](double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; };
  return sigma(t) / (sigma(t) + sigma(1.0 - t));
}

// ---------------------------------------------------------------------------
// q

namespace {

// For the arctan layer, dphi/dx(.,y') is the Poisson kernel at height y'+1,
// and its convolution with the image-log kernel is again a log:
//   int G(Z',Z) dphi/dx(x',y') dx'
//     = [ln(X^2 + (Y+2y'+1)^2) - ln(X^2 + (|Y-y'|+y'+1)^2)] / (4 pi).
struct ExplicitQIntegrand {
  double X, Y, R;

  double value(double yp) const {
    double A = Y + 2.0 * yp + 1.0;
    double B = std::fabs(Y - yp) + yp + 1.0;
    return cutoff_g(yp, R) *
           (std::log(X * X + A * A) - std::log(X * X + B * B));
  }
  double dx(double yp) const {
    double A = Y + 2.0 * yp + 1.0;
    double B = std::fabs(Y - yp) + yp + 1.0;
    return cutoff_g(yp, R) *
           (2.0 * X / (X * X + A * A) - 2.0 * X / (X * X + B * B));
  }
  double dy(double yp) const {
    double A = Y + 2.0 * yp + 1.0;
    double B = std::fabs(Y - yp) + yp + 1.0;
    double sgn = Y > yp ? 1.0 : (Y < yp ? -1.0 : 0.0);
    return cutoff_g(yp, R) *
           (2.0 * A / (X * X + A * A) - sgn * 2.0 * B / (X * X + B * B));
  }
};

template <typename F>
double integrate_q_segments(const F& f, double Y, double R) {
  // Integrand kinks at y' = Y (image distance) and y' = R/2 (cutoff).
  std::vector<double> cuts = {0.0, R};
  if (Y > 0.0 && Y < R) cuts.push_back(Y);
  cuts.push_back(0.5 * R);
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] - cuts[i] < 1e-14) continue;
    total += integrate_panels(f, cuts[i], cuts[i + 1], 12, 16);
  }
  return total / (4.0 * kPi);
}

}  // namespace

double QField::value_direct(double X, double Y) const {
  if (!(Y >= 0.0)) throw DomainError("QField::value: Y must be >= 0");
  if (Y == 0.0) return 0.0;
  if (layer_->kind() == LayerProfile::Kind::ExplicitArctan) {
    ExplicitQIntegrand f{X, Y, R_};
    return integrate_q_segments([&](double yp) { return f.value(yp); }, Y, R_);
  }
  return q_value_quadrature2d(*layer_, R_, X, Y);
}

double QField::deriv_x_direct(double X, double Y) const {
  if (!(Y >= 0.0)) throw DomainError("QField::deriv_x: Y must be >= 0");
  if (Y == 0.0) return 0.0;
  if (layer_->kind() == LayerProfile::Kind::ExplicitArctan) {
    ExplicitQIntegrand f{X, Y, R_};
    return integrate_q_segments([&](double yp) { return f.dx(yp); }, Y, R_);
  }
  const double h = 1e-4 * std::max(1.0, std::fabs(X));
  return (q_value_quadrature2d(*layer_, R_, X + h, Y) -
          q_value_quadrature2d(*layer_, R_, X - h, Y)) /
         (2.0 * h);
}

double QField::deriv_y_direct(double X, double Y) const {
  if (!(Y >= 0.0)) throw DomainError("QField::deriv_y: Y must be >= 0");
  if (layer_->kind() == LayerProfile::Kind::ExplicitArctan) {
    ExplicitQIntegrand f{X, std::max(Y, 0.0), R_};
    return integrate_q_segments([&](double yp) { return f.dy(yp); }, Y, R_);
  }
  const double h = 1e-4 * std::max(1.0, Y);
  if (Y < h) return q_value_quadrature2d(*layer_, R_, X, Y + h) / h;
  return (q_value_quadrature2d(*layer_, R_, X, Y + h) -
          q_value_quadrature2d(*layer_, R_, X, Y - h)) /
         (2.0 * h);
}

double QField::value(double X, double Y) const {
  if (Y == 0.0) return 0.0;
  if (lattice_.nx() > 0 && lattice_.contains(X, Y)) return lattice_.value(X, Y);
  return value_direct(X, Y);
}

double QField::deriv_x(double X, double Y) const { return deriv_x_direct(X, Y); }

double QField::deriv_y(double X, double Y) const { return deriv_y_direct(X, Y); }

QField build_q(const LayerProfile& layer, double eps, double b, double x_span,
               double y_span) {
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("build_q: eps in (0,1)");
  if (!(b > 0.0 && b < 1.0)) throw DomainError("build_q: b in (0,1)");
  QField q;
  q.eps_ = eps;
  q.b_ = b;
  q.R_ = 2.0 * std::pow(eps, -b);
  q.layer_ = std::make_shared<LayerProfile>(layer);
  if (x_span <= 0.0) x_span = std::max(100.0, 4.0 * q.R_);
  if (y_span <= 0.0) y_span = std::max(120.0, 4.0 * q.R_);

  const int nx = 193, ny = 161;
  q.lattice_ = GradedLattice2D(x_span, y_span, nx, ny, 3.0, 2.5);
  for (int j = 0; j < ny; ++j) {
    double Y = q.lattice_.node_y(j);
    for (int i = 0; i < nx; ++i)
      q.lattice_.at(i, j) = (j == 0) ? 0.0 : q.value_direct(q.lattice_.node_x(i), Y);
  }
  return q;
}

double q_value_quadrature2d(const LayerProfile& layer, double R, double X,
                            double Y, double abs_tol) {
  if (!(Y >= 0.0)) throw DomainError("q_value_quadrature2d: Y >= 0");
  if (Y == 0.0) return 0.0;
  // Inner x'-integral over all of R through x' = X + s*tan(v); the log
  // singularity sits at v = 0, where the domain is split.
  auto inner = [&](double yp) {
    auto fb = [&](double xp) {
      double dphix = layer.gradient(xp, yp).first;
      double dx = xp - X, dym = yp - Y, dyp2 = yp + Y;
      double r2 = dx * dx + dym * dym;
      if (r2 == 0.0) return 0.0;  // removable after splitting
      double g = 0.25 / kPi * (std::log(dx * dx + dyp2 * dyp2) - std::log(r2));
      return dphix * g;
    };
    double s = std::max(1.0, std::fabs(yp - Y));
    auto ft = [&](double v) {
      double c = std::cos(v);
      return fb(X + s * std::tan(v)) * s / (c * c);
    };
    const double vmax = kPi / 2 - 1e-12;
    double tol = abs_tol / (4.0 * R);
    return integrate_adaptive(ft, -vmax, -1e-10, tol) +
           integrate_adaptive(ft, 1e-10, vmax, tol);
  };
  auto outer = [&](double yp) { return cutoff_g(yp, R) * inner(yp); };
  double total = 0.0;
  std::vector<double> cuts = {0.0, 0.5 * R, R};
  if (Y > 0.0 && Y < R) cuts.push_back(Y);
  std::sort(cuts.begin(), cuts.end());
  for (size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] - cuts[i] < 1e-14) continue;
    total += integrate_adaptive(outer, cuts[i], cuts[i + 1], abs_tol / 8.0, 28);
  }
  return total;
}

// ---------------------------------------------------------------------------
// decay-estimate fits

Report verify_corrector_bounds(const QField& q, const PsiProfile& psi,
                               double admissible_C) {
  Report rep;
  rep.title = "corrector decay estimates";
  const double R = q.R();
  const double lnR = std::log(R);

  // q <= C R ln R and |grad q| <= C ln R on a graded lattice up to 2R.
  double Cq = 0.0, Cgrad = 0.0;
  for (int j = 1; j <= 12; ++j) {
    double Y = 2.0 * R * j / 12.0;
    for (int i = -12; i <= 12; ++i) {
      double X = 0.35 * R * i;
      double qv = q.value_direct(X, Y);
      Cq = std::max(Cq, qv / (R * lnR));
      Cgrad = std::max(Cgrad, std::fabs(q.deriv_x_direct(X, Y)) / lnR);
      Cgrad = std::max(Cgrad, std::fabs(q.deriv_y_direct(X, Y)) / lnR);
      if (qv < -1e-9) Cq = 1e300;  // positivity violated
    }
  }
  rep.add_le("fitted C in q <= C R lnR", Cq, admissible_C);
  rep.add_le("fitted C in |grad q| <= C lnR", Cgrad, admissible_C);

  // Far field y >= 2R: q <= C R^2 / y, |grad q| <= C R / y.
  double Cfar = 0.0, Cfar_grad = 0.0;
  for (int j = 1; j <= 8; ++j) {
    double Y = 2.0 * R * (1.0 + j);
    for (int i = -6; i <= 6; ++i) {
      double X = 0.5 * R * i;
      Cfar = std::max(Cfar, q.value_direct(X, Y) * Y / (R * R));
      Cfar_grad =
          std::max(Cfar_grad, std::fabs(q.deriv_x_direct(X, Y)) * Y / R);
      Cfar_grad =
          std::max(Cfar_grad, std::fabs(q.deriv_y_direct(X, Y)) * Y / R);
    }
  }
  rep.add_le("fitted C in q <= C R^2/y (y>=2R)", Cfar, admissible_C);
  rep.add_le("fitted C in |grad q| <= C R/y (y>=2R)", Cfar_grad, admissible_C);

  // psi trace tails: |psi - c/x| <= C/x^2 and |dpsi/dx| <= C/x^2.
  double Cpsi_tail = 0.0, Cpsi_dx = 0.0;
  for (int i = 0; i < 60; ++i) {
    double x = 10.0 + 1.5 * i;
    if (x > 0.9 * psi.grid_halfwidth()) break;
    for (double sgn : {-1.0, 1.0}) {
      double xx = sgn * x;
      Cpsi_tail = std::max(
          Cpsi_tail,
          std::fabs(psi.trace(xx) - psi.tail_coefficient() / xx) * xx * xx);
      Cpsi_dx = std::max(Cpsi_dx, std::fabs(psi.trace_deriv(xx)) * xx * xx);
    }
  }
  rep.add_le("fitted C in |psi - c/x| <= C/x^2", Cpsi_tail, admissible_C);
  rep.add_le("fitted C in |dpsi/dx| <= C/x^2", Cpsi_dx, admissible_C);

  // Bulk decay: |psi| <= C/y, |dpsi/dx| <= C/y for y >= 1.
  double Cpsi_y = 0.0;
  for (double y : {1.0, 2.0, 4.0, 8.0, 16.0, 32.0}) {
    for (int i = -6; i <= 6; ++i) {
      double x = 5.0 * i;
      Cpsi_y = std::max(Cpsi_y, std::fabs(psi.value(x, y)) * y);
      Cpsi_y = std::max(Cpsi_y, std::fabs(psi.deriv_x(x, y)) * y);
    }
  }
  rep.add_le("fitted C in |psi| <= C/y (y>=1)", Cpsi_y, admissible_C);

  // |psi| <= C/|x| for x > 1, y in [0, 5].
  double Cpsi_x = 0.0;
  for (double y : {0.0, 0.5, 1.0, 2.5, 5.0}) {
    for (double x : {1.5, 3.0, 6.0, 12.0, 25.0, 50.0}) {
      Cpsi_x = std::max(Cpsi_x, std::fabs(psi.value(x, y)) * x);
    }
  }
  rep.add_le("fitted C in |psi| <= C/x (x>1)", Cpsi_x, admissible_C);

  return rep;
}

}  // namespace dislo
