#include "dislo/barriers.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dislo/errors.hpp"

namespace dislo {

// ---------------------------------------------------------------------------
// exponents

Report check_exponents(const BarrierExponents& e) {
  Report rep;
  rep.title = "barrier exponent inequalities";
  const double a = e.a;
  rep.add("b in (0, min(1,a))", e.b > 0.0 && e.b < std::min(1.0, a), e.b,
          std::min(1.0, a));
  rep.add_ge("theta + gamma > 1", e.theta + e.gamma, 1.0 + 1e-15);
  rep.add("0 < theta < a", e.theta > 0.0 && e.theta < a, e.theta, a);
  rep.add("gamma in (0,1)", e.gamma > 0.0 && e.gamma < 1.0, e.gamma, 1.0);

  // k0: least integer >= 1 with 1 - (k0+1) b <= 0.
  bool k0_def = e.k0 >= 1 && 1.0 - (e.k0 + 1) * e.b <= 0.0 &&
                (e.k0 == 1 || 1.0 - e.k0 * e.b > 0.0);
  rep.add("k0 defining inequality", k0_def, e.k0, 0.0);
  // k1: least integer >= 0 with (k1+1) a / 2 > 1.
  bool k1_def = e.k1 >= 0 && (e.k1 + 1) * a / 2.0 > 1.0 &&
                (e.k1 == 0 || e.k1 * a / 2.0 <= 1.0);
  rep.add("k1 defining inequality", k1_def, e.k1, 0.0);

  double worst3 = 1e300;
  for (int k = 1; k <= e.k0; ++k) {
    double lhs = a + k * e.b - 1.0;
    double rhs = e.theta - (2.0 - e.gamma) * (1.0 - (k + 1) * e.b);
    worst3 = std::min(worst3, lhs - rhs);
  }
  rep.add_ge("bulk band inequality, k = 1..k0", worst3, 1e-15);

  double worst4 = 1e300;
  for (int k = 0; k <= e.k1; ++k) {
    double lhs = (1.0 + 0.5 * k) * a;
    double rhs = e.theta + (2.0 - e.gamma) * 0.5 * (k + 1) * a;
    worst4 = std::min(worst4, lhs - rhs);
  }
  rep.add_ge("far band inequality, k = 0..k1", worst4, 1e-15);

  rep.add_ge("(k1+1) a/2 > 1 + r", (e.k1 + 1) * a / 2.0 - (1.0 + e.r), 1e-15);
  rep.add("0 < tau < r", e.tau > 0.0 && e.tau < e.r, e.tau, e.r);
  rep.add_ge("delta > 0", e.delta, 1e-300);
  return rep;
}

BarrierExponents select_exponents(double a, double delta, double alpha) {
  if (!(a > 0.0)) throw DomainError("select_exponents: a > 0 required");
  if (!(delta > 0.0)) throw DomainError("select_exponents: delta > 0 required");
  if (!(alpha > 0.0)) throw DomainError("select_exponents: alpha > 0 required");
  BarrierExponents e;
  e.a = a;
  e.delta = delta;
  e.delta_tilde = delta / alpha;
  e.b = 0.5 * std::min(1.0, a);

  e.k0 = 1;
  while (1.0 - (e.k0 + 1) * e.b > 0.0) ++e.k0;
  e.k1 = 0;
  while ((e.k1 + 1) * a / 2.0 <= 1.0) ++e.k1;

  bool found = false;
  for (int m = 1; m <= 60 && !found; ++m) {
    double theta = std::pow(2.0, -m);
    double gamma = 1.0 - 0.5 * theta;
    if (!(theta < a)) continue;
    bool ok = true;
    for (int k = 1; k <= e.k0 && ok; ++k)
      ok = a + k * e.b - 1.0 >
           theta - (2.0 - gamma) * (1.0 - (k + 1) * e.b);
    for (int k = 0; k <= e.k1 && ok; ++k)
      ok = (1.0 + 0.5 * k) * a > theta + (2.0 - gamma) * 0.5 * (k + 1) * a;
    if (ok) {
      e.theta = theta;
      e.gamma = gamma;
      found = true;
    }
  }
  if (!found)
    throw ConvergenceError("select_exponents: no feasible theta within 2^-60");

  e.r = 0.5 * ((e.k1 + 1) * a / 2.0 - 1.0);
  e.tau = 0.5 * e.r;

  Report rep = check_exponents(e);
  if (!rep.all_pass())
    throw ConvergenceError("select_exponents: produced infeasible exponents: " +
                           rep.summary_line());
  return e;
}

// ---------------------------------------------------------------------------
// evaluator

BarrierEvaluator::BarrierEvaluator(BarrierKind kind,
                                   const BarrierExponents& exponents,
                                   double eps, ParticleTrajectory trajectory,
                                   std::shared_ptr<const LayerProfile> layer,
                                   std::shared_ptr<const PsiProfile> psi,
                                   std::shared_ptr<const QField> q,
                                   PotentialSpec potential, BarrierOptions options)
    : kind_(kind),
      expo_(exponents),
      eps_(eps),
      traj_(std::move(trajectory)),
      layer_(std::move(layer)),
      psi_(std::move(psi)),
      q_(std::move(q)),
      potential_(std::move(potential)) {
  if (!(eps_ > 0.0 && eps_ < 1.0)) throw DomainError("BarrierEvaluator: eps in (0,1)");
  Orientation want =
      kind_ == BarrierKind::Super ? Orientation::Super : Orientation::Sub;
  if (traj_.orientation() != want)
    throw DomainError("BarrierEvaluator: trajectory orientation mismatch");
  double expected_R = 2.0 * std::pow(eps_, -expo_.b);
  if (std::fabs(q_->R() - expected_R) > 1e-9 * expected_R)
    throw DomainError("BarrierEvaluator: QField built with a different R");
  if (options.build_psi_lattice) {
    psi_lattice_ = GradedLattice2D(options.psi_x_span, options.psi_y_span,
                                   options.psi_nx, options.psi_ny, 3.0, 2.5);
    for (int j = 0; j < options.psi_ny; ++j) {
      double Y = psi_lattice_.node_y(j);
      for (int i = 0; i < options.psi_nx; ++i) {
        double X = psi_lattice_.node_x(i);
        psi_lattice_.at(i, j) = psi_->value(X, Y);
      }
    }
  }
}

double BarrierEvaluator::psi_bulk(double X, double Y, bool accurate) const {
  if (!accurate && psi_lattice_.nx() > 0 && psi_lattice_.contains(X, Y))
    return psi_lattice_.value(X, Y);
  return psi_->value(X, Y);
}

double BarrierEvaluator::ansatz_v(double x, double y, double t) const {
  const int N = traj_.num_particles();
  std::vector<double> z = traj_.positions(t);
  double sum = 0.0;
  for (int i = 0; i < N; ++i) {
    double X = (x - z[i]) / eps_, Y = y / eps_;
    double c = traj_.velocity(i, t);
    sum += layer_->value(X, Y) - eps_ * c * psi_bulk(X, Y, false);
  }
  return sum + sign() * eps_ * expo_.delta_tilde;
}

double BarrierEvaluator::q_correction(double x, double y, double t) const {
  const int N = traj_.num_particles();
  std::vector<double> z = traj_.positions(t);
  double sum = 0.0;
  for (int i = 0; i < N; ++i)
    sum += traj_.velocity(i, t) * q_->value((x - z[i]) / eps_, y / eps_);
  return std::pow(eps_, expo_.a + 1.0) * sum;
}

double BarrierEvaluator::eval(double x, double y, double t, bool accurate) const {
  const int N = traj_.num_particles();
  std::vector<double> z = traj_.positions(t);
  double sum = 0.0;
  for (int i = 0; i < N; ++i) {
    double X = (x - z[i]) / eps_, Y = y / eps_;
    double c = traj_.velocity(i, t);
    double qv = accurate ? q_->value_direct(X, Y) : q_->value(X, Y);
    sum += layer_->value(X, Y) - eps_ * c * psi_bulk(X, Y, accurate) +
           std::pow(eps_, expo_.a + 1.0) * c * qv;
  }
  double extra = std::pow(eps_, expo_.theta) * std::pow(y + eps_, expo_.gamma) +
                 std::pow(eps_, 1.0 + expo_.tau) * t;
  return sum + sign() * (eps_ * expo_.delta_tilde + extra);
}

double BarrierEvaluator::value(double x, double y, double t) const {
  return eval(x, y, t, false);
}

double BarrierEvaluator::value_accurate(double x, double y, double t) const {
  return eval(x, y, t, true);
}

double BarrierEvaluator::interior_margin(double x, double y, double t) const {
  if (!(y > 0.0)) throw DomainError("interior_margin: y > 0");
  const int N = traj_.num_particles();
  const double a = expo_.a;
  std::vector<double> z = traj_.positions(t);
  double Y = y / eps_;
  double g = cutoff_g(Y, q_->R());

  double residual = 0.0;
  for (int i = 0; i < N; ++i) {
    double X = (x - z[i]) / eps_;
    double c = traj_.velocity(i, t);
    double cdot = traj_.velocity_rate(i, t);
    double dphix = layer_->gradient(X, Y).first;
    double psix = psi_->deriv_x(X, Y);
    double psiv = psi_->value(X, Y);
    double qx = q_->deriv_x(X, Y);
    double qv = q_->value(X, Y);
    residual += -std::pow(eps_, a - 1.0) * (1.0 - g) * c * dphix +
                std::pow(eps_, a) * c * c * psix -
                std::pow(eps_, a + 1.0) * cdot * psiv -
                std::pow(eps_, 2.0 * a) * c * c * qx +
                std::pow(eps_, 2.0 * a + 1.0) * cdot * qv;
  }
  residual += sign() * (std::pow(eps_, a + 1.0 + expo_.tau) +
                        expo_.gamma * (1.0 - expo_.gamma) *
                            std::pow(eps_, expo_.theta) *
                            std::pow(y + eps_, expo_.gamma - 2.0));
  return sign() * residual;
}

double BarrierEvaluator::boundary_margin(double x, double t) const {
  const int N = traj_.num_particles();
  std::vector<double> z = traj_.positions(t);
  double w0 = 0.0;       // barrier value at (x, 0, t)
  double dt_terms = 0.0; // eps * d/dt of the barrier
  double dy_terms = 0.0; // d/dy of the barrier
  for (int i = 0; i < N; ++i) {
    double X = (x - z[i]) / eps_;
    double c = traj_.velocity(i, t);
    double cdot = traj_.velocity_rate(i, t);
    double phi0 = layer_->trace(X);
    double dphix = layer_->trace_deriv(X);
    double psi0 = psi_->trace(X);
    double psix = psi_->trace_deriv(X);

    w0 += phi0 - eps_ * c * psi0;  // q vanishes on the boundary
    dt_terms += -c * dphix - eps_ * eps_ * cdot * psi0 + eps_ * c * c * psix;
    // d/dx q also vanishes along y = 0; only d/dy q survives.
    double dphiy = layer_->gradient(X, 0.0).second;
    double dpsiy = psi_->deriv_y(X, 0.0);
    double dqy = q_->deriv_y(X, 0.0);
    dy_terms += dphiy / eps_ - c * dpsiy +
                std::pow(eps_, expo_.a) * c * dqy;
  }
  double extra0 = std::pow(eps_, expo_.theta + expo_.gamma) +
                  std::pow(eps_, 1.0 + expo_.tau) * t;
  w0 += sign() * (eps_ * expo_.delta_tilde + extra0);
  dt_terms += sign() * std::pow(eps_, 2.0 + expo_.tau);
  dy_terms += sign() * expo_.gamma * std::pow(eps_, expo_.theta) *
              std::pow(eps_, expo_.gamma - 1.0);

  double residual = dt_terms - dy_terms + potential_.w_prime(w0) / eps_;
  return sign() * residual;
}

// ---------------------------------------------------------------------------
// finite-difference route

double BarrierEvaluator::interior_margin_fd(double x, double y, double t,
                                            double* tol_out) const {
  const double a = expo_.a;
  auto residual_at = [&](double h) {
    double ht = std::min(h, 0.25 * eps_ * eps_);
    double t0 = std::max(t - ht, traj_.t_begin());
    double t1 = std::min(t + ht, traj_.t_end());
    double wt = (value_accurate(x, y, t1) - value_accurate(x, y, t0)) / (t1 - t0);
    double hyy = std::min(h, 0.45 * y);  // keep the stencil inside y > 0
    double wc = value_accurate(x, y, t);
    double lap = (value_accurate(x + h, y, t) - 2.0 * wc +
                  value_accurate(x - h, y, t)) /
                     (h * h) +
                 (value_accurate(x, y + hyy, t) - 2.0 * wc +
                  value_accurate(x, y - hyy, t)) /
                     (hyy * hyy);
    return std::pow(eps_, a) * wt - lap;
  };
  double h = eps_ / 10.0;
  double r1 = residual_at(h);
  double r2 = residual_at(0.5 * h);
  if (tol_out) *tol_out = 4.0 / 3.0 * std::fabs(r1 - r2) + 1e-9;
  return sign() * r2;
}

double BarrierEvaluator::boundary_margin_fd(double x, double t,
                                            double* tol_out) const {
  auto residual_at = [&](double h) {
    double ht = std::min(h, 0.25 * eps_ * eps_);
    double t0 = std::max(t - ht, traj_.t_begin());
    double t1 = std::min(t + ht, traj_.t_end());
    double wt = (value_accurate(x, 0.0, t1) - value_accurate(x, 0.0, t0)) / (t1 - t0);
    double wy = (-3.0 * value_accurate(x, 0.0, t) +
                 4.0 * value_accurate(x, h, t) - value_accurate(x, 2.0 * h, t)) /
                (2.0 * h);
    double w0 = value_accurate(x, 0.0, t);
    return eps_ * wt - wy + potential_.w_prime(w0) / eps_;
  };
  double h = eps_ / 10.0;
  double r1 = residual_at(h);
  double r2 = residual_at(0.5 * h);
  if (tol_out) *tol_out = 4.0 / 3.0 * std::fabs(r1 - r2) + 1e-9;
  return sign() * r2;
}

// ---------------------------------------------------------------------------
// samples and checks

std::vector<CaseSample> generate_case_samples(const BarrierExponents& e,
                                              double eps,
                                              const ParticleTrajectory& traj,
                                              double T,
                                              const ResidualOptions& opt) {
  std::vector<std::pair<double, double>> bands;  // case bands in unscaled y
  bands.emplace_back(1e-3 * std::pow(eps, 1.0 - e.b), std::pow(eps, 1.0 - e.b));
  for (int k = 1; k <= e.k0; ++k)
    bands.emplace_back(std::pow(eps, 1.0 - k * e.b),
                       std::pow(eps, 1.0 - (k + 1) * e.b));
  for (int k = 0; k <= e.k1; ++k)
    bands.emplace_back(std::pow(eps, -0.5 * k * e.a),
                       std::pow(eps, -0.5 * (k + 1) * e.a));
  bands.emplace_back(std::pow(eps, -1.0 - e.r), 3.0 * std::pow(eps, -1.0 - e.r));

  auto case_of_band = [&](size_t idx) {
    if (idx == 0) return 1;
    if (idx <= static_cast<size_t>(e.k0)) return 2;
    if (idx <= static_cast<size_t>(e.k0 + e.k1 + 1)) return 3;
    return 4;
  };

  std::vector<CaseSample> out;
  for (int it = 0; it < opt.times; ++it) {
    double t = T * (2.0 * it + 1.0) / (2.0 * opt.times);
    std::vector<double> z = traj.positions(t);
    for (double zc : z) {
      for (double dx : opt.x_offsets) {
        double x = zc + dx;
        out.push_back({x, 0.0, t, 0});
        for (size_t bi = 0; bi < bands.size(); ++bi) {
          double lo = bands[bi].first, hi = bands[bi].second;
          for (int jy = 0; jy < opt.y_per_band; ++jy) {
            double f = (jy + 0.5) / opt.y_per_band;
            double y = lo * std::pow(hi / lo, f);
            out.push_back({x, y, t, case_of_band(bi)});
          }
        }
      }
    }
  }
  return out;
}

Report residual_check(const BarrierEvaluator& evaluator,
                      const std::vector<CaseSample>& samples,
                      const ResidualOptions& opt) {
  Report rep;
  rep.title = evaluator.kind() == BarrierKind::Super
                  ? "supersolution residuals"
                  : "subsolution residuals";
  struct CaseAgg {
    double worst = 1e300;
    double worst_fd = 1e300;
    double fd_tol_at_worst = 0.0;
    double max_fd_tol = 0.0;
    int count = 0;
    CaseSample at{};
  };
  std::vector<CaseAgg> agg(5);

  for (const auto& s : samples) {
    CaseAgg& a = agg[s.case_id];
    double margin = s.case_id == 0
                        ? evaluator.boundary_margin(s.x, s.t)
                        : evaluator.interior_margin(s.x, s.y, s.t);
    ++a.count;
    if (margin < a.worst) {
      a.worst = margin;
      a.at = s;
    }
    if (opt.run_fd_route) {
      double tol = 0.0;
      double mfd = s.case_id == 0
                       ? evaluator.boundary_margin_fd(s.x, s.t, &tol)
                       : evaluator.interior_margin_fd(s.x, s.y, s.t, &tol);
      a.max_fd_tol = std::max(a.max_fd_tol, tol);
      if (mfd + tol < a.worst_fd) {
        a.worst_fd = mfd + tol;
        a.fd_tol_at_worst = tol;
      }
    }
  }

  const char* names[5] = {"boundary row", "case 1 (cutoff plateau)",
                          "case 2 (inner bands)", "case 3 (outer bands)",
                          "case 4 (far field)"};
  for (int c = 0; c < 5; ++c) {
    if (agg[c].count == 0) continue;
    std::ostringstream note;
    note << "n=" << agg[c].count << " worst at (x=" << agg[c].at.x
         << ", y=" << agg[c].at.y << ", t=" << agg[c].at.t << ")";
    double tol_c = opt.run_fd_route ? agg[c].max_fd_tol + 1e-7 : 1e-7;
    rep.add_ge(std::string(names[c]) + " identity-route margin", agg[c].worst,
               -tol_c, note.str());
    if (opt.run_fd_route)
      rep.add_ge(std::string(names[c]) + " FD-route margin + tol",
                 agg[c].worst_fd, 0.0,
                 "fd tol " + std::to_string(agg[c].fd_tol_at_worst));
  }
  return rep;
}

Report sandwich_check(const SolutionRecord& record,
                      const BarrierEvaluator& super_eval,
                      const BarrierEvaluator& sub_eval, double slack_factor) {
  Report rep;
  rep.title = "barrier sandwich";
  if (record.fields.empty())
    throw DomainError("sandwich_check: record carries no field snapshots");

  double worst_upper = 1e300, worst_lower = 1e300;
  double slack = 0.0;
  for (const Field& f : record.fields) {
    const FieldGrid& g = f.grid;
    // Data-driven one-step error scale: boundary update rate plus the
    // largest second difference of the trace.
    double rate = 0.0, sd = 0.0;
    for (int i = 1; i < g.nx - 1; ++i) {
      double u0 = f.at(i, 0);
      double dy = (-3.0 * f.at(i, 0) + 4.0 * f.at(i, 1) - f.at(i, 2)) / (2.0 * g.hy());
      rate = std::max(rate, std::fabs(dy) / f.eps +
                                std::fabs(super_eval.potential().w_prime(u0)) /
                                    (f.eps * f.eps));
      sd = std::max(sd, std::fabs(f.at(i + 1, 0) - 2.0 * u0 + f.at(i - 1, 0)));
    }
    double dt_scale = 0.25 * f.eps * f.eps;
    slack = std::max(slack, slack_factor * (dt_scale * rate + sd));

    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) {
        double u = f.at(i, j);
        double w = super_eval.value(g.x(i), g.y(j), f.time);
        double h = sub_eval.value(g.x(i), g.y(j), f.time);
        worst_upper = std::min(worst_upper, w - u);
        worst_lower = std::min(worst_lower, u - h);
      }
    }
  }
  rep.add_ge("min over grid of w_eps - u_eps", worst_upper, -slack,
             "slack " + std::to_string(slack));
  rep.add_ge("min over grid of u_eps - h_eps", worst_lower, -slack,
             "slack " + std::to_string(slack));
  return rep;
}

}  // namespace dislo
