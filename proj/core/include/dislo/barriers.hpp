#pragma once

#include <memory>
#include <vector>

#include "dislo/correctors.hpp"
#include "dislo/coupled_solver.hpp"
#include "dislo/layer.hpp"
#include "dislo/particle_ode.hpp"
#include "dislo/report.hpp"

namespace dislo {

// Exponents of the barrier construction together with the integers k0, k1
// and the perturbation size.
struct BarrierExponents {
  double a = 1.0;
  double b = 0.5, gamma = 0.0, theta = 0.0, tau = 0.0, r = 0.0;
  int k0 = 1, k1 = 0;
  double delta = 0.0, delta_tilde = 0.0;
};

// Every defining inequality of the exponent set, one report line each.
Report check_exponents(const BarrierExponents& e);

// Deterministic feasible point: b = min(1,a)/2, k0/k1 from their defining
// inequalities, geometric search theta = 2^-m with gamma = 1 - theta/2,
// then r = ((k1+1)a/2 - 1)/2 and tau = r/2.  The result always passes
// check_exponents; an infeasible search throws.
BarrierExponents select_exponents(double a, double delta, double alpha = 1.0);

enum class BarrierKind { Super, Sub };

// Supersolution w_eps / subsolution h_eps built from the perturbed
// trajectory, the layer, and both correctors.  Evaluation modes: `value`
// uses lattice-cached psi for bulk points (fast, for grid sweeps);
// `value_accurate` re-quadratures every corrector (for finite differences).
struct BarrierOptions {
  double psi_x_span = 160.0;  // scaled X half-range of the psi cache
  double psi_y_span = 130.0;
  int psi_nx = 193, psi_ny = 129;
  bool build_psi_lattice = true;
};

class BarrierEvaluator {
 public:
  BarrierEvaluator(BarrierKind kind, const BarrierExponents& exponents,
                   double eps, ParticleTrajectory trajectory,
                   std::shared_ptr<const LayerProfile> layer,
                   std::shared_ptr<const PsiProfile> psi,
                   std::shared_ptr<const QField> q, PotentialSpec potential,
                   BarrierOptions options = BarrierOptions());

  BarrierKind kind() const { return kind_; }
  const BarrierExponents& exponents() const { return expo_; }
  double eps() const { return eps_; }
  const ParticleTrajectory& trajectory() const { return traj_; }
  const PotentialSpec& potential() const { return potential_; }

  // Moving-superposition ansatz (phi and psi terms plus the delta shift).
  double ansatz_v(double x, double y, double t) const;
  // Full barrier.
  double value(double x, double y, double t) const;
  double value_accurate(double x, double y, double t) const;
  // The eps^{a+1} sum c_i q_i correction alone.
  double q_correction(double x, double y, double t) const;

  // Signed margins: positive means the barrier inequality holds at the
  // point.  Identity route: harmonicity of phi/psi and -Lap(q) = dphi*g
  // substituted exactly, trajectory derivatives analytic.
  double interior_margin(double x, double y, double t) const;
  double boundary_margin(double x, double t) const;
  // Finite-difference route on value_accurate; `tol_out` receives the
  // measured truncation estimate (Richardson between h and h/2).
  double interior_margin_fd(double x, double y, double t, double* tol_out) const;
  double boundary_margin_fd(double x, double t, double* tol_out) const;

 private:
  double eval(double x, double y, double t, bool accurate) const;
  double psi_bulk(double X, double Y, bool accurate) const;
  double sign() const { return kind_ == BarrierKind::Super ? 1.0 : -1.0; }

  BarrierKind kind_;
  BarrierExponents expo_;
  double eps_;
  ParticleTrajectory traj_;
  std::shared_ptr<const LayerProfile> layer_;
  std::shared_ptr<const PsiProfile> psi_;
  std::shared_ptr<const QField> q_;
  PotentialSpec potential_ = PotentialSpec::sinusoidal();
  GradedLattice2D psi_lattice_;
};

struct CaseSample {
  double x, y, t;
  int case_id;  // 0 = boundary row, 1..4 = proof bands
};

struct ResidualOptions {
  int y_per_band = 6;
  int times = 5;
  std::vector<double> x_offsets = {-3.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 3.0};
  bool run_fd_route = true;
};

// Log-spaced samples in each band of the four-case proof plus the boundary
// row, around every trajectory center.
std::vector<CaseSample> generate_case_samples(const BarrierExponents& e,
                                              double eps,
                                              const ParticleTrajectory& traj,
                                              double T,
                                              const ResidualOptions& opt = {});

// Evaluates both residual routes at the samples; one report line per case
// with the worst identity-route margin, checked against the measured
// finite-difference tolerance of that case.
Report residual_check(const BarrierEvaluator& evaluator,
                      const std::vector<CaseSample>& samples,
                      const ResidualOptions& opt = {});

// h_eps <= u_eps <= w_eps on every stored snapshot, with a data-driven
// scheme-error slack (10x the one-step update estimate by default).
Report sandwich_check(const SolutionRecord& record,
                      const BarrierEvaluator& super_eval,
                      const BarrierEvaluator& sub_eval,
                      double slack_factor = 10.0);

}  // namespace dislo
