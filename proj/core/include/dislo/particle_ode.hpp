#pragma once

#include <vector>

#include "dislo/report.hpp"

namespace dislo {

// Sign of the uniform drift added to the interaction sum: supersolution
// trajectories drift by -delta, subsolution ones by +delta.
enum class Orientation { Super, None, Sub };

double orientation_shift(Orientation o, double delta);

struct ParticleState {
  std::vector<double> positions;  // z_1 < ... < z_N
  double time = 0.0;
};

// v_i = (c0/pi) * ( sum_{j != i} 1/(z_i - z_j) + s ),  s in {-delta, 0, +delta}.
std::vector<double> force(const std::vector<double>& positions, double c0,
                          double delta, Orientation orientation);

// dv_i/dt along a trajectory, from the analytic Jacobian of the force.
std::vector<double> force_rate(const std::vector<double>& positions,
                               const std::vector<double>& velocities, double c0);

struct TrajectorySample {
  double t;
  std::vector<double> z;
  std::vector<double> v;
};

// Accepted-step record of one integration with cubic-Hermite dense output.
class ParticleTrajectory {
 public:
  int num_particles() const { return n_; }
  double t_begin() const { return samples_.front().t; }
  double t_end() const { return samples_.back().t; }
  double c0() const { return c0_; }
  double delta() const { return delta_; }
  Orientation orientation() const { return orientation_; }
  const std::vector<TrajectorySample>& samples() const { return samples_; }

  std::vector<double> positions(double t) const;
  double position(int i, double t) const;
  double velocity(int i, double t) const;      // RHS at the dense state
  double velocity_rate(int i, double t) const; // d/dt of the RHS

  friend ParticleTrajectory integrate(const ParticleState&, double, double,
                                      Orientation, double, double);

 private:
  size_t locate(double t) const;
  int n_ = 0;
  double c0_ = 0.0, delta_ = 0.0;
  Orientation orientation_ = Orientation::None;
  std::vector<TrajectorySample> samples_;
};

// Adaptive Dormand-Prince 5(4) on [0, T]; Super/Sub shift the initial
// positions by -delta/+delta before integrating.  tol is the relative
// tolerance (clamped to [1e-12, 1e-6] per the contract).
ParticleTrajectory integrate(const ParticleState& initial, double c0,
                             double delta, Orientation orientation, double T,
                             double tol = 1e-9);

// Minimal-distance lower bound d(t) >= sqrt(8t/(N^2-1) + d(0)^2) checked at
// every stored sample; only meaningful for unperturbed trajectories.
Report check_distance_bound(const ParticleTrajectory& traj);

// Exact two-body separation sqrt(d0^2 + (4 c0/pi) t).
double two_body_oracle(double d0, double c0, double t);

}  // namespace dislo
