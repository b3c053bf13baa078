#include "dislo/particle_ode.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "dislo/errors.hpp"

namespace dislo {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kMinGap = 1e-8;

double min_gap(const std::vector<double>& z) {
  double g = 1e300;
  for (size_t i = 1; i < z.size(); ++i) g = std::min(g, z[i] - z[i - 1]);
  return g;
}

void require_ordered(const std::vector<double>& z, const char* who) {
  if (z.empty()) throw DomainError(std::string(who) + ": empty state");
  for (double zi : z)
    if (!std::isfinite(zi))
      throw DomainError(std::string(who) + ": non-finite position");
  if (z.size() >= 2 && min_gap(z) < kMinGap)
    throw SingularityError(std::string(who) + ": coincident particles");
}
}  // namespace

double orientation_shift(Orientation o, double delta) {
  switch (o) {
    case Orientation::Super: return -delta;
    case Orientation::Sub: return delta;
    default: return 0.0;
  }
}

std::vector<double> force(const std::vector<double>& positions, double c0,
                          double delta, Orientation orientation) {
  require_ordered(positions, "force");
  const size_t n = positions.size();
  const double s = orientation_shift(orientation, delta);
  std::vector<double> v(n, 0.0);
  for (size_t i = 0; i < n; ++i) {
    double sum = s;
    for (size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      sum += 1.0 / (positions[i] - positions[j]);
    }
    v[i] = c0 / kPi * sum;
  }
  return v;
}

std::vector<double> force_rate(const std::vector<double>& positions,
                               const std::vector<double>& velocities,
                               double c0) {
  const size_t n = positions.size();
  std::vector<double> a(n, 0.0);
  for (size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      double d = positions[i] - positions[j];
      sum -= (velocities[i] - velocities[j]) / (d * d);
    }
    a[i] = c0 / kPi * sum;
  }
  return a;
}

size_t ParticleTrajectory::locate(double t) const {
  if (t < t_begin() - 1e-12 || t > t_end() + 1e-12)
    throw DomainError("ParticleTrajectory: time outside trajectory span");
  auto it = std::upper_bound(
      samples_.begin(), samples_.end(), t,
      [](double tt, const TrajectorySample& s) { return tt < s.t; });
  size_t k = static_cast<size_t>(it - samples_.begin());
  if (k == 0) return 0;
  if (k >= samples_.size()) return samples_.size() - 2;
  return k - 1;
}

std::vector<double> ParticleTrajectory::positions(double t) const {
  if (samples_.size() == 1) return samples_[0].z;
  size_t k = locate(t);
  const TrajectorySample& s0 = samples_[k];
  const TrajectorySample& s1 = samples_[k + 1];
  double h = s1.t - s0.t;
  double u = (t - s0.t) / h;
  double h00 = (1 + 2 * u) * (1 - u) * (1 - u);
  double h10 = u * (1 - u) * (1 - u);
  double h01 = u * u * (3 - 2 * u);
  double h11 = u * u * (u - 1);
  std::vector<double> z(n_);
  for (int i = 0; i < n_; ++i)
    z[i] = h00 * s0.z[i] + h * h10 * s0.v[i] + h01 * s1.z[i] + h * h11 * s1.v[i];
  return z;
}

double ParticleTrajectory::position(int i, double t) const {
  return positions(t)[i];
}

double ParticleTrajectory::velocity(int i, double t) const {
  return force(positions(t), c0_, delta_, orientation_)[i];
}

double ParticleTrajectory::velocity_rate(int i, double t) const {
  std::vector<double> z = positions(t);
  std::vector<double> v = force(z, c0_, delta_, orientation_);
  return force_rate(z, v, c0_)[i];
}

ParticleTrajectory integrate(const ParticleState& initial, double c0,
                             double delta, Orientation orientation, double T,
                             double tol) {
  if (!(T > 0.0)) throw DomainError("integrate: T must be positive");
  tol = std::clamp(tol, 1e-12, 1e-6);
  std::vector<double> z = initial.positions;
  require_ordered(z, "integrate");
  const double shift = orientation_shift(orientation, delta);
  for (double& zi : z) zi += shift;
  const int n = static_cast<int>(z.size());

  // Dormand-Prince 5(4) tableau.
  static const double A[7][6] = {
      {0, 0, 0, 0, 0, 0},
      {1.0 / 5, 0, 0, 0, 0, 0},
      {3.0 / 40, 9.0 / 40, 0, 0, 0, 0},
      {44.0 / 45, -56.0 / 15, 32.0 / 9, 0, 0, 0},
      {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729, 0, 0},
      {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656, 0},
      {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
  static const double B5[7] = {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192,
                               -2187.0 / 6784, 11.0 / 84, 0};
  static const double B4[7] = {5179.0 / 57600, 0, 7571.0 / 16695, 393.0 / 640,
                               -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

  auto rhs = [&](const std::vector<double>& state) {
    return force(state, c0, delta, orientation);
  };

  ParticleTrajectory traj;
  traj.n_ = n;
  traj.c0_ = c0;
  traj.delta_ = delta;
  traj.orientation_ = orientation;

  double t = 0.0;
  std::vector<double> v = rhs(z);
  traj.samples_.push_back({t, z, v});

  double h = std::min(T, 1e-3);
  std::vector<std::vector<double>> k(7, std::vector<double>(n));
  std::vector<double> ztmp(n), z5(n), z4(n);

  while (t < T) {
    h = std::min(h, T - t);
    if (h < 1e-14) break;

    k[0] = v;
    bool singular = false;
    for (int s = 1; s < 7 && !singular; ++s) {
      for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int q = 0; q < s; ++q) acc += A[s][q] * k[q][i];
        ztmp[i] = z[i] + h * acc;
      }
      if (n >= 2 && min_gap(ztmp) < kMinGap) {
        singular = true;
        break;
      }
      k[s] = rhs(ztmp);
    }

    double err = 0.0;
    if (!singular) {
      // Error scale built from the configuration diameter keeps the step
      // sequence translation invariant.
      double span = n >= 2 ? z.back() - z.front() : 1.0;
      double scale = 1e-12 + tol * std::max(1.0, span);
      for (int i = 0; i < n; ++i) {
        double acc5 = 0.0, acc4 = 0.0;
        for (int s = 0; s < 7; ++s) {
          acc5 += B5[s] * k[s][i];
          acc4 += B4[s] * k[s][i];
        }
        z5[i] = z[i] + h * acc5;
        z4[i] = z[i] + h * acc4;
        err = std::max(err, std::fabs(z5[i] - z4[i]) / scale);
      }
    }

    if (singular || err > 1.0 || (n >= 2 && min_gap(z5) < kMinGap)) {
      h *= singular ? 0.25 : std::max(0.2, 0.9 * std::pow(err, -0.2));
      if (h < 1e-13 * std::max(1.0, T)) {
        std::ostringstream os;
        os << "integrate: step-size underflow at t=" << t
           << " (min gap " << min_gap(z) << ")";
        // Crude blow-up estimate from the gap closing rate.
        double g = min_gap(z);
        double rate = std::fabs(c0 / kPi) / std::max(g, kMinGap);
        throw CollisionError(os.str(), t + g / std::max(rate, 1e-300));
      }
      continue;
    }

    t += h;
    z = z5;
    v = rhs(z);
    traj.samples_.push_back({t, z, v});
    h *= std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 0.2, 5.0);
  }

  return traj;
}

Report check_distance_bound(const ParticleTrajectory& traj) {
  if (traj.delta() != 0.0 || traj.orientation() != Orientation::None)
    throw NotApplicableError(
        "check_distance_bound: only defined for unperturbed trajectories");
  const int n = traj.num_particles();
  if (n < 2) throw DomainError("check_distance_bound: need N >= 2");

  auto min_dist = [&](const std::vector<double>& z) {
    double d = 1e300;
    for (size_t i = 1; i < z.size(); ++i) d = std::min(d, z[i] - z[i - 1]);
    return d;
  };

  Report rep;
  rep.title = "minimal distance lower bound";
  const double d0 = min_dist(traj.samples().front().z);
  double min_slack = 1e300;
  double at_t = 0.0;
  for (const auto& s : traj.samples()) {
    double bound = std::sqrt(8.0 * s.t / (n * n - 1.0) + d0 * d0);
    double slack = min_dist(s.z) - bound;
    if (slack < min_slack) {
      min_slack = slack;
      at_t = s.t;
    }
  }
  std::ostringstream os;
  os << "worst at t=" << at_t;
  rep.add_ge("min over samples of d(t) - bound", min_slack, -1e-9, os.str());
  return rep;
}

double two_body_oracle(double d0, double c0, double t) {
  if (!(d0 > 0.0)) throw DomainError("two_body_oracle: d0 must be positive");
  return std::sqrt(d0 * d0 + 4.0 * c0 / kPi * t);
}

}  // namespace dislo
