#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dislo/errors.hpp"
#include "dislo/particle_ode.hpp"

using namespace dislo;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

TEST_CASE("force values") {
  SUBCASE("single particle feels nothing") {
    auto v = force({0.0}, kTwoPi, 0.0, Orientation::None);
    CHECK(v[0] == doctest::Approx(0.0));
  }
  SUBCASE("symmetric pair repels with unit speeds at c0 = 2 pi") {
    auto v = force({-1.0, 1.0}, kTwoPi, 0.0, Orientation::None);
    CHECK(v[0] == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(v[1] == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("pairwise antisymmetry sums to zero") {
    auto v = force({-1.0, 0.0, 2.0}, kTwoPi, 0.0, Orientation::None);
    CHECK(v[0] + v[1] + v[2] == doctest::Approx(0.0).epsilon(1e-13));
  }
  SUBCASE("orientation shifts the sum uniformly") {
    auto none = force({-1.0, 1.0}, kTwoPi, 0.1, Orientation::None);
    auto sup = force({-1.0, 1.0}, kTwoPi, 0.1, Orientation::Super);
    auto sub = force({-1.0, 1.0}, kTwoPi, 0.1, Orientation::Sub);
    for (int i = 0; i < 2; ++i) {
      CHECK(sup[i] == doctest::Approx(none[i] - 2.0 * 0.1).epsilon(1e-13));
      CHECK(sub[i] == doctest::Approx(none[i] + 2.0 * 0.1).epsilon(1e-13));
    }
  }
  SUBCASE("coincident particles are singular") {
    CHECK_THROWS_AS(force({1.0, 1.0}, kTwoPi, 0.0, Orientation::None),
                    SingularityError);
  }
}

TEST_CASE("two-body oracle") {
  CHECK(two_body_oracle(2.0, kTwoPi, 0.0) == doctest::Approx(2.0));
  CHECK(two_body_oracle(2.0, kTwoPi, 1.0) == doctest::Approx(std::sqrt(12.0)));
  double prev = 0.0;
  for (double t : {0.0, 0.3, 0.9, 2.0}) {
    double d = two_body_oracle(1.0, kTwoPi, t);
    CHECK(d >= prev);
    prev = d;
  }
  CHECK_THROWS_AS(two_body_oracle(0.0, kTwoPi, 1.0), DomainError);
}

TEST_CASE("integrator matches the two-body law") {
  ParticleTrajectory traj = integrate(ParticleState{{-1.0, 1.0}, 0.0}, kTwoPi,
                                      0.0, Orientation::None, 1.0, 1e-9);
  double d = traj.position(1, 1.0) - traj.position(0, 1.0);
  CHECK(std::fabs(d - std::sqrt(12.0)) < 1e-6);
}

TEST_CASE("translation invariance of the flow") {
  ParticleTrajectory a = integrate(ParticleState{{-1.0, 0.3, 1.4}, 0.0}, kTwoPi,
                                   0.0, Orientation::None, 1.0, 1e-10);
  ParticleTrajectory b = integrate(ParticleState{{4.0, 5.3, 6.4}, 0.0}, kTwoPi,
                                   0.0, Orientation::None, 1.0, 1e-10);
  double worst = 0.0;
  for (double t : {0.0, 0.25, 0.5, 0.75, 1.0})
    for (int i = 0; i < 3; ++i)
      worst = std::max(worst,
                       std::fabs(b.position(i, t) - a.position(i, t) - 5.0));
  CHECK(worst <= 1e-9);
}

TEST_CASE("perturbed orientations shift the initial data") {
  ParticleTrajectory sup = integrate(ParticleState{{-1.0, 1.0}, 0.0}, kTwoPi,
                                     0.01, Orientation::Super, 0.5, 1e-9);
  CHECK(sup.position(0, 0.0) == doctest::Approx(-1.01).epsilon(1e-14));
  CHECK(sup.position(1, 0.0) == doctest::Approx(0.99).epsilon(1e-14));
  ParticleTrajectory sub = integrate(ParticleState{{-1.0, 1.0}, 0.0}, kTwoPi,
                                     0.01, Orientation::Sub, 0.5, 1e-9);
  CHECK(sub.position(0, 0.0) == doctest::Approx(-0.99).epsilon(1e-14));
}

TEST_CASE("center of mass is conserved for the unperturbed system") {
  ParticleTrajectory traj = integrate(ParticleState{{-2.0, -0.3, 0.4, 1.7}, 0.0},
                                      kTwoPi, 0.0, Orientation::None, 1.0, 1e-10);
  double com0 = 0.0;
  for (int i = 0; i < 4; ++i) com0 += traj.position(i, 0.0);
  for (double t : {0.2, 0.6, 1.0}) {
    double com = 0.0;
    for (int i = 0; i < 4; ++i) com += traj.position(i, t);
    CHECK(std::fabs(com - com0) <= 1e-9);
  }
}

TEST_CASE("ordering is preserved at every accepted step") {
  ParticleTrajectory traj = integrate(ParticleState{{-0.4, -0.1, 0.1, 0.4}, 0.0},
                                      kTwoPi, 0.0, Orientation::None, 2.0, 1e-9);
  for (const auto& s : traj.samples())
    for (size_t i = 1; i < s.z.size(); ++i) CHECK(s.z[i] > s.z[i - 1]);
}

TEST_CASE("self-convergence under tolerance halving") {
  ParticleState init{{-1.3, -0.2, 0.9, 2.2}, 0.0};
  ParticleTrajectory coarse =
      integrate(init, kTwoPi, 0.0, Orientation::None, 1.0, 1e-8);
  ParticleTrajectory fine =
      integrate(init, kTwoPi, 0.0, Orientation::None, 1.0, 5e-9);
  double diff = 0.0;
  for (int i = 0; i < 4; ++i)
    diff = std::max(diff, std::fabs(coarse.position(i, 1.0) - fine.position(i, 1.0)));
  CHECK(diff < 1e-8);
}

TEST_CASE("velocities stored at samples equal the force") {
  ParticleTrajectory traj = integrate(ParticleState{{-1.0, 0.5}, 0.0}, kTwoPi,
                                      0.0, Orientation::None, 0.5, 1e-9);
  for (const auto& s : traj.samples()) {
    auto v = force(s.z, kTwoPi, 0.0, Orientation::None);
    for (size_t i = 0; i < v.size(); ++i)
      CHECK(s.v[i] == doctest::Approx(v[i]).epsilon(1e-12));
  }
}

TEST_CASE("velocity rate matches a finite difference of the velocity") {
  ParticleTrajectory traj = integrate(ParticleState{{-1.0, 1.0}, 0.0}, kTwoPi,
                                      0.0, Orientation::None, 1.0, 1e-10);
  double t = 0.5, h = 1e-5;
  for (int i = 0; i < 2; ++i) {
    double fd = (traj.velocity(i, t + h) - traj.velocity(i, t - h)) / (2.0 * h);
    CHECK(std::fabs(traj.velocity_rate(i, t) - fd) < 1e-5);
  }
}

TEST_CASE("distance bound of the minimal gap") {
  SUBCASE("two-body slack is positive for t > 0") {
    ParticleTrajectory traj = integrate(ParticleState{{-1.0, 1.0}, 0.0}, kTwoPi,
                                        0.0, Orientation::None, 1.0, 1e-9);
    Report rep = check_distance_bound(traj);
    CHECK(rep.all_pass());
  }
  SUBCASE("three equispaced particles") {
    ParticleTrajectory traj = integrate(ParticleState{{-1.0, 0.0, 1.0}, 0.0},
                                        kTwoPi, 0.0, Orientation::None, 1.0, 1e-9);
    CHECK(check_distance_bound(traj).all_pass());
  }
  SUBCASE("bound is tight at t=0") {
    ParticleTrajectory traj = integrate(ParticleState{{-1.0, 1.0}, 0.0}, kTwoPi,
                                        0.0, Orientation::None, 1e-6, 1e-10);
    double d0 = 2.0;
    double bound0 = std::sqrt(8.0 * 0.0 / 3.0 + d0 * d0);
    CHECK(traj.position(1, 0.0) - traj.position(0, 0.0) ==
          doctest::Approx(bound0));
  }
  SUBCASE("perturbed trajectories are rejected") {
    ParticleTrajectory traj = integrate(ParticleState{{-1.0, 1.0}, 0.0}, kTwoPi,
                                        0.05, Orientation::Sub, 0.5, 1e-9);
    CHECK_THROWS_AS(check_distance_bound(traj), NotApplicableError);
  }
}

TEST_CASE("dense output stays between samples") {
  ParticleTrajectory traj = integrate(ParticleState{{-1.0, 1.0}, 0.0}, kTwoPi,
                                      0.0, Orientation::None, 1.0, 1e-9);
  CHECK_THROWS_AS(traj.position(0, 2.0), DomainError);
  CHECK_THROWS_AS(traj.position(0, -0.5), DomainError);
}
