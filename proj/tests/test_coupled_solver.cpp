#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "dislo/coupled_solver.hpp"
#include "dislo/errors.hpp"
#include "dislo/io.hpp"
#include "dislo/layer.hpp"
#include "dislo/particle_ode.hpp"
#include "dislo/potential.hpp"

using namespace dislo;

namespace {
constexpr double kPi = std::numbers::pi;

RunConfig small_config(double eps = 0.2) {
  RunConfig rc;
  rc.epsilon = eps;
  rc.a = 1.0;
  rc.centers = {-0.5, 0.5};
  rc.domain.Lx = 4.8;
  rc.domain.Ly = 4.0;
  rc.time.T = 0.1;
  rc.store_fields = true;
  return rc;
}
}  // namespace

TEST_CASE("superposition initial data") {
  LayerProfile layer = LayerProfile::explicit_arctan();
  FieldGrid grid{4.8, 4.0, 0, 0};
  grid.nx = static_cast<int>(std::lround(2 * grid.Lx / (0.2 / 8))) + 1;
  grid.ny = static_cast<int>(std::lround(grid.Ly / (0.2 / 8))) + 1;

  SUBCASE("single centered layer passes through one half") {
    Field f = init_superposition({0.0}, 0.2, layer, grid, 1.0);
    int i0 = (grid.nx - 1) / 2;
    CHECK(f.at(i0, 0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(f.at(0, 0) < 0.05);
    CHECK(f.at(grid.nx - 1, 0) > 0.95);
  }
  SUBCASE("trace increases strictly") {
    Field f = init_superposition({-0.5, 0.5}, 0.2, layer, grid, 1.0);
    auto tr = f.boundary_trace();
    for (size_t i = 1; i < tr.size(); ++i) CHECK(tr[i] > tr[i - 1]);
  }
  SUBCASE("unresolved core is rejected") {
    CHECK_THROWS_AS(init_superposition({0.0}, 0.05, layer, grid, 1.0),
                    ConfigError);
  }
  SUBCASE("centers near walls are rejected") {
    CHECK_THROWS_AS(init_superposition({4.0}, 0.2, layer, grid, 1.0),
                    ConfigError);
  }
}

TEST_CASE("energy") {
  LayerProfile layer = LayerProfile::explicit_arctan();
  PotentialSpec pot = PotentialSpec::sinusoidal();
  FieldGrid grid{4.8, 4.0, 385, 161};

  SUBCASE("uniform zero field has zero energy") {
    Field f;
    f.grid = grid;
    f.eps = 0.2;
    f.values.assign(static_cast<size_t>(grid.nx) * grid.ny, 0.0);
    CHECK(energy(f, pot) == doctest::Approx(0.0));
  }
  SUBCASE("two layers cost more than one") {
    FieldGrid g2{4.8, 4.0, 0, 0};
    g2.nx = 385;
    g2.ny = 161;
    Field one = init_superposition({0.0}, 0.2, layer, g2, 1.0);
    Field two = init_superposition({-0.5, 0.5}, 0.2, layer, g2, 1.0);
    CHECK(energy(two, pot) > energy(one, pot));
  }
  SUBCASE("refinement self-consistency within 10 percent") {
    FieldGrid coarse{4.8, 4.0, 385, 161};
    FieldGrid fine{4.8, 4.0, 769, 321};
    Field fc = init_superposition({0.0}, 0.2, layer, coarse, 1.0);
    Field ff = init_superposition({0.0}, 0.2, layer, fine, 1.0);
    double ec = energy(fc, PotentialSpec::sinusoidal());
    double ef = energy(ff, PotentialSpec::sinusoidal());
    CHECK(std::fabs(ec - ef) < 0.1 * std::fabs(ef));
  }
}

TEST_CASE("crossing extraction") {
  SUBCASE("single arctan trace crosses at its center") {
    std::vector<double> tr;
    double hx = 0.01, x_left = -3.0;
    for (int i = 0; i <= 600; ++i)
      tr.push_back(phi_explicit((x_left + i * hx) / 0.1, 0.0));
    auto c = track_crossings(tr, 1, x_left, hx);
    CHECK(std::fabs(c[0] - 0.0) <= hx);
  }
  SUBCASE("analytic two-layer superposition recovers both centers") {
    std::vector<double> tr;
    double hx = 0.01, x_left = -4.0, eps = 0.1;
    for (int i = 0; i <= 800; ++i) {
      double x = x_left + i * hx;
      tr.push_back(phi_explicit((x + 1.0) / eps, 0.02 / eps) +
                   phi_explicit((x - 1.0) / eps, 0.02 / eps));
    }
    auto c = track_crossings(tr, 2, x_left, hx);
    CHECK(std::fabs(c[0] + 1.0) <= hx);
    CHECK(std::fabs(c[1] - 1.0) <= hx);
  }
  SUBCASE("shift equivariance") {
    std::vector<double> tr;
    double hx = 0.02, x_left = -4.0;
    for (int i = 0; i <= 400; ++i)
      tr.push_back(phi_explicit((x_left + i * hx) / 0.2, 0.0));
    auto base = track_crossings(tr, 1, x_left, hx);
    auto shifted = track_crossings(tr, 1, x_left + 0.7, hx);
    CHECK(shifted[0] - base[0] == doctest::Approx(0.7).epsilon(1e-12));
  }
  SUBCASE("missing level raises a tracking error") {
    std::vector<double> flat(100, 0.2);
    CHECK_THROWS_AS(track_crossings(flat, 1, 0.0, 0.1), TrackingError);
  }
}

TEST_CASE("integer fields are steady states of the stepper") {
  PotentialSpec pot = PotentialSpec::sinusoidal();
  FieldGrid grid{2.0, 2.0, 81, 81};
  Field f;
  f.grid = grid;
  f.eps = 0.2;
  f.a_exponent = 1.0;
  f.values.assign(static_cast<size_t>(grid.nx) * grid.ny, 1.0);
  Field g = step(f, 0.25 * 0.2 * 0.2, pot);
  double worst = 0.0;
  for (size_t i = 0; i < f.values.size(); ++i)
    worst = std::max(worst, std::fabs(g.values[i] - 1.0));
  CHECK(worst <= 1e-12);
}

TEST_CASE("stepper rejects an oversized time step") {
  PotentialSpec pot = PotentialSpec::sinusoidal();
  FieldGrid grid{2.0, 2.0, 81, 81};
  Field f;
  f.grid = grid;
  f.eps = 0.2;
  f.values.assign(static_cast<size_t>(grid.nx) * grid.ny, 0.0);
  CHECK_THROWS_AS(step(f, 0.2, pot), ConfigError);
}

TEST_CASE("single layer stays pinned (N=1 has zero velocity)") {
  RunConfig rc = small_config(0.1);
  rc.centers = {0.0};
  rc.time.T = 0.5;
  SolutionRecord rec = run(rc);
  double drift = std::fabs(rec.crossings.back()[0] - rec.crossings.front()[0]);
  CHECK(drift <= 2.0 * resolve_grid(rc).hx());
}

TEST_CASE("repulsive pair separates monotonically and dissipates energy") {
  RunConfig rc = small_config(0.2);
  rc.time.T = 0.3;
  SolutionRecord rec = run(rc);
  for (size_t k = 1; k < rec.times.size(); ++k) {
    double gap_prev = rec.crossings[k - 1][1] - rec.crossings[k - 1][0];
    double gap = rec.crossings[k][1] - rec.crossings[k][0];
    CHECK(gap >= gap_prev - 1e-12);
  }
  for (size_t k = 1; k < rec.energies.size(); ++k)
    CHECK(rec.energies[k] <= rec.energies[k - 1] + 1e-6 * rec.energies[0]);
}

TEST_CASE("deterministic rerun is bit identical") {
  RunConfig rc = small_config(0.2);
  rc.time.T = 0.05;
  SolutionRecord a = run(rc);
  SolutionRecord b = run(rc);
  REQUIRE(a.times.size() == b.times.size());
  for (size_t k = 0; k < a.times.size(); ++k) {
    CHECK(a.times[k] == b.times[k]);
    for (size_t i = 0; i < a.traces[k].size(); ++i)
      CHECK(a.traces[k][i] == b.traces[k][i]);
  }
  CHECK(a.config_hash == b.config_hash);
}

TEST_CASE("ordering of fields is preserved by the stepper") {
  LayerProfile layer = LayerProfile::explicit_arctan();
  PotentialSpec pot = PotentialSpec::sinusoidal();
  RunConfig rc = small_config(0.2);
  FieldGrid grid = resolve_grid(rc);
  Field u = init_superposition({-0.5, 0.5}, 0.2, layer, grid, 1.0);
  Field v = init_superposition({-0.6, 0.4}, 0.2, layer, grid, 1.0);
  CoupledSolver su(u, pot), sv(v, pot);
  double dt = 0.01;
  double worst = 1e300;
  for (int k = 0; k < 100; ++k) {
    u = su.step(u, dt);
    v = sv.step(v, dt);
    for (size_t i = 0; i < u.values.size(); ++i)
      worst = std::min(worst, v.values[i] - u.values[i]);
  }
  CHECK(worst >= -1e-8);
}

TEST_CASE("integer shift equivariance of the evolution") {
  LayerProfile layer = LayerProfile::explicit_arctan();
  PotentialSpec pot = PotentialSpec::sinusoidal();
  RunConfig rc = small_config(0.2);
  FieldGrid grid = resolve_grid(rc);
  Field u = init_superposition({-0.5, 0.5}, 0.2, layer, grid, 1.0);
  Field w = u;
  for (double& v : w.values) v += 1.0;
  CoupledSolver su(u, pot), sw(w, pot);
  for (int k = 0; k < 20; ++k) {
    u = su.step(u, 0.01);
    w = sw.step(w, 0.01);
  }
  double worst = 0.0;
  for (size_t i = 0; i < u.values.size(); ++i)
    worst = std::max(worst, std::fabs(w.values[i] - u.values[i] - 1.0));
  CHECK(worst <= 1e-7);
}

TEST_CASE("grid self-convergence of crossings at first order or better") {
  RunConfig coarse = small_config(0.2);
  coarse.time.T = 0.2;
  coarse.time.dt = 0.25 * 0.2 * 0.2;

  RunConfig mid = coarse;
  mid.domain.nx = (resolve_grid(coarse).nx - 1) * 2 + 1;
  mid.domain.ny = (resolve_grid(coarse).ny - 1) * 2 + 1;
  mid.time.dt = coarse.time.dt / 2.0;

  RunConfig fine = coarse;
  fine.domain.nx = (resolve_grid(coarse).nx - 1) * 4 + 1;
  fine.domain.ny = (resolve_grid(coarse).ny - 1) * 4 + 1;
  fine.time.dt = coarse.time.dt / 4.0;

  auto final_gap = [](const SolutionRecord& r) {
    return r.crossings.back()[1] - r.crossings.back()[0];
  };
  double g0 = final_gap(run(coarse));
  double g1 = final_gap(run(mid));
  double g2 = final_gap(run(fine));
  double d01 = std::fabs(g1 - g0), d12 = std::fabs(g2 - g1);
  CHECK(d12 <= 0.5 * d01 + 1e-12);
}

TEST_CASE("domain height robustness") {
  RunConfig base = small_config(0.2);
  base.time.T = 0.25;
  base.domain.Ly = 10.0;
  RunConfig tall = base;
  tall.domain.Ly = 20.0;
  SolutionRecord a = run(base);
  SolutionRecord b = run(tall);
  double hx = resolve_grid(base).hx();
  for (int i = 0; i < 2; ++i)
    CHECK(std::fabs(a.crossings.back()[i] - b.crossings.back()[i]) <= hx);
}

TEST_CASE("reduced fractional solver") {
  SUBCASE("single stationary layer stays put") {
    RunConfig rc;
    rc.epsilon = 0.1;
    rc.centers = {0.0};
    rc.domain.Lx = 4.8;
    rc.time.T = 0.1;
    SolutionRecord rec = solve_reduced_fractional(rc);
    double worst = 0.0;
    for (size_t i = 0; i < rec.traces.front().size(); ++i)
      worst = std::max(worst, std::fabs(rec.traces.back()[i] -
                                        rec.traces.front()[i]));
    CHECK(worst <= 1e-6);
  }
  SUBCASE("pair follows the two-body law within 5 eps") {
    const double eps = 0.05;
    RunConfig rc;
    rc.epsilon = eps;
    rc.centers = {-0.5, 0.5};
    rc.domain.Lx = 4.8;
    rc.time.T = 0.5;
    SolutionRecord rec = solve_reduced_fractional(rc);
    ParticleTrajectory ode = integrate(ParticleState{rc.centers, 0.0},
                                       2.0 * kPi, 0.0, Orientation::None,
                                       rc.time.T, 1e-10);
    double worst = 0.0;
    for (size_t k = 0; k < rec.times.size(); ++k) {
      std::vector<double> z = ode.positions(rec.times[k]);
      for (int i = 0; i < 2; ++i)
        worst = std::max(worst, std::fabs(rec.crossings[k][i] - z[i]));
    }
    CHECK(worst <= 5.0 * eps);
  }
}

TEST_CASE("config parsing and hashing") {
  std::string path = "test_run_config.json";
  write_text_file(path, R"({
    "scenario": "unit",
    "potential": "sine",
    "epsilon": 0.2,
    "a": 2.0,
    "centers": [-1.0, 0.5],
    "domain": {"Lx": 5.0, "Ly": 6.0},
    "grid": {"nx": 0, "ny": 0},
    "time": {"T": 0.25, "dt": 0.005, "snapshot_every": 10},
    "solver": {"tol": 1e-9, "max_iter": 80}
  })");
  RunConfig rc = load_run_config(path);
  CHECK(rc.epsilon == doctest::Approx(0.2));
  CHECK(rc.a == doctest::Approx(2.0));
  CHECK(rc.centers.size() == 2);
  CHECK(rc.domain.Lx == doctest::Approx(5.0));
  CHECK(rc.time.snapshot_every == 10);
  CHECK(rc.solver.tol == doctest::Approx(1e-9));
  CHECK(!rc.hash().empty());
  RunConfig rc2 = rc;
  CHECK(rc.hash() == rc2.hash());
  rc2.epsilon = 0.1;
  CHECK(rc.hash() != rc2.hash());
  std::remove(path.c_str());
}
