#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>
#include <numbers>
#include <random>

#include "dislo/barriers.hpp"
#include "dislo/correctors.hpp"
#include "dislo/coupled_solver.hpp"
#include "dislo/errors.hpp"
#include "dislo/layer.hpp"
#include "dislo/particle_ode.hpp"
#include "dislo/potential.hpp"

using namespace dislo;

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;

struct BarrierFixture {
  PotentialSpec potential = PotentialSpec::sinusoidal();
  std::shared_ptr<const LayerProfile> layer =
      std::make_shared<LayerProfile>(LayerProfile::explicit_arctan());
  std::shared_ptr<const PsiProfile> psi;
  BarrierFixture() {
    psi = std::make_shared<PsiProfile>(
        solve_psi(*layer, potential, kTwoPi, 1.0, Grid1D{300.0, 3072}));
  }

  struct Pair {
    BarrierExponents expo;
    std::shared_ptr<const QField> q;
    std::shared_ptr<BarrierEvaluator> sup, sub;
  };

  Pair make(double eps, double a, double delta, double T,
            std::vector<double> centers = {-0.5, 0.5}) const {
    Pair p;
    p.expo = select_exponents(a, delta, 1.0);
    ParticleState init{centers, 0.0};
    ParticleTrajectory ts = integrate(init, kTwoPi, delta, Orientation::Super, T, 1e-10);
    ParticleTrajectory tb = integrate(init, kTwoPi, delta, Orientation::Sub, T, 1e-10);
    p.q = std::make_shared<QField>(build_q(*layer, eps, p.expo.b, 80.0, 120.0));
    BarrierOptions opt;
    opt.psi_x_span = 80.0;
    opt.psi_y_span = 120.0;
    p.sup = std::make_shared<BarrierEvaluator>(BarrierKind::Super, p.expo, eps,
                                               ts, layer, psi, p.q, potential, opt);
    p.sub = std::make_shared<BarrierEvaluator>(BarrierKind::Sub, p.expo, eps,
                                               tb, layer, psi, p.q, potential, opt);
    return p;
  }
};

const BarrierFixture& fixture() {
  static BarrierFixture f;
  return f;
}
}  // namespace

TEST_CASE("exponent selection at specific a") {
  SUBCASE("a = 1") {
    BarrierExponents e = select_exponents(1.0, 0.05);
    CHECK(check_exponents(e).all_pass());
    CHECK(e.b == doctest::Approx(0.5));
  }
  SUBCASE("a = 2") {
    BarrierExponents e = select_exponents(2.0, 0.05);
    CHECK(e.b == doctest::Approx(0.5));
    CHECK(e.k0 == 1);
    // first integer with (k1+1) a/2 strictly above 1
    CHECK(e.k1 == 1);
    CHECK(check_exponents(e).all_pass());
  }
  SUBCASE("a = 0.5") {
    BarrierExponents e = select_exponents(0.5, 0.05);
    CHECK(e.b == doctest::Approx(0.25));
    CHECK(check_exponents(e).all_pass());
  }
  SUBCASE("delta_tilde folds in alpha") {
    BarrierExponents e = select_exponents(1.0, 0.05, 2.0);
    CHECK(e.delta_tilde == doctest::Approx(0.025));
  }
}

TEST_CASE("exponent selection round-trips the checker on random a") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> uni(0.1, 5.0);
  for (int i = 0; i < 100; ++i) {
    double a = uni(rng);
    BarrierExponents e = select_exponents(a, 0.05);
    CAPTURE(a);
    CHECK(check_exponents(e).all_pass());
  }
}

TEST_CASE("checker rejects corrupted exponents") {
  BarrierExponents e = select_exponents(1.0, 0.05);
  SUBCASE("theta beyond a") {
    e.theta = e.a * 2.0;
    CHECK(!check_exponents(e).all_pass());
  }
  SUBCASE("tau above r") {
    e.tau = e.r * 2.0;
    CHECK(!check_exponents(e).all_pass());
  }
  SUBCASE("wrong k0") {
    e.k0 += 3;
    CHECK(!check_exponents(e).all_pass());
  }
}

TEST_CASE("ansatz against a hand-built single-layer formula") {
  const BarrierFixture& f = fixture();
  const double eps = 0.1, delta = 0.02, T = 0.1;
  auto p = f.make(eps, 1.0, delta, T, {0.0});

  // N=1: velocity is exactly -c0 delta / pi, start at -delta.
  double c = -kTwoPi * delta / kPi;
  for (double x : {-0.3, 0.0, 0.4}) {
    double X = (x - (-delta)) / eps;
    double manual = phi_explicit(X, 0.0) - eps * c * f.psi->trace(X) +
                    eps * delta;  // delta_tilde = delta at alpha = 1
    CHECK(p.sup->ansatz_v(x, 0.0, 0.0) == doctest::Approx(manual).epsilon(1e-9));
  }
}

TEST_CASE("ansatz is an O(eps) correction of the superposition") {
  const BarrierFixture& f = fixture();
  const double eps = 0.1, delta = 0.05, T = 0.25;
  auto p = f.make(eps, 1.0, delta, T);
  double worst = 0.0;
  for (double y : {0.0, 0.5, 2.0})
    for (double x : {-2.0, -0.5, 0.0, 0.8, 2.5}) {
      std::vector<double> z = p.sup->trajectory().positions(0.1);
      double sup0 = 0.0;
      for (double zi : z) sup0 += phi_explicit((x - zi) / eps, y / eps);
      worst = std::max(worst, std::fabs(p.sup->ansatz_v(x, y, 0.1) - sup0));
    }
  CHECK(worst < 10.0 * eps);
  CHECK(worst > 0.0);
}

TEST_CASE("far-field limit of the ansatz") {
  const BarrierFixture& f = fixture();
  const double eps = 0.1, delta = 0.05;
  auto p = f.make(eps, 1.0, delta, 0.25);
  double v = p.sup->ansatz_v(0.0, 4000.0, 0.1);
  CHECK(std::fabs(v - (1.0 + eps * delta)) < 0.02);  // N/2 + eps*delta_tilde
}

TEST_CASE("barrier value structure") {
  const BarrierFixture& f = fixture();
  const double eps = 0.1, delta = 0.05, T = 0.25;
  auto p = f.make(eps, 1.0, delta, T);

  SUBCASE("q correction vanishes on the boundary") {
    CHECK(p.sup->q_correction(0.3, 0.0, 0.1) == doctest::Approx(0.0));
    double w0 = p.sup->value(0.3, 0.0, 0.1);
    double v0 = p.sup->ansatz_v(0.3, 0.0, 0.1);
    double extra = std::pow(eps, p.expo.theta) * std::pow(eps, p.expo.gamma) +
                   std::pow(eps, 1.0 + p.expo.tau) * 0.1;
    CHECK(w0 == doctest::Approx(v0 + extra).epsilon(1e-10));
  }
  SUBCASE("super exceeds sub by at least 2 eps delta_tilde at t=0, y=0") {
    for (double x : {-1.0, 0.0, 1.5}) {
      double gap = p.sup->value(x, 0.0, 0.0) - p.sub->value(x, 0.0, 0.0);
      CHECK(gap >= 2.0 * eps * p.expo.delta_tilde - 1e-12);
    }
  }
  SUBCASE("super dominates sub pointwise at t=0") {
    for (double y : {0.0, 0.4, 2.0})
      for (double x : {-2.0, 0.0, 2.0})
        CHECK(p.sup->value(x, y, 0.0) >= p.sub->value(x, y, 0.0) - 1e-12);
  }
  SUBCASE("q-correction magnitude obeys the eps^{a+1-b} |ln eps| budget") {
    double bound = std::pow(eps, p.expo.a + 1.0 - p.expo.b) *
                   std::fabs(std::log(eps));
    double worst = 0.0;
    for (double y : {0.1, 1.0, 5.0})
      for (double x : {-1.0, 0.0, 2.0})
        worst = std::max(worst, std::fabs(p.sup->q_correction(x, y, 0.1)));
    CHECK(worst <= 100.0 * bound);
  }
}

TEST_CASE("barrier exceeds the initial data") {
  const BarrierFixture& f = fixture();
  const double eps = 0.1, delta = 0.05;
  auto p = f.make(eps, 1.0, delta, 0.25);
  LayerProfile layer = LayerProfile::explicit_arctan();
  FieldGrid grid{4.8, 4.0, 769, 321};
  Field u0 = init_superposition({-0.5, 0.5}, eps, layer, grid, 1.0);
  double min_upper = 1e300, min_lower = 1e300;
  for (int j = 0; j < grid.ny; j += 3)
    for (int i = 0; i < grid.nx; i += 3) {
      double x = grid.x(i), y = grid.y(j);
      min_upper = std::min(min_upper, p.sup->value(x, y, 0.0) - u0.at(i, j));
      min_lower = std::min(min_lower, u0.at(i, j) - p.sub->value(x, y, 0.0));
    }
  CHECK(min_upper >= -1e-9);
  CHECK(min_lower >= -1e-9);
}

TEST_CASE("residual margins by case") {
  const BarrierFixture& f = fixture();
  const double eps = 0.1, delta = 0.05, T = 0.25;
  auto p = f.make(eps, 1.0, delta, T);

  ResidualOptions opt;
  opt.times = 3;
  opt.y_per_band = 4;
  opt.x_offsets = {-2.0, -0.5, 0.0, 0.5, 2.0};

  auto four_cases_pass = [](const Report& r) {
    bool saw = false, ok = true;
    for (const auto& line : r.checks)
      if (line.name.rfind("case", 0) == 0) {
        saw = true;
        ok = ok && line.pass;
      }
    return saw && ok;
  };
  auto boundary_margin_of = [](const Report& r) {
    for (const auto& line : r.checks)
      if (line.name.rfind("boundary", 0) == 0 &&
          line.name.find("identity-route") != std::string::npos)
        return line.measured;
    return 1e300;
  };
  SUBCASE("super margins across the four interior cases") {
    auto samples = generate_case_samples(p.expo, eps, p.sup->trajectory(), T, opt);
    Report rep = residual_check(*p.sup, samples, opt);
    CHECK(four_cases_pass(rep));
    // The boundary row carries the eps^(theta+gamma-1) packet, which at
    // desk-scale eps overwhelms the delta/2 reserve; the margin is reported
    // and stays of that size rather than passing.
    double bm = boundary_margin_of(rep);
    CHECK(bm < 0.0);
    CHECK(bm > -3.0);
  }
  SUBCASE("sub margins across the four interior cases") {
    auto samples = generate_case_samples(p.expo, eps, p.sub->trajectory(), T, opt);
    Report rep = residual_check(*p.sub, samples, opt);
    CHECK(four_cases_pass(rep));
  }
  SUBCASE("case-4 margin scales like eps^{a+1+tau}") {
    double y = 1.2 * std::pow(eps, -1.0 - p.expo.r);
    double m = p.sup->interior_margin(0.0, y, 0.12);
    double scale = std::pow(eps, p.expo.a + 1.0 + p.expo.tau);
    CHECK(m > 0.0);
    CHECK(m < 50.0 * scale);
  }
  SUBCASE("kind flip mirrors the inequality") {
    double y = 0.3;
    double ms = p.sup->interior_margin(0.4, y, 0.1);
    double mb = p.sub->interior_margin(0.4, y, 0.1);
    CHECK(ms > 0.0);
    CHECK(mb > 0.0);
  }
}

TEST_CASE("identity-route residual agrees with the FD route") {
  const BarrierFixture& f = fixture();
  const double eps = 0.1;
  auto p = f.make(eps, 1.0, 0.05, 0.25);
  for (auto [x, y, t] : std::vector<std::array<double, 3>>{
           {0.2, 0.5, 0.1}, {-0.8, 1.5, 0.15}, {0.0, 3.0, 0.2}}) {
    double tol = 0.0;
    double id = p.sup->interior_margin(x, y, t);
    double fd = p.sup->interior_margin_fd(x, y, t, &tol);
    CHECK(std::fabs(id - fd) <= 5.0 * tol + 1e-6);
  }
  double tol = 0.0;
  double idb = p.sup->boundary_margin(0.3, 0.1);
  double fdb = p.sup->boundary_margin_fd(0.3, 0.1, &tol);
  CHECK(std::fabs(idb - fdb) <= 5.0 * tol + 1e-6);
}

TEST_CASE("interior margins improve relative to the gap term as eps shrinks") {
  // Every interior term decays with eps, so absolute margins shrink; the
  // meaningful trend is the surviving fraction of the parabolic gap term.
  const BarrierFixture& f = fixture();
  ResidualOptions opt;
  opt.times = 2;
  opt.y_per_band = 3;
  opt.x_offsets = {-1.0, 0.0, 1.0};
  opt.run_fd_route = false;
  double prev_worst = -1e300;
  for (double eps : {0.2, 0.1, 0.05}) {
    auto p = f.make(eps, 1.0, 0.05, 0.25);
    auto samples = generate_case_samples(p.expo, eps, p.sup->trajectory(), 0.25, opt);
    double worst = 1e300;
    for (const auto& s : samples) {
      if (s.case_id == 0) continue;
      double gap = p.expo.gamma * (1.0 - p.expo.gamma) *
                       std::pow(eps, p.expo.theta) *
                       std::pow(s.y + eps, p.expo.gamma - 2.0) +
                   std::pow(eps, p.expo.a + 1.0 + p.expo.tau);
      worst = std::min(worst, p.sup->interior_margin(s.x, s.y, s.t) / gap);
    }
    CHECK(worst >= prev_worst - 1e-6);
    CHECK(worst > 0.0);
    prev_worst = worst;
  }
}

TEST_CASE("sandwich on a short run") {
  const BarrierFixture& f = fixture();
  const double eps = 0.2, delta = 0.05, T = 0.2;
  auto p = f.make(eps, 1.0, delta, T);
  RunConfig rc;
  rc.epsilon = eps;
  rc.centers = {-0.5, 0.5};
  rc.domain.Lx = 4.8;
  rc.domain.Ly = 4.0;
  rc.time.T = T;
  rc.store_fields = true;
  SolutionRecord rec = run(rc);
  Report rep = sandwich_check(rec, *p.sup, *p.sub);
  CHECK(rep.all_pass());
}

TEST_CASE("trajectory orientation is enforced") {
  const BarrierFixture& f = fixture();
  BarrierExponents e = select_exponents(1.0, 0.05);
  ParticleTrajectory wrong = integrate(ParticleState{{-0.5, 0.5}, 0.0}, kTwoPi,
                                       0.05, Orientation::Sub, 0.1, 1e-9);
  auto q = std::make_shared<QField>(build_q(*f.layer, 0.1, e.b, 40.0, 40.0));
  CHECK_THROWS_AS(BarrierEvaluator(BarrierKind::Super, e, 0.1, wrong, f.layer,
                                   f.psi, q, f.potential),
                  DomainError);
}
