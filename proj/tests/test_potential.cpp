#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <numbers>
#include <vector>

#include "dislo/errors.hpp"
#include "dislo/io.hpp"
#include "dislo/potential.hpp"

using namespace dislo;

namespace {
constexpr double kPi = std::numbers::pi;

// Independent oracle: integrate W' by Simpson from 0 to u.
double w_by_quadrature(const PotentialSpec& p, double u) {
  const int n = 20000;
  double h = u / n;
  double acc = p.w_prime(0.0) + p.w_prime(u);
  for (int i = 1; i < n; ++i)
    acc += (i % 2 ? 4.0 : 2.0) * p.w_prime(i * h);
  return acc * h / 3.0;
}

std::vector<double> uniform_period_nodes(int n) {
  std::vector<double> u(n);
  for (int i = 0; i < n; ++i) u[i] = static_cast<double>(i) / n;
  return u;
}
}  // namespace

TEST_CASE("sinusoidal values match the antiderivative oracle") {
  PotentialSpec p = PotentialSpec::sinusoidal();
  CHECK(p.w_value(0.0) == doctest::Approx(0.0).epsilon(1e-15));
  // W(1/2) = 1/(2 pi^2), frozen from quadrature of W'.
  double oracle = w_by_quadrature(p, 0.5);
  CHECK(std::fabs(oracle - 1.0 / (2.0 * kPi * kPi)) < 1e-12);
  CHECK(p.w_value(0.5) == doctest::Approx(1.0 / (2.0 * kPi * kPi)).epsilon(1e-12));
  CHECK(p.w_value(0.3) == doctest::Approx(p.w_value(1.3)).epsilon(1e-14));
}

TEST_CASE("sinusoidal derivatives") {
  PotentialSpec p = PotentialSpec::sinusoidal();
  CHECK(p.w_prime(0.0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(p.w_prime(0.25) == doctest::Approx(1.0 / (2.0 * kPi)).epsilon(1e-14));
  CHECK(p.w_prime(0.5) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(p.w_double_prime(0.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(p.w_double_prime(0.5) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(p.w_double_prime(1.3) == doctest::Approx(p.w_double_prime(0.3)).epsilon(1e-13));
}

TEST_CASE("NaN input raises a domain error") {
  PotentialSpec p = PotentialSpec::sinusoidal();
  CHECK_THROWS_AS(p.w_value(std::nan("")), DomainError);
  CHECK_THROWS_AS(p.w_prime(std::nan("")), DomainError);
  CHECK_THROWS_AS(p.w_double_prime(std::nan("")), DomainError);
}

TEST_CASE("periodicity and positivity on a fine grid") {
  PotentialSpec p = PotentialSpec::sinusoidal();
  double worst = 0.0, min_inner = 1e300;
  for (int i = 0; i <= 1000; ++i) {
    double u = -2.0 + 4.0 * i / 1000.0;
    worst = std::max(worst, std::fabs(p.w_value(u + 1.0) - p.w_value(u)));
    double frac = u - std::floor(u);
    if (frac >= 0.05 && frac <= 0.95) min_inner = std::min(min_inner, p.w_value(u));
  }
  CHECK(worst <= 1e-12);
  CHECK(min_inner > 0.0);
}

TEST_CASE("finite differences of W track W' at second order") {
  PotentialSpec p = PotentialSpec::sinusoidal();
  const double h = 1e-4;
  double worst = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    double u = -2.0 + 4.0 * i / 1000.0;
    double fd = (p.w_value(u + h) - p.w_value(u - h)) / (2.0 * h);
    worst = std::max(worst, std::fabs(fd - p.w_prime(u)));
  }
  // |W'''| <= 2 pi, so the centered-difference constant is ~ pi/3.
  CHECK(worst <= 2.0 * h * h);
}

TEST_CASE("validation report: sinusoidal passes") {
  Report rep = validate_potential(PotentialSpec::sinusoidal(), 1000);
  CHECK(rep.all_pass());
}

TEST_CASE("validation rejects sample counts below 100") {
  CHECK_THROWS_AS(validate_potential(PotentialSpec::sinusoidal(), 50), DomainError);
}

TEST_CASE("tabulated potential reproduces the sinusoidal one") {
  PotentialSpec sine = PotentialSpec::sinusoidal();
  const int n = 512;
  std::vector<double> u = uniform_period_nodes(n), w(n);
  for (int i = 0; i < n; ++i) w[i] = sine.w_value(u[i]);
  PotentialSpec tab = PotentialSpec::tabulated(u, w);
  for (double x : {0.1, 0.37, 0.5, 0.93, 1.21, -0.4}) {
    CHECK(tab.w_value(x) == doctest::Approx(sine.w_value(x)).epsilon(1e-8));
    CHECK(std::fabs(tab.w_prime(x) - sine.w_prime(x)) < 1e-6);
    CHECK(std::fabs(tab.w_double_prime(x) - sine.w_double_prime(x)) < 1e-4);
  }
  CHECK(validate_potential(tab, 500).all_pass());
}

TEST_CASE("injected flaws are caught") {
  PotentialSpec sine = PotentialSpec::sinusoidal();
  const int n = 256;
  std::vector<double> u = uniform_period_nodes(n), w(n);
  for (int i = 0; i < n; ++i) w[i] = sine.w_value(u[i]);

  SUBCASE("zero injected at u=1/2 kills positivity") {
    w[n / 2] = 0.0;
    PotentialSpec bad = PotentialSpec::tabulated(u, w);
    Report rep = validate_potential(bad, 1000);
    CHECK(!rep.all_pass());
    bool positivity_failed = false;
    for (const auto& c : rep.checks)
      if (!c.pass && c.name.find("positivity") != std::string::npos)
        positivity_failed = true;
    CHECK(positivity_failed);
  }

  SUBCASE("concave well at 0 kills the nondegeneracy check") {
    // Flip the curvature near u = 0 while keeping W(0) = 0.
    for (int i = 0; i < n; ++i) {
      double d = std::min(u[i], 1.0 - u[i]);
      if (d < 0.1) w[i] = -0.5 * d * d + 0.2 * d * d * d / 0.1;
    }
    PotentialSpec bad = PotentialSpec::tabulated(u, w);
    Report rep = validate_potential(bad, 1000);
    bool convexity_failed = false;
    for (const auto& c : rep.checks)
      if (!c.pass && c.name.find("nondegeneracy") != std::string::npos)
        convexity_failed = true;
    CHECK(convexity_failed);
  }
}

TEST_CASE("non-uniform tabulation is a format error") {
  std::vector<double> u = uniform_period_nodes(64), w(64, 0.0);
  u[10] += 1e-3;
  CHECK_THROWS_AS(PotentialSpec::tabulated(u, w), FormatError);
}

TEST_CASE("config loading: sine keyword and CSV round trip") {
  PotentialSpec sine = PotentialSpec::from_config("sine");
  CHECK(sine.kind() == PotentialSpec::Kind::Sinusoidal);

  const int n = 128;
  CsvTable t;
  t.header = {"u", "W"};
  PotentialSpec ref = PotentialSpec::sinusoidal();
  for (int i = 0; i < n; ++i) {
    double ui = static_cast<double>(i) / n;
    t.rows.push_back({ui, ref.w_value(ui)});
  }
  std::string path = "test_potential_table.csv";
  write_csv(path, t);
  PotentialSpec loaded = PotentialSpec::from_config(path);
  CHECK(loaded.kind() == PotentialSpec::Kind::UserTabulated);
  CHECK(loaded.w_value(0.5) == doctest::Approx(ref.w_value(0.5)).epsilon(1e-7));
  std::remove(path.c_str());
}
