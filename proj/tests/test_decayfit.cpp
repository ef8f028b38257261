#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "twophase/decayfit.hpp"

using namespace twophase;

namespace {

std::vector<Sample> power_law(double c, double alpha, double t0, double t1, int n) {
  std::vector<Sample> out;
  for (int k = 0; k < n; ++k) {
    const double t = t0 * std::pow(t1 / t0, k / (n - 1.0));
    out.push_back({t, c * std::pow(1.0 + t, alpha)});
  }
  return out;
}

}  // namespace

TEST_CASE("exact power law is recovered") {
  const auto s = power_law(3.0, -0.75, 1.0, 1e3, 50);
  const auto f = fit_exponent(s, 10.0, 500.0, -0.75, 0.01, "exact");
  CHECK(f.alpha == doctest::Approx(-0.75).epsilon(1e-12));
  CHECK(f.stderr_alpha < 1e-12);
  CHECK(f.r2 == doctest::Approx(1.0));
  CHECK(f.pass);
  CHECK(f.t0 >= 10.0);
  CHECK(f.t1 <= 500.0);
  CHECK(f.samples < 50);
  CHECK(f.warning.empty());
}

TEST_CASE("the exponent does not depend on the prefactor") {
  const auto a = fit_exponent(power_law(1e-6, -0.25, 1.0, 1e4, 40), 1.0, 1e4, -0.25, 0.1);
  const auto b = fit_exponent(power_law(1e6, -0.25, 1.0, 1e4, 40), 1.0, 1e4, -0.25, 0.1);
  CHECK(a.alpha == doctest::Approx(b.alpha).epsilon(1e-12));
}

TEST_CASE("verdict uses the tolerance band") {
  const auto s = power_law(1.0, -0.9, 1.0, 1e3, 30);
  CHECK_FALSE(fit_exponent(s, 1.0, 1e3, -0.75, 0.1).pass);
  CHECK(fit_exponent(s, 1.0, 1e3, -0.75, 0.2).pass);
}

TEST_CASE("multiplicative noise gives a finite standard error") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> noise(0.0, 0.01);
  auto s = power_law(1.0, -0.5, 1.0, 1e3, 200);
  for (auto& x : s) x.value *= std::exp(noise(rng));
  const auto f = fit_exponent(s, 1.0, 1e3, -0.5, 0.01);
  CHECK(f.stderr_alpha > 0.0);
  CHECK(std::abs(f.alpha + 0.5) < 5.0 * f.stderr_alpha + 1e-3);
  CHECK(f.r2 < 1.0);
  CHECK(f.r2 > 0.99);
}

TEST_CASE("non-positive values truncate the window") {
  auto s = power_law(1.0, -1.0, 1.0, 100.0, 40);
  s[30].value = 0.0;
  const auto f = fit_exponent(s, 1.0, 100.0, -1.0, 0.01);
  CHECK_FALSE(f.warning.empty());
  CHECK(f.samples == 30);
  CHECK(f.t1 < s[30].t);
  CHECK(f.alpha == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("too few samples is an error") {
  const auto s = power_law(1.0, -1.0, 1.0, 100.0, 7);
  CHECK_THROWS_AS(fit_exponent(s, 1.0, 100.0, -1.0, 0.1), std::invalid_argument);
  const auto wide = power_law(1.0, -1.0, 1.0, 100.0, 40);
  CHECK_THROWS_AS(fit_exponent(wide, 200.0, 300.0, -1.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(fit_exponent(wide, 5.0, 5.0, -1.0, 0.1), std::invalid_argument);
}

TEST_CASE("local slope of a power law is constant") {
  const auto s = power_law(2.0, -0.25, 0.5, 100.0, 25);
  for (double v : local_slope(s)) CHECK(v == doctest::Approx(-0.25).epsilon(1e-10));
  std::vector<Sample> bad = {{0.0, 1.0}, {1.0, -1.0}, {2.0, 1.0}};
  CHECK_THROWS_AS(local_slope(bad), std::invalid_argument);
}

TEST_CASE("report format") {
  const auto f = fit_exponent(power_law(1.0, -0.5, 1.0, 100.0, 20), 1.0, 100.0, -0.5, 0.1, "demo");
  std::ostringstream os;
  write_fit_report(os, f);
  const std::string out = os.str();
  CHECK(out.rfind("name=demo\n", 0) == 0);
  CHECK(out.find("alpha=-0.5\n") != std::string::npos);
  CHECK(out.find("verdict=pass\n") != std::string::npos);
  CHECK(out.find("warning=") == std::string::npos);
}
