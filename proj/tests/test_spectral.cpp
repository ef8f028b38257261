#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "twophase/spectral.hpp"

using namespace twophase;
using namespace twophase::spectral;

namespace {

double max_abs(const Matrix4c& m) { return m.cwiseAbs().maxCoeff(); }

// Greedy nearest matching; adequate because every root set compared here is
// well separated relative to the tolerance.
void check_roots(const std::array<cd, 4>& got, std::array<cd, 4> want, double tol) {
  for (const cd& z : got) {
    auto best = std::min_element(want.begin(), want.end(), [&](cd a, cd b) {
      return std::abs(a - z) < std::abs(b - z);
    });
    CHECK(std::abs(*best - z) <= tol);
    *best = cd(1e300, 1e300);
  }
}

}  // namespace

// Reference values from tests/oracles/symbol.py.

TEST_CASE("characteristic polynomial, normalized and general") {
  const auto c = char_poly(0.5);
  const double x2 = 0.25;
  CHECK(c[0] == 1.0);
  CHECK(c[1] == doctest::Approx(x2 + 2.0));
  CHECK(c[2] == doctest::Approx(3.0 * x2));
  CHECK(c[3] == doctest::Approx(x2 * (x2 + 2.0)));
  CHECK(c[4] == doctest::Approx(x2 * x2));

  const ModelParams p{1.3, 1.7, 0.8, 1.5};
  const auto g = char_poly(0.6, p);
  CHECK(g[1] == doctest::Approx(2.6599999999999997).epsilon(1e-14));
  CHECK(g[2] == doctest::Approx(1.5805464382023915).epsilon(1e-14));
  CHECK(g[3] == doctest::Approx(1.3294338683147742).epsilon(1e-14));
  CHECK(g[4] == doctest::Approx(0.24499671775286092).epsilon(1e-14));
}

TEST_CASE("symbol matrix entries") {
  const auto A = assemble_A(2.0).entries;
  CHECK(A(0, 1) == cd(0.0, -2.0));
  CHECK(A(1, 0) == cd(0.0, -2.0));
  CHECK(A(1, 1) == -1.0);
  CHECK(A(1, 3) == 1.0);
  CHECK(A(3, 1) == 1.0);
  CHECK(A(3, 3) == -5.0);
  CHECK(A(0, 0) == 0.0);
  CHECK(A(2, 0) == 0.0);
}

TEST_CASE("quartic roots against high-precision eigenvalues") {
  check_roots(quartic_roots(char_poly(0.3)),
              {cd(-2.0010352694515454, 0), cd(-0.04497671848865896, 0),
               cd(-0.0219940060298978, -0.2991926865729789),
               cd(-0.0219940060298978, 0.2991926865729789)},
              1e-13);
  check_roots(quartic_roots(char_poly(2.0)),
              {cd(-4.307442751083536, 0), cd(-0.9286252264162539, 0),
               cd(-0.38196601125010515, -1.9631866865506409),
               cd(-0.38196601125010515, 1.9631866865506409)},
              1e-13);
}

TEST_CASE("quartic roots agree with a dense eigen solver") {
  const ModelParams p{1.3, 1.7, 0.8, 1.5};
  for (double xi : log_spaced(1e-3, 1e2, 37)) {
    CAPTURE(xi);
    const auto roots = quartic_roots(char_poly(xi, p));
    Eigen::ComplexEigenSolver<Matrix4c> es(assemble_A(xi, p).entries);
    std::array<cd, 4> ref;
    for (int j = 0; j < 4; ++j) ref[j] = es.eigenvalues()(j);
    const double scale = std::max(1.0, xi * xi);
    check_roots(roots, ref, 1e-9 * scale);
    for (const auto& z : roots) CHECK(poly_residual(char_poly(xi, p), z) <= 1e-12);
  }
}

TEST_CASE("quartic roots: special polynomials") {
  // (z + 1)^2 (z + 2)^2: Aberth fallback for the repeated pair.
  check_roots(quartic_roots({1.0, 6.0, 13.0, 12.0, 4.0}),
              {cd(-2, 0), cd(-2, 0), cd(-1, 0), cd(-1, 0)}, 1e-6);
  // z^2 (z^2 + 3z + 2): exact zero trailing coefficients are deflated.
  check_roots(quartic_roots({1.0, 3.0, 2.0, 0.0, 0.0}), {cd(-2, 0), cd(-1, 0), cd(0, 0), cd(0, 0)},
              1e-14);
  // z^4 + 1: roots on the unit circle at odd multiples of pi/4.
  const double h = std::sqrt(0.5);
  check_roots(quartic_roots({1.0, 0.0, 0.0, 0.0, 1.0}),
              {cd(-h, -h), cd(-h, h), cd(h, -h), cd(h, h)}, 1e-14);
  CHECK_THROWS_AS(quartic_roots({2.0, 0.0, 0.0, 0.0, 1.0}), std::invalid_argument);
}

TEST_CASE("projector algebra across the spectrum") {
  const ModelParams p{1.3, 1.7, 0.8, 1.5};
  for (double xi : log_spaced(1e-3, 1e2, 23)) {
    CAPTURE(xi);
    const auto d = decompose(xi, p);
    if (d.degenerate) continue;
    const Matrix4c A = assemble_A(xi, p).entries;
    Matrix4c sum = Matrix4c::Zero(), recon = Matrix4c::Zero();
    for (int j = 0; j < 4; ++j) {
      sum += d.P[j];
      recon += d.lambda[j] * d.P[j];
      CHECK(max_abs(A * d.P[j] - d.lambda[j] * d.P[j]) <= 1e-10 * std::max(1.0, xi * xi));
      for (int k = 0; k < 4; ++k) {
        const Matrix4c expect = j == k ? d.P[j] : Matrix4c::Zero();
        CHECK(max_abs(d.P[j] * d.P[k] - expect) <= 1e-10);
      }
    }
    CHECK(max_abs(sum - Matrix4c::Identity()) <= 1e-10);
    CHECK(max_abs(recon - A) <= 1e-10);
  }
}

TEST_CASE("repeated eigenvalues are reported, not divided by") {
  const auto A = assemble_A(1.0);
  CHECK_THROWS_AS(projections(A, {cd(-1, 0), cd(-1, 0), cd(0, 1), cd(0, -1)}),
                  DegenerateSpectrum);
  const auto d = decompose(0.0);
  CHECK(d.degenerate);
  CHECK(d.colliding_first >= 1);
  CHECK(d.colliding_second > d.colliding_first);
}

TEST_CASE("P0 is the zero eigenprojection of A(0)") {
  const Matrix4c P0 = p0_matrix();
  CHECK(max_abs(P0 * P0 - P0) == 0.0);
  CHECK(max_abs(assemble_A(0.0).entries * P0) == 0.0);
  // The first three projectors tend to P0 linearly in xi.
  auto deviation = [](double xi) {
    const auto d = decompose(xi);
    return max_abs(d.P[0] + d.P[1] + d.P[2] - p0_matrix());
  };
  const double e3 = deviation(1e-3), e4 = deviation(1e-4);
  CHECK(e3 == doctest::Approx(0.25e-3).epsilon(1e-3));
  CHECK(e3 / e4 == doctest::Approx(10.0).epsilon(1e-3));
}

TEST_CASE("branch labels") {
  const auto xs = log_spaced(1e-3, 1e2, 200);
  const auto rows = eigen_branches(xs);
  const double cross = real_branch_crossover();
  CHECK(cross > 0.8);
  CHECK(cross < 1.3);
  for (const auto& r : rows) {
    CAPTURE(r.xi);
    CHECK(std::abs(r.lambda[0].imag()) < 1e-12);
    CHECK(std::abs(r.lambda[3].imag()) < 1e-12);
    CHECK(r.lambda[1].imag() > 0.0);
    CHECK(std::abs(r.lambda[2] - std::conj(r.lambda[1])) < 1e-12 * std::max(1.0, r.xi));
    if (r.xi < cross) CHECK(r.lambda[3].real() < r.lambda[0].real());
    else CHECK(r.lambda[0].real() < r.lambda[3].real());
  }
  const auto& lo = rows.front();
  CHECK(lo.lambda[0].real() / (lo.xi * lo.xi) == doctest::Approx(-0.5).epsilon(1e-3));
  CHECK(lo.lambda[3].real() == doctest::Approx(-2.0).epsilon(1e-3));
  const auto& hi = rows.back();
  CHECK(hi.lambda[0].real() / (hi.xi * hi.xi) == doctest::Approx(-1.0).epsilon(1e-3));

  // Negative frequencies are complex conjugates of the positive ones.
  const std::vector<double> pm = {-0.7, 0.7};
  const auto both = eigen_branches(pm);
  for (int j = 0; j < 4; ++j) CHECK(std::abs(both[0].lambda[j] - std::conj(both[1].lambda[j])) < 1e-14);
  const std::vector<double> bad = {1.0, 0.5};
  CHECK_THROWS_AS(eigen_branches(bad), std::invalid_argument);
}

TEST_CASE("matrix exponential") {
  const Matrix4c E = matrix_exp(0.7, 2.0);
  CHECK(std::abs(E(1, 0) - cd(0, -0.58552773901672794)) < 1e-12);
  CHECK(std::abs(E(1, 1) - cd(-0.007573515780619211, 0)) < 1e-12);
  CHECK(std::abs(E(1, 2) - cd(0, -0.27542636301482815)) < 1e-12);
  CHECK(std::abs(E(1, 3) - cd(0.043945449547993065, 0)) < 1e-12);

  CHECK(max_abs(matrix_exp(1.3, 0.0) - Matrix4c::Identity()) < 1e-14);
  CHECK(max_abs(matrix_exp(1.3, 0.4) * matrix_exp(1.3, 1.1) - matrix_exp(1.3, 1.5)) < 1e-12);
  // At xi = 0 the spectrum is degenerate and the dense fallback is used.
  const Matrix4c Z = matrix_exp(0.0, 1.0);
  CHECK(std::abs(Z(1, 1) - 0.5 * (1.0 + std::exp(-2.0))) < 1e-13);
  CHECK_THROWS_AS(matrix_exp(1.0, -1.0), std::invalid_argument);
}

TEST_CASE("decay regions") {
  const auto scan = log_spaced(1e-3, 1e3, 400);
  const auto r = decay_regions(scan);
  CHECK(r.max_real_part < 0.0);
  CHECK(r.r1 > 0.0);
  CHECK(r.r2 > r.r1);
  CHECK(r.beta1 > 0.0);
  CHECK(r.beta2 > 0.0);
  CHECK(r.projector_bound_low > 0.0);
  CHECK(r.projector_max_band >= 1.0);
  const std::vector<double> short_scan = {0.1, 1.0};
  CHECK_THROWS_AS(decay_regions(short_scan), std::invalid_argument);
}

TEST_CASE("linear evolution at t = 0 reproduces the data norm") {
  const double w = 1.3;
  const auto g = gaussian_profile(w);
  CHECK(std::abs(g.hat(0.0) - w * std::sqrt(std::numbers::pi)) < 1e-14);
  const double l2 = std::sqrt(w * std::sqrt(std::numbers::pi / 2.0));
  const double d1 = std::sqrt(std::sqrt(std::numbers::pi / 2.0) / w);
  CHECK(linear_evolve_norm(g, 0, 0.0, false) == doctest::Approx(l2).epsilon(1e-6));
  CHECK(linear_evolve_norm(g, 1, 0.0, false) == doctest::Approx(d1).epsilon(1e-6));
  CHECK(linear_evolve_norm(g, 0, 0.0, true) == doctest::Approx(std::sqrt(2.0) * l2).epsilon(1e-6));
}

TEST_CASE("linear evolution decays and stays accurate") {
  LinearEvolution evo(lift_profile(gaussian_profile(1.0), false), 0, 1e4);
  double prev = evo.norm(0.0);
  for (double t : log_spaced(1.0, 1e4, 9)) {
    const double v = evo.norm(t);
    CHECK(v < prev);
    CHECK(evo.last_error_estimate() <= 1e-2);
    prev = v;
  }
  CHECK(evo.node_count() > 100);
  CHECK_THROWS_AS(evo.norm(-1.0), std::invalid_argument);
}

TEST_CASE("dispersion table layout") {
  const std::vector<double> xs = {0.0, 0.5, 5.0};
  std::ostringstream os;
  write_dispersion_table(os, eigen_branches(xs));
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "xi,re1,re2,re3,re4,im1,im2,im3,im4,pnorm1,pnorm2,pnorm3,pnorm4");
  std::getline(is, line);
  CHECK(line.find("nan") != std::string::npos);  // xi = 0 is degenerate
  int rows = 1;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == 3);
}

TEST_CASE("log spacing") {
  const auto v = log_spaced(1e-2, 1e2, 5);
  REQUIRE(v.size() == 5);
  CHECK(v.front() == doctest::Approx(1e-2));
  CHECK(v[2] == doctest::Approx(1.0));
  CHECK(v.back() == doctest::Approx(1e2));
  CHECK_THROWS_AS(log_spaced(0.0, 1.0, 3), std::invalid_argument);
}
