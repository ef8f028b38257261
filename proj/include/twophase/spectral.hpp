#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <functional>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "twophase/state.hpp"

namespace twophase::spectral {

using cd = std::complex<double>;
using Matrix4c = Eigen::Matrix<cd, 4, 4>;
using Vector4c = Eigen::Matrix<cd, 4, 1>;

/// Fourier symbol of the linearization in (rho - rho*, m, n - n*, M).
struct SymbolMatrix {
  double xi = 0.0;
  Matrix4c entries = Matrix4c::Zero();
};

/// Rows (0, -i xi, 0, 0); (-i xi p'(rho*), -n*, 0, rho*); (0, 0, 0, -i xi);
/// (0, n*, -i xi, -rho* - xi^2).
SymbolMatrix assemble_A(double xi, const ModelParams& params = ModelParams::normalized());

/// Monic characteristic polynomial det(lambda I - A(xi)), highest degree
/// first. For normalized parameters this is
/// (1, xi^2 + 2, 3 xi^2, xi^2 (xi^2 + 2), xi^4).
std::array<double, 5> char_poly(double xi, const ModelParams& params = ModelParams::normalized());

/// Roots of a monic real quartic: Ferrari seeds, Newton polishing, and an
/// Aberth fallback if polishing leaves a residual above 1e-12 (relative).
/// Exactly-zero trailing coefficients are deflated as exact zero roots.
std::array<cd, 4> quartic_roots(const std::array<double, 5>& coeffs);

/// Relative residual |p(z)| / sum |c_k| |z|^k.
double poly_residual(const std::array<double, 5>& coeffs, cd z);

class DegenerateSpectrum : public std::runtime_error {
 public:
  DegenerateSpectrum(int a, int b, double gap);
  int first() const { return first_; }
  int second() const { return second_; }

 private:
  int first_;
  int second_;
};

inline constexpr double kDegeneracyGap = 1e-8;

/// Eigenprojections by the Lagrange product
/// P_j = prod_{k != j} (A - lambda_k I) / (lambda_j - lambda_k).
/// Throws DegenerateSpectrum (1-based branch indices) if two eigenvalues are
/// closer than kDegeneracyGap.
std::array<Matrix4c, 4> projections(const SymbolMatrix& A, const std::array<cd, 4>& lambda);

/// Branch index convention: 0 = diffusive real branch, 1/2 = acoustic
/// branches with positive/negative imaginary part (for xi > 0), 3 = relaxed
/// real branch. Printed labels are these plus one.
struct SpectralDecomposition {
  double xi = 0.0;
  std::array<cd, 4> lambda{};
  std::array<Matrix4c, 4> P{};
  bool degenerate = false;
  int colliding_first = -1;  // 1-based, set when degenerate
  int colliding_second = -1;
};

/// Frequency of closest approach of the two real branches (an avoided
/// crossing), found by golden-section search. Continuity-tracked labels
/// 1 and 4 exchange character there: below it branch 1 behaves like
/// -c xi^2 with c < 1 and branch 4 stays near -(rho* + n*); above it the
/// continuation of branch 4 grows like -xi^2 while branch 1 saturates.
/// Returns 0 when no real pair exists.
double real_branch_crossover(const ModelParams& params = ModelParams::normalized());

/// Eigenvalues and projections along an ascending grid with consistent labels.
///
/// Labels are anchored near xi = 0 (branch 4 nearest -(rho*+n*), branches
/// 2/3 by the sign of the imaginary part, branch 1 the rest), carried along
/// the grid by minimal total-distance matching between neighbouring samples
/// (an unlisted lead-in grid connects the anchor to the first sample), and
/// finally branches 1 and 4 are exchanged beyond real_branch_crossover so
/// that branch 1 always names the branch that scales like xi^2.
/// Negative frequencies receive the complex conjugate of the |xi| branches.
std::vector<SpectralDecomposition> eigen_branches(
    std::span<const double> xi_grid, const ModelParams& params = ModelParams::normalized());

/// Labeled decomposition at a single frequency.
SpectralDecomposition decompose(double xi, const ModelParams& params = ModelParams::normalized());

/// e^{tA(xi)} = sum_j e^{t lambda_j} P_j; falls back to a dense
/// scaling-and-squaring exponential at degenerate frequencies.
Matrix4c matrix_exp(double xi, double t, const ModelParams& params = ModelParams::normalized());

/// The zero-eigenvalue projection of A(0) for normalized parameters.
Matrix4c p0_matrix();

struct DecayRegionOptions {
  /// r1 is the largest scan point where the running min of
  /// -max_j Re lambda_j / xi^2 stays above low_fraction times its value at
  /// the first scan point.
  double low_fraction = 0.5;
  /// r2 is the smallest scan point (>= r1) where the tail min of
  /// -max_j Re lambda_j stays above high_fraction times its value at the
  /// last scan point.
  double high_fraction = 0.9;
};

struct DecayRegions {
  double r1 = 0.0;
  double r2 = 0.0;
  double beta1 = 0.0;
  double beta2 = 0.0;
  /// max_j ||P_j||_F over the certified regions and over the band between.
  double projector_bound_low = 0.0;
  double projector_bound_high = 0.0;
  double projector_max_band = 0.0;
  /// max over the scan of max_j Re lambda_j (must be negative).
  double max_real_part = 0.0;
  std::vector<double> scan;
};

DecayRegions decay_regions(std::span<const double> scan,
                           const ModelParams& params = ModelParams::normalized(),
                           const DecayRegionOptions& options = {});

/// Fourier transform of real data, hat h(xi) = int h(x) e^{-i x xi} dx,
/// together with a cutoff beyond which it is negligible.
struct ScalarProfile {
  std::function<cd(double)> hat;
  double cutoff = 0.0;
};

/// g(x) = exp(-x^2 / w^2), hat g = w sqrt(pi) exp(-w^2 xi^2 / 4).
ScalarProfile gaussian_profile(double width);

struct VectorProfile {
  std::function<Vector4c(double)> hat;
  double cutoff = 0.0;
};

/// h = (g, 0, 0, 0) when difference_form is false, h = (0, g, 0, -g) otherwise.
VectorProfile lift_profile(const ScalarProfile& g, bool difference_form);

/// Whole-line linear evolution, ||e^{tA}(i xi)^k hat h||_{L2} / sqrt(2 pi),
/// i.e. the physical-space L2 norm of d^k/dx^k of the solution of the
/// linearized system, by graded composite Simpson quadrature in xi.
///
/// Node spacing is min(h_max, max(h_min, kappa xi^2)) with
/// h_min = pi / (8 t_max), which resolves the e^{2 i xi t} oscillation of the
/// acoustic cross terms wherever e^{-xi^2 t / 2} is not negligible.
class LinearEvolution {
 public:
  LinearEvolution(VectorProfile profile, int k, double t_max,
                  const ModelParams& params = ModelParams::normalized());

  /// Throws std::runtime_error if the embedded Simpson/trapezoid estimate
  /// stays above 1% after three refinements.
  double norm(double t);
  std::size_t node_count() const { return nodes_.size(); }
  double last_error_estimate() const { return last_error_; }

 private:
  struct Node {
    double xi;
    double simpson_weight;
    double trapezoid_weight;
    bool dense;
    std::array<cd, 4> lambda;
    std::array<Vector4c, 4> mode;  // P_j (i xi)^k hat h
    Matrix4c A;
    Vector4c data;
  };
  void build(double refine);
  std::pair<double, double> integrate(double t) const;

  VectorProfile profile_;
  int k_;
  double t_max_;
  ModelParams params_;
  std::vector<Node> nodes_;
  double refine_ = 1.0;
  double last_error_ = 0.0;
};

double linear_evolve_norm(const ScalarProfile& g, int k, double t, bool difference_form,
                          const ModelParams& params = ModelParams::normalized());

/// Columns: xi, re1..re4, im1..im4, pnorm1..pnorm4 (Frobenius; nan where degenerate).
void write_dispersion_table(std::ostream& os, const std::vector<SpectralDecomposition>& rows);

std::vector<double> log_spaced(double lo, double hi, std::size_t count);

}  // namespace twophase::spectral
