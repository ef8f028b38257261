#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "twophase/state.hpp"

namespace twophase {

/// Fourier differentiation on the periodic grid, backed by cached FFTW plans.
///
/// Exact for band-limited fields. The Nyquist coefficient is dropped for odd
/// derivative orders so real input gives real output.
class Differentiator {
 public:
  explicit Differentiator(const Grid1D& grid);
  ~Differentiator();
  Differentiator(const Differentiator&) = delete;
  Differentiator& operator=(const Differentiator&) = delete;
  Differentiator(Differentiator&&) noexcept;
  Differentiator& operator=(Differentiator&&) noexcept;

  /// k-th derivative, k in 1..4.
  std::vector<double> derivative(std::span<const double> f, int k);

  /// L2 norm computed from the discrete Fourier coefficients
  /// (Parseval: sum |f_i|^2 dx = (L/N^2) sum |F_k|^2).
  double l2_spectral(std::span<const double> f);

  const Grid1D& grid() const { return grid_; }

 private:
  struct Plans;
  Grid1D grid_;
  std::unique_ptr<Plans> plans_;
};

/// One-shot convenience wrapper around Differentiator.
std::vector<double> derivative_k(std::span<const double> f, int k, const Grid1D& grid);

/// Relative entropy of the Euler phase,
/// a/(gamma-1) [rho^gamma - rho*^gamma - gamma rho*^(gamma-1) (rho - rho*)].
double entropy_Q1(double rho, const ModelParams& params);
/// Relative entropy of the isothermal phase,
/// n ln n - n* ln n* - (1 + ln n*) (n - n*).
double entropy_Q2(double n, const ModelParams& params);

/// Snapshot of every monitored quantity at one output time. Field order is
/// the column order of the norm-series CSV.
struct NormVector {
  double t = 0.0;
  // Perturbation (rho - rho*, u, n - n*, omega), all four components pooled.
  double l1 = 0.0;
  double l2 = 0.0;
  double linf = 0.0;
  double d1_l2 = 0.0;  // ||d/dx perturbation||
  double d2_l2 = 0.0;  // ||d^2/dx^2 perturbation||
  double diff_l2 = 0.0;     // ||u - omega||
  double diff_d1_l2 = 0.0;  // ||(u - omega)_x||
  double entropy = 0.0;      // E = sum [rho u^2/2 + Q1 + n omega^2/2 + Q2] dx
  double dissipation = 0.0;  // D = sum [n omega_x^2 + rho n (u - omega)^2] dx
  double mass_rho = 0.0;
  double mass_n = 0.0;
  double momentum = 0.0;  // sum (m + M) dx
  double bd_l2 = 0.0;     // ||omega + (ln n)_x||
};

using NormSeries = std::vector<NormVector>;

/// Column names in declaration order of NormVector.
const std::vector<const char*>& norm_columns();
/// Values of a record in column order.
std::vector<double> norm_values(const NormVector& record);

NormVector compute_norms(const FlowState& state, const ModelParams& params,
                         Differentiator& diff);

double total_entropy(const FlowState& state, const ModelParams& params, const Grid1D& grid);

/// Returns E(t) + int_0^t D - E(0) per record; the time integral uses the
/// trapezoid rule over consecutive records.
std::vector<double> entropy_balance(const NormSeries& series);

struct BdVelocity {
  std::vector<double> field;  // omega + (ln n)_x
  double l2 = 0.0;
};
BdVelocity bd_effective_velocity(const FlowState& state, Differentiator& diff);

/// Running supremum of (1+t)^(1/2+m) ||d^m perturbation||^2.
struct WeightedSup {
  int order = 0;
  double value_sq = 0.0;  // N_m^2
  double attained_at = 0.0;
  bool initialized = false;

  double value() const;
};
WeightedSup weighted_sup_update(WeightedSup w, const NormVector& record);

void write_norm_series(std::ostream& os, const NormSeries& series);

}  // namespace twophase
