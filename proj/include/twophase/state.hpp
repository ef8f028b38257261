#pragma once

#include <cstddef>
#include <vector>

namespace twophase {

/// Equation-of-state and equilibrium parameters.
///
/// The Euler phase has pressure a*rho^gamma; the Navier-Stokes phase is
/// isothermal with unit pressure coefficient (pressure = n).
struct ModelParams {
  double a = 1.0;
  double gamma = 1.4;
  double rho_star = 1.0;
  double n_star = 1.0;

  /// Throws std::invalid_argument unless a, rho*, n* > 0 and gamma >= 1.
  void validate() const;

  /// p'(rho*) = a*gamma*rho*^(gamma-1).
  double pressure_slope_star() const;
  /// sigma* = sqrt(p'(rho*)).
  double sigma_star() const;

  /// a = 1, gamma = 1, rho* = n* = 1: the normalization under which the
  /// linear symbol takes its textbook form.
  static ModelParams normalized();

  bool operator==(const ModelParams&) const = default;
};

/// Uniform periodic grid on [0, L).
class Grid1D {
 public:
  Grid1D(double length, std::size_t cells);

  double length() const { return length_; }
  std::size_t size() const { return cells_; }
  double dx() const { return dx_; }
  /// Cell-centre coordinate.
  double x(std::size_t i) const { return (static_cast<double>(i) + 0.5) * dx_; }

 private:
  double length_;
  std::size_t cells_;
  double dx_;
};

/// Conservative fields (rho, m = rho*u, n, M = n*omega) at time t.
struct FlowState {
  double t = 0.0;
  std::vector<double> rho;
  std::vector<double> m;
  std::vector<double> n;
  std::vector<double> M;

  FlowState() = default;
  explicit FlowState(std::size_t cells)
      : rho(cells), m(cells), n(cells), M(cells) {}

  std::size_t size() const { return rho.size(); }

  /// The constant state (rho*, 0, n*, 0).
  static FlowState equilibrium(const Grid1D& grid, const ModelParams& params);

  /// Throws std::invalid_argument on mismatched lengths and
  /// std::domain_error on a non-positive density.
  void check(const Grid1D& grid) const;
};

/// (v, u, n, omega) with v = 2/(gamma-1) (sigma(rho) - sigma*).
struct SymmetrizedState {
  double t = 0.0;
  std::vector<double> v;
  std::vector<double> u;
  std::vector<double> n;
  std::vector<double> omega;
};

double pressure(double rho, const ModelParams& params);
double sound_speed(double rho, const ModelParams& params);

SymmetrizedState symmetrize(const FlowState& state, const ModelParams& params);
FlowState desymmetrize(const SymmetrizedState& state, const ModelParams& params);

}  // namespace twophase
