#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "twophase/diagnostics.hpp"
#include "twophase/state.hpp"

namespace twophase {

enum class Reconstruction { first_order, muscl_minmod };

std::string to_string(Reconstruction r);
Reconstruction reconstruction_from_string(const std::string& s);

struct SchemeConfig {
  double cfl = 0.8;
  Reconstruction reconstruction = Reconstruction::muscl_minmod;
  double t_end = 1.0;
  int output_every = 50;
  /// When set, every step uses this dt (the last one is shortened only if
  /// t_end is not an integer multiple).
  std::optional<double> fixed_dt;

  void validate() const;
  bool operator==(const SchemeConfig&) const = default;
};

/// Per-cell time derivatives of (rho, m, n, M).
struct Tendency {
  std::vector<double> drho;
  std::vector<double> dm;
  std::vector<double> dn;
  std::vector<double> dM;
};

/// Raised when a stage produces a non-positive density. Carries the
/// offending stage state for post-mortem inspection.
class PositivityError : public std::runtime_error {
 public:
  PositivityError(const std::string& what, FlowState dump, std::size_t cell)
      : std::runtime_error(what), state_(std::move(dump)), cell_(cell) {}
  const FlowState& state() const { return state_; }
  std::size_t cell() const { return cell_; }

 private:
  FlowState state_;
  std::size_t cell_;
};

struct RunResult {
  NormSeries series;
  FlowState final_state;
  long steps = 0;
};

/// Finite-volume discretization of the coupled Euler / isothermal
/// Navier-Stokes system with drag, advanced by SSP-RK3.
///
/// Hyperbolic parts use a Rusanov flux per phase (wave speeds |u|+sigma(rho)
/// and |omega|+1). The viscous term (n omega_x)_x is discretized in flux form
/// with face densities taken as arithmetic means. Drag +-rho n (omega - u)
/// enters both momentum equations with exactly opposite sign.
class Solver {
 public:
  Solver(ModelParams params, Grid1D grid, SchemeConfig config);

  void rhs(const FlowState& s, Tendency& out);
  double cfl_dt(const FlowState& s) const;
  /// One SSP-RK3 step; s.t advances by dt.
  void step(FlowState& s, double dt);
  /// Integrates from init.t to config.t_end, recording compute_norms every
  /// output_every steps and at the final time.
  RunResult run(const FlowState& init);

  const ModelParams& params() const { return params_; }
  const Grid1D& grid() const { return grid_; }
  const SchemeConfig& config() const { return config_; }

 private:
  void check_positive(const FlowState& s, const char* where) const;

  ModelParams params_;
  Grid1D grid_;
  SchemeConfig config_;
  Tendency k_;
  Tendency acc_;
  FlowState stage_;
  std::vector<double> face_[8];
};

Tendency rhs(const FlowState& s, const ModelParams& p, const Grid1D& g, const SchemeConfig& c);
double cfl_dt(const FlowState& s, const ModelParams& p, const Grid1D& g, const SchemeConfig& c);
FlowState step(const FlowState& s, double dt, const ModelParams& p, const Grid1D& g,
               const SchemeConfig& c);
RunResult run(const FlowState& init, const ModelParams& p, const Grid1D& g, const SchemeConfig& c);

}  // namespace twophase
