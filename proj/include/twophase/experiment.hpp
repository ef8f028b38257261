#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "twophase/decayfit.hpp"
#include "twophase/solver.hpp"
#include "twophase/state.hpp"

namespace twophase {

enum class ExperimentKind { nonlinear_decay, linear_spectral, entropy_audit, dispersion_table };
enum class InitialFamily { gaussian, compact_bump, random_band_limited, difference_mode };

std::string to_string(ExperimentKind k);
std::string to_string(InitialFamily f);

struct InitialDataSpec {
  InitialFamily family = InitialFamily::compact_bump;
  double amplitude = 1e-2;
  double width = 2.2;
  std::optional<std::uint64_t> seed;
  /// Which of (rho - rho*, u, n - n*, omega) are perturbed (gaussian and
  /// compact-bump families).
  bool components[4] = {true, true, true, true};

  bool operator==(const InitialDataSpec&) const = default;
};

struct LinearSpec {
  bool difference_form = false;
  double width = 1.0;
  std::vector<int> orders = {0, 1};
  double t0 = 1e2;
  double t1 = 1e4;
  int samples = 41;
  double tolerance = 0.03;

  bool operator==(const LinearSpec&) const = default;
};

struct DispersionSpec {
  double xi_min = 1e-3;
  double xi_max = 1e2;
  int count = 200;

  bool operator==(const DispersionSpec&) const = default;
};

/// Every field is materialized: parse_config fills defaults, including the
/// ones derived from other values (fit window end and t_end).
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::nonlinear_decay;
  ModelParams model;
  double length = 2000.0;
  std::size_t cells = 16384;
  SchemeConfig scheme;
  InitialDataSpec initial;
  double fit_t0 = 10.0;
  double fit_t1 = 0.0;
  double fit_tolerance = 0.10;
  /// N_0 and N_1 suprema must be attained before this time.
  double sup_settle_time = 50.0;
  LinearSpec linear;
  DispersionSpec dispersion;
  double entropy_tolerance = 1e-3;
  bool entropy_refinement = false;
  double entropy_refinement_ratio = 3.0;
  std::string output_dir = "out";

  Grid1D grid() const { return Grid1D(length, cells); }
  void validate() const;
  bool operator==(const ExperimentConfig&) const = default;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Strict line-oriented parser: "[section]" headers, "key = value" lines,
/// '#' comments. Unknown sections or keys, duplicates and out-of-range values
/// raise ConfigError with the line number. Only experiment.kind is required.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config(const std::filesystem::path& path);
std::string serialize_config(const ExperimentConfig& cfg);

/// Throws ConfigError if a density would drop below half its equilibrium.
FlowState make_initial_data(const InitialDataSpec& spec, const Grid1D& grid,
                            const ModelParams& params);

struct EntropyAudit {
  std::vector<double> times;
  std::vector<double> residual;
  double e0 = 0.0;
  double final_residual = 0.0;
  double relative = 0.0;  // |final residual| / E(0)
  double dt = 0.0;
  NormSeries series;
};

/// Runs the solver with a fixed time step (cfl-limited from the initial
/// state unless scheme.fixed_dt is set) and returns the entropy balance.
EntropyAudit entropy_audit(const ExperimentConfig& cfg, std::size_t cells,
                           std::optional<double> dt = std::nullopt);

struct RunOptions {
  std::optional<std::string> output_dir;
  bool deterministic = false;
  bool quiet = false;
};

struct Verdict {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct ExperimentSummary {
  bool ok = false;
  std::string error;
  std::vector<std::string> notes;
  std::vector<FitResult> fits;
  std::vector<Verdict> checks;
  std::filesystem::path output_dir;
};

/// Executes the configured pipeline and writes norms.csv / fits.txt /
/// summary.json (plus dispersion.csv or entropy.csv) into the output
/// directory. Errors are caught and reported in the summary.
ExperimentSummary run_experiment(const ExperimentConfig& cfg, const RunOptions& options = {});

/// Writes only dispersion.csv (and the summary) regardless of cfg.kind.
ExperimentSummary run_dispersion(const ExperimentConfig& cfg, const RunOptions& options = {});

const char* version_string();

}  // namespace twophase
