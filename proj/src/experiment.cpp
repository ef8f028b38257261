#include "twophase/experiment.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "twophase/diagnostics.hpp"
#include "twophase/spectral.hpp"

#ifndef TWOPHASE_VERSION
#define TWOPHASE_VERSION "unknown"
#endif

namespace twophase {

const char* version_string() { return TWOPHASE_VERSION; }

std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::nonlinear_decay: return "nonlinear-decay";
    case ExperimentKind::linear_spectral: return "linear-spectral";
    case ExperimentKind::entropy_audit: return "entropy-audit";
    case ExperimentKind::dispersion_table: return "dispersion-table";
  }
  return "?";
}

std::string to_string(InitialFamily f) {
  switch (f) {
    case InitialFamily::gaussian: return "gaussian";
    case InitialFamily::compact_bump: return "compact-bump";
    case InitialFamily::random_band_limited: return "random-band-limited";
    case InitialFamily::difference_mode: return "difference-mode";
  }
  return "?";
}

namespace {

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

double parse_double(const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("expected a number, got '" + text + "'");
  }
  if (used != text.size() || !std::isfinite(v))
    throw std::invalid_argument("expected a number, got '" + text + "'");
  return v;
}

long long parse_int(const std::string& text) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(text, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("expected an integer, got '" + text + "'");
  }
  if (used != text.size()) throw std::invalid_argument("expected an integer, got '" + text + "'");
  return v;
}

bool parse_bool(const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw std::invalid_argument("expected true/false, got '" + text + "'");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

ExperimentKind kind_from_string(const std::string& s) {
  for (auto k : {ExperimentKind::nonlinear_decay, ExperimentKind::linear_spectral,
                 ExperimentKind::entropy_audit, ExperimentKind::dispersion_table})
    if (to_string(k) == s) return k;
  throw std::invalid_argument("unknown experiment kind '" + s + "'");
}

InitialFamily family_from_string(const std::string& s) {
  for (auto f : {InitialFamily::gaussian, InitialFamily::compact_bump,
                 InitialFamily::random_band_limited, InitialFamily::difference_mode})
    if (to_string(f) == s) return f;
  throw std::invalid_argument("unknown initial family '" + s + "'");
}

constexpr const char* kComponentNames[4] = {"rho", "u", "n", "omega"};

struct Key {
  std::string section;
  std::string name;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;  // empty string: omit
};

const std::vector<Key>& registry() {
  static const std::vector<Key> keys = [] {
    std::vector<Key> k;
    auto num = [&k](const char* sec, const char* name, auto member) {
      k.push_back({sec, name,
                   [member](ExperimentConfig& c, const std::string& v) { member(c) = parse_double(v); },
                   [member](const ExperimentConfig& c) {
                     return format_double(member(const_cast<ExperimentConfig&>(c)));
                   }});
    };
    k.push_back({"experiment", "kind",
                 [](ExperimentConfig& c, const std::string& v) { c.kind = kind_from_string(v); },
                 [](const ExperimentConfig& c) { return to_string(c.kind); }});
    num("model", "a", [](ExperimentConfig& c) -> double& { return c.model.a; });
    num("model", "gamma", [](ExperimentConfig& c) -> double& { return c.model.gamma; });
    num("model", "rho_star", [](ExperimentConfig& c) -> double& { return c.model.rho_star; });
    num("model", "n_star", [](ExperimentConfig& c) -> double& { return c.model.n_star; });
    num("grid", "L", [](ExperimentConfig& c) -> double& { return c.length; });
    k.push_back({"grid", "N",
                 [](ExperimentConfig& c, const std::string& v) {
                   const long long n = parse_int(v);
                   if (n < 8 || n % 2 != 0)
                     throw std::invalid_argument("N must be an even integer >= 8");
                   c.cells = static_cast<std::size_t>(n);
                 },
                 [](const ExperimentConfig& c) { return std::to_string(c.cells); }});
    num("scheme", "cfl", [](ExperimentConfig& c) -> double& { return c.scheme.cfl; });
    k.push_back({"scheme", "reconstruction",
                 [](ExperimentConfig& c, const std::string& v) {
                   c.scheme.reconstruction = reconstruction_from_string(v);
                 },
                 [](const ExperimentConfig& c) { return to_string(c.scheme.reconstruction); }});
    num("scheme", "t_end", [](ExperimentConfig& c) -> double& { return c.scheme.t_end; });
    k.push_back({"scheme", "output_every",
                 [](ExperimentConfig& c, const std::string& v) {
                   c.scheme.output_every = static_cast<int>(parse_int(v));
                 },
                 [](const ExperimentConfig& c) { return std::to_string(c.scheme.output_every); }});
    k.push_back({"scheme", "fixed_dt",
                 [](ExperimentConfig& c, const std::string& v) { c.scheme.fixed_dt = parse_double(v); },
                 [](const ExperimentConfig& c) {
                   return c.scheme.fixed_dt ? format_double(*c.scheme.fixed_dt) : std::string();
                 }});
    k.push_back({"initial", "family",
                 [](ExperimentConfig& c, const std::string& v) {
                   c.initial.family = family_from_string(v);
                 },
                 [](const ExperimentConfig& c) { return to_string(c.initial.family); }});
    num("initial", "amplitude", [](ExperimentConfig& c) -> double& { return c.initial.amplitude; });
    num("initial", "width", [](ExperimentConfig& c) -> double& { return c.initial.width; });
    k.push_back({"initial", "seed",
                 [](ExperimentConfig& c, const std::string& v) {
                   const long long s = parse_int(v);
                   if (s < 0) throw std::invalid_argument("seed must be non-negative");
                   c.initial.seed = static_cast<std::uint64_t>(s);
                 },
                 [](const ExperimentConfig& c) {
                   return c.initial.seed ? std::to_string(*c.initial.seed) : std::string();
                 }});
    k.push_back({"initial", "components",
                 [](ExperimentConfig& c, const std::string& v) {
                   bool mask[4] = {false, false, false, false};
                   for (const auto& item : split_list(v)) {
                     const auto* it = std::find(std::begin(kComponentNames),
                                                std::end(kComponentNames), item);
                     if (it == std::end(kComponentNames))
                       throw std::invalid_argument("unknown component '" + item + "'");
                     mask[it - std::begin(kComponentNames)] = true;
                   }
                   std::copy(std::begin(mask), std::end(mask), c.initial.components);
                 },
                 [](const ExperimentConfig& c) {
                   std::string out;
                   for (int i = 0; i < 4; ++i)
                     if (c.initial.components[i]) out += (out.empty() ? "" : ",") + std::string(kComponentNames[i]);
                   return out.empty() ? std::string("none") : out;
                 }});
    num("fit", "t0", [](ExperimentConfig& c) -> double& { return c.fit_t0; });
    num("fit", "t1", [](ExperimentConfig& c) -> double& { return c.fit_t1; });
    num("fit", "tolerance", [](ExperimentConfig& c) -> double& { return c.fit_tolerance; });
    num("fit", "sup_settle_time", [](ExperimentConfig& c) -> double& { return c.sup_settle_time; });
    k.push_back({"linear", "data",
                 [](ExperimentConfig& c, const std::string& v) {
                   if (v == "generic")
                     c.linear.difference_form = false;
                   else if (v == "difference")
                     c.linear.difference_form = true;
                   else
                     throw std::invalid_argument("linear.data must be generic or difference");
                 },
                 [](const ExperimentConfig& c) {
                   return std::string(c.linear.difference_form ? "difference" : "generic");
                 }});
    num("linear", "width", [](ExperimentConfig& c) -> double& { return c.linear.width; });
    k.push_back({"linear", "orders",
                 [](ExperimentConfig& c, const std::string& v) {
                   c.linear.orders.clear();
                   for (const auto& item : split_list(v)) {
                     const long long o = parse_int(item);
                     if (o < 0 || o > 4) throw std::invalid_argument("orders must be in 0..4");
                     c.linear.orders.push_back(static_cast<int>(o));
                   }
                 },
                 [](const ExperimentConfig& c) {
                   std::string out;
                   for (int o : c.linear.orders) out += (out.empty() ? "" : ",") + std::to_string(o);
                   return out;
                 }});
    num("linear", "t0", [](ExperimentConfig& c) -> double& { return c.linear.t0; });
    num("linear", "t1", [](ExperimentConfig& c) -> double& { return c.linear.t1; });
    k.push_back({"linear", "samples",
                 [](ExperimentConfig& c, const std::string& v) {
                   c.linear.samples = static_cast<int>(parse_int(v));
                 },
                 [](const ExperimentConfig& c) { return std::to_string(c.linear.samples); }});
    num("linear", "tolerance", [](ExperimentConfig& c) -> double& { return c.linear.tolerance; });
    num("dispersion", "xi_min", [](ExperimentConfig& c) -> double& { return c.dispersion.xi_min; });
    num("dispersion", "xi_max", [](ExperimentConfig& c) -> double& { return c.dispersion.xi_max; });
    k.push_back({"dispersion", "count",
                 [](ExperimentConfig& c, const std::string& v) {
                   c.dispersion.count = static_cast<int>(parse_int(v));
                 },
                 [](const ExperimentConfig& c) { return std::to_string(c.dispersion.count); }});
    num("entropy", "tolerance", [](ExperimentConfig& c) -> double& { return c.entropy_tolerance; });
    k.push_back({"entropy", "refinement",
                 [](ExperimentConfig& c, const std::string& v) { c.entropy_refinement = parse_bool(v); },
                 [](const ExperimentConfig& c) {
                   return std::string(c.entropy_refinement ? "true" : "false");
                 }});
    num("entropy", "refinement_ratio",
        [](ExperimentConfig& c) -> double& { return c.entropy_refinement_ratio; });
    k.push_back({"output", "directory",
                 [](ExperimentConfig& c, const std::string& v) { c.output_dir = v; },
                 [](const ExperimentConfig& c) { return c.output_dir; }});
    return k;
  }();
  return keys;
}

}  // namespace

void ExperimentConfig::validate() const {
  model.validate();
  if (!(length > 0.0)) throw std::invalid_argument("grid.L must be positive");
  (void)grid();
  scheme.validate();
  if (!(initial.amplitude >= 0.0)) throw std::invalid_argument("initial.amplitude must be >= 0");
  if (!(initial.width > 0.0)) throw std::invalid_argument("initial.width must be positive");
  if (initial.family == InitialFamily::random_band_limited && !initial.seed)
    throw std::invalid_argument("initial.seed is required for random-band-limited data");
  if (!(fit_t0 >= 0.0 && fit_t1 > fit_t0)) throw std::invalid_argument("fit window needs 0 <= t0 < t1");
  if (!(fit_tolerance > 0.0)) throw std::invalid_argument("fit.tolerance must be positive");
  if (!(linear.width > 0.0)) throw std::invalid_argument("linear.width must be positive");
  if (linear.orders.empty()) throw std::invalid_argument("linear.orders must not be empty");
  if (!(linear.t0 >= 0.0 && linear.t1 > linear.t0))
    throw std::invalid_argument("linear window needs 0 <= t0 < t1");
  if (linear.samples < 8) throw std::invalid_argument("linear.samples must be >= 8");
  if (!(linear.tolerance > 0.0)) throw std::invalid_argument("linear.tolerance must be positive");
  if (!(dispersion.xi_min > 0.0 && dispersion.xi_max > dispersion.xi_min))
    throw std::invalid_argument("dispersion range needs 0 < xi_min < xi_max");
  if (dispersion.count < 2) throw std::invalid_argument("dispersion.count must be >= 2");
  if (!(entropy_tolerance > 0.0)) throw std::invalid_argument("entropy.tolerance must be positive");
  if (output_dir.empty()) throw std::invalid_argument("output.directory must not be empty");
  if ((kind == ExperimentKind::nonlinear_decay || kind == ExperimentKind::entropy_audit) &&
      (model.gamma <= 1.0))
    throw std::invalid_argument("model.gamma must exceed 1 for solver experiments");
}

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  std::set<std::string> seen;
  std::set<std::string> sections;
  for (const auto& key : registry()) sections.insert(key.section);

  std::istringstream is(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  auto fail = [&](const std::string& msg) {
    std::ostringstream os;
    os << "config line " << line_no << ": " << msg;
    throw ConfigError(os.str());
  };
  while (std::getline(is, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail("malformed section header '" + line + "'");
      section = trim(line.substr(1, line.size() - 2));
      if (!sections.count(section)) fail("unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected key = value, got '" + line + "'");
    const std::string name = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty()) fail("key '" + name + "' appears before any [section]");
    const auto& keys = registry();
    const auto it = std::find_if(keys.begin(), keys.end(), [&](const Key& k) {
      return k.section == section && k.name == name;
    });
    if (it == keys.end()) fail("unknown key '" + name + "' in [" + section + "]");
    const std::string full = section + "." + name;
    if (!seen.insert(full).second) fail("duplicate key " + full);
    if (value.empty()) fail(full + ": empty value");
    try {
      it->set(cfg, value);
    } catch (const std::invalid_argument& e) {
      fail(full + ": " + e.what());
    }
  }
  line_no = 0;
  if (!seen.count("experiment.kind")) fail("missing required key experiment.kind");

  // Derived defaults.
  if (!seen.count("fit.t1")) cfg.fit_t1 = 0.4 * cfg.length / cfg.model.sigma_star();
  if (!seen.count("scheme.t_end")) {
    switch (cfg.kind) {
      case ExperimentKind::nonlinear_decay: cfg.scheme.t_end = cfg.fit_t1; break;
      case ExperimentKind::entropy_audit: cfg.scheme.t_end = 100.0; break;
      default: cfg.scheme.t_end = 1.0;
    }
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return cfg;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream os;
  std::string section;
  for (const auto& key : registry()) {
    const std::string value = key.get(cfg);
    if (value.empty()) continue;
    if (key.section != section) {
      if (!section.empty()) os << '\n';
      section = key.section;
      os << '[' << section << "]\n";
    }
    os << key.name << " = " << value << '\n';
  }
  return os.str();
}

FlowState make_initial_data(const InitialDataSpec& spec, const Grid1D& grid,
                            const ModelParams& params) {
  const std::size_t cells = grid.size();
  const double centre = 0.5 * grid.length();
  const double eps = spec.amplitude;
  const double w = spec.width;
  std::vector<double> pert[4];
  for (auto& p : pert) p.assign(cells, 0.0);

  auto gaussian = [&](double x) {
    const double r = (x - centre) / w;
    return std::exp(-r * r);
  };
  auto bump = [&](double x) {
    const double r = (x - centre) / w;
    if (std::abs(r) >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - r * r));
  };

  switch (spec.family) {
    case InitialFamily::gaussian:
    case InitialFamily::compact_bump:
      for (int c = 0; c < 4; ++c) {
        if (!spec.components[c]) continue;
        for (std::size_t i = 0; i < cells; ++i)
          pert[c][i] = eps * (spec.family == InitialFamily::gaussian ? gaussian(grid.x(i))
                                                                     : bump(grid.x(i)));
      }
      break;
    case InitialFamily::difference_mode:
      for (std::size_t i = 0; i < cells; ++i) {
        const double g = gaussian(grid.x(i));
        pert[1][i] = eps * g;
        pert[3][i] = -eps * g;
      }
      break;
    case InitialFamily::random_band_limited: {
      if (!spec.seed) throw ConfigError("random-band-limited data requires a seed");
      std::mt19937_64 rng(*spec.seed);
      // Uniform in [-1, 1] from the top 53 bits, independent of the
      // standard library's distribution implementations.
      auto uniform = [&rng] {
        return 2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53 - 1.0;
      };
      const std::size_t modes = cells / 8;
      const double base = 2.0 * std::numbers::pi / grid.length();
      double h1_sq = 0.0;
      for (int c = 0; c < 4; ++c) {
        for (std::size_t k = 1; k <= modes; ++k) {
          const double a = uniform();
          const double b = uniform();
          const double kappa = base * static_cast<double>(k);
          h1_sq += 0.5 * grid.length() * (a * a + b * b) * (1.0 + kappa * kappa);
          for (std::size_t i = 0; i < cells; ++i) {
            const double phase = kappa * grid.x(i);
            pert[c][i] += a * std::cos(phase) + b * std::sin(phase);
          }
        }
      }
      const double scale = h1_sq > 0.0 ? eps / std::sqrt(h1_sq) : 0.0;
      for (auto& p : pert)
        for (auto& v : p) v *= scale;
      break;
    }
  }

  FlowState s(cells);
  const double floor_rho = 0.5 * std::min(params.rho_star, params.n_star);
  for (std::size_t i = 0; i < cells; ++i) {
    s.rho[i] = params.rho_star + pert[0][i];
    s.n[i] = params.n_star + pert[2][i];
    if (s.rho[i] < floor_rho || s.n[i] < floor_rho) {
      std::ostringstream os;
      os << "initial data: density falls below " << floor_rho << " at x=" << grid.x(i)
         << "; reduce the amplitude";
      throw ConfigError(os.str());
    }
    s.m[i] = s.rho[i] * pert[1][i];
    s.M[i] = s.n[i] * pert[3][i];
  }
  return s;
}

EntropyAudit entropy_audit(const ExperimentConfig& cfg, std::size_t cells,
                           std::optional<double> dt) {
  const Grid1D grid(cfg.length, cells);
  const FlowState init = make_initial_data(cfg.initial, grid, cfg.model);
  SchemeConfig scheme = cfg.scheme;
  if (!dt) dt = scheme.fixed_dt ? *scheme.fixed_dt : Solver(cfg.model, grid, scheme).cfl_dt(init);
  scheme.fixed_dt = *dt;
  Solver solver(cfg.model, grid, scheme);
  EntropyAudit audit;
  audit.dt = *dt;
  audit.series = solver.run(init).series;
  audit.residual = entropy_balance(audit.series);
  for (const auto& r : audit.series) audit.times.push_back(r.t);
  audit.e0 = audit.series.front().entropy;
  audit.final_residual = audit.residual.back();
  audit.relative = audit.e0 > 0.0 ? std::abs(audit.final_residual) / audit.e0 : 0.0;
  return audit;
}

namespace {

std::vector<Sample> column(const NormSeries& series, double NormVector::*field) {
  std::vector<Sample> out;
  out.reserve(series.size());
  for (const auto& r : series) out.push_back({r.t, r.*field});
  return out;
}

void log(const RunOptions& o, const std::string& msg) {
  if (!o.quiet) std::cerr << msg << '\n';
}

nlohmann::json config_echo(const ExperimentConfig& cfg) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& key : registry()) {
    const std::string value = key.get(cfg);
    if (!value.empty()) j[key.section][key.name] = value;
  }
  return j;
}

void write_summary(const ExperimentConfig& cfg, const RunOptions& options,
                   const ExperimentSummary& s) {
  nlohmann::json j;
  j["version"] = version_string();
  j["kind"] = to_string(cfg.kind);
  j["ok"] = s.ok;
  j["deterministic"] = options.deterministic;
  if (!s.error.empty()) j["error"] = s.error;
  j["notes"] = s.notes;
  j["config"] = config_echo(cfg);
  j["fits"] = nlohmann::json::array();
  for (const auto& f : s.fits) {
    j["fits"].push_back({{"name", f.name},
                         {"alpha", f.alpha},
                         {"stderr", f.stderr_alpha},
                         {"r2", f.r2},
                         {"window", {f.t0, f.t1}},
                         {"predicted", f.predicted},
                         {"tolerance", f.tolerance},
                         {"verdict", f.pass ? "pass" : "fail"}});
  }
  j["checks"] = nlohmann::json::array();
  for (const auto& c : s.checks)
    j["checks"].push_back({{"name", c.name},
                           {"value", c.value},
                           {"threshold", c.threshold},
                           {"verdict", c.pass ? "pass" : "fail"}});
  std::ofstream out(s.output_dir / "summary.json");
  out << j.dump(2) << '\n';
}

void write_fits(const ExperimentSummary& s) {
  std::ofstream out(s.output_dir / "fits.txt");
  for (const auto& f : s.fits) write_fit_report(out, f);
}

void add_conservation_checks(const FlowState& init, const Grid1D& grid, const NormSeries& series,
                             ExperimentSummary& summary) {
  const auto& first = series.front();
  const auto& last = series.back();
  double state_norm = 0.0;
  for (std::size_t i = 0; i < init.size(); ++i)
    state_norm += init.rho[i] * init.rho[i] + init.m[i] * init.m[i] + init.n[i] * init.n[i] +
                  init.M[i] * init.M[i];
  state_norm = std::sqrt(state_norm * grid.dx());
  auto check = [&](std::string name, double value, double threshold) {
    summary.checks.push_back({std::move(name), value, threshold, value <= threshold});
  };
  check("mass_rho_drift", std::abs(last.mass_rho - first.mass_rho) / first.mass_rho, 1e-12);
  check("mass_n_drift", std::abs(last.mass_n - first.mass_n) / first.mass_n, 1e-12);
  check("momentum_drift", std::abs(last.momentum - first.momentum) / state_norm, 1e-10);
}

void nonlinear_decay(const ExperimentConfig& cfg, const RunOptions& options,
                     ExperimentSummary& summary) {
  const Grid1D grid = cfg.grid();
  const FlowState init = make_initial_data(cfg.initial, grid, cfg.model);
  Solver solver(cfg.model, grid, cfg.scheme);
  log(options, "nonlinear-decay: N=" + std::to_string(grid.size()) +
                   " t_end=" + format_double(cfg.scheme.t_end));
  const RunResult result = solver.run(init);
  {
    std::ofstream out(summary.output_dir / "norms.csv");
    write_norm_series(out, result.series);
  }

  add_conservation_checks(init, grid, result.series, summary);
  auto check = [&](std::string name, double value, double threshold) {
    summary.checks.push_back({std::move(name), value, threshold, value <= threshold});
  };

  if (cfg.initial.amplitude == 0.0) {
    summary.notes.push_back("degenerate: zero data, fits skipped");
    return;
  }

  WeightedSup sup[3] = {{0}, {1}, {2}};
  for (const auto& r : result.series)
    for (auto& w : sup) w = weighted_sup_update(w, r);
  for (int m = 0; m < 2; ++m)
    check("N" + std::to_string(m) + "_attained_at", sup[m].attained_at, cfg.sup_settle_time);
  for (const auto& w : sup) {
    std::ostringstream os;
    os << "N" << w.order << "=" << format_double(w.value())
       << " attained at t=" << format_double(w.attained_at);
    summary.notes.push_back(os.str());
  }

  const double t0 = cfg.fit_t0;
  const double t1 = cfg.fit_t1;
  const double tol = cfg.fit_tolerance;
  summary.fits.push_back(
      fit_exponent(column(result.series, &NormVector::l2), t0, t1, -0.25, tol, "perturbation_l2"));
  summary.fits.push_back(fit_exponent(column(result.series, &NormVector::d1_l2), t0, t1, -0.75,
                                      tol, "perturbation_d1_l2"));
  summary.fits.push_back(fit_exponent(column(result.series, &NormVector::diff_l2), t0, t1, -0.75,
                                      tol, "velocity_gap_l2"));
}

void linear_spectral(const ExperimentConfig& cfg, const RunOptions& options,
                     ExperimentSummary& summary) {
  const auto g = spectral::gaussian_profile(cfg.linear.width);
  const auto times = spectral::log_spaced(cfg.linear.t0, cfg.linear.t1,
                                          static_cast<std::size_t>(cfg.linear.samples));
  const double base = cfg.linear.difference_form ? -0.75 : -0.25;
  std::vector<std::vector<Sample>> columns;
  for (int k : cfg.linear.orders) {
    log(options, "linear-spectral: k=" + std::to_string(k));
    spectral::LinearEvolution evo(spectral::lift_profile(g, cfg.linear.difference_form), k,
                                  cfg.linear.t1, cfg.model);
    std::vector<Sample> series;
    series.push_back({0.0, evo.norm(0.0)});
    for (double t : times) series.push_back({t, evo.norm(t)});
    std::string name = std::string(cfg.linear.difference_form ? "difference" : "generic") +
                       "_k" + std::to_string(k);
    summary.fits.push_back(fit_exponent(series, cfg.linear.t0, cfg.linear.t1, base - 0.5 * k,
                                        cfg.linear.tolerance, name));
    columns.push_back(std::move(series));
  }
  std::ofstream out(summary.output_dir / "norms.csv");
  out << "t";
  for (int k : cfg.linear.orders) out << ",norm_k" << k;
  out << '\n';
  out.precision(17);
  for (std::size_t i = 0; i < columns.front().size(); ++i) {
    out << columns.front()[i].t;
    for (const auto& c : columns) out << ',' << c[i].value;
    out << '\n';
  }
}

void entropy_audit_pipeline(const ExperimentConfig& cfg, const RunOptions& options,
                            ExperimentSummary& summary) {
  log(options, "entropy-audit: N=" + std::to_string(cfg.cells));
  const auto fine = entropy_audit(cfg, cfg.cells);
  {
    std::ofstream out(summary.output_dir / "norms.csv");
    write_norm_series(out, fine.series);
  }
  {
    std::ofstream out(summary.output_dir / "entropy.csv");
    out << "t,entropy,dissipation,residual\n";
    out.precision(17);
    for (std::size_t i = 0; i < fine.series.size(); ++i)
      out << fine.series[i].t << ',' << fine.series[i].entropy << ','
          << fine.series[i].dissipation << ',' << fine.residual[i] << '\n';
  }
  const Grid1D grid = cfg.grid();
  add_conservation_checks(make_initial_data(cfg.initial, grid, cfg.model), grid, fine.series,
                          summary);
  summary.checks.push_back({"entropy_residual_relative", fine.relative, cfg.entropy_tolerance,
                            fine.relative <= cfg.entropy_tolerance});
  if (cfg.entropy_refinement) {
    log(options, "entropy-audit: coarse companion run N=" + std::to_string(cfg.cells / 2));
    const auto coarse = entropy_audit(cfg, cfg.cells / 2, 2.0 * fine.dt);
    const double ratio = std::abs(coarse.final_residual) / std::abs(fine.final_residual);
    summary.checks.push_back({"entropy_refinement_ratio", ratio, cfg.entropy_refinement_ratio,
                              ratio >= cfg.entropy_refinement_ratio});
  }
}

void dispersion_pipeline(const ExperimentConfig& cfg, ExperimentSummary& summary) {
  const auto grid = spectral::log_spaced(cfg.dispersion.xi_min, cfg.dispersion.xi_max,
                                         static_cast<std::size_t>(cfg.dispersion.count));
  const auto rows = spectral::eigen_branches(grid, cfg.model);
  {
    std::ofstream out(summary.output_dir / "dispersion.csv");
    spectral::write_dispersion_table(out, rows);
  }
  double partition = 0.0;
  double idempotent = 0.0;
  double resolution = 0.0;
  int degenerate = 0;
  for (const auto& r : rows) {
    if (r.degenerate) {
      ++degenerate;
      continue;
    }
    const auto A = spectral::assemble_A(r.xi, cfg.model).entries;
    spectral::Matrix4c sum = spectral::Matrix4c::Zero();
    spectral::Matrix4c recon = spectral::Matrix4c::Zero();
    for (int j = 0; j < 4; ++j) {
      sum += r.P[j];
      recon += r.lambda[j] * r.P[j];
      for (int k = 0; k < 4; ++k) {
        const spectral::Matrix4c expect = j == k ? r.P[j] : spectral::Matrix4c::Zero();
        idempotent = std::max(idempotent, (r.P[j] * r.P[k] - expect).cwiseAbs().maxCoeff());
      }
    }
    partition = std::max(partition, (sum - spectral::Matrix4c::Identity()).cwiseAbs().maxCoeff());
    resolution = std::max(resolution, (recon - A).cwiseAbs().maxCoeff());
  }
  summary.checks.push_back({"projector_partition_of_unity", partition, 1e-10, partition <= 1e-10});
  summary.checks.push_back({"projector_orthogonality", idempotent, 1e-10, idempotent <= 1e-10});
  summary.checks.push_back({"spectral_resolution", resolution, 1e-10, resolution <= 1e-10});
  summary.notes.push_back(std::to_string(degenerate) + " degenerate samples skipped");
}

ExperimentSummary execute(const ExperimentConfig& cfg, const RunOptions& options,
                          bool dispersion_only) {
  ExperimentSummary summary;
  summary.output_dir = options.output_dir ? *options.output_dir : cfg.output_dir;
  std::filesystem::create_directories(summary.output_dir);
  try {
    cfg.validate();
    if (dispersion_only || cfg.kind == ExperimentKind::dispersion_table) {
      dispersion_pipeline(cfg, summary);
    } else {
      switch (cfg.kind) {
        case ExperimentKind::nonlinear_decay: nonlinear_decay(cfg, options, summary); break;
        case ExperimentKind::linear_spectral: linear_spectral(cfg, options, summary); break;
        case ExperimentKind::entropy_audit: entropy_audit_pipeline(cfg, options, summary); break;
        case ExperimentKind::dispersion_table: break;
      }
    }
    summary.ok = std::all_of(summary.fits.begin(), summary.fits.end(),
                             [](const FitResult& f) { return f.pass; }) &&
                 std::all_of(summary.checks.begin(), summary.checks.end(),
                             [](const Verdict& v) { return v.pass; });
  } catch (const std::exception& e) {
    summary.ok = false;
    summary.error = e.what();
  }
  write_fits(summary);
  write_summary(cfg, options, summary);
  return summary;
}

}  // namespace

ExperimentSummary run_experiment(const ExperimentConfig& cfg, const RunOptions& options) {
  return execute(cfg, options, false);
}

ExperimentSummary run_dispersion(const ExperimentConfig& cfg, const RunOptions& options) {
  return execute(cfg, options, true);
}

}  // namespace twophase
