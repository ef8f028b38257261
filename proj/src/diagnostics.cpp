#include "twophase/diagnostics.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace twophase {

namespace {

// Neumaier summation; conserved totals are compared at the 1e-12 level.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double v) {
    const double t = sum + v;
    carry += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  double value() const { return sum + carry; }
};

}  // namespace

struct Differentiator::Plans {
  std::size_t n = 0;
  double* real = nullptr;
  fftw_complex* spec = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  explicit Plans(std::size_t cells) : n(cells) {
    real = fftw_alloc_real(n);
    spec = fftw_alloc_complex(n / 2 + 1);
    const int len = static_cast<int>(n);
    forward = fftw_plan_dft_r2c_1d(len, real, spec, FFTW_ESTIMATE);
    backward = fftw_plan_dft_c2r_1d(len, spec, real, FFTW_ESTIMATE);
  }
  ~Plans() {
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
    fftw_free(real);
    fftw_free(spec);
  }
  Plans(const Plans&) = delete;
  Plans& operator=(const Plans&) = delete;

  void load(std::span<const double> f) {
    if (f.size() != n) throw std::invalid_argument("differentiator: field length mismatch");
    std::copy(f.begin(), f.end(), real);
    fftw_execute(forward);
  }
};

Differentiator::Differentiator(const Grid1D& grid)
    : grid_(grid), plans_(std::make_unique<Plans>(grid.size())) {}
Differentiator::~Differentiator() = default;
Differentiator::Differentiator(Differentiator&&) noexcept = default;
Differentiator& Differentiator::operator=(Differentiator&&) noexcept = default;

std::vector<double> Differentiator::derivative(std::span<const double> f, int k) {
  if (k < 1 || k > 4) throw std::invalid_argument("derivative: order must be in 1..4");
  Plans& p = *plans_;
  p.load(f);
  const std::size_t half = p.n / 2;
  const double base = 2.0 * std::numbers::pi / grid_.length();
  const double inv_n = 1.0 / static_cast<double>(p.n);
  for (std::size_t j = 0; j <= half; ++j) {
    const std::complex<double> ik(0.0, base * static_cast<double>(j));
    std::complex<double> factor = std::pow(ik, k) * inv_n;
    if (j == half && k % 2 == 1) factor = 0.0;
    const std::complex<double> c(p.spec[j][0], p.spec[j][1]);
    const std::complex<double> r = c * factor;
    p.spec[j][0] = r.real();
    p.spec[j][1] = r.imag();
  }
  fftw_execute(p.backward);
  return std::vector<double>(p.real, p.real + p.n);
}

double Differentiator::l2_spectral(std::span<const double> f) {
  Plans& p = *plans_;
  p.load(f);
  const std::size_t half = p.n / 2;
  double acc = p.spec[0][0] * p.spec[0][0] + p.spec[0][1] * p.spec[0][1];
  for (std::size_t j = 1; j < half; ++j)
    acc += 2.0 * (p.spec[j][0] * p.spec[j][0] + p.spec[j][1] * p.spec[j][1]);
  acc += p.spec[half][0] * p.spec[half][0] + p.spec[half][1] * p.spec[half][1];
  const double nn = static_cast<double>(p.n);
  return std::sqrt(acc * grid_.length() / (nn * nn));
}

std::vector<double> derivative_k(std::span<const double> f, int k, const Grid1D& grid) {
  Differentiator d(grid);
  return d.derivative(f, k);
}

double entropy_Q1(double rho, const ModelParams& params) {
  if (!(rho > 0.0)) throw std::domain_error("entropy_Q1: density must be positive");
  if (!(params.gamma > 1.0)) throw std::invalid_argument("entropy_Q1: requires gamma > 1");
  const double g = params.gamma;
  const double rs = params.rho_star;
  return params.a / (g - 1.0) *
         (std::pow(rho, g) - std::pow(rs, g) - g * std::pow(rs, g - 1.0) * (rho - rs));
}

double entropy_Q2(double n, const ModelParams& params) {
  if (!(n > 0.0)) throw std::domain_error("entropy_Q2: density must be positive");
  const double ns = params.n_star;
  return n * std::log(n) - ns * std::log(ns) - (1.0 + std::log(ns)) * (n - ns);
}

const std::vector<const char*>& norm_columns() {
  static const std::vector<const char*> names = {
      "t",       "l1",          "l2",      "linf",        "d1_l2",
      "d2_l2",   "diff_l2",     "diff_d1_l2", "entropy",  "dissipation",
      "mass_rho", "mass_n",     "momentum", "bd_l2"};
  return names;
}

std::vector<double> norm_values(const NormVector& r) {
  return {r.t,       r.l1,         r.l2,      r.linf,    r.d1_l2,
          r.d2_l2,   r.diff_l2,    r.diff_d1_l2, r.entropy, r.dissipation,
          r.mass_rho, r.mass_n,    r.momentum, r.bd_l2};
}

double total_entropy(const FlowState& s, const ModelParams& params, const Grid1D& grid) {
  double acc = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double u = s.m[i] / s.rho[i];
    const double w = s.M[i] / s.n[i];
    acc += 0.5 * s.rho[i] * u * u + entropy_Q1(s.rho[i], params) + 0.5 * s.n[i] * w * w +
           entropy_Q2(s.n[i], params);
  }
  return acc * grid.dx();
}

NormVector compute_norms(const FlowState& s, const ModelParams& params, Differentiator& diff) {
  const Grid1D& grid = diff.grid();
  const std::size_t cells = grid.size();
  if (s.size() != cells) throw std::invalid_argument("compute_norms: state/grid mismatch");
  const double dx = grid.dx();

  std::vector<double> comp[4];
  for (auto& c : comp) c.resize(cells);
  std::vector<double> velocity_gap(cells);
  for (std::size_t i = 0; i < cells; ++i) {
    comp[0][i] = s.rho[i] - params.rho_star;
    comp[1][i] = s.m[i] / s.rho[i];
    comp[2][i] = s.n[i] - params.n_star;
    comp[3][i] = s.M[i] / s.n[i];
    velocity_gap[i] = comp[1][i] - comp[3][i];
  }

  NormVector r;
  r.t = s.t;
  double sq = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  for (const auto& c : comp) {
    for (std::size_t i = 0; i < cells; ++i) {
      r.l1 += std::abs(c[i]);
      sq += c[i] * c[i];
      r.linf = std::max(r.linf, std::abs(c[i]));
    }
    const auto c1 = diff.derivative(c, 1);
    const auto c2 = diff.derivative(c, 2);
    for (std::size_t i = 0; i < cells; ++i) {
      d1 += c1[i] * c1[i];
      d2 += c2[i] * c2[i];
    }
  }
  r.l1 *= dx;
  r.l2 = std::sqrt(sq * dx);
  r.d1_l2 = std::sqrt(d1 * dx);
  r.d2_l2 = std::sqrt(d2 * dx);

  double gap_sq = 0.0;
  double gap_d1 = 0.0;
  const auto gap_x = diff.derivative(velocity_gap, 1);
  for (std::size_t i = 0; i < cells; ++i) {
    gap_sq += velocity_gap[i] * velocity_gap[i];
    gap_d1 += gap_x[i] * gap_x[i];
  }
  r.diff_l2 = std::sqrt(gap_sq * dx);
  r.diff_d1_l2 = std::sqrt(gap_d1 * dx);

  const auto omega_x = diff.derivative(comp[3], 1);
  double dissipation = 0.0;
  CompensatedSum mass_rho, mass_n, momentum;
  for (std::size_t i = 0; i < cells; ++i) {
    dissipation += s.n[i] * omega_x[i] * omega_x[i] +
                   s.rho[i] * s.n[i] * velocity_gap[i] * velocity_gap[i];
    mass_rho.add(s.rho[i]);
    mass_n.add(s.n[i]);
    momentum.add(s.m[i]);
    momentum.add(s.M[i]);
  }
  r.dissipation = dissipation * dx;
  r.mass_rho = mass_rho.value() * dx;
  r.mass_n = mass_n.value() * dx;
  r.momentum = momentum.value() * dx;
  r.entropy = total_entropy(s, params, grid);
  r.bd_l2 = bd_effective_velocity(s, diff).l2;
  return r;
}

std::vector<double> entropy_balance(const NormSeries& series) {
  std::vector<double> out;
  out.reserve(series.size());
  if (series.empty()) return out;
  const double e0 = series.front().entropy;
  double integral = 0.0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (i > 0) {
      const auto& a = series[i - 1];
      const auto& b = series[i];
      integral += 0.5 * (b.t - a.t) * (a.dissipation + b.dissipation);
    }
    out.push_back(series[i].entropy + integral - e0);
  }
  return out;
}

BdVelocity bd_effective_velocity(const FlowState& s, Differentiator& diff) {
  const std::size_t cells = s.size();
  std::vector<double> log_n(cells);
  for (std::size_t i = 0; i < cells; ++i) {
    if (!(s.n[i] > 0.0)) throw std::domain_error("bd_effective_velocity: n must be positive");
    log_n[i] = std::log(s.n[i]);
  }
  BdVelocity out;
  out.field = diff.derivative(log_n, 1);
  double sq = 0.0;
  for (std::size_t i = 0; i < cells; ++i) {
    out.field[i] += s.M[i] / s.n[i];
    sq += out.field[i] * out.field[i];
  }
  out.l2 = std::sqrt(sq * diff.grid().dx());
  return out;
}

double WeightedSup::value() const { return std::sqrt(value_sq); }

WeightedSup weighted_sup_update(WeightedSup w, const NormVector& record) {
  double norm = 0.0;
  switch (w.order) {
    case 0: norm = record.l2; break;
    case 1: norm = record.d1_l2; break;
    case 2: norm = record.d2_l2; break;
    default: throw std::invalid_argument("weighted_sup_update: order must be 0, 1 or 2");
  }
  const double candidate = std::pow(1.0 + record.t, 0.5 + w.order) * norm * norm;
  if (!w.initialized || candidate > w.value_sq) {
    w.value_sq = candidate;
    w.attained_at = record.t;
    w.initialized = true;
  }
  return w;
}

void write_norm_series(std::ostream& os, const NormSeries& series) {
  const auto& cols = norm_columns();
  for (std::size_t c = 0; c < cols.size(); ++c) os << (c ? "," : "") << cols[c];
  os << '\n';
  const auto old_precision = os.precision(17);
  for (const auto& rec : series) {
    const auto vals = norm_values(rec);
    for (std::size_t c = 0; c < vals.size(); ++c) os << (c ? "," : "") << vals[c];
    os << '\n';
  }
  os.precision(old_precision);
}

}  // namespace twophase
