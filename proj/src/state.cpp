#include "twophase/state.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace twophase {

void ModelParams::validate() const {
  if (!(a > 0.0)) throw std::invalid_argument("model: a must be positive");
  if (!(gamma >= 1.0)) throw std::invalid_argument("model: gamma must be >= 1");
  if (!(rho_star > 0.0)) throw std::invalid_argument("model: rho_star must be positive");
  if (!(n_star > 0.0)) throw std::invalid_argument("model: n_star must be positive");
}

double ModelParams::pressure_slope_star() const {
  return a * gamma * std::pow(rho_star, gamma - 1.0);
}

double ModelParams::sigma_star() const { return std::sqrt(pressure_slope_star()); }

ModelParams ModelParams::normalized() { return ModelParams{1.0, 1.0, 1.0, 1.0}; }

Grid1D::Grid1D(double length, std::size_t cells) : length_(length), cells_(cells) {
  if (!(length > 0.0)) throw std::invalid_argument("grid: L must be positive");
  if (cells < 8 || cells % 2 != 0)
    throw std::invalid_argument("grid: N must be even and at least 8");
  dx_ = length_ / static_cast<double>(cells_);
}

FlowState FlowState::equilibrium(const Grid1D& grid, const ModelParams& params) {
  FlowState s(grid.size());
  std::fill(s.rho.begin(), s.rho.end(), params.rho_star);
  std::fill(s.n.begin(), s.n.end(), params.n_star);
  return s;
}

void FlowState::check(const Grid1D& grid) const {
  const std::size_t cells = grid.size();
  if (rho.size() != cells || m.size() != cells || n.size() != cells || M.size() != cells)
    throw std::invalid_argument("state: field length does not match grid");
  for (std::size_t i = 0; i < cells; ++i) {
    if (!(rho[i] > 0.0) || !(n[i] > 0.0)) {
      std::ostringstream os;
      os << "state: non-positive density at cell " << i << " (rho=" << rho[i]
         << ", n=" << n[i] << ")";
      throw std::domain_error(os.str());
    }
  }
}

double pressure(double rho, const ModelParams& params) {
  if (!(rho > 0.0)) throw std::domain_error("pressure: density must be positive");
  return params.a * std::pow(rho, params.gamma);
}

double sound_speed(double rho, const ModelParams& params) {
  if (!(rho > 0.0)) throw std::domain_error("sound_speed: density must be positive");
  return std::sqrt(params.a * params.gamma * std::pow(rho, params.gamma - 1.0));
}

SymmetrizedState symmetrize(const FlowState& state, const ModelParams& params) {
  if (!(params.gamma > 1.0))
    throw std::invalid_argument("symmetrize: transform is singular at gamma = 1");
  const double scale = 2.0 / (params.gamma - 1.0);
  const double sigma_star = params.sigma_star();
  const std::size_t cells = state.size();
  SymmetrizedState out;
  out.t = state.t;
  out.v.resize(cells);
  out.u.resize(cells);
  out.n.resize(cells);
  out.omega.resize(cells);
  for (std::size_t i = 0; i < cells; ++i) {
    if (!(state.n[i] > 0.0)) throw std::domain_error("symmetrize: n must be positive");
    out.v[i] = scale * (sound_speed(state.rho[i], params) - sigma_star);
    out.u[i] = state.m[i] / state.rho[i];
    out.n[i] = state.n[i];
    out.omega[i] = state.M[i] / state.n[i];
  }
  return out;
}

FlowState desymmetrize(const SymmetrizedState& state, const ModelParams& params) {
  if (!(params.gamma > 1.0))
    throw std::invalid_argument("desymmetrize: transform is singular at gamma = 1");
  const double half_gm1 = 0.5 * (params.gamma - 1.0);
  const double sigma_star = params.sigma_star();
  const double ag = params.a * params.gamma;
  const std::size_t cells = state.v.size();
  FlowState out(cells);
  out.t = state.t;
  for (std::size_t i = 0; i < cells; ++i) {
    const double sigma = sigma_star + half_gm1 * state.v[i];
    if (!(sigma > 0.0)) {
      std::ostringstream os;
      os << "desymmetrize: implied sound speed " << sigma << " <= 0 at cell " << i;
      throw std::range_error(os.str());
    }
    if (!(state.n[i] > 0.0)) throw std::domain_error("desymmetrize: n must be positive");
    const double rho = std::pow(sigma * sigma / ag, 1.0 / (params.gamma - 1.0));
    out.rho[i] = rho;
    out.m[i] = rho * state.u[i];
    out.n[i] = state.n[i];
    out.M[i] = state.n[i] * state.omega[i];
  }
  return out;
}

}  // namespace twophase
