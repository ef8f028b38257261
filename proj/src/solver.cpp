#include "twophase/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace twophase {

std::string to_string(Reconstruction r) {
  return r == Reconstruction::first_order ? "first-order" : "muscl-minmod";
}

Reconstruction reconstruction_from_string(const std::string& s) {
  if (s == "first-order") return Reconstruction::first_order;
  if (s == "muscl-minmod") return Reconstruction::muscl_minmod;
  throw std::invalid_argument("unknown reconstruction '" + s + "'");
}

void SchemeConfig::validate() const {
  if (!(cfl > 0.0 && cfl <= 1.0)) throw std::invalid_argument("scheme: cfl must be in (0, 1]");
  if (!(t_end > 0.0)) throw std::invalid_argument("scheme: t_end must be positive");
  if (output_every < 1) throw std::invalid_argument("scheme: output_every must be >= 1");
  if (fixed_dt && !(*fixed_dt > 0.0)) throw std::invalid_argument("scheme: fixed_dt must be positive");
}

namespace {

inline double minmod(double a, double b) {
  if (a * b <= 0.0) return 0.0;
  return std::abs(a) < std::abs(b) ? a : b;
}

void resize_tendency(Tendency& t, std::size_t cells) {
  t.drho.resize(cells);
  t.dm.resize(cells);
  t.dn.resize(cells);
  t.dM.resize(cells);
}

}  // namespace

Solver::Solver(ModelParams params, Grid1D grid, SchemeConfig config)
    : params_(params), grid_(grid), config_(config), stage_(grid.size()) {
  params_.validate();
  config_.validate();
  resize_tendency(k_, grid_.size());
  resize_tendency(acc_, grid_.size());
  for (auto& f : face_) f.resize(grid_.size());
}

void Solver::check_positive(const FlowState& s, const char* where) const {
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!(s.rho[i] > 0.0) || !(s.n[i] > 0.0)) {
      std::ostringstream os;
      os << where << ": positivity violated at cell " << i << " (x=" << grid_.x(i)
         << ", t=" << s.t << ", rho=" << s.rho[i] << ", n=" << s.n[i] << ")";
      throw PositivityError(os.str(), s, i);
    }
  }
}

void Solver::rhs(const FlowState& s, Tendency& out) {
  const std::size_t cells = grid_.size();
  if (s.size() != cells) throw std::invalid_argument("rhs: state/grid mismatch");
  check_positive(s, "rhs");
  resize_tendency(out, cells);

  const double inv_dx = 1.0 / grid_.dx();
  const double a = params_.a;
  const double gamma = params_.gamma;
  const bool muscl = config_.reconstruction == Reconstruction::muscl_minmod;

  // Limited slopes, stored in face_[0..3]; face fluxes land in face_[4..7].
  auto& s_rho = face_[0];
  auto& s_m = face_[1];
  auto& s_n = face_[2];
  auto& s_M = face_[3];
  if (muscl) {
    for (std::size_t i = 0; i < cells; ++i) {
      const std::size_t l = i == 0 ? cells - 1 : i - 1;
      const std::size_t r = i + 1 == cells ? 0 : i + 1;
      s_rho[i] = minmod(s.rho[i] - s.rho[l], s.rho[r] - s.rho[i]);
      s_m[i] = minmod(s.m[i] - s.m[l], s.m[r] - s.m[i]);
      s_n[i] = minmod(s.n[i] - s.n[l], s.n[r] - s.n[i]);
      s_M[i] = minmod(s.M[i] - s.M[l], s.M[r] - s.M[i]);
    }
  } else {
    for (int v = 0; v < 4; ++v) std::fill(face_[v].begin(), face_[v].end(), 0.0);
  }

  auto& f_rho = face_[4];
  auto& f_m = face_[5];
  auto& f_n = face_[6];
  auto& f_M = face_[7];
  for (std::size_t i = 0; i < cells; ++i) {
    const std::size_t r = i + 1 == cells ? 0 : i + 1;
    // Euler phase.
    const double rho_l = s.rho[i] + 0.5 * s_rho[i];
    const double rho_r = s.rho[r] - 0.5 * s_rho[r];
    const double m_l = s.m[i] + 0.5 * s_m[i];
    const double m_r = s.m[r] - 0.5 * s_m[r];
    const double u_l = m_l / rho_l;
    const double u_r = m_r / rho_r;
    const double p_l = a * std::exp(gamma * std::log(rho_l));
    const double p_r = a * std::exp(gamma * std::log(rho_r));
    const double c_l = std::sqrt(gamma * p_l / rho_l);
    const double c_r = std::sqrt(gamma * p_r / rho_r);
    const double alpha = std::max(std::abs(u_l) + c_l, std::abs(u_r) + c_r);
    f_rho[i] = 0.5 * (m_l + m_r) - 0.5 * alpha * (rho_r - rho_l);
    f_m[i] = 0.5 * (m_l * u_l + p_l + m_r * u_r + p_r) - 0.5 * alpha * (m_r - m_l);

    // Navier-Stokes phase: isothermal pressure n, sound speed 1.
    const double n_l = s.n[i] + 0.5 * s_n[i];
    const double n_r = s.n[r] - 0.5 * s_n[r];
    const double M_l = s.M[i] + 0.5 * s_M[i];
    const double M_r = s.M[r] - 0.5 * s_M[r];
    const double w_l = M_l / n_l;
    const double w_r = M_r / n_r;
    const double beta = std::max(std::abs(w_l), std::abs(w_r)) + 1.0;
    const double viscous =
        0.5 * (s.n[i] + s.n[r]) * (s.M[r] / s.n[r] - s.M[i] / s.n[i]) * inv_dx;
    f_n[i] = 0.5 * (M_l + M_r) - 0.5 * beta * (n_r - n_l);
    f_M[i] = 0.5 * (M_l * w_l + n_l + M_r * w_r + n_r) - 0.5 * beta * (M_r - M_l) - viscous;
  }

  for (std::size_t i = 0; i < cells; ++i) {
    const std::size_t l = i == 0 ? cells - 1 : i - 1;
    const double drag = s.rho[i] * s.n[i] * (s.M[i] / s.n[i] - s.m[i] / s.rho[i]);
    out.drho[i] = -(f_rho[i] - f_rho[l]) * inv_dx;
    out.dm[i] = -(f_m[i] - f_m[l]) * inv_dx + drag;
    out.dn[i] = -(f_n[i] - f_n[l]) * inv_dx;
    out.dM[i] = -(f_M[i] - f_M[l]) * inv_dx - drag;
  }
}

double Solver::cfl_dt(const FlowState& s) const {
  check_positive(s, "cfl_dt");
  const std::size_t cells = grid_.size();
  double speed = 0.0;
  double nu = 0.0;
  for (std::size_t i = 0; i < cells; ++i) {
    const std::size_t l = i == 0 ? cells - 1 : i - 1;
    const std::size_t r = i + 1 == cells ? 0 : i + 1;
    const double u = s.m[i] / s.rho[i];
    const double w = s.M[i] / s.n[i];
    speed = std::max(speed, std::abs(u) + sound_speed(s.rho[i], params_));
    speed = std::max(speed, std::abs(w) + 1.0);
    const double face = std::max(s.n[l] + s.n[i], s.n[i] + s.n[r]) * 0.5;
    nu = std::max(nu, face / s.n[i]);
  }
  const double dx = grid_.dx();
  return config_.cfl * std::min(dx / speed, dx * dx / (2.0 * nu));
}

void Solver::step(FlowState& s, double dt) {
  const std::size_t cells = grid_.size();
  // SSP-RK3 in increment form: u1 = u + dt L0, u2 = u + dt (L0 + L1) / 4,
  // u3 = u + dt (L0 + L1 + 4 L2) / 6. The Shu-Osher convex weights 1/3, 2/3
  // are inexact in binary and drift the totals by ~1e-13 over a long run.
  rhs(s, k_);
  acc_ = k_;
  stage_.t = s.t + dt;
  for (std::size_t i = 0; i < cells; ++i) {
    stage_.rho[i] = s.rho[i] + dt * k_.drho[i];
    stage_.m[i] = s.m[i] + dt * k_.dm[i];
    stage_.n[i] = s.n[i] + dt * k_.dn[i];
    stage_.M[i] = s.M[i] + dt * k_.dM[i];
  }
  rhs(stage_, k_);
  stage_.t = s.t + 0.5 * dt;
  const double quarter = 0.25 * dt;
  for (std::size_t i = 0; i < cells; ++i) {
    acc_.drho[i] += k_.drho[i];
    acc_.dm[i] += k_.dm[i];
    acc_.dn[i] += k_.dn[i];
    acc_.dM[i] += k_.dM[i];
    stage_.rho[i] = s.rho[i] + quarter * acc_.drho[i];
    stage_.m[i] = s.m[i] + quarter * acc_.dm[i];
    stage_.n[i] = s.n[i] + quarter * acc_.dn[i];
    stage_.M[i] = s.M[i] + quarter * acc_.dM[i];
  }
  rhs(stage_, k_);
  const double sixth = dt / 6.0;
  for (std::size_t i = 0; i < cells; ++i) {
    s.rho[i] += sixth * (acc_.drho[i] + 4.0 * k_.drho[i]);
    s.m[i] += sixth * (acc_.dm[i] + 4.0 * k_.dm[i]);
    s.n[i] += sixth * (acc_.dn[i] + 4.0 * k_.dn[i]);
    s.M[i] += sixth * (acc_.dM[i] + 4.0 * k_.dM[i]);
  }
  s.t += dt;
  check_positive(s, "step");
}

RunResult Solver::run(const FlowState& init) {
  init.check(grid_);
  Differentiator diff(grid_);
  RunResult result;
  result.final_state = init;
  FlowState& s = result.final_state;
  result.series.push_back(compute_norms(s, params_, diff));

  const double t_end = config_.t_end;
  long since_output = 0;
  while (true) {
    double dt = config_.fixed_dt ? *config_.fixed_dt : cfl_dt(s);
    const double remaining = t_end - s.t;
    if (remaining <= 1e-9 * dt) break;
    if (dt > remaining) dt = remaining;
    step(s, dt);
    ++result.steps;
    if (++since_output == config_.output_every) {
      result.series.push_back(compute_norms(s, params_, diff));
      since_output = 0;
    }
  }
  if (since_output != 0) result.series.push_back(compute_norms(s, params_, diff));
  return result;
}

Tendency rhs(const FlowState& s, const ModelParams& p, const Grid1D& g, const SchemeConfig& c) {
  Solver solver(p, g, c);
  Tendency out;
  solver.rhs(s, out);
  return out;
}

double cfl_dt(const FlowState& s, const ModelParams& p, const Grid1D& g, const SchemeConfig& c) {
  return Solver(p, g, c).cfl_dt(s);
}

FlowState step(const FlowState& s, double dt, const ModelParams& p, const Grid1D& g,
               const SchemeConfig& c) {
  Solver solver(p, g, c);
  FlowState out = s;
  solver.step(out, dt);
  return out;
}

RunResult run(const FlowState& init, const ModelParams& p, const Grid1D& g, const SchemeConfig& c) {
  return Solver(p, g, c).run(init);
}

}  // namespace twophase
