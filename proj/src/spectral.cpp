#include "twophase/spectral.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>

namespace twophase::spectral {

namespace {

constexpr cd kI{0.0, 1.0};

cd horner(const std::array<double, 5>& c, cd z) {
  cd acc = c[0];
  for (std::size_t i = 1; i < c.size(); ++i) acc = acc * z + c[i];
  return acc;
}

cd horner_derivative(const std::array<double, 5>& c, cd z) {
  cd acc = 4.0 * c[0];
  for (std::size_t i = 1; i < 4; ++i) acc = acc * z + static_cast<double>(4 - i) * c[i];
  return acc;
}

// Principal complex cube root.
cd cbrt_c(cd z) {
  if (z == cd(0.0)) return 0.0;
  return std::polar(std::cbrt(std::abs(z)), std::arg(z) / 3.0);
}

// Roots of z^3 + a z^2 + b z + c (Cardano, complex arithmetic).
std::array<cd, 3> cubic_roots(cd a, cd b, cd c) {
  const cd p = b - a * a / 3.0;
  const cd q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
  const cd disc = std::sqrt(q * q / 4.0 + p * p * p / 27.0);
  cd w = -q / 2.0 + disc;
  const cd w_alt = -q / 2.0 - disc;
  if (std::abs(w_alt) > std::abs(w)) w = w_alt;
  const cd shift = -a / 3.0;
  if (std::abs(w) == 0.0) return {shift, shift, shift};
  const cd u = cbrt_c(w);
  const cd omega{-0.5, std::sqrt(3.0) / 2.0};
  std::array<cd, 3> out;
  cd uk = u;
  for (int k = 0; k < 3; ++k) {
    out[k] = uk - p / (3.0 * uk) + shift;
    uk *= omega;
  }
  return out;
}

std::array<cd, 2> quadratic_roots(cd b, cd c) {
  const cd disc = std::sqrt(b * b - 4.0 * c);
  cd q = -0.5 * (b + (std::real(std::conj(b) * disc) >= 0.0 ? disc : -disc));
  if (q == cd(0.0)) return {0.0, 0.0};
  return {q, c / q};
}

// Ferrari's method for y^4 + b y^3 + c y^2 + d y + e in complex arithmetic.
std::array<cd, 4> ferrari(double b, double c, double d, double e) {
  const double p = c - 3.0 * b * b / 8.0;
  const double q = d - b * c / 2.0 + b * b * b / 8.0;
  const double r = e - b * d / 4.0 + b * b * c / 16.0 - 3.0 * b * b * b * b / 256.0;
  const double shift = -b / 4.0;
  std::array<cd, 4> y;
  const double scale = std::abs(p) + std::sqrt(std::abs(r)) + std::cbrt(std::abs(q)) + 1e-300;
  if (std::abs(q) <= 1e-15 * scale * scale * scale) {
    const auto z = quadratic_roots(p, r);
    y = {std::sqrt(z[0]), -std::sqrt(z[0]), std::sqrt(z[1]), -std::sqrt(z[1])};
  } else {
    const auto ms = cubic_roots(p, p * p / 4.0 - r, -q * q / 8.0);
    cd m = ms[0];
    for (const auto& cand : ms)
      if (std::abs(cand) > std::abs(m)) m = cand;
    const cd s = std::sqrt(2.0 * m);
    const auto y1 = quadratic_roots(-s, p / 2.0 + m + q / (2.0 * s));
    const auto y2 = quadratic_roots(s, p / 2.0 + m - q / (2.0 * s));
    y = {y1[0], y1[1], y2[0], y2[1]};
  }
  for (auto& v : y) v += shift;
  return y;
}

cd newton_polish(const std::array<double, 5>& c, cd z) {
  double res = std::abs(horner(c, z));
  for (int it = 0; it < 60 && res > 0.0; ++it) {
    const cd dp = horner_derivative(c, z);
    if (dp == cd(0.0)) break;
    const cd next = z - horner(c, z) / dp;
    const double next_res = std::abs(horner(c, next));
    if (!(next_res < res)) break;
    z = next;
    res = next_res;
  }
  return z;
}

void aberth(const std::array<double, 5>& c, std::array<cd, 4>& z) {
  // Perturb coincident seeds so the correction terms are finite.
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (z[i] == z[j]) z[i] += cd(1e-6 * (1.0 + std::abs(z[i])), 1e-6 * static_cast<double>(i));
  for (int it = 0; it < 200; ++it) {
    double change = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
      const cd dp = horner_derivative(c, z[i]);
      if (dp == cd(0.0)) continue;
      const cd ratio = horner(c, z[i]) / dp;
      cd sum = 0.0;
      for (std::size_t j = 0; j < 4; ++j)
        if (j != i) sum += 1.0 / (z[i] - z[j]);
      const cd delta = ratio / (1.0 - ratio * sum);
      z[i] -= delta;
      change = std::max(change, std::abs(delta) / (1.0 + std::abs(z[i])));
    }
    if (change < 1e-17) break;
  }
}

double frobenius(const Matrix4c& m) { return m.norm(); }

bool is_real(cd z) { return std::abs(z.imag()) <= 1e-12 * (1.0 + std::abs(z.real())); }

}  // namespace

DegenerateSpectrum::DegenerateSpectrum(int a, int b, double gap)
    : std::runtime_error([&] {
        std::ostringstream os;
        os << "degenerate spectrum: branches " << a << " and " << b << " are " << gap
           << " apart (< " << kDegeneracyGap << ")";
        return os.str();
      }()),
      first_(a),
      second_(b) {}

SymbolMatrix assemble_A(double xi, const ModelParams& params) {
  SymbolMatrix out;
  out.xi = xi;
  const cd mix = -kI * xi;
  const double c2 = params.pressure_slope_star();
  Matrix4c& A = out.entries;
  A.setZero();
  A(0, 1) = mix;
  A(1, 0) = mix * c2;
  A(1, 1) = -params.n_star;
  A(1, 3) = params.rho_star;
  A(2, 3) = mix;
  A(3, 1) = params.n_star;
  A(3, 2) = mix;
  A(3, 3) = -params.rho_star - xi * xi;
  return out;
}

std::array<double, 5> char_poly(double xi, const ModelParams& params) {
  const double c2 = params.pressure_slope_star();
  const double x2 = xi * xi;
  const double x4 = x2 * x2;
  return {1.0, params.n_star + params.rho_star + x2, x2 * (c2 + params.n_star + 1.0),
          x2 * (c2 * params.rho_star + params.n_star) + c2 * x4, c2 * x4};
}

double poly_residual(const std::array<double, 5>& c, cd z) {
  double scale = 0.0;
  double zp = 1.0;
  const double az = std::abs(z);
  for (int i = 4; i >= 0; --i) {
    scale += std::abs(c[i]) * zp;
    zp *= az;
  }
  if (scale == 0.0) return 0.0;
  return std::abs(horner(c, z)) / scale;
}

std::array<cd, 4> quartic_roots(const std::array<double, 5>& coeffs) {
  if (coeffs[0] != 1.0) throw std::invalid_argument("quartic_roots: polynomial must be monic");
  // Deflate exact zero roots.
  int zeros = 0;
  while (zeros < 4 && coeffs[4 - zeros] == 0.0) ++zeros;
  std::array<cd, 4> roots{};
  const int degree = 4 - zeros;
  const auto& c = coeffs;
  switch (degree) {
    case 0: break;
    case 1: roots[0] = -c[1]; break;
    case 2: {
      const auto q = quadratic_roots(c[1], c[2]);
      roots[0] = q[0];
      roots[1] = q[1];
      break;
    }
    case 3: {
      const auto q = cubic_roots(c[1], c[2], c[3]);
      std::copy(q.begin(), q.end(), roots.begin());
      break;
    }
    default: roots = ferrari(c[1], c[2], c[3], c[4]);
  }
  if (degree == 0) return roots;

  auto eval_reduced = [&](cd z) {
    cd acc = c[0];
    for (int i = 1; i <= degree; ++i) acc = acc * z + c[i];
    return acc;
  };
  auto eval_reduced_d = [&](cd z) {
    cd acc = static_cast<double>(degree) * c[0];
    for (int i = 1; i < degree; ++i) acc = acc * z + static_cast<double>(degree - i) * c[i];
    return acc;
  };
  auto residual = [&](cd z) {
    double scale = 0.0;
    double zp = 1.0;
    for (int i = degree; i >= 0; --i) {
      scale += std::abs(c[i]) * zp;
      zp *= std::abs(z);
    }
    return scale == 0.0 ? 0.0 : std::abs(eval_reduced(z)) / scale;
  };

  if (degree == 4) {
    for (int i = 0; i < 4; ++i) roots[i] = newton_polish(coeffs, roots[i]);
    double worst = 0.0;
    for (const auto& r : roots) worst = std::max(worst, residual(r));
    bool collapsed = false;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < i; ++j)
        if (std::abs(roots[i] - roots[j]) == 0.0) collapsed = true;
    if (worst > 1e-12 || collapsed) {
      auto seeds = ferrari(c[1], c[2], c[3], c[4]);
      aberth(coeffs, seeds);
      double worst_seeds = 0.0;
      for (const auto& r : seeds) worst_seeds = std::max(worst_seeds, residual(r));
      if (worst_seeds < worst || collapsed) roots = seeds;
    }
  } else {
    for (int i = 0; i < degree; ++i) {
      cd z = roots[i];
      double res = std::abs(eval_reduced(z));
      for (int it = 0; it < 60 && res > 0.0; ++it) {
        const cd dp = eval_reduced_d(z);
        if (dp == cd(0.0)) break;
        const cd next = z - eval_reduced(z) / dp;
        const double nr = std::abs(eval_reduced(next));
        if (!(nr < res)) break;
        z = next;
        res = nr;
      }
      roots[i] = z;
    }
  }
  // Exact zeros occupy the tail.
  for (int i = degree; i < 4; ++i) roots[i] = 0.0;
  return roots;
}

std::array<Matrix4c, 4> projections(const SymbolMatrix& A, const std::array<cd, 4>& lambda) {
  for (int j = 0; j < 4; ++j)
    for (int k = 0; k < j; ++k) {
      const double gap = std::abs(lambda[j] - lambda[k]);
      if (gap < kDegeneracyGap) throw DegenerateSpectrum(k + 1, j + 1, gap);
    }
  // The symbol has the sparsity pattern of assemble_A; for nonzero lambda the
  // right and left eigenvectors follow row by row, which avoids the
  // cancellation of the Lagrange product when eigenvalues cluster near 0.
  const Matrix4c& a = A.entries;
  const bool structured = a(1, 3) != 0.0 && a(3, 1) != 0.0 &&
                          std::all_of(lambda.begin(), lambda.end(),
                                      [](cd l) { return std::abs(l) > kDegeneracyGap; });
  std::array<Matrix4c, 4> P;
  if (structured) {
    for (int j = 0; j < 4; ++j) {
      const cd l = lambda[j];
      const cd core = a(0, 1) * a(1, 0) + (a(1, 1) - l) * l;
      Vector4c r, w;
      r << a(0, 1), l, 0.0, -core / a(1, 3);
      r(2) = a(2, 3) * r(3) / l;
      w << a(1, 0), l, 0.0, -core / a(3, 1);
      w(2) = a(3, 2) * w(3) / l;
      P[j] = r * w.transpose() / w.cwiseProduct(r).sum();
    }
    return P;
  }
  const Matrix4c I = Matrix4c::Identity();
  for (int j = 0; j < 4; ++j) {
    Matrix4c acc = I;
    for (int k = 0; k < 4; ++k) {
      if (k == j) continue;
      acc = (acc * (A.entries - lambda[k] * I)).eval() / (lambda[j] - lambda[k]);
    }
    P[j] = acc;
  }
  return P;
}

namespace {

// Unlabelled roots at |xi|.
std::array<cd, 4> roots_at(double xi, const ModelParams& params) {
  return quartic_roots(char_poly(xi, params));
}

std::array<cd, 4> anchor_labels(const std::array<cd, 4>& roots, const ModelParams& params) {
  const double relaxed = -(params.rho_star + params.n_star);
  std::array<int, 4> idx{0, 1, 2, 3};
  std::array<cd, 4> out{};
  auto it4 = std::min_element(idx.begin(), idx.end(), [&](int a, int b) {
    return std::abs(roots[a] - relaxed) < std::abs(roots[b] - relaxed);
  });
  const int i4 = *it4;
  std::vector<int> rest;
  for (int i : idx)
    if (i != i4) rest.push_back(i);
  // The acoustic pair carries the two largest |Im|.
  std::sort(rest.begin(), rest.end(),
            [&](int a, int b) { return std::abs(roots[a].imag()) > std::abs(roots[b].imag()); });
  int i2 = rest[0];
  int i3 = rest[1];
  if (roots[i2].imag() < roots[i3].imag()) std::swap(i2, i3);
  out[0] = roots[rest[2]];
  out[1] = roots[i2];
  out[2] = roots[i3];
  out[3] = roots[i4];
  return out;
}

std::array<cd, 4> match_to(const std::array<cd, 4>& previous, const std::array<cd, 4>& roots) {
  std::array<int, 4> perm{0, 1, 2, 3};
  std::array<int, 4> best = perm;
  double best_cost = std::numeric_limits<double>::infinity();
  do {
    double cost = 0.0;
    for (int j = 0; j < 4; ++j) cost += std::abs(previous[j] - roots[perm[j]]);
    if (cost < best_cost) {
      best_cost = cost;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  std::array<cd, 4> out;
  for (int j = 0; j < 4; ++j) out[j] = roots[best[j]];
  return out;
}

void fill_projections(SpectralDecomposition& d, const ModelParams& params) {
  try {
    d.P = projections(assemble_A(d.xi, params), d.lambda);
    d.degenerate = false;
  } catch (const DegenerateSpectrum& e) {
    d.degenerate = true;
    d.colliding_first = e.first();
    d.colliding_second = e.second();
    for (auto& p : d.P) p.setConstant(cd(std::numeric_limits<double>::quiet_NaN(), 0.0));
  }
}

}  // namespace

double real_branch_crossover(const ModelParams& params) {
  auto gap = [&](double log_xi) {
    const auto r = roots_at(std::exp(log_xi), params);
    std::vector<double> reals;
    for (const auto& z : r)
      if (is_real(z)) reals.push_back(z.real());
    if (reals.size() != 2) return std::numeric_limits<double>::quiet_NaN();
    return std::abs(reals[0] - reals[1]);
  };
  double lo = std::log(1e-3);
  double hi = std::log(1e3);
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - phi * (hi - lo);
  double x2 = lo + phi * (hi - lo);
  double f1 = gap(x1);
  double f2 = gap(x2);
  if (std::isnan(f1) || std::isnan(f2)) return 0.0;
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - phi * (hi - lo);
      f1 = gap(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + phi * (hi - lo);
      f2 = gap(x2);
    }
    if (std::isnan(f1) || std::isnan(f2)) return 0.0;
  }
  const double xc = std::exp(0.5 * (lo + hi));
  // A minimum pinned at the search boundary is not an avoided crossing.
  if (xc < 2e-3 || xc > 5e2) return 0.0;
  return xc;
}

std::vector<SpectralDecomposition> eigen_branches(std::span<const double> xi_grid,
                                                  const ModelParams& params) {
  for (std::size_t i = 1; i < xi_grid.size(); ++i)
    if (!(xi_grid[i] >= xi_grid[i - 1]))
      throw std::invalid_argument("eigen_branches: grid must be ascending");

  std::vector<double> mags;
  for (double x : xi_grid)
    if (std::abs(x) > 0.0) mags.push_back(std::abs(x));
  std::sort(mags.begin(), mags.end());
  mags.erase(std::unique(mags.begin(), mags.end()), mags.end());

  const double crossover = real_branch_crossover(params);

  // Track along |xi| from a small anchor.
  std::vector<std::array<cd, 4>> tracked(mags.size());
  if (!mags.empty()) {
    constexpr double kAnchor = 1e-4;
    constexpr double kLeadRatio = 1.1;
    double x = std::min(kAnchor, mags.front());
    std::array<cd, 4> current = anchor_labels(roots_at(x, params), params);
    for (std::size_t i = 0; i < mags.size(); ++i) {
      while (x * kLeadRatio < mags[i]) {
        x *= kLeadRatio;
        current = match_to(current, roots_at(x, params));
      }
      x = mags[i];
      current = match_to(current, roots_at(x, params));
      tracked[i] = current;
    }
    for (std::size_t i = 0; i < mags.size(); ++i)
      if (crossover > 0.0 && mags[i] > crossover) std::swap(tracked[i][0], tracked[i][3]);
  }

  std::vector<SpectralDecomposition> out;
  out.reserve(xi_grid.size());
  for (double x : xi_grid) {
    SpectralDecomposition d;
    d.xi = x;
    if (x == 0.0) {
      const double relaxed = -(params.rho_star + params.n_star);
      d.lambda = {0.0, 0.0, 0.0, relaxed};
    } else {
      const auto pos = std::lower_bound(mags.begin(), mags.end(), std::abs(x)) - mags.begin();
      d.lambda = tracked[pos];
      if (x < 0.0)
        for (auto& l : d.lambda) l = std::conj(l);
    }
    fill_projections(d, params);
    out.push_back(std::move(d));
  }
  return out;
}

SpectralDecomposition decompose(double xi, const ModelParams& params) {
  const double grid[1] = {xi};
  return eigen_branches(grid, params).front();
}

Matrix4c matrix_exp(double xi, double t, const ModelParams& params) {
  if (t < 0.0) throw std::invalid_argument("matrix_exp: t must be non-negative");
  const auto A = assemble_A(xi, params);
  const auto roots = roots_at(std::abs(xi), params);
  std::array<cd, 4> lambda = roots;
  if (xi < 0.0)
    for (auto& l : lambda) l = std::conj(l);
  try {
    const auto P = projections(A, lambda);
    Matrix4c out = Matrix4c::Zero();
    for (int j = 0; j < 4; ++j) out += std::exp(t * lambda[j]) * P[j];
    return out;
  } catch (const DegenerateSpectrum&) {
    return (t * A.entries).exp();
  }
}

Matrix4c p0_matrix() {
  Matrix4c P0 = Matrix4c::Zero();
  P0(0, 0) = 1.0;
  P0(1, 1) = 0.5;
  P0(1, 3) = 0.5;
  P0(2, 2) = 1.0;
  P0(3, 1) = 0.5;
  P0(3, 3) = 0.5;
  return P0;
}

DecayRegions decay_regions(std::span<const double> scan, const ModelParams& params,
                           const DecayRegionOptions& options) {
  if (scan.empty()) throw std::invalid_argument("decay_regions: empty scan");
  for (std::size_t i = 0; i < scan.size(); ++i) {
    if (!(scan[i] > 0.0)) throw std::invalid_argument("decay_regions: scan must be positive");
    if (i > 0 && !(scan[i] > scan[i - 1]))
      throw std::invalid_argument("decay_regions: scan must be strictly ascending");
  }
  if (scan.back() < 10.0) throw std::invalid_argument("decay_regions: scan must reach xi >= 10");

  const std::size_t count = scan.size();
  const auto rows = eigen_branches(scan, params);
  std::vector<double> top(count);  // max_j Re lambda_j
  std::vector<double> pnorm(count, 0.0);
  DecayRegions out;
  out.scan.assign(scan.begin(), scan.end());
  out.max_real_part = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < count; ++i) {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& l : rows[i].lambda) m = std::max(m, l.real());
    top[i] = m;
    out.max_real_part = std::max(out.max_real_part, m);
    if (!rows[i].degenerate)
      for (const auto& P : rows[i].P) pnorm[i] = std::max(pnorm[i], frobenius(P));
  }
  if (!(out.max_real_part < 0.0)) {
    std::ostringstream os;
    os << "decay_regions: analysis failure, max Re lambda = " << out.max_real_part
       << " is not negative on the scan";
    throw std::runtime_error(os.str());
  }

  // Low-frequency region.
  const double beta_small = -top[0] / (scan[0] * scan[0]);
  std::size_t i1 = 0;
  double running = beta_small;
  for (std::size_t i = 0; i < count; ++i) {
    const double ratio = -top[i] / (scan[i] * scan[i]);
    const double next = std::min(running, ratio);
    if (next < options.low_fraction * beta_small) break;
    running = next;
    i1 = i;
  }
  out.r1 = scan[i1];
  out.beta1 = running;

  // High-frequency region, scanning back from the tail.
  const double beta_tail = -top[count - 1];
  std::size_t i2 = count - 1;
  double tail_min = beta_tail;
  for (std::size_t i = count; i-- > i1;) {
    const double next = std::min(tail_min, -top[i]);
    if (next < options.high_fraction * beta_tail) break;
    tail_min = next;
    i2 = i;
  }
  out.r2 = scan[i2];
  out.beta2 = tail_min;
  if (!(out.beta1 > 0.0) || !(out.beta2 > 0.0))
    throw std::runtime_error("decay_regions: analysis failure, no positive decay constant");

  for (std::size_t i = 0; i < count; ++i) {
    if (i <= i1)
      out.projector_bound_low = std::max(out.projector_bound_low, pnorm[i]);
    else if (i >= i2)
      out.projector_bound_high = std::max(out.projector_bound_high, pnorm[i]);
    else
      out.projector_max_band = std::max(out.projector_max_band, pnorm[i]);
  }
  if (i2 <= i1) out.projector_bound_high = std::max(out.projector_bound_high, pnorm[i2]);
  return out;
}

ScalarProfile gaussian_profile(double width) {
  if (!(width > 0.0)) throw std::invalid_argument("gaussian_profile: width must be positive");
  ScalarProfile g;
  const double amp = width * std::sqrt(std::numbers::pi);
  g.hat = [width, amp](double xi) { return cd(amp * std::exp(-0.25 * width * width * xi * xi)); };
  // exp(-w^2 xi^2 / 2) < 1e-30 beyond the cutoff.
  g.cutoff = std::sqrt(2.0 * 69.1) / width;
  return g;
}

VectorProfile lift_profile(const ScalarProfile& g, bool difference_form) {
  VectorProfile h;
  h.cutoff = g.cutoff;
  auto hat = g.hat;
  if (difference_form) {
    h.hat = [hat](double xi) {
      const cd v = hat(xi);
      Vector4c out;
      out << 0.0, v, 0.0, -v;
      return out;
    };
  } else {
    h.hat = [hat](double xi) {
      Vector4c out;
      out << hat(xi), 0.0, 0.0, 0.0;
      return out;
    };
  }
  return h;
}

LinearEvolution::LinearEvolution(VectorProfile profile, int k, double t_max,
                                 const ModelParams& params)
    : profile_(std::move(profile)), k_(k), t_max_(std::max(t_max, 1.0)), params_(params) {
  if (k < 0) throw std::invalid_argument("linear evolution: k must be non-negative");
  if (!(profile_.cutoff > 0.0)) throw std::invalid_argument("linear evolution: bad cutoff");
  build(1.0);
}

void LinearEvolution::build(double refine) {
  refine_ = refine;
  nodes_.clear();
  const double cutoff = profile_.cutoff;
  const double h_min = std::numbers::pi / (8.0 * t_max_) / refine;
  const double h_max = std::min(0.05, cutoff / 200.0) / refine;
  const double kappa = 0.007 / refine;

  // Simpson panels on [0, cutoff]; mirrored to the negative half-line.
  std::vector<double> xs{0.0};
  std::vector<double> simpson{0.0};
  std::vector<double> trapezoid{0.0};
  double a = 0.0;
  while (a < cutoff) {
    double h = std::clamp(kappa * a * a, h_min, h_max);
    if (a + 2.0 * h > cutoff) h = 0.5 * (cutoff - a);
    simpson.back() += h / 3.0;
    trapezoid.back() += h;
    xs.push_back(a + h);
    simpson.push_back(4.0 * h / 3.0);
    trapezoid.push_back(2.0 * h);
    xs.push_back(a + 2.0 * h);
    simpson.push_back(h / 3.0);
    trapezoid.push_back(h);
    a += 2.0 * h;
  }
  // Both half-lines share the node at zero.
  nodes_.reserve(2 * xs.size() - 1);
  for (std::size_t s = 0; s < 2; ++s) {
    for (std::size_t i = (s == 0 ? 0 : 1); i < xs.size(); ++i) {
      Node node;
      node.xi = s == 0 ? xs[i] : -xs[i];
      node.simpson_weight = simpson[i] * (i == 0 ? 2.0 : 1.0);
      node.trapezoid_weight = 0.5 * trapezoid[i] * (i == 0 ? 2.0 : 1.0);
      const SymbolMatrix A = assemble_A(node.xi, params_);
      const cd ik_pow = std::pow(cd(0.0, node.xi), k_);
      node.data = profile_.hat(node.xi) * (k_ == 0 ? cd(1.0) : ik_pow);
      auto roots = roots_at(std::abs(node.xi), params_);
      if (node.xi < 0.0)
        for (auto& l : roots) l = std::conj(l);
      try {
        const auto P = projections(A, roots);
        node.dense = false;
        node.lambda = roots;
        for (int j = 0; j < 4; ++j) node.mode[j] = P[j] * node.data;
      } catch (const DegenerateSpectrum&) {
        node.dense = true;
        node.A = A.entries;
      }
      nodes_.push_back(std::move(node));
    }
  }
}

std::pair<double, double> LinearEvolution::integrate(double t) const {
  double simpson = 0.0;
  double trapezoid = 0.0;
  for (const auto& node : nodes_) {
    Vector4c v;
    if (node.dense) {
      v = (t * node.A).exp() * node.data;
    } else {
      v.setZero();
      for (int j = 0; j < 4; ++j) v += std::exp(t * node.lambda[j]) * node.mode[j];
    }
    const double f = v.squaredNorm();
    simpson += node.simpson_weight * f;
    trapezoid += node.trapezoid_weight * f;
  }
  // Halves were accumulated with weights for [0, cutoff] each, the shared
  // zero node carries both.
  const double norm = 1.0 / (2.0 * std::numbers::pi);
  return {simpson * norm, trapezoid * norm};
}

double LinearEvolution::norm(double t) {
  if (t < 0.0) throw std::invalid_argument("linear evolution: t must be non-negative");
  if (t > t_max_) {
    t_max_ = t;
    build(refine_);
  }
  for (int attempt = 0; attempt < 4; ++attempt) {
    const auto [s, tr] = integrate(t);
    last_error_ = s > 0.0 ? std::abs(s - tr) / s : 0.0;
    if (last_error_ <= 0.01) return std::sqrt(std::max(s, 0.0));
    if (attempt < 3) build(refine_ * 2.0);
  }
  std::ostringstream os;
  os << "linear evolution: quadrature error estimate " << last_error_ << " exceeds 1% at t=" << t;
  throw std::runtime_error(os.str());
}

double linear_evolve_norm(const ScalarProfile& g, int k, double t, bool difference_form,
                          const ModelParams& params) {
  LinearEvolution evo(lift_profile(g, difference_form), k, t, params);
  return evo.norm(t);
}

void write_dispersion_table(std::ostream& os, const std::vector<SpectralDecomposition>& rows) {
  os << "xi,re1,re2,re3,re4,im1,im2,im3,im4,pnorm1,pnorm2,pnorm3,pnorm4\n";
  const auto old = os.precision(17);
  for (const auto& r : rows) {
    os << r.xi;
    for (const auto& l : r.lambda) os << ',' << l.real();
    for (const auto& l : r.lambda) os << ',' << l.imag();
    for (const auto& P : r.P) {
      os << ',';
      if (r.degenerate)
        os << "nan";
      else
        os << frobenius(P);
    }
    os << '\n';
  }
  os.precision(old);
}

std::vector<double> log_spaced(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0) || !(hi >= lo) || count == 0)
    throw std::invalid_argument("log_spaced: need 0 < lo <= hi and count > 0");
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (std::size_t i = 0; i < count; ++i)
    out[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

}  // namespace twophase::spectral
