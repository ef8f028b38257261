#include "twophase/decayfit.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace twophase {

FitResult fit_exponent(const std::vector<Sample>& series, double t0, double t1,
                       double predicted, double tolerance, std::string name) {
  if (!(t0 < t1)) throw std::invalid_argument("fit_exponent: window needs t0 < t1");
  FitResult fit;
  fit.name = std::move(name);
  fit.predicted = predicted;
  fit.tolerance = tolerance;

  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& s : series) {
    if (s.t < t0 || s.t > t1) continue;
    if (!(s.value > 0.0)) {
      std::ostringstream os;
      os << "non-positive value at t=" << s.t << "; window truncated";
      fit.warning = os.str();
      break;
    }
    xs.push_back(std::log1p(s.t));
    ys.push_back(std::log(s.value));
  }
  if (xs.size() < 8) {
    std::ostringstream os;
    os << "fit_exponent" << (fit.name.empty() ? "" : " (" + fit.name + ")") << ": only "
       << xs.size() << " samples in window [" << t0 << ", " << t1 << "], need 8";
    throw std::invalid_argument(os.str());
  }

  const double n = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("fit_exponent: degenerate time samples");
  fit.alpha = sxy / sxx;
  const double intercept = my - fit.alpha * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = ys[i] - (intercept + fit.alpha * xs[i]);
    sse += e * e;
  }
  fit.stderr_alpha = std::sqrt(sse / (n - 2.0) / sxx);
  fit.r2 = syy > 0.0 ? std::clamp(1.0 - sse / syy, 0.0, 1.0) : 1.0;
  fit.t0 = std::expm1(xs.front());
  fit.t1 = std::expm1(xs.back());
  fit.samples = xs.size();
  fit.pass = std::abs(fit.alpha - predicted) <= tolerance;
  return fit;
}

std::vector<double> local_slope(const std::vector<Sample>& series) {
  if (series.size() < 3) throw std::invalid_argument("local_slope: need at least 3 samples");
  std::vector<double> x(series.size());
  std::vector<double> y(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (!(series[i].value > 0.0))
      throw std::invalid_argument("local_slope: values must be positive");
    x[i] = std::log1p(series[i].t);
    y[i] = std::log(series[i].value);
  }
  const std::size_t n = series.size();
  std::vector<double> out(n);
  out[0] = (y[1] - y[0]) / (x[1] - x[0]);
  out[n - 1] = (y[n - 1] - y[n - 2]) / (x[n - 1] - x[n - 2]);
  for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (y[i + 1] - y[i - 1]) / (x[i + 1] - x[i - 1]);
  return out;
}

void write_fit_report(std::ostream& os, const FitResult& fit) {
  const auto old = os.precision(10);
  os << "name=" << fit.name << '\n'
     << "window=" << fit.t0 << ',' << fit.t1 << '\n'
     << "samples=" << fit.samples << '\n'
     << "alpha=" << fit.alpha << '\n'
     << "stderr=" << fit.stderr_alpha << '\n'
     << "r2=" << fit.r2 << '\n'
     << "predicted=" << fit.predicted << '\n'
     << "tolerance=" << fit.tolerance << '\n'
     << "verdict=" << (fit.pass ? "pass" : "fail") << '\n';
  if (!fit.warning.empty()) os << "warning=" << fit.warning << '\n';
  os << '\n';
  os.precision(old);
}

}  // namespace twophase
