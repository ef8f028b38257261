#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace twophase {

struct Sample {
  double t = 0.0;
  double value = 0.0;
};

struct FitResult {
  std::string name;
  double alpha = 0.0;   // slope of log(value) against log(1+t)
  double stderr_alpha = 0.0;
  double t0 = 0.0;      // window actually used
  double t1 = 0.0;
  double r2 = 0.0;
  std::size_t samples = 0;
  double predicted = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string warning;
};

/// Ordinary least squares of log(value) on log(1+t) over samples with
/// t in [t0, t1]. Non-positive values truncate the window at the first such
/// sample (recorded in FitResult::warning); fewer than 8 usable samples
/// throws std::invalid_argument. Verdict: |alpha - predicted| <= tolerance.
FitResult fit_exponent(const std::vector<Sample>& series, double t0, double t1,
                       double predicted, double tolerance, std::string name = {});

/// d log(value) / d log(1+t): centred differences inside, one-sided at the ends.
std::vector<double> local_slope(const std::vector<Sample>& series);

/// key=value block: name, window, alpha, stderr, r2, predicted, tolerance, verdict.
void write_fit_report(std::ostream& os, const FitResult& fit);

}  // namespace twophase
