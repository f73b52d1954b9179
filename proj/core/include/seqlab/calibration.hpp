#pragma once

#include <functional>

namespace seqlab {

struct MetricValue {
  double estimate;
  double std_error = 0.0;
};

struct CalibrationOptions {
  double tolerance = 1e-3;
  int max_iter = 100;
  // Stop early once the metric lies within this many standard errors of the
  // target (0 disables the early stop).
  double se_band = 1.0;
};

struct CalibrationResult {
  double threshold;
  MetricValue metric;
  int iterations;
};

// Bisection on a scalar threshold for a metric that is monotone in it. The
// metric callback should reuse the same random numbers on every call.
// Throws ConfigError if lo >= hi or the target is not bracketed.
CalibrationResult calibrate_scalar(const std::function<MetricValue(double)>& metric,
                                   double target, double lo, double hi,
                                   const CalibrationOptions& options = {});

}  // namespace seqlab
