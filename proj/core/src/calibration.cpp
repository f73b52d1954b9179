#include "seqlab/calibration.hpp"

#include <cmath>
#include <string>

#include "seqlab/errors.hpp"

namespace seqlab {

CalibrationResult calibrate_scalar(const std::function<MetricValue(double)>& metric,
                                   double target, double lo, double hi,
                                   const CalibrationOptions& options) {
  if (!(lo < hi)) throw ConfigError("calibration bracket is reversed or empty");
  if (!(options.tolerance > 0.0)) throw ConfigError("calibration tolerance must be positive");
  MetricValue mlo = metric(lo);
  MetricValue mhi = metric(hi);
  const double dlo = mlo.estimate - target;
  const double dhi = mhi.estimate - target;
  if (!std::isfinite(dlo) || !std::isfinite(dhi)) throw NumericError("calibration metric is not finite");
  if (dlo == 0.0) return {lo, mlo, 0};
  if (dhi == 0.0) return {hi, mhi, 0};
  if ((dlo < 0.0) == (dhi < 0.0)) {
    throw ConfigError("calibration bracket does not contain the target: metric(" +
                      std::to_string(lo) + ")=" + std::to_string(mlo.estimate) + ", metric(" +
                      std::to_string(hi) + ")=" + std::to_string(mhi.estimate) +
                      ", target=" + std::to_string(target));
  }
  const bool increasing = dlo < 0.0;
  int it = 0;
  double mid = 0.5 * (lo + hi);
  MetricValue mm = metric(mid);
  for (; it < options.max_iter; ++it) {
    const double d = mm.estimate - target;
    if (d == 0.0) break;
    if (options.se_band > 0.0 && mm.std_error > 0.0 &&
        std::abs(d) <= options.se_band * mm.std_error) {
      break;
    }
    if ((d < 0.0) == increasing) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= options.tolerance) {
      mid = 0.5 * (lo + hi);
      mm = metric(mid);
      ++it;
      break;
    }
    mid = 0.5 * (lo + hi);
    mm = metric(mid);
  }
  return {mid, mm, it};
}

}  // namespace seqlab
