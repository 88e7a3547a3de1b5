#pragma once

#include <span>
#include <vector>

namespace slowfast {

/// Least-squares line through (log x, log y).
struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  /// Signed residuals log y_i - (intercept + slope log x_i), one per input point.
  std::vector<double> residuals;
  double rms_residual = 0.0;
};

/// Requires at least two points with distinct positive x and positive y;
/// throws SlopeUndefined otherwise.
LogLogFit fit_loglog(std::span<const double> x, std::span<const double> y);

}  // namespace slowfast
