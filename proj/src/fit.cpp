#include "slowfast/fit.hpp"

#include <cmath>

#include "slowfast/errors.hpp"

namespace slowfast {

LogLogFit fit_loglog(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw SlopeUndefined("x and y lengths differ");
  if (x.size() < 2) throw SlopeUndefined("slope needs at least two points");
  const std::size_t n = x.size();
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0) || !std::isfinite(x[i]) || !std::isfinite(y[i]))
      throw SlopeUndefined("log-log fit needs positive finite data");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= double(n);
  my /= double(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx <= 0.0) throw SlopeUndefined("log-log fit needs distinct abscissae");
  LogLogFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.residuals.resize(n);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    fit.residuals[i] = ly[i] - (fit.intercept + fit.slope * lx[i]);
    ss += fit.residuals[i] * fit.residuals[i];
  }
  fit.rms_residual = std::sqrt(ss / double(n));
  return fit;
}

}  // namespace slowfast
