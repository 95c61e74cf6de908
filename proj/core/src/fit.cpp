#include "kramers/fit.hpp"

#include "kramers/error.hpp"

#include <cmath>

namespace kramers {

ProportionalFit fit_through_origin(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.empty()) throw InvalidArgument("fit_through_origin: need matching non-empty samples");
  double xy = 0.0, xx = 0.0, yy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    xy += x[i] * y[i];
    xx += x[i] * x[i];
    yy += y[i] * y[i];
  }
  if (xx == 0.0) throw InvalidArgument("fit_through_origin: all abscissae are zero");
  ProportionalFit fit;
  fit.coefficient = xy / xx;
  double rr = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - fit.coefficient * x[i];
    rr += r * r;
  }
  fit.relative_residual = yy > 0.0 ? std::sqrt(rr / yy) : 0.0;
  return fit;
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 2) throw InvalidArgument("fit_line: need at least two matching samples");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw InvalidArgument("fit_line: abscissae are all equal");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - fit.intercept - fit.slope * x[i];
    rss += r * r;
  }
  fit.rms_residual = std::sqrt(rss / n);
  fit.slope_stderr = n > 2 ? std::sqrt(rss / (n - 2) / sxx) : 0.0;
  return fit;
}

}  // namespace kramers
