#pragma once

#include <span>

namespace kramers {

// y ≈ C·x by least squares through the origin.
struct ProportionalFit {
  double coefficient = 0.0;
  // ‖y − C x‖₂ / ‖y‖₂
  double relative_residual = 0.0;
};

ProportionalFit fit_through_origin(std::span<const double> x, std::span<const double> y);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double rms_residual = 0.0;
};

LinearFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace kramers
