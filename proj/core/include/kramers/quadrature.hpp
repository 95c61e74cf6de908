#pragma once

#include <functional>
#include <span>

namespace kramers::quadrature {

struct Result {
  double value = 0.0;
  double error_estimate = 0.0;
};

using Integrand1D = std::function<double(double)>;
using Integrand2D = std::function<double(double, double)>;

// Adaptive 15-point Gauss–Kronrod over consecutive breakpoints
// b_0 < b_1 < ... < b_m; the integral is the sum over the pieces.
Result integrate(const Integrand1D& f, std::span<const double> breakpoints, double rel_tol);

// Iterated adaptive rule on a tensor box: the outer variable runs over
// outer_breaks, the inner one over inner_breaks.
Result integrate_2d(const Integrand2D& f, std::span<const double> outer_breaks,
                    std::span<const double> inner_breaks, double rel_tol);

}  // namespace kramers::quadrature
