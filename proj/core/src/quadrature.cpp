#include "kramers/quadrature.hpp"

#include "kramers/error.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>

namespace kramers::quadrature {
namespace {

constexpr unsigned kMaxDepth = 30;

void require_increasing(std::span<const double> breaks) {
  if (breaks.size() < 2) throw InvalidArgument("quadrature: need at least two breakpoints");
  for (std::size_t i = 1; i < breaks.size(); ++i) {
    if (!(breaks[i] > breaks[i - 1])) throw InvalidArgument("quadrature: breakpoints must increase");
  }
}

}  // namespace

Result integrate(const Integrand1D& f, std::span<const double> breakpoints, double rel_tol) {
  require_increasing(breakpoints);
  using Rule = boost::math::quadrature::gauss_kronrod<double, 15>;
  Result total;
  for (std::size_t i = 1; i < breakpoints.size(); ++i) {
    double error = 0.0;
    total.value += Rule::integrate(f, breakpoints[i - 1], breakpoints[i], kMaxDepth, rel_tol, &error);
    total.error_estimate += error;
  }
  if (!std::isfinite(total.value)) throw NumericalFailure("quadrature: non-finite integral");
  return total;
}

Result integrate_2d(const Integrand2D& f, std::span<const double> outer_breaks,
                    std::span<const double> inner_breaks, double rel_tol) {
  require_increasing(inner_breaks);
  // The inner integrals are resolved a decade tighter so that their error
  // does not masquerade as roughness of the outer integrand.
  const double inner_tol = rel_tol * 0.1;
  double inner_error = 0.0;
  auto slice = [&](double u) {
    const Result r = integrate([&](double v) { return f(u, v); }, inner_breaks, inner_tol);
    inner_error = std::max(inner_error, r.error_estimate);
    return r.value;
  };
  Result outer = integrate(slice, outer_breaks, rel_tol);
  outer.error_estimate += inner_error;
  return outer;
}

}  // namespace kramers::quadrature
