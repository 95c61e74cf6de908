#include "kramers/laplace_partition.hpp"

#include "kramers/error.hpp"
#include "kramers/gaussian_lab.hpp"
#include "ring_integrals.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace kramers {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_method(const RingParameters& params, IntegrationMethod method, std::string_view what) {
  const int n = params.n();
  if (method == IntegrationMethod::quadrature && n > 2) {
    throw InvalidArgument(std::string(what) + ": quadrature requires N <= 2");
  }
  if (method == IntegrationMethod::importance_mc && n > 12) {
    throw InvalidArgument(std::string(what) + ": importance sampling requires N <= 12");
  }
}

std::vector<std::vector<double>> well_hints(int n) {
  return {std::vector<double>(n, 1.0), std::vector<double>(n, -1.0), std::vector<double>(n, 0.0)};
}

// ½⟨y,(K+2)y⟩ / hN
double well_quadratic(const RingParameters& params, const Vector& y) {
  return 0.5 * (y.dot(apply_K(params, y)) + 2.0 * y.squaredNorm()) / params.hn();
}

PartitionEstimate from_ratio(double ratio, double log_asym, IntegrationMethod method) {
  PartitionEstimate est;
  est.method = method;
  est.log_z_asymptotic = log_asym;
  est.z_asymptotic = std::exp(log_asym);
  est.epsilon = ratio - 1.0;
  est.z_numeric = est.z_asymptotic * ratio;
  return est;
}

}  // namespace

std::string_view to_string(IntegrationMethod method) {
  return method == IntegrationMethod::quadrature ? "quadrature" : "importance_mc";
}

IntegrationMethod parse_integration_method(std::string_view text) {
  if (text == "quadrature") return IntegrationMethod::quadrature;
  if (text == "importance_mc" || text == "mc") return IntegrationMethod::importance_mc;
  throw InvalidArgument("unknown integration method '" + std::string(text) + "'");
}

double quadratic_lower_margin(const RingParameters& params, const Vector& x) {
  require_dimension(params, x, "quadratic_lower_margin");
  const double xbar = mean(x);
  if (xbar < -1.0) throw InvalidArgument("quadratic_lower_margin: requires mean(x) >= -1");
  const int n = params.n();
  const Vector shifted = x.array() + 1.0;
  const double q = 1.5 * n * xbar * xbar + x.dot(apply_K(params, x)) - x.squaredNorm();
  return energy(params, shifted) - 0.5 * q;
}

double quadratic_lower_margin_abs(const RingParameters& params, const Vector& x) {
  require_dimension(params, x, "quadratic_lower_margin_abs");
  const double xbar = mean(x);
  if (std::abs(xbar) > 1.0) throw InvalidArgument("quadratic_lower_margin_abs: requires |mean(x)| <= 1");
  const int n = params.n();
  const Vector kx = apply_K(params, x);
  const double quartic = 0.25 * x.array().pow(4).sum();
  const double cubic = std::abs(x.array().cube().sum());
  const double lhs = quartic - cubic + 0.5 * (x.dot(kx) + 2.0 * x.squaredNorm());
  const double q = 1.5 * n * xbar * xbar + x.dot(kx) - x.squaredNorm();
  return lhs - 0.5 * q;
}

double log_gaussian_mass(const RingParameters& params) {
  return 0.5 * params.n() * std::log(2.0 * std::numbers::pi * params.hn()) -
         0.5 * log_det_hessian_minimum(params);
}

PartitionEstimate partition_function(const RingParameters& params, IntegrationMethod method,
                                     const IntegrationOptions& options) {
  check_method(params, method, "partition_function");
  const double log_asym = std::log(2.0) + log_gaussian_mass(params);
  const double hn = params.hn();

  if (method == IntegrationMethod::quadrature) {
    detail::RingQuadratureSpec spec;
    spec.n = params.n();
    spec.half_width = detail::default_half_width(params);
    spec.mean_breaks = {-kInf, -1.0, 0.0, 1.0, kInf};
    spec.rel_tol = options.rel_tol;
    const auto q = detail::integrate_ring(
        [&](const double* x, double) { return std::exp(-detail::energy_at(params, x) / hn); }, spec,
        well_hints(params.n()));
    auto est = from_ratio(q.value / std::exp(log_asym), log_asym, method);
    est.refinement_change = q.refinement_change;
    est.half_width = q.half_width;
    return est;
  }

  const auto op = build_operator(params, 0.0, 2.0);
  const auto r = detail::batch_ratio(
      [&](RandomStream& rng) {
        const double sign = rng.uniform() < 0.5 ? 1.0 : -1.0;
        const Vector y = draw_gaussian(op, params, rng);
        const Vector x = y.array() + sign;
        const double a_plus = well_quadratic(params, x.array() - 1.0);
        const double a_minus = well_quadratic(params, x.array() + 1.0);
        const double log_w = -energy(params, x) / hn - detail::log_add_exp(-a_plus, -a_minus);
        return detail::BatchSample{std::exp(log_w), 1.0};
      },
      options.samples, options.batches, options.seed, 0);
  auto est = from_ratio(r.value, log_asym, method);
  est.stderr_ = r.stderr_;
  return est;
}

PartitionEstimate local_laplace(const RingParameters& params, double r, CriticalKind around,
                                IntegrationMethod method, const IntegrationOptions& options) {
  check_method(params, method, "local_laplace");
  if (!(r > 0.0 && r <= 1.0)) throw InvalidArgument("local_laplace: r must lie in (0, 1]");
  if (around == CriticalKind::saddle) throw InvalidArgument("local_laplace: expansion point must be a minimum");
  const double center = around == CriticalKind::i_plus ? 1.0 : -1.0;
  const double log_asym = log_gaussian_mass(params);
  const double hn = params.hn();

  if (method == IntegrationMethod::quadrature) {
    detail::RingQuadratureSpec spec;
    spec.n = params.n();
    spec.half_width = detail::default_half_width(params);
    spec.mean_breaks = {center - r, center, center + r};
    spec.rel_tol = options.rel_tol;
    const auto q = detail::integrate_ring(
        [&](const double* x, double) { return std::exp(-detail::energy_at(params, x) / hn); }, spec,
        well_hints(params.n()));
    auto est = from_ratio(q.value / std::exp(log_asym), log_asym, method);
    est.refinement_change = q.refinement_change;
    est.half_width = q.half_width;
    return est;
  }

  const auto op = build_operator(params, 0.0, 2.0);
  const auto ratio = detail::batch_ratio(
      [&](RandomStream& rng) {
        const Vector y = draw_gaussian(op, params, rng);
        if (std::abs(mean(y)) > r) return detail::BatchSample{0.0, 1.0};
        const Vector x = y.array() + center;
        const double log_w = -energy(params, x) / hn + well_quadratic(params, y);
        return detail::BatchSample{std::exp(log_w), 1.0};
      },
      options.samples, options.batches, options.seed, 1000);
  auto est = from_ratio(ratio.value, log_asym, method);
  est.stderr_ = ratio.stderr_;
  return est;
}

double tail_integral(const RingParameters& params, double r, const IntegrationOptions& options) {
  if (!(r > 0.0)) throw InvalidArgument("tail_integral: r must be positive");
  if (params.n() > 2) throw InvalidArgument("tail_integral: quadrature requires N <= 2");
  const double hn = params.hn();
  const auto integrand = [&](const double* x, double) {
    return std::exp(-detail::energy_at(params, x) / hn);
  };
  detail::RingQuadratureSpec spec;
  spec.n = params.n();
  spec.half_width = std::max(detail::default_half_width(params), 2.0 + r);
  spec.rel_tol = options.rel_tol;

  double total = 0.0;
  if (1.0 - r > 0.0) {
    spec.mean_breaks = {0.0, 1.0 - r};
    total += detail::integrate_ring(integrand, spec, well_hints(params.n())).value;
  }
  spec.mean_breaks = {1.0 + r, kInf};
  total += detail::integrate_ring(integrand, spec, well_hints(params.n())).value;
  return total;
}

}  // namespace kramers
