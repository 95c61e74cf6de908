#include "kramers/quasimode.hpp"

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
constexpr double kPi = std::numbers::pi;

std::vector<std::vector<double>> hints(int n) {
  return {std::vector<double>(n, 1.0), std::vector<double>(n, -1.0), std::vector<double>(n, 0.0)};
}

double cube_sum(const double* x, int n) {
  double s = 0.0;
  for (int k = 0; k < n; ++k) s += x[k] * x[k] * x[k];
  return s;
}

// (V − N/4 + ⟨x,Px⟩) / hN, the saddle exponent with the barrier removed
double saddle_exponent(const RingParameters& params, const double* x, double xbar) {
  const int n = params.n();
  return (detail::energy_at(params, x) - 0.25 * n + n * xbar * xbar) / params.hn();
}

QuasimodeIntegrals by_quadrature(const RingParameters& params, const IntegrationOptions& options) {
  const int n = params.n();
  const double h = params.h();
  const double root = std::sqrt(2.0 * h);
  detail::RingQuadratureSpec spec;
  spec.n = n;
  spec.half_width = detail::default_half_width(params);
  spec.mean_breaks = {-kInf, -1.0, 0.0, 1.0, kInf};
  spec.rel_tol = options.rel_tol;

  const auto norm = detail::integrate_ring(
      [&](const double* x, double xbar) {
        const double c = std::erf(xbar / root);
        return c * c * std::exp(-detail::energy_at(params, x) / params.hn());
      },
      spec, hints(n));
  const auto dir = detail::integrate_ring(
      [&](const double* x, double xbar) { return std::exp(-saddle_exponent(params, x, xbar)); }, spec,
      hints(n));
  const auto lh = detail::integrate_ring(
      [&](const double* x, double xbar) {
        const double s = cube_sum(x, n);
        return s * s * std::exp(-saddle_exponent(params, x, xbar));
      },
      spec, hints(n));

  QuasimodeIntegrals out;
  out.method = IntegrationMethod::quadrature;
  out.normalization_sq = norm.value;
  out.dirichlet_numerator_scaled = (2.0 / kPi) * dir.value;
  out.lh_chi_sq_scaled = 2.0 / (kPi * h * n * n) * lh.value;
  out.refinement_change = std::max({norm.refinement_change, dir.refinement_change, lh.refinement_change});
  return out;
}

QuasimodeIntegrals by_sampling(const RingParameters& params, const IntegrationOptions& options) {
  const int n = params.n();
  const double h = params.h();
  const double hn = params.hn();
  const double root = std::sqrt(2.0 * h);

  // normalization against the two-well Gaussian mass 2 (2 pi hN)^{N/2} det(K+2)^{-1/2}
  const auto wells = build_operator(params, 0.0, 2.0);
  const auto quad_form = [&](const Vector& y) {
    return 0.5 * (y.dot(apply_K(params, y)) + 2.0 * y.squaredNorm()) / hn;
  };
  const auto norm = detail::batch_ratio(
      [&](RandomStream& rng) {
        const double sign = rng.uniform() < 0.5 ? 1.0 : -1.0;
        const Vector x = draw_gaussian(wells, params, rng).array() + sign;
        const double log_w = -energy(params, x) / hn -
                             detail::log_add_exp(-quad_form(x.array() - 1.0), -quad_form(x.array() + 1.0));
        const double c = std::erf(mean(x) / root);
        return detail::BatchSample{c * c * std::exp(log_w), 1.0};
      },
      options.samples, options.batches, options.seed, 2000);

  // saddle integrals: V + ⟨x,Px⟩ − N/4 = ¼‖x‖₄⁴ + ½⟨x,(2P+K−1)x⟩
  const auto saddle = build_operator(params, 2.0, -1.0);
  const auto sad = detail::batch_ratio(
      [&](RandomStream& rng) {
        const Vector x = draw_gaussian(saddle, params, rng);
        const double g = std::exp(-x.array().pow(4).sum() / (4.0 * hn));
        const double s = x.array().cube().sum();
        return detail::BatchSample{s * s * g, g};
      },
      options.samples, options.batches, options.seed, 3000);

  const double log_mass_saddle = 0.5 * n * std::log(2.0 * kPi * hn) - 0.5 * log_det_hessian_saddle(params);
  const double log_mass_wells = 0.5 * n * std::log(2.0 * kPi * hn) - 0.5 * log_det_hessian_minimum(params);

  QuasimodeIntegrals out;
  out.method = IntegrationMethod::importance_mc;
  out.normalization_sq = 2.0 * std::exp(log_mass_wells) * norm.mean_a;
  out.dirichlet_numerator_scaled = (2.0 / kPi) * std::exp(log_mass_saddle) * sad.mean_b;
  out.lh_chi_sq_scaled = 2.0 / (kPi * h * n * n) * std::exp(log_mass_saddle) * sad.mean_a;

  const double rel_norm = norm.stderr_a / norm.mean_a;
  const double rel_sad_b = sad.stderr_b / sad.mean_b;
  const double rel_sad_a = sad.stderr_a / sad.mean_a;
  const double ratio = sad.mean_b / norm.mean_a;
  out.dirichlet_ratio_stderr = ratio * std::hypot(rel_norm, rel_sad_b);
  out.e_functional_stderr = sad.stderr_ / (h * n * n);
  const double e_scaling = sad.mean_a / (kPi * h * h * h * n * n * norm.mean_a);
  out.e_scaling_stderr = e_scaling * std::hypot(rel_norm, rel_sad_a);
  return out;
}

}  // namespace

double chi(const RingParameters& params, const Vector& x) {
  require_dimension(params, x, "chi");
  return std::erf(mean(x) / std::sqrt(2.0 * params.h()));
}

Vector grad_chi(const RingParameters& params, const Vector& x) {
  require_dimension(params, x, "grad_chi");
  const double h = params.h();
  const double xbar = mean(x);
  const double slope = 2.0 / std::sqrt(2.0 * kPi * h) * std::exp(-xbar * xbar / (2.0 * h)) / params.n();
  return Vector::Constant(params.n(), slope);
}

double grad_chi_norm_sq(const RingParameters& params, const Vector& x) {
  require_dimension(params, x, "grad_chi_norm_sq");
  const double xbar = mean(x);
  return 2.0 / (kPi * params.hn()) * std::exp(-xbar * xbar / params.h());
}

double apply_Lh_chi(const RingParameters& params, const Vector& x) {
  require_dimension(params, x, "apply_Lh_chi");
  const int n = params.n();
  const double h = params.h();
  const double xbar = mean(x);
  // ⟨x,Px⟩ = N x̄²
  const double gauss = std::exp(-n * xbar * xbar / (2.0 * params.hn()));
  return 2.0 / (std::sqrt(2.0 * kPi * h) * n) * gauss * x.array().cube().sum();
}

QuasimodeEvaluation evaluate_quasimode(const RingParameters& params, const Vector& x) {
  QuasimodeEvaluation e;
  e.chi = chi(params, x);
  e.grad_chi_norm_sq = grad_chi_norm_sq(params, x);
  e.lh_chi = apply_Lh_chi(params, x);
  return e;
}

QuasimodeIntegrals quasimode_integrals(const RingParameters& params, IntegrationMethod method,
                                       const IntegrationOptions& options) {
  const int n = params.n();
  if (method == IntegrationMethod::quadrature && n > 2) {
    throw InvalidArgument("quasimode: quadrature requires N <= 2");
  }
  if (method == IntegrationMethod::importance_mc && n > 12) {
    throw InvalidArgument("quasimode: importance sampling requires N <= 12");
  }
  QuasimodeIntegrals out =
      method == IntegrationMethod::quadrature ? by_quadrature(params, options) : by_sampling(params, options);

  const double h = params.h();
  const double barrier = std::exp(-0.25 / h);
  const double p_n = prefactor(params).p_n;
  out.dirichlet_form = barrier * out.dirichlet_numerator_scaled / out.normalization_sq;
  out.e_functional = out.lh_chi_sq_scaled / out.dirichlet_numerator_scaled;
  out.prediction = p_n * barrier;
  out.dirichlet_ratio = out.dirichlet_numerator_scaled / out.normalization_sq / p_n;
  // |det Hess V(I−) / det Hess V(O)|^{1/2} = pi p(N)
  out.e_scaling = out.lh_chi_sq_scaled / out.normalization_sq / (h * h * kPi * p_n);
  if (!std::isfinite(out.dirichlet_form) || !std::isfinite(out.e_functional)) {
    throw NumericalFailure("quasimode: non-finite integrals");
  }
  return out;
}

double dirichlet_form_psi(const RingParameters& params, IntegrationMethod method,
                          const IntegrationOptions& options) {
  return quasimode_integrals(params, method, options).dirichlet_form;
}

double e_functional(const RingParameters& params, IntegrationMethod method, const IntegrationOptions& options) {
  return quasimode_integrals(params, method, options).e_functional;
}

double quasimode_mean(const RingParameters& params, const IntegrationOptions& options) {
  if (params.n() > 2) throw InvalidArgument("quasimode_mean: quadrature requires N <= 2");
  const double root = std::sqrt(2.0 * params.h());
  detail::RingQuadratureSpec spec;
  spec.n = params.n();
  spec.half_width = detail::default_half_width(params);
  spec.mean_breaks = {-kInf, -1.0, 0.0, 1.0, kInf};
  spec.rel_tol = options.rel_tol;
  const auto weight = [&](const double* x) { return std::exp(-detail::energy_at(params, x) / params.hn()); };
  const auto first = detail::integrate_ring(
      [&](const double* x, double xbar) { return std::erf(xbar / root) * weight(x); }, spec, hints(params.n()));
  const auto second = detail::integrate_ring(
      [&](const double* x, double xbar) {
        const double c = std::erf(xbar / root);
        return c * c * weight(x);
      },
      spec, hints(params.n()));
  return first.value / second.value;
}

SandwichResult sandwich_bound(double upper, double e_functional, double delta) {
  if (!(delta > 0.0)) throw InvalidArgument("sandwich: delta must be positive");
  if (!(upper >= 0.0) || !(e_functional >= 0.0)) throw InvalidArgument("sandwich: negative input");
  SandwichResult r;
  r.upper = upper;
  r.e_functional = e_functional;
  r.delta = delta;
  r.valid = upper < 0.5 * delta;
  r.epsilon_used = std::min(1.0, 2.0 / delta * upper + 2.0 / std::sqrt(delta) * std::sqrt(e_functional));
  r.lower = upper * (1.0 - r.epsilon_used);
  return r;
}

SandwichResult sandwich_lower_bound(const RingParameters& params, double delta, IntegrationMethod method,
                                    const IntegrationOptions& options) {
  const auto q = quasimode_integrals(params, method, options);
  return sandwich_bound(q.dirichlet_form, q.e_functional, delta);
}

}  // namespace kramers
