#include "ring_integrals.hpp"

#include "kramers/error.hpp"
#include "kramers/parallel.hpp"
#include "kramers/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace kramers::detail {
namespace {

constexpr double kBoundaryRatio = 1e-14;
constexpr double kWidenStep = 0.5;
constexpr int kMaxWiden = 40;

double eval(const StateIntegrand& f, int n, double u, double v) {
  if (n == 1) return f(&u, u);
  const double x[2] = {u + v, u - v};
  return f(x, u);
}

std::vector<double> resolve_breaks(const std::vector<double>& breaks, double half_width) {
  std::vector<double> out;
  for (double b : breaks) {
    const double r = std::isinf(b) ? std::copysign(half_width, b) : b;
    if (!out.empty() && !(r > out.back())) continue;
    out.push_back(r);
  }
  if (out.size() < 2) throw InvalidArgument("integrate_ring: mean range is empty");
  return out;
}

bool boundary_certified(const StateIntegrand& f, int n, double width,
                        const std::vector<std::vector<double>>& hints) {
  double peak = 0.0;
  for (const auto& p : hints) {
    if (n == 1) {
      peak = std::max(peak, std::abs(f(p.data(), p[0])));
    } else {
      peak = std::max(peak, std::abs(f(p.data(), 0.5 * (p[0] + p[1]))));
    }
  }
  constexpr int kCells = 40;
  for (int i = 0; i <= kCells; ++i) {
    const double u = -width + 2.0 * width * i / kCells;
    if (n == 1) {
      peak = std::max(peak, std::abs(eval(f, n, u, 0.0)));
      continue;
    }
    for (int j = 0; j <= kCells; ++j) {
      const double v = -width + 2.0 * width * j / kCells;
      peak = std::max(peak, std::abs(eval(f, n, u, v)));
    }
  }
  if (!(peak > 0.0)) return true;

  double edge = 0.0;
  if (n == 1) {
    edge = std::max(std::abs(eval(f, n, -width, 0.0)), std::abs(eval(f, n, width, 0.0)));
  } else {
    constexpr int kEdge = 200;
    for (int i = 0; i <= kEdge; ++i) {
      const double t = -width + 2.0 * width * i / kEdge;
      edge = std::max({edge, std::abs(eval(f, n, t, width)), std::abs(eval(f, n, t, -width)),
                       std::abs(eval(f, n, width, t)), std::abs(eval(f, n, -width, t))});
    }
  }
  return edge < kBoundaryRatio * peak;
}

double integrate_box(const StateIntegrand& f, int n, const std::vector<double>& ubreaks,
                     double width, double tol, double* error) {
  if (n == 1) {
    const auto r = quadrature::integrate([&](double u) { return eval(f, 1, u, 0.0); }, ubreaks, tol);
    *error = r.error_estimate;
    return r.value;
  }
  const std::vector<double> vbreaks = {-width, 0.0, width};
  const auto r = quadrature::integrate_2d([&](double u, double v) { return eval(f, 2, u, v); }, ubreaks,
                                          vbreaks, tol);
  *error = 2.0 * r.error_estimate;
  return 2.0 * r.value;
}

}  // namespace

double energy_at(const RingParameters& params, const double* x) {
  const int n = params.n();
  double local = 0.0;
  double bonds = 0.0;
  for (int k = 0; k < n; ++k) {
    const double x2 = x[k] * x[k];
    local += 0.25 * x2 * x2 - 0.5 * x2;
    const double d = x[k] - x[(k + 1) % n];
    bonds += d * d;
  }
  double coupling = 0.0;
  if (n >= 2) {
    const double s = std::sin(std::numbers::pi / n);
    coupling = params.mu() / (4.0 * s * s);
  }
  return local + 0.5 * coupling * bonds + 0.25 * n;
}

double default_half_width(const RingParameters& params) {
  // max sigma of (K+2)^{-1} is 1/2, attained on the constant mode
  return 2.0 + std::sqrt(40.0 * params.h() * 0.5);
}

RingQuadratureResult integrate_ring(const StateIntegrand& f, RingQuadratureSpec spec,
                                    const std::vector<std::vector<double>>& peak_hints) {
  if (spec.n != 1 && spec.n != 2) throw InvalidArgument("integrate_ring: quadrature supports N in {1,2}");
  double width = spec.half_width;
  for (double b : spec.mean_breaks) {
    if (std::isfinite(b)) width = std::max(width, std::abs(b) + kWidenStep);
  }
  int widen = 0;
  while (!boundary_certified(f, spec.n, width, peak_hints)) {
    if (++widen > kMaxWiden) throw NumericalFailure("integrate_ring: truncation certificate failed");
    width += kWidenStep;
  }

  const auto ubreaks = resolve_breaks(spec.mean_breaks, width);
  RingQuadratureResult result;
  result.half_width = width;
  result.value = integrate_box(f, spec.n, ubreaks, width, spec.rel_tol, &result.error_estimate);
  double coarse_error = 0.0;
  const double coarse = integrate_box(f, spec.n, ubreaks, width, spec.rel_tol * 100.0, &coarse_error);
  result.refinement_change = result.value != 0.0 ? std::abs(coarse - result.value) / std::abs(result.value)
                                                 : std::abs(coarse);
  if (!std::isfinite(result.value)) throw NumericalFailure("integrate_ring: non-finite value");
  return result;
}

double log_add_exp(double a, double b) {
  const double m = std::max(a, b);
  if (m == -std::numeric_limits<double>::infinity()) return m;
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

RatioEstimate batch_ratio(const BatchDraw& draw, std::size_t samples, std::size_t batches,
                          std::uint64_t seed, std::uint64_t stream_base) {
  if (batches < 2) throw InvalidArgument("batch_ratio: need at least two batches");
  if (samples < batches) throw InvalidArgument("batch_ratio: fewer samples than batches");
  std::vector<double> sum_a(batches), sum_b(batches);
  std::vector<std::size_t> count(batches);
  parallel_for(batches, [&](std::size_t k) {
    RandomStream rng(seed, stream_base + k);
    const std::size_t m = samples / batches + (k < samples % batches ? 1 : 0);
    double a = 0.0, b = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const BatchSample s = draw(rng);
      a += s.a;
      b += s.b;
    }
    sum_a[k] = a;
    sum_b[k] = b;
    count[k] = m;
  });

  double total_a = 0.0, total_b = 0.0;
  std::size_t total = 0;
  for (std::size_t k = 0; k < batches; ++k) {
    total_a += sum_a[k];
    total_b += sum_b[k];
    total += count[k];
  }
  RatioEstimate est;
  est.mean_a = total_a / total;
  est.mean_b = total_b / total;
  if (est.mean_b == 0.0) throw NumericalFailure("batch_ratio: vanishing denominator");
  est.value = est.mean_a / est.mean_b;
  // batch means of the linearized residual a − R b (delta method)
  double ss = 0.0, ssa = 0.0, ssb = 0.0;
  for (std::size_t k = 0; k < batches; ++k) {
    const double r = (sum_a[k] - est.value * sum_b[k]) / count[k];
    const double da = sum_a[k] / count[k] - est.mean_a;
    const double db = sum_b[k] / count[k] - est.mean_b;
    ss += r * r;
    ssa += da * da;
    ssb += db * db;
  }
  const double scale = 1.0 / ((batches - 1.0) * batches);
  est.stderr_ = std::sqrt(ss * scale) / std::abs(est.mean_b);
  est.stderr_a = std::sqrt(ssa * scale);
  est.stderr_b = std::sqrt(ssb * scale);
  if (!std::isfinite(est.value)) throw NumericalFailure("batch_ratio: non-finite estimate");
  return est;
}

}  // namespace kramers::detail
