#include "kramers/convexifier.hpp"

#include "kramers/error.hpp"
#include "kramers/parallel.hpp"
#include "kramers/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace kramers {
namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kLayer = kSqrt2 - 1.0;  // width of the transition layer
constexpr double kFloorTolerance = 1e-3;

double three_a_squared_plus_one() {
  const double a = 2.0 - kSqrt2;
  return 3.0 * a * a + 1.0;
}

}  // namespace

CutoffFunction::CutoffFunction(int n) : n_(n) {
  if (n < kMinimalCutoffOrder) {
    throw InvalidArgument("build_cutoff: n must be at least " + std::to_string(kMinimalCutoffOrder));
  }
  const double b = (n + 0.5) / (n + 1.0);
  const double w = (1.0 - b) / 2.0;
  height_ = 2.0 / b;
  const double m = height_;
  const double apex = 2.0 * m * b / w;
  const double nodes[6] = {0.0, w, b, b + w, b + w + w / 2.0, 1.0};
  const double values[6] = {0.0, -m, -m, 0.0, apex, 0.0};
  double d1 = 0.0, d0 = 1.0;
  for (int i = 0; i < 5; ++i) {
    const double len = nodes[i + 1] - nodes[i];
    const double slope = (values[i + 1] - values[i]) / len;
    pieces_[i] = {nodes[i], values[i], slope, d1, d0};
    // advance S' and S across the piece exactly
    const double nd1 = d1 + values[i] * len + slope * len * len / 2.0;
    const double nd0 = d0 + d1 * len + values[i] * len * len / 2.0 + slope * len * len * len / 6.0;
    d1 = nd1;
    d0 = nd0;
  }
}

void CutoffFunction::profile(double t, double& s, double& ds, double& dds) const {
  int i = 4;
  while (i > 0 && t < pieces_[i].t0) --i;
  const Piece& p = pieces_[i];
  const double tau = t - p.t0;
  dds = p.s0 + p.slope * tau;
  ds = p.d1 + p.s0 * tau + p.slope * tau * tau / 2.0;
  s = p.d0 + p.d1 * tau + p.s0 * tau * tau / 2.0 + p.slope * tau * tau * tau / 6.0;
}

double CutoffFunction::value(double r) const {
  const double a = std::abs(r);
  if (a <= 1.0) return 1.0;
  if (a >= kSqrt2) return 0.0;
  double s, ds, dds;
  profile((a - 1.0) / kLayer, s, ds, dds);
  return std::clamp(s, 0.0, 1.0);
}

double CutoffFunction::first(double r) const {
  const double a = std::abs(r);
  if (a <= 1.0 || a >= kSqrt2) return 0.0;
  double s, ds, dds;
  profile((a - 1.0) / kLayer, s, ds, dds);
  return r < 0.0 ? -ds / kLayer : ds / kLayer;
}

double CutoffFunction::second(double r) const {
  const double a = std::abs(r);
  if (a <= 1.0 || a >= kSqrt2) return 0.0;
  double s, ds, dds;
  profile((a - 1.0) / kLayer, s, ds, dds);
  return dds / (kLayer * kLayer);
}

double CutoffFunction::min_second() const { return -height_ / (kLayer * kLayer); }

double CutoffFunction::required_floor() const { return -cutoff_curvature_constant() * (1.0 + 1.0 / n_); }

CutoffFunction build_cutoff(int n) { return CutoffFunction(n); }

double cutoff_curvature_constant() { return 2.0 / (kLayer * kLayer); }

double alpha_threshold() { return 1.0 / three_a_squared_plus_one(); }

double ConvexificationParams::c_alpha_beta() const { return std::sqrt((1.0 - alpha) / (1.0 + beta)); }

void ConvexificationParams::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("convexifier: alpha must lie in (0,1)");
  if (!(beta > 0.0)) throw InvalidArgument("convexifier: beta must be positive");
  if (n < kMinimalCutoffOrder) throw InvalidArgument("convexifier: cutoff order n must be at least 1");
}

double perturbation_W(const ConvexificationParams& cp, const CutoffFunction& theta, const RingParameters& params,
                      const Vector& x) {
  require_dimension(params, x, "perturbation_W");
  const double c = cp.c_alpha_beta();
  double w = 0.0;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const double x2 = x[k] * x[k];
    w += theta.value(c * x[k]) * (-(1.0 - cp.alpha) / 4.0 * x2 * x2 + (1.0 + cp.beta) / 2.0 * x2);
  }
  return w - 0.25 * params.n();
}

std::array<double, 2> perturbation_bounds(const ConvexificationParams& cp, int n) {
  const double upper = 0.25 * n * ((1.0 + cp.beta) * (1.0 + cp.beta) / (1.0 - cp.alpha) - 1.0);
  return {-0.25 * n, upper};
}

double coordinate_curvature(const ConvexificationParams& cp, const CutoffFunction& theta, double x) {
  const double c = cp.c_alpha_beta();
  const double one_m_alpha = 1.0 - cp.alpha;
  const double one_p_beta = 1.0 + cp.beta;
  const double x2 = x * x;
  const double poly = -one_m_alpha / 4.0 * x2 * x2 + one_p_beta / 2.0 * x2;
  const double dpoly = -one_m_alpha * x2 * x + one_p_beta * x;
  const double ddpoly = -3.0 * one_m_alpha * x2 + one_p_beta;
  const double r = c * x;
  return c * c * theta.second(r) * poly + 2.0 * c * theta.first(r) * dpoly + theta.value(r) * ddpoly + 3.0 * x2 -
         1.0;
}

Matrix hessian_V_plus_W(const ConvexificationParams& cp, const CutoffFunction& theta,
                        const RingParameters& params, const Vector& x) {
  require_dimension(params, x, "hessian_V_plus_W");
  Matrix hess = k_matrix(params);
  for (Eigen::Index k = 0; k < x.size(); ++k) hess(k, k) += coordinate_curvature(cp, theta, x[k]);
  return hess;
}

int minimal_order(double alpha) {
  const double s = three_a_squared_plus_one();
  const double margin = alpha * s - 1.0;
  if (!(margin > 0.0)) throw PreconditionViolation("convexifier: alpha must exceed 1/(3(2-sqrt2)^2+1)");
  // α(s + 1/n) − 1 − 1/n > 0  ⇔  n > (1 − α)/(α s − 1)
  const int n = static_cast<int>(std::floor((1.0 - alpha) / margin)) + 1;
  return std::max(n, kMinimalCutoffOrder);
}

FloorCertificate hessian_floor(const ConvexificationParams& cp, double mu, const FloorSweep& sweep) {
  cp.validate();
  const CutoffFunction theta(cp.n);
  const double c = cp.c_alpha_beta();
  // past |c x| = √2 the curvature is 3x² − 1 and only grows
  const double reach = 1.25 * kSqrt2 / c;

  FloorCertificate cert;
  cert.one_d_min = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= sweep.grid_points; ++i) {
    const double x = -reach + 2.0 * reach * i / sweep.grid_points;
    const double d = coordinate_curvature(cp, theta, x);
    if (d < cert.one_d_min) {
      cert.one_d_min = d;
      cert.one_d_argmin = x;
    }
  }

  std::vector<double> minima(sweep.sizes.size(), std::numeric_limits<double>::infinity());
  std::vector<Vector> witnesses(sweep.sizes.size());
  parallel_for(sweep.sizes.size(), [&](std::size_t s) {
    const int n = sweep.sizes[s];
    const RingParameters params(n, mu, 1.0);
    const Matrix k = k_matrix(params);
    RandomStream rng(sweep.seed, static_cast<std::uint64_t>(n));
    Eigen::SelfAdjointEigenSolver<Matrix> solver;
    for (int j = 0; j < sweep.samples_per_size; ++j) {
      Vector x(n);
      // alternate between the full range and the cutoff layer, where the curvature dips
      for (int i = 0; i < n; ++i) {
        const double u = 2.0 * rng.uniform() - 1.0;
        x[i] = (j % 2 == 0) ? reach * u : std::copysign((1.0 + kLayer * std::abs(u)) / c, u);
      }
      Matrix hess = k;
      for (int i = 0; i < n; ++i) hess(i, i) += coordinate_curvature(cp, theta, x[i]);
      solver.compute(hess, Eigen::EigenvaluesOnly);
      const double lo = solver.eigenvalues()[0];
      if (lo < minima[s]) {
        minima[s] = lo;
        witnesses[s] = x;
      }
    }
  });

  cert.sampled_min = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < minima.size(); ++s) {
    if (minima[s] < cert.sampled_min) {
      cert.sampled_min = minima[s];
      cert.witness = witnesses[s];
    }
  }
  cert.floor = std::min(cert.one_d_min, cert.sampled_min);
  cert.positive = cert.floor > 0.0;
  cert.certified = cert.floor >= cp.beta * (1.0 - kFloorTolerance);
  if (cert.witness.size() == 0 || cert.one_d_min < cert.sampled_min) {
    cert.witness = Vector::Constant(1, cert.one_d_argmin);
  }
  return cert;
}

LogSobolevBound logsob_lower_bound(double delta, double h, double mu) {
  if (!(delta > 0.0)) throw InvalidArgument("logsob_lower_bound: delta must be positive");
  if (!(h > 0.0)) throw InvalidArgument("logsob_lower_bound: h must be positive");
  const double target = (1.0 + delta) / 4.0 + (3.0 + 2.0 * kSqrt2) / 24.0;
  // need α > α₀ and (1+β)² ≤ 4 target (1−α) with β > 0, i.e. α < 1 − 1/(4 target)
  const double lo = alpha_threshold();
  const double hi = 1.0 - 1.0 / (4.0 * target);
  if (!(hi > lo)) throw PreconditionViolation("logsob_lower_bound: no admissible (alpha, beta) for this delta");

  LogSobolevBound out;
  out.chosen.alpha = 0.5 * (lo + hi);
  out.chosen.beta = 0.5 * (std::sqrt(4.0 * target * (1.0 - out.chosen.alpha)) - 1.0);
  out.chosen.n = minimal_order(out.chosen.alpha);
  out.target_rate = target;
  const double one_p_beta = 1.0 + out.chosen.beta;
  out.oscillation_rate = one_p_beta * one_p_beta / (4.0 * (1.0 - out.chosen.alpha));

  FloorSweep sweep;
  sweep.sizes = {1, 2, 4, 8};
  sweep.samples_per_size = 200;
  const auto cert = hessian_floor(out.chosen, mu, sweep);
  if (!cert.positive) throw PreconditionViolation("logsob_lower_bound: Hessian floor certification failed");
  out.hessian_floor = cert.floor;
  out.bound = cert.floor * std::exp(-out.oscillation_rate / h);
  out.target_bound = cert.floor * std::exp(-target / h);
  return out;
}

}  // namespace kramers
