#include "kramers/ring_model.hpp"

#include "kramers/error.hpp"
#include "kramers/fourier.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace kramers {

RingParameters::RingParameters(int n, double mu, double h) : n_(n), mu_(mu), h_(h) {
  if (n < 1) throw InvalidArgument("RingParameters: N must be >= 1, got " + std::to_string(n));
  if (!(mu > 1.0)) throw InvalidArgument("RingParameters: mu must be > 1, got " + std::to_string(mu));
  if (!(h > 0.0) || !std::isfinite(h))
    throw InvalidArgument("RingParameters: h must be > 0, got " + std::to_string(h));
}

std::vector<double> k_spectrum(int n, double mu) {
  std::vector<double> nu(static_cast<std::size_t>(n), 0.0);
  if (n < 2) return nu;
  const double s1 = std::sin(std::numbers::pi / n);
  for (int k = 1; k < n; ++k) {
    // fold to min(k, N-k) so that nu_k == nu_{N-k} bit for bit
    const int kk = std::min(k, n - k);
    const double s = std::sin(kk * std::numbers::pi / n);
    nu[static_cast<std::size_t>(k)] = mu * (s * s) / (s1 * s1);
  }
  return nu;
}

std::string_view to_string(CriticalKind kind) {
  switch (kind) {
    case CriticalKind::i_plus: return "I_plus";
    case CriticalKind::i_minus: return "I_minus";
    case CriticalKind::saddle: return "O";
  }
  return "?";
}

void require_dimension(const RingParameters& params, const Vector& x, std::string_view what) {
  if (x.size() != params.n()) {
    throw InvalidArgument(std::string(what) + ": dimension mismatch (expected " +
                          std::to_string(params.n()) + ", got " + std::to_string(x.size()) + ")");
  }
}

double mean(const Vector& x) { return x.size() == 0 ? 0.0 : x.mean(); }

Vector project_mean(const Vector& x) { return Vector::Constant(x.size(), mean(x)); }

Vector project_perp(const Vector& x) { return x.array() - mean(x); }

Vector apply_K(const RingParameters& params, const Vector& x) {
  require_dimension(params, x, "apply_K");
  const int n = params.n();
  Vector out = Vector::Zero(n);
  if (n == 1) return out;
  const double s = std::sin(std::numbers::pi / n);
  const double c = params.mu() / (4.0 * s * s);
  for (int k = 0; k < n; ++k) {
    const double next = x[(k + 1) % n];
    const double prev = x[(k + n - 1) % n];
    out[k] = c * (2.0 * x[k] - next - prev);
  }
  return out;
}

Vector apply_K_fourier(const RingParameters& params, const Vector& x) {
  require_dimension(params, x, "apply_K_fourier");
  const int n = params.n();
  const auto nu = k_spectrum(n, params.mu());
  auto x_hat = fourier::forward_real(std::span<const double>(x.data(), static_cast<std::size_t>(n)));
  for (int k = 0; k < n; ++k) x_hat[static_cast<std::size_t>(k)] *= nu[static_cast<std::size_t>(k)];
  const auto back = fourier::inverse(x_hat);
  Vector out(n);
  for (int k = 0; k < n; ++k) out[k] = back[static_cast<std::size_t>(k)].real();
  return out;
}

Matrix k_matrix(const RingParameters& params) {
  const int n = params.n();
  Matrix k = Matrix::Zero(n, n);
  if (n == 1) return k;
  const double s = std::sin(std::numbers::pi / n);
  const double c = params.mu() / (4.0 * s * s);
  for (int i = 0; i < n; ++i) {
    k(i, i) += 2.0 * c;
    k(i, (i + 1) % n) -= c;
    k(i, (i + n - 1) % n) -= c;
  }
  return k;
}

double energy(const RingParameters& params, const Vector& x) {
  require_dimension(params, x, "energy");
  const Vector kx = apply_K(params, x);
  const double quartic = x.array().pow(4).sum();
  return 0.25 * quartic + 0.5 * (x.dot(kx) - x.squaredNorm()) + 0.25 * params.n();
}

Vector gradient(const RingParameters& params, const Vector& x) {
  require_dimension(params, x, "gradient");
  Vector g = apply_K(params, x);
  g.array() += x.array().cube() - x.array();
  return g;
}

Matrix hessian(const RingParameters& params, const Vector& x) {
  require_dimension(params, x, "hessian");
  Matrix hess = k_matrix(params);
  for (int i = 0; i < params.n(); ++i) hess(i, i) += 3.0 * x[i] * x[i] - 1.0;
  return hess;
}

double hessian_quadratic_form(const RingParameters& params, const Vector& x, const Vector& w) {
  require_dimension(params, x, "hessian_quadratic_form(x)");
  require_dimension(params, w, "hessian_quadratic_form(w)");
  const Vector kw = apply_K(params, w);
  return w.dot(kw) - w.squaredNorm() + 3.0 * (x.array().square() * w.array().square()).sum();
}

double discrete_poincare_margin(const RingParameters& params, const Vector& x, double rho) {
  require_dimension(params, x, "discrete_poincare_margin");
  if (!(rho >= 0.0 && rho <= params.mu()))
    throw InvalidArgument("discrete_poincare_margin: rho must lie in [0, mu]");
  const double xbar = mean(x);
  const double x_px = params.n() * xbar * xbar;  // ⟨x, Px⟩ = N x̄²
  return x.dot(apply_K(params, x)) - rho * (x.squaredNorm() - x_px);
}

std::vector<CriticalPoint> critical_points(const RingParameters& params) {
  const int n = params.n();
  const auto nu = k_spectrum(n, params.mu());
  std::vector<double> at_minimum(nu.size()), at_saddle(nu.size());
  for (std::size_t k = 0; k < nu.size(); ++k) {
    at_minimum[k] = nu[k] + 2.0;
    at_saddle[k] = nu[k] - 1.0;
  }
  std::vector<CriticalPoint> out;
  out.push_back({CriticalKind::i_plus, Vector::Ones(n), 0.0, at_minimum});
  out.push_back({CriticalKind::i_minus, -Vector::Ones(n), 0.0, at_minimum});
  out.push_back({CriticalKind::saddle, Vector::Zero(n), 0.25 * n, at_saddle});
  for (auto& cp : out) cp.energy = energy(params, cp.location);
  return out;
}

}  // namespace kramers
