#pragma once

#include <Eigen/Dense>

#include <string_view>
#include <vector>

namespace kramers {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Particle count N, coupling mu and temperature h of the periodic ring.
/// Construction validates N >= 1, mu > 1, h > 0.
class RingParameters {
 public:
  RingParameters(int n, double mu, double h);

  int n() const { return n_; }
  double mu() const { return mu_; }
  double h() const { return h_; }

  /// Noise scale hN appearing in the Gibbs weight exp(-V/hN).
  double hn() const { return h_ * n_; }

  RingParameters with_h(double h) const { return {n_, mu_, h}; }
  RingParameters with_n(int n) const { return {n, mu_, h_}; }

 private:
  int n_;
  double mu_;
  double h_;
};

/// Eigenvalues nu_k = mu sin^2(k pi/N)/sin^2(pi/N) of the coupling operator K,
/// in Fourier order k = 0..N-1. For N = 1 the single entry is 0.
std::vector<double> k_spectrum(int n, double mu);

enum class CriticalKind { i_plus, i_minus, saddle };

std::string_view to_string(CriticalKind kind);

struct CriticalPoint {
  CriticalKind kind;
  Vector location;
  double energy;
  std::vector<double> hessian_spectrum;  // Fourier order
};

// Componentwise helpers on states. x̄ is the arithmetic mean.
double mean(const Vector& x);
Vector project_mean(const Vector& x);  // P x
Vector project_perp(const Vector& x);  // (1 - P) x

/// V(x) = ¼‖x‖₄⁴ + ½⟨x,(K−1)x⟩ + N/4.
double energy(const RingParameters& params, const Vector& x);

/// ∇V(x)_k = x_k³ − x_k + (Kx)_k.
Vector gradient(const RingParameters& params, const Vector& x);

/// Periodic stencil (Kx)_k = mu (2x_k − x_{k+1} − x_{k−1}) / (4 sin²(π/N)).
/// K is identically zero for N = 1.
Vector apply_K(const RingParameters& params, const Vector& x);

/// Same operator evaluated on the Fourier side (multiplication by nu_k).
Vector apply_K_fourier(const RingParameters& params, const Vector& x);

/// Dense matrix of K, used by small-N eigen checks.
Matrix k_matrix(const RingParameters& params);

/// Dense Hess V(x) = K − 1 + 3 diag(x²).
Matrix hessian(const RingParameters& params, const Vector& x);

/// ⟨w, Hess V(x) w⟩ = ⟨w,(K−1)w⟩ + 3 Σ x_k² w_k².
double hessian_quadratic_form(const RingParameters& params, const Vector& x,
                              const Vector& w);

/// ⟨x,Kx⟩ − rho (‖x‖² − ⟨x,Px⟩); nonnegative for rho in [0, mu].
double discrete_poincare_margin(const RingParameters& params, const Vector& x,
                                double rho);

/// I_+, I_-, O with energies and Hessian spectra.
std::vector<CriticalPoint> critical_points(const RingParameters& params);

void require_dimension(const RingParameters& params, const Vector& x,
                       std::string_view what);

}  // namespace kramers
