#pragma once

#include "kramers/laplace_partition.hpp"
#include "kramers/ring_model.hpp"

#include <optional>

namespace kramers {

/// χ(x) = erf(x̄ / sqrt(2h)).
double chi(const RingParameters& params, const Vector& x);

/// ∇χ(x); every component equals (2/sqrt(2 pi h)) e^{−x̄²/2h} / N.
Vector grad_chi(const RingParameters& params, const Vector& x);

/// ‖∇χ(x)‖² = (2/(pi hN)) e^{−x̄²/h}.
double grad_chi_norm_sq(const RingParameters& params, const Vector& x);

/// L_hχ(x) = (2/(sqrt(2 pi h) N)) e^{−⟨x,Px⟩/2hN} Σ x_k³, with
/// L_h = −hNΔ + ∇V·∇.
double apply_Lh_chi(const RingParameters& params, const Vector& x);

/// Pointwise data of the quasimode.
struct QuasimodeEvaluation {
  double chi = 0.0;
  double grad_chi_norm_sq = 0.0;
  double lh_chi = 0.0;
  std::optional<double> normalization_sq;  // ∫χ² e^{−V/hN}, when requested
};

QuasimodeEvaluation evaluate_quasimode(const RingParameters& params, const Vector& x);

/// Integrals behind the quasimode bounds. Values that carry the barrier factor
/// e^{−1/4h} are reported with that factor removed (suffix _scaled) so they
/// stay representable for small h.
struct QuasimodeIntegrals {
  IntegrationMethod method = IntegrationMethod::quadrature;
  double normalization_sq = 0.0;          // ∫χ² e^{−V/hN}
  double dirichlet_numerator_scaled = 0.0;  // e^{1/4h} hN∫|∇χ|² e^{−V/hN}
  double lh_chi_sq_scaled = 0.0;            // e^{1/4h} ∫|L_hχ|² e^{−V/hN}
  double dirichlet_form = 0.0;   // Rayleigh quotient of ψ = χ/‖χ‖
  double e_functional = 0.0;     // ∫|L_hψ|² / (hN∫|∇ψ|²)
  double prediction = 0.0;       // p(N) e^{−1/4h}
  double dirichlet_ratio = 0.0;  // dirichlet_form / prediction
  double e_scaling = 0.0;        // ∫|L_hψ|² / (h² |det ratio|^{1/2} e^{−1/4h})
  std::optional<double> dirichlet_ratio_stderr;
  std::optional<double> e_functional_stderr;
  std::optional<double> e_scaling_stderr;
  double refinement_change = 0.0;
};

/// Quadrature (N ≤ 2) or importance sampling (N ≤ 12). Importance sampling
/// draws the saddle integrals from N(0, hN(2P+K−1)^{-1}) and the normalization
/// from the two-well mixture of partition_function.
QuasimodeIntegrals quasimode_integrals(const RingParameters& params, IntegrationMethod method,
                                       const IntegrationOptions& options = {});

/// hN∫|∇ψ|² e^{−V/hN}.
double dirichlet_form_psi(const RingParameters& params, IntegrationMethod method,
                          const IntegrationOptions& options = {});

/// E(ψ).
double e_functional(const RingParameters& params, IntegrationMethod method,
                    const IntegrationOptions& options = {});

/// ∫χ e^{−V/hN} / ∫χ² e^{−V/hN} by quadrature (N ≤ 2); zero by antisymmetry.
double quasimode_mean(const RingParameters& params, const IntegrationOptions& options = {});

struct SandwichResult {
  double upper = 0.0;
  double e_functional = 0.0;
  double delta = 0.0;
  double epsilon_used = 0.0;
  double lower = 0.0;
  bool valid = true;  // false when upper >= delta/2
};

/// Lower bound upper·(1 − ε), ε = min{1, (2/δ) upper + (2/sqrt δ) sqrt E}.
/// The result is flagged invalid (not clipped) when the Dirichlet form is not
/// below δ/2.
SandwichResult sandwich_bound(double upper, double e_functional, double delta);

SandwichResult sandwich_lower_bound(const RingParameters& params, double delta, IntegrationMethod method,
                                    const IntegrationOptions& options = {});

}  // namespace kramers
