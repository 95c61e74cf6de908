#pragma once

#include "kramers/ring_model.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace kramers {

enum class IntegrationMethod { quadrature, importance_mc };

std::string_view to_string(IntegrationMethod method);
IntegrationMethod parse_integration_method(std::string_view text);

struct IntegrationOptions {
  double rel_tol = 1e-10;            // quadrature
  std::size_t samples = 1'000'000;   // Monte Carlo
  std::size_t batches = 20;
  std::uint64_t seed = 1;
};

/// Numeric value of a Laplace integral against its closed-form asymptotics.
/// Values are stored together with their logarithms because for larger N the
/// Gaussian normalization (2 pi hN)^{N/2} leaves the double range quickly.
struct PartitionEstimate {
  double z_numeric = 0.0;
  double z_asymptotic = 0.0;
  double log_z_asymptotic = 0.0;
  double epsilon = 0.0;  // z_numeric / z_asymptotic − 1
  IntegrationMethod method = IntegrationMethod::quadrature;
  std::optional<double> stderr_;      // of epsilon, Monte Carlo only
  double refinement_change = 0.0;     // quadrature only, relative
  double half_width = 0.0;            // quadrature box actually used
};

/// V(x + I_+) − ½⟨x, (3/2 P + K − 1) x⟩; requires x̄ ≥ −1.
double quadratic_lower_margin(const RingParameters& params, const Vector& x);

/// ¼‖x‖₄⁴ − |Σx_k³| + ½⟨x,(K+2)x⟩ − ½⟨x,(3/2 P + K − 1) x⟩; requires |x̄| ≤ 1.
double quadratic_lower_margin_abs(const RingParameters& params, const Vector& x);

/// log of the Gaussian mass (2 pi hN)^{N/2} / |det Hess V(I_+)|^{1/2}.
double log_gaussian_mass(const RingParameters& params);

/// Z = ∫ exp(−V/hN) against 2 (2 pi hN)^{N/2} / |det Hess V(I_+)|^{1/2}.
/// Quadrature needs N ≤ 2, importance sampling N ≤ 12.
PartitionEstimate partition_function(const RingParameters& params, IntegrationMethod method,
                                     const IntegrationOptions& options = {});

/// ∫ over {|x̄ ∓ 1| ≤ r} of exp(−V/hN) against the one-well Gaussian mass.
PartitionEstimate local_laplace(const RingParameters& params, double r, CriticalKind around,
                                IntegrationMethod method, const IntegrationOptions& options = {});

/// Quadrature of ∫ over {x̄ ≥ 0, |x̄ − 1| ≥ r} of exp(−V/hN), N ≤ 2.
double tail_integral(const RingParameters& params, double r, const IntegrationOptions& options = {});

}  // namespace kramers
