#pragma once

// Shared numerical kernels for the Laplace-type integrals of laplace_partition
// and quasimode. Not installed.

#include "kramers/ring_model.hpp"
#include "kramers/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace kramers::detail {

// Integrand on R^N for N in {1,2}; receives the state and its mean.
using StateIntegrand = std::function<double(const double* x, double xbar)>;

struct RingQuadratureSpec {
  int n = 1;
  double half_width = 4.0;           // box half-width in the (x̄, (x1−x2)/2) coordinates
  // Breakpoints for x̄; ±infinity stands for the box edge.
  std::vector<double> mean_breaks;
  double rel_tol = 1e-10;
};

struct RingQuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  double refinement_change = 0.0;  // |coarse − fine| / |fine|
  double half_width = 0.0;
};

// Tensor Gauss–Kronrod over the box in coordinates u = x̄, v = (x1 − x2)/2
// (Jacobian 2 for N = 2). The box is widened in steps of 0.5 until the
// integrand on its boundary is below 1e-14 of the peak (sampled on the box and
// at the supplied peak locations). Runs a second, 100x looser pass and reports
// the relative change.
RingQuadratureResult integrate_ring(const StateIntegrand& f, RingQuadratureSpec spec,
                                    const std::vector<std::vector<double>>& peak_hints);

// V at a raw coordinate array of length params.n(); allocation-free variant
// of energy() for quadrature inner loops.
double energy_at(const RingParameters& params, const double* x);

// Default truncation half-width 2 + sqrt(40 h max sigma) with sigma of (K+2)^{-1}.
double default_half_width(const RingParameters& params);

// Batched Monte Carlo for a ratio E[a]/E[b] (b ≡ 1 gives a plain mean).
// Each batch draws from its own Philox stream (seed, stream_base + batch).
struct BatchSample {
  double a = 0.0;
  double b = 1.0;
};
using BatchDraw = std::function<BatchSample(RandomStream&)>;

struct RatioEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
  double mean_a = 0.0;
  double mean_b = 0.0;
  double stderr_a = 0.0;  // of mean_a alone
  double stderr_b = 0.0;
};

RatioEstimate batch_ratio(const BatchDraw& draw, std::size_t samples, std::size_t batches,
                          std::uint64_t seed, std::uint64_t stream_base);

// log(exp(a) + exp(b)) without overflow.
double log_add_exp(double a, double b);

}  // namespace kramers::detail
