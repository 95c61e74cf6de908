#pragma once

#include "kramers/ring_model.hpp"

#include <cstdint>
#include <vector>

namespace kramers {

/// Resolvent Q = (alpha P + K + beta)^{-1}, diagonal in the Fourier basis.
struct GaussianOperator {
  double alpha = 0.0;
  double beta = 0.0;
  std::vector<double> sigma;  // sigma_0 = 1/(alpha+beta), sigma_k = 1/(nu_k+beta)
  double trace = 0.0;
  double log_det = 0.0;  // log det(alpha P + K + beta) = -log det Q
};

/// Requires alpha + beta > 0 and, for N >= 2, mu + beta > 0.
GaussianOperator build_operator(const RingParameters& params, double alpha, double beta);

/// Q x (or Q^{-1} x) evaluated through the Fourier transform.
Vector apply_resolvent(const GaussianOperator& op, const Vector& x);
Vector apply_inverse_resolvent(const GaussianOperator& op, const Vector& x);

/// N^{-1} E‖X‖_p^p for X ~ N(0, hN Q), p in {4, 6}: C_p h^{p/2} (Tr Q)^{p/2}
/// with C_4 = 3, C_6 = 15.
double closed_form_moment(const GaussianOperator& op, const RingParameters& params, int p);

/// sqrt(h/(pi C)) exp(-C/h) with C = (alpha+beta) r^2/2, bounding the
/// probability of {|x̄| > r} under N(0, hN Q).
double tail_bound(const GaussianOperator& op, const RingParameters& params, double r);

struct PrefactorReport {
  int n = 0;
  double p_n = 0.0;
  double limit = 0.0;
  double gap = 0.0;
};

/// p(N) = (1/pi) sqrt(prod (nu_k+2)/|nu_k-1|) in log space, together with its
/// large-N limit sinh(pi sqrt(2/mu)) / (pi sin(pi/sqrt(mu))).
PrefactorReport prefactor(const RingParameters& params);

double prefactor_limit(double mu);

/// log of |det Hess V(I_+)| = sum log(nu_k + 2).
double log_det_hessian_minimum(const RingParameters& params);

/// log of |det Hess V(O)| = sum log|nu_k - 1|.
double log_det_hessian_saddle(const RingParameters& params);

/// Draws N(0, hN Q) samples from the Philox stream (seed, stream) by scaling
/// independent normals per Fourier mode and inverting the transform.
std::vector<Vector> sample_gaussian(const GaussianOperator& op, const RingParameters& params,
                                    std::size_t count, std::uint64_t seed, std::uint64_t stream = 0);

class RandomStream;

/// One sample from an existing stream; used by the Monte Carlo estimators.
Vector draw_gaussian(const GaussianOperator& op, const RingParameters& params, RandomStream& rng);

}  // namespace kramers
