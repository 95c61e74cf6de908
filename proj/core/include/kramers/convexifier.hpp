#pragma once

#include "kramers/ring_model.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace kramers {

/// Even C² cutoff θ_n: 1 on [−1,1], 0 outside [−√2,√2], nonincreasing in |r|.
///
/// On the transition layer θ_n(r) = S((|r| − 1)/(√2 − 1)), where S'' is the
/// piecewise-linear profile
///   0 → −M on [0, w], −M on [w, b], −M → 0 on [b, b+w], then a triangle of
///   height 2Mb/w on [b+w, 1],
/// with b = (n+½)/(n+1), w = (1−b)/2 and M = 2/b. This gives S(0) = 1,
/// S(1) = 0, S'(0) = S'(1) = 0, and min θ_n'' = −2(n+1)/((n+½)(√2−1)²).
class CutoffFunction {
 public:
  explicit CutoffFunction(int n);

  int n() const { return n_; }
  double value(double r) const;
  double first(double r) const;
  double second(double r) const;

  /// Exact minimum of θ_n''.
  double min_second() const;

  /// The floor −2(1+1/n)/(√2−1)² the family has to respect.
  double required_floor() const;

 private:
  struct Piece {
    double t0, s0, slope;   // S''(t) = s0 + slope (t − t0)
    double d1, d0;          // S'(t0), S(t0)
  };
  void profile(double t, double& s, double& ds, double& dds) const;

  int n_;
  double height_;
  std::array<Piece, 5> pieces_{};
};

/// Smallest n accepted by build_cutoff.
constexpr int kMinimalCutoffOrder = 1;

/// Validates n and builds θ_n; rejects n below kMinimalCutoffOrder.
CutoffFunction build_cutoff(int n);

/// 2/(√2−1)².
double cutoff_curvature_constant();

/// α threshold 1/(3(2−√2)²+1).
double alpha_threshold();

struct ConvexificationParams {
  double alpha = 0.6;
  double beta = 0.1;
  int n = 100;
  double c_alpha_beta() const;
  void validate() const;
};

/// W(x) = Σ θ_n(c x_k)(−(1−α)/4 x_k⁴ + (1+β)/2 x_k²) − N/4.
double perturbation_W(const ConvexificationParams& cp, const CutoffFunction& theta, const RingParameters& params,
                      const Vector& x);

/// Bounds −N/4 ≤ W ≤ (N/4)((1+β)²/(1−α) − 1).
std::array<double, 2> perturbation_bounds(const ConvexificationParams& cp, int n);

/// ∂²U for a single coordinate, so that Hess(V + W)(x) = K + diag(∂²U(x_k)).
double coordinate_curvature(const ConvexificationParams& cp, const CutoffFunction& theta, double x);

/// Dense Hess(V + W)(x).
Matrix hessian_V_plus_W(const ConvexificationParams& cp, const CutoffFunction& theta,
                        const RingParameters& params, const Vector& x);

/// Smallest n with α(3(2−√2)²+1+1/n) − 1 − 1/n > 0 for the given α, or throws
/// when α is at or below the threshold.
int minimal_order(double alpha);

struct FloorSweep {
  std::vector<int> sizes = {1, 2, 4, 8, 16, 32};
  int samples_per_size = 1000;
  int grid_points = 100000;  // 1-D coordinate sweep
  std::uint64_t seed = 11;
};

struct FloorCertificate {
  double one_d_min = 0.0;        // min over the coordinate sweep of ∂²U
  double one_d_argmin = 0.0;
  double sampled_min = 0.0;      // min eigenvalue over random full Hessians
  double floor = 0.0;            // min of the two
  Vector witness;                // x attaining sampled_min
  bool certified = false;        // floor ≥ β (1 − 1e-3)
  bool positive = false;
};

/// Sampling-based certificate of Hess(V + W) ≥ β. The coordinate sweep bounds
/// the Hessian for every N since K ≥ 0; the eigen sweep checks the full matrix.
FloorCertificate hessian_floor(const ConvexificationParams& cp, double mu, const FloorSweep& sweep = {});

struct LogSobolevBound {
  ConvexificationParams chosen;
  double oscillation_rate = 0.0;   // (1+β)²/(4(1−α)), sup−inf of W/N
  double target_rate = 0.0;        // (1+δ)/4 + (3+2√2)/24
  double hessian_floor = 0.0;      // certified C_{α,β,n}
  double bound = 0.0;              // C e^{−oscillation_rate/h}
  double target_bound = 0.0;       // C e^{−target_rate/h}
};

/// Picks α in the middle of the admissible window, β at half its admissible
/// maximum and the minimal order n, certifies the Hessian floor and composes
/// Holley–Stroock with Bakry–Émery: ρ(h,N) ≥ C e^{−sup−inf W/(hN)}.
LogSobolevBound logsob_lower_bound(double delta, double h, double mu = 2.0);

}  // namespace kramers
