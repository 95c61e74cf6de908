#pragma once

#include "kramers/ring_model.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace kramers {

enum class InitialKind { at_i_plus, at_i_minus, custom };

struct InitialCondition {
  InitialKind kind = InitialKind::at_i_plus;
  Vector custom;  // used when kind == custom
};

/// dt ≤ 0.01 / (1 + mu/(4 sin²(pi/N))); 0.01 for N = 1.
double max_stable_dt(const RingParameters& params);

struct SimulationConfig {
  RingParameters params;
  double dt = 0.0;  // 0 selects max_stable_dt
  double total_time = 0.0;
  int replicas = 1;
  std::uint64_t seed = 1;
  InitialCondition initial;
  bool deterministic = false;  // drop the noise term (the h = 0 flow)

  explicit SimulationConfig(RingParameters p) : params(p) {}
  /// Resolves dt and checks the stability bound and the other fields.
  void validate() const;
  double step_size() const;
  Vector initial_state() const;
};

/// −∇V(x) = −Kx + x − x³.
Vector drift(const RingParameters& params, const Vector& x);

/// One Euler–Maruyama step x + dt·drift(x) + sqrt(2hN dt)·noise. Throws
/// NumericalFailure when the state stops being finite.
Vector step(const SimulationConfig& config, const Vector& x, const Vector& noise);

struct GapEstimate {
  double rate = 0.0;
  double stderr_ = 0.0;        // jackknife over replicas
  double ek_prediction = 0.0;  // p(N) e^{−1/4h}
  double ratio = 0.0;          // rate / ek_prediction
  double lag_min = 0.0;
  double lag_max = 0.0;
  double fit_rms = 0.0;        // of the log-autocovariance fit
  bool low_confidence = false;
  std::string warning;
};

/// Fits the exponential decay of the autocovariance of x̄(t), pooled over
/// replicas, on lags in [lag_min, lag_max]. lag_max = 0 selects 1/ek_prediction.
GapEstimate estimate_gap(const SimulationConfig& config, double burn_in, double lag_min = 2.0,
                         double lag_max = 0.0);

struct TransitionEstimate {
  double mean_time = 0.0;
  double stderr_ = 0.0;
  int transitions = 0;
  int censored = 0;
};

/// First time ‖x − I₋‖ ≤ radius, starting from the configured initial state.
TransitionEstimate estimate_transition_time(const SimulationConfig& config, double radius = 0.3);

struct Histogram {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<double> density;  // normalized to unit mass
};

/// Histogram of x̄ over all replicas after burn_in.
Histogram mean_histogram(const SimulationConfig& config, double burn_in, int bins = 60, double range = 2.0);

struct BimodalityReport {
  double left_mode = 0.0;
  double right_mode = 0.0;
  double asymmetry = 0.0;  // ‖p(x) − p(−x)‖₁ / 2
  double dip_ratio = 0.0;  // density near 0 over the smaller peak
  bool bimodal = false;
  bool symmetric = false;
};

BimodalityReport analyze_bimodality(const Histogram& hist, double symmetry_tolerance = 0.1);

/// Writes "t,xbar,x1,...,xN" every `thin` steps of one replica as CSV.
void write_trajectory(const SimulationConfig& config, int replica, int thin, std::ostream& out);

}  // namespace kramers
