#include "kramers/dynamics.hpp"

#include "kramers/error.hpp"
#include "kramers/gaussian_lab.hpp"
#include "kramers/parallel.hpp"
#include "kramers/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

namespace kramers {
namespace {

constexpr double kDtSlack = 1e-12;
constexpr int kMaxLags = 40;

// Allocation-free Euler–Maruyama integrator for one replica.
class Integrator {
 public:
  Integrator(const SimulationConfig& config, std::uint64_t stream)
      : n_(config.params.n()),
        dt_(config.step_size()),
        noise_(config.deterministic ? 0.0 : std::sqrt(2.0 * config.params.hn() * dt_)),
        rng_(config.seed, stream),
        x_(config.initial_state()),
        next_(n_) {
    if (n_ >= 2) {
      const double s = std::sin(std::numbers::pi / n_);
      coupling_ = config.params.mu() / (4.0 * s * s);
    }
  }

  void advance() {
    for (int k = 0; k < n_; ++k) {
      const double xk = x_[k];
      const double lap = n_ >= 2 ? coupling_ * (2.0 * xk - x_[(k + 1) % n_] - x_[(k + n_ - 1) % n_]) : 0.0;
      const double g = noise_ != 0.0 ? rng_.normal() : 0.0;
      next_[k] = xk + dt_ * (-lap + xk - xk * xk * xk) + noise_ * g;
    }
    x_.swap(next_);
    if (!std::isfinite(x_[0]) || !std::isfinite(x_[n_ - 1])) {
      throw NumericalFailure("simulate: state diverged; reduce dt");
    }
  }

  double mean() const { return x_.mean(); }
  const Vector& state() const { return x_; }
  double dt() const { return dt_; }

 private:
  int n_;
  double dt_;
  double noise_;
  double coupling_ = 0.0;
  RandomStream rng_;
  Vector x_;
  Vector next_;
};

struct LogFit {
  double rate = 0.0;
  double rms = 0.0;
  int used = 0;
};

LogFit fit_decay(const std::vector<double>& lag_times, const std::vector<double>& cov) {
  std::vector<double> t, y;
  for (std::size_t i = 0; i < cov.size(); ++i) {
    if (!(cov[i] > 0.0)) break;
    t.push_back(lag_times[i]);
    y.push_back(std::log(cov[i]));
  }
  LogFit fit;
  fit.used = static_cast<int>(t.size());
  if (t.size() < 2) return fit;
  double mt = 0.0, my = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    mt += t[i];
    my += y[i];
  }
  mt /= t.size();
  my /= t.size();
  double stt = 0.0, sty = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    stt += (t[i] - mt) * (t[i] - mt);
    sty += (t[i] - mt) * (y[i] - my);
  }
  const double slope = sty / stt;
  double rss = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double r = y[i] - my - slope * (t[i] - mt);
    rss += r * r;
  }
  fit.rate = -slope;
  fit.rms = std::sqrt(rss / t.size());
  return fit;
}

}  // namespace

double max_stable_dt(const RingParameters& params) {
  if (params.n() == 1) return 0.01;
  const double s = std::sin(std::numbers::pi / params.n());
  return 0.01 / (1.0 + params.mu() / (4.0 * s * s));
}

double SimulationConfig::step_size() const { return dt > 0.0 ? dt : max_stable_dt(params); }

void SimulationConfig::validate() const {
  if (dt < 0.0) throw InvalidArgument("simulate: dt must be positive");
  const double bound = max_stable_dt(params);
  if (step_size() > bound * (1.0 + kDtSlack)) {
    throw InvalidArgument("simulate: dt exceeds the stability bound " + std::to_string(bound));
  }
  if (!(total_time > 0.0)) throw InvalidArgument("simulate: total time must be positive");
  if (replicas < 1) throw InvalidArgument("simulate: need at least one replica");
  if (initial.kind == InitialKind::custom) require_dimension(params, initial.custom, "initial condition");
}

Vector SimulationConfig::initial_state() const {
  switch (initial.kind) {
    case InitialKind::at_i_plus:
      return Vector::Ones(params.n());
    case InitialKind::at_i_minus:
      return -Vector::Ones(params.n());
    case InitialKind::custom:
      break;
  }
  return initial.custom;
}

Vector drift(const RingParameters& params, const Vector& x) {
  require_dimension(params, x, "drift");
  return -apply_K(params, x) + x - x.array().cube().matrix();
}

Vector step(const SimulationConfig& config, const Vector& x, const Vector& noise) {
  require_dimension(config.params, x, "step");
  require_dimension(config.params, noise, "step noise");
  const double dt = config.step_size();
  const double scale = config.deterministic ? 0.0 : std::sqrt(2.0 * config.params.hn() * dt);
  Vector out = x + dt * drift(config.params, x) + scale * noise;
  if (!out.allFinite()) throw NumericalFailure("step: state diverged; reduce dt");
  return out;
}

GapEstimate estimate_gap(const SimulationConfig& config, double burn_in, double lag_min, double lag_max) {
  config.validate();
  if (burn_in < 0.0 || !(lag_min >= 0.0)) throw InvalidArgument("estimate_gap: negative burn-in or lag");
  GapEstimate est;
  est.ek_prediction = prefactor(config.params).p_n * std::exp(-0.25 / config.params.h());
  if (lag_max <= 0.0) lag_max = 1.0 / est.ek_prediction;
  if (!(lag_max > lag_min)) throw InvalidArgument("estimate_gap: lag_max must exceed lag_min");
  if (!(config.total_time > burn_in + lag_max)) {
    throw InvalidArgument("estimate_gap: total time must exceed burn-in plus lag_max");
  }
  est.lag_min = lag_min;
  est.lag_max = lag_max;
  if (config.total_time * est.ek_prediction < 10.0) {
    est.warning = "metastable timescale unreachable: total time below 10/prediction";
  }

  const double dt = config.step_size();
  const auto every = std::max<long long>(1, static_cast<long long>(std::floor(lag_max / 400.0 / dt)));
  const double tau = every * dt;
  const auto burn_steps = static_cast<long long>(std::ceil(burn_in / dt));
  const auto total_steps = static_cast<long long>(std::floor(config.total_time / dt));

  std::vector<std::vector<double>> series(config.replicas);
  parallel_for(config.replicas, [&](std::size_t r) {
    Integrator sim(config, r);
    auto& y = series[r];
    y.reserve(static_cast<std::size_t>((total_steps - burn_steps) / every + 1));
    for (long long s = 1; s <= total_steps; ++s) {
      sim.advance();
      if (s > burn_steps && (s - burn_steps) % every == 0) y.push_back(sim.mean());
    }
  });

  // lag indices spread over [lag_min, lag_max]
  const auto first = std::max<long long>(1, static_cast<long long>(std::ceil(lag_min / tau)));
  const auto last = static_cast<long long>(std::floor(lag_max / tau));
  std::vector<long long> lags;
  const long long span = std::max<long long>(last - first, 0);
  for (int i = 0; i < kMaxLags; ++i) {
    const long long l = first + span * i / (kMaxLags - 1);
    if (lags.empty() || l != lags.back()) lags.push_back(l);
  }
  std::vector<double> lag_times;
  for (auto l : lags) lag_times.push_back(l * tau);

  double total = 0.0;
  std::size_t count = 0;
  for (const auto& y : series) {
    for (double v : y) total += v;
    count += y.size();
  }
  const double centre = total / count;

  const std::size_t reps = series.size();
  std::vector<std::vector<double>> sums(reps, std::vector<double>(lags.size()));
  std::vector<std::vector<double>> counts(reps, std::vector<double>(lags.size()));
  parallel_for(reps, [&](std::size_t r) {
    const auto& y = series[r];
    for (std::size_t j = 0; j < lags.size(); ++j) {
      const auto l = static_cast<std::size_t>(lags[j]);
      double acc = 0.0;
      for (std::size_t t = 0; t + l < y.size(); ++t) acc += (y[t] - centre) * (y[t + l] - centre);
      sums[r][j] = acc;
      counts[r][j] = y.size() > l ? static_cast<double>(y.size() - l) : 0.0;
    }
  });

  auto pooled = [&](std::size_t skip) {
    std::vector<double> c(lags.size());
    for (std::size_t j = 0; j < lags.size(); ++j) {
      double s = 0.0, n = 0.0;
      for (std::size_t r = 0; r < reps; ++r) {
        if (r == skip) continue;
        s += sums[r][j];
        n += counts[r][j];
      }
      c[j] = n > 0.0 ? s / n : 0.0;
    }
    return c;
  };

  const LogFit fit = fit_decay(lag_times, pooled(reps));
  est.rate = fit.rate;
  est.fit_rms = fit.rms;
  est.ratio = est.rate / est.ek_prediction;
  if (reps >= 2) {
    std::vector<double> loo(reps);
    double mean_loo = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
      loo[r] = fit_decay(lag_times, pooled(r)).rate;
      mean_loo += loo[r];
    }
    mean_loo /= reps;
    double ss = 0.0;
    for (double v : loo) ss += (v - mean_loo) * (v - mean_loo);
    est.stderr_ = std::sqrt((reps - 1.0) / reps * ss);
  }
  est.low_confidence = fit.used < 3 || fit.rms > 0.1 || !(est.rate > 0.0);
  return est;
}

TransitionEstimate estimate_transition_time(const SimulationConfig& config, double radius) {
  config.validate();
  if (!(radius > 0.0)) throw InvalidArgument("estimate_transition_time: radius must be positive");
  const double dt = config.step_size();
  const auto total_steps = static_cast<long long>(std::floor(config.total_time / dt));
  std::vector<double> times(config.replicas, -1.0);
  parallel_for(config.replicas, [&](std::size_t r) {
    Integrator sim(config, r);
    const double r2 = radius * radius;
    for (long long s = 1; s <= total_steps; ++s) {
      sim.advance();
      if ((sim.state().array() + 1.0).matrix().squaredNorm() <= r2) {
        times[r] = s * dt;
        return;
      }
    }
  });
  TransitionEstimate est;
  double sum = 0.0, sq = 0.0;
  for (double t : times) {
    if (t < 0.0) {
      ++est.censored;
      continue;
    }
    ++est.transitions;
    sum += t;
    sq += t * t;
  }
  if (est.transitions > 0) {
    est.mean_time = sum / est.transitions;
    if (est.transitions > 1) {
      const double var = (sq - est.transitions * est.mean_time * est.mean_time) / (est.transitions - 1);
      est.stderr_ = std::sqrt(std::max(var, 0.0) / est.transitions);
    }
  }
  return est;
}

Histogram mean_histogram(const SimulationConfig& config, double burn_in, int bins, double range) {
  config.validate();
  if (bins < 2 || !(range > 0.0)) throw InvalidArgument("mean_histogram: need bins >= 2 and range > 0");
  const double dt = config.step_size();
  const auto every = std::max<long long>(1, std::llround(0.1 / dt));
  const auto burn_steps = static_cast<long long>(std::ceil(burn_in / dt));
  const auto total_steps = static_cast<long long>(std::floor(config.total_time / dt));
  std::vector<std::vector<double>> counts(config.replicas, std::vector<double>(bins));
  parallel_for(config.replicas, [&](std::size_t r) {
    Integrator sim(config, r);
    for (long long s = 1; s <= total_steps; ++s) {
      sim.advance();
      if (s <= burn_steps || s % every != 0) continue;
      const double m = sim.mean();
      const auto b = static_cast<long long>(std::floor((m + range) / (2.0 * range) * bins));
      if (b >= 0 && b < bins) counts[r][b] += 1.0;
    }
  });
  Histogram hist;
  hist.lo = -range;
  hist.hi = range;
  hist.density.assign(bins, 0.0);
  double total = 0.0;
  for (const auto& c : counts) {
    for (int b = 0; b < bins; ++b) hist.density[b] += c[b];
  }
  for (double v : hist.density) total += v;
  const double width = 2.0 * range / bins;
  if (total > 0.0) {
    for (double& v : hist.density) v /= total * width;
  }
  return hist;
}

BimodalityReport analyze_bimodality(const Histogram& hist, double symmetry_tolerance) {
  const int bins = static_cast<int>(hist.density.size());
  const double width = (hist.hi - hist.lo) / bins;
  auto centre = [&](int b) { return hist.lo + (b + 0.5) * width; };
  BimodalityReport rep;
  int left = 0, right = bins - 1;
  for (int b = 0; b < bins; ++b) {
    if (centre(b) < 0.0 && hist.density[b] > hist.density[left]) left = b;
    if (centre(b) > 0.0 && hist.density[b] > hist.density[right]) right = b;
  }
  rep.left_mode = centre(left);
  rep.right_mode = centre(right);
  double mid = 0.0;
  int mid_count = 0;
  for (int b = 0; b < bins; ++b) {
    if (std::abs(centre(b)) < width) {
      mid += hist.density[b];
      ++mid_count;
    }
  }
  mid = mid_count > 0 ? mid / mid_count : 0.0;
  const double smaller_peak = std::min(hist.density[left], hist.density[right]);
  rep.dip_ratio = smaller_peak > 0.0 ? mid / smaller_peak : 1.0;
  double diff = 0.0;
  for (int b = 0; b < bins; ++b) diff += std::abs(hist.density[b] - hist.density[bins - 1 - b]) * width;
  rep.asymmetry = 0.5 * diff;
  rep.bimodal = rep.left_mode < -0.5 && rep.right_mode > 0.5 && rep.dip_ratio < 0.5;
  rep.symmetric = rep.asymmetry < symmetry_tolerance;
  return rep;
}

void write_trajectory(const SimulationConfig& config, int replica, int thin, std::ostream& out) {
  config.validate();
  if (thin < 1) throw InvalidArgument("write_trajectory: thinning interval must be positive");
  const int n = config.params.n();
  Integrator sim(config, static_cast<std::uint64_t>(replica));
  const double dt = config.step_size();
  const auto total_steps = static_cast<long long>(std::floor(config.total_time / dt));
  out << "t,xbar";
  for (int k = 1; k <= n; ++k) out << ",x" << k;
  out << '\n';
  out.precision(17);
  auto emit = [&](double t) {
    out << t << ',' << sim.mean();
    for (int k = 0; k < n; ++k) out << ',' << sim.state()[k];
    out << '\n';
  };
  emit(0.0);
  for (long long s = 1; s <= total_steps; ++s) {
    sim.advance();
    if (s % thin == 0) emit(s * dt);
  }
}

}  // namespace kramers
