#include "commands.hpp"

#include "kramers/convexifier.hpp"
#include "kramers/dynamics.hpp"
#include "kramers/error.hpp"
#include "kramers/fit.hpp"
#include "kramers/gaussian_lab.hpp"
#include "kramers/laplace_partition.hpp"
#include "kramers/parallel.hpp"
#include "kramers/quasimode.hpp"
#include "kramers/ring_model.hpp"
#include "kramers/witten_spectrum.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

namespace kramers::cli {
namespace {

class Params {
 public:
  explicit Params(const RunSpec& spec) : spec_(spec) {}

  const std::string& text(const std::string& key) const {
    const auto it = spec_.parameters.find(key);
    if (it == spec_.parameters.end()) throw InvalidArgument("missing parameter '" + key + "'");
    return it->second;
  }

  bool is_auto(const std::string& key) const { return text(key) == "auto"; }

  double real(const std::string& key) const {
    const std::string& s = text(key);
    double v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
      throw InvalidArgument("--" + key + " expects a number, got '" + s + "'");
    return v;
  }

  long long integer(const std::string& key) const {
    const double v = real(key);
    if (v != std::round(v) || std::abs(v) > 9e15)
      throw InvalidArgument("--" + key + " expects an integer, got '" + text(key) + "'");
    return static_cast<long long>(v);
  }

  int count(const std::string& key, long long lo = 1) const {
    const long long v = integer(key);
    if (v < lo || v > std::numeric_limits<int>::max())
      throw InvalidArgument("--" + key + " must be at least " + std::to_string(lo));
    return static_cast<int>(v);
  }

  std::uint64_t seed() const {
    const std::string& s = text("seed");
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
      throw InvalidArgument("--seed expects an unsigned 64-bit integer, got '" + s + "'");
    return v;
  }

  bool flag(const std::string& key) const {
    const std::string& s = text(key);
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw InvalidArgument("--" + key + " expects true or false, got '" + s + "'");
  }

  IntegrationOptions integration() const {
    IntegrationOptions o;
    o.rel_tol = real("rel-tol");
    o.samples = static_cast<std::size_t>(count("samples"));
    o.batches = static_cast<std::size_t>(count("batches", 2));
    o.seed = seed();
    return o;
  }

 private:
  const RunSpec& spec_;
};

Cell optional_cell(const std::optional<double>& v) {
  if (v) return *v;
  return std::monostate{};
}

template <class F>
std::vector<Row> sweep(std::size_t count, F&& point) {
  std::vector<Row> rows(count);
  parallel_for(count, [&](std::size_t i) { rows[i] = point(i); });
  return rows;
}

Outcome run_model(const Params& p) {
  const RingParameters params(p.count("n"), p.real("mu"), p.real("h"));
  Outcome outcome;
  for (const CriticalPoint& cp : critical_points(params)) {
    Row row;
    row.add("kind", std::string(to_string(cp.kind)))
        .add("N", static_cast<long long>(params.n()))
        .add("mu", params.mu())
        .add("coordinate", cp.location.size() > 0 ? cp.location[0] : 0.0)
        .add("energy", cp.energy)
        .add("gradient_norm", gradient(params, cp.location).norm())
        .add("hessian", cp.hessian_spectrum);
    outcome.table.rows.push_back(std::move(row));
  }
  return outcome;
}

Outcome run_prefactor(const Params& p) {
  const double mu = p.real("mu");
  const std::vector<int> ns = parse_int_grid(p.text("n-grid"));
  Outcome outcome;
  outcome.table.rows = sweep(ns.size(), [&](std::size_t i) {
    const PrefactorReport r = prefactor(RingParameters(ns[i], mu, 1.0));
    Row row;
    row.add("N", static_cast<long long>(r.n)).add("pN", r.p_n).add("limit", r.limit).add("gap", r.gap);
    return row;
  });
  return outcome;
}

CriticalKind parse_well(const std::string& s) {
  if (s == "i_plus") return CriticalKind::i_plus;
  if (s == "i_minus") return CriticalKind::i_minus;
  throw InvalidArgument("well must be i_plus or i_minus, got '" + s + "'");
}

Outcome run_partition(const Params& p) {
  const int n = p.count("n");
  const double mu = p.real("mu");
  const std::vector<double> hs = parse_grid(p.text("h-grid"));
  const IntegrationMethod method = parse_integration_method(p.text("method"));
  const double r = p.real("r");
  if (r < 0) throw InvalidArgument("--r must be nonnegative");
  const CriticalKind around = parse_well(p.text("around"));
  const IntegrationOptions options = p.integration();

  std::vector<PartitionEstimate> estimates(hs.size());
  parallel_for(hs.size(), [&](std::size_t i) {
    const RingParameters params(n, mu, hs[i]);
    estimates[i] = r > 0 ? local_laplace(params, r, around, method, options)
                         : partition_function(params, method, options);
  });

  std::optional<ProportionalFit> fit;
  if (p.flag("fit") && hs.size() >= 2) {
    std::vector<double> abs_eps;
    for (const auto& e : estimates) abs_eps.push_back(std::abs(e.epsilon));
    fit = fit_through_origin(hs, abs_eps);
  }

  Outcome outcome;
  for (std::size_t i = 0; i < hs.size(); ++i) {
    const PartitionEstimate& e = estimates[i];
    Row row;
    row.add("N", static_cast<long long>(n))
        .add("mu", mu)
        .add("h", hs[i])
        .add("method", std::string(to_string(e.method)))
        .add("z_numeric", e.z_numeric)
        .add("z_asymptotic", e.z_asymptotic)
        .add("log_z_asymptotic", e.log_z_asymptotic)
        .add("epsilon", e.epsilon)
        .add("epsilon_stderr", optional_cell(e.stderr_))
        .add("refinement_change", e.refinement_change)
        .add("half_width", e.half_width)
        .add("fit_c", fit ? Cell(fit->coefficient) : Cell(std::monostate{}))
        .add("fit_residual", fit ? Cell(fit->relative_residual) : Cell(std::monostate{}));
    outcome.table.rows.push_back(std::move(row));
  }
  return outcome;
}

Outcome run_quasimode(const Params& p) {
  const int n = p.count("n");
  const double mu = p.real("mu");
  const std::vector<double> hs = parse_grid(p.text("h-grid"));
  const IntegrationMethod method = parse_integration_method(p.text("method"));
  const double delta = p.real("delta");
  if (delta < 0) throw InvalidArgument("--delta must be nonnegative");
  const IntegrationOptions options = p.integration();

  Outcome outcome;
  std::vector<char> valid(hs.size(), 1);
  outcome.table.rows = sweep(hs.size(), [&](std::size_t i) {
    const QuasimodeIntegrals q = quasimode_integrals(RingParameters(n, mu, hs[i]), method, options);
    Row row;
    row.add("N", static_cast<long long>(n))
        .add("mu", mu)
        .add("h", hs[i])
        .add("method", std::string(to_string(q.method)))
        .add("normalization_sq", q.normalization_sq)
        .add("dirichlet_form", q.dirichlet_form)
        .add("prediction", q.prediction)
        .add("dirichlet_ratio", q.dirichlet_ratio)
        .add("dirichlet_ratio_stderr", optional_cell(q.dirichlet_ratio_stderr))
        .add("e_functional", q.e_functional)
        .add("e_functional_stderr", optional_cell(q.e_functional_stderr))
        .add("e_scaling", q.e_scaling)
        .add("e_scaling_stderr", optional_cell(q.e_scaling_stderr))
        .add("refinement_change", q.refinement_change);
    if (delta > 0) {
      const SandwichResult s = sandwich_bound(q.dirichlet_form, q.e_functional, delta);
      valid[i] = s.valid;
      row.add("delta", delta).add("epsilon_used", s.epsilon_used).add("sandwich_lower", s.lower).add("sandwich_valid",
                                                                                                    s.valid);
    }
    return row;
  });
  for (std::size_t i = 0; i < hs.size(); ++i) {
    if (!valid[i]) {
      outcome.status = 4;
      outcome.kind = "precondition";
      outcome.message = "Dirichlet form not below delta/2 at h = " + std::to_string(hs[i]);
      break;
    }
  }
  return outcome;
}

Outcome run_spectrum(const Params& p) {
  WittenProblem problem(RingParameters(p.count("n"), p.real("mu"), 1.0));
  if (!p.is_auto("grid")) problem.grid_points = p.count("grid", 3);
  if (!p.is_auto("half-width")) {
    problem.half_width = p.real("half-width");
    if (!(problem.half_width > 0)) throw InvalidArgument("--half-width must be positive");
  }
  problem.discretization = parse_discretization(p.text("discretization"));
  const std::string& solver = p.text("solver");
  if (solver == "lanczos")
    problem.solver = EigenSolver::lanczos;
  else if (solver == "dense")
    problem.solver = EigenSolver::dense;
  else
    throw InvalidArgument("--solver must be lanczos or dense, got '" + solver + "'");
  problem.certify = p.flag("certify");
  const int m = p.count("m", 3);
  const std::vector<double> hs = parse_grid(p.text("h-grid"));

  std::vector<SpectralReport> reports(hs.size());
  parallel_for(hs.size(), [&](std::size_t i) { reports[i] = solve_spectrum(problem, hs[i], m); });

  Outcome outcome;
  for (const SpectralReport& r : reports) {
    Row row;
    row.add("N", static_cast<long long>(r.n))
        .add("mu", r.mu)
        .add("h", r.h)
        .add("grid_points", static_cast<long long>(r.grid_points))
        .add("half_width", r.half_width)
        .add("eigenvalues", r.eigenvalues)
        .add("lambda_gap", r.lambda_gap)
        .add("ek_prediction", r.ek_prediction)
        .add("rel_error", r.rel_error)
        .add("second_gap_ratio", r.second_gap_ratio)
        .add("ground_ratio", r.ground_ratio)
        .add("kernel_ok", r.kernel_ok)
        .add("refinement_change", problem.certify ? Cell(r.refinement_change) : Cell(std::monostate{}))
        .add("certificate_ok", r.certificate_ok)
        .add("iterations", static_cast<long long>(r.iterations));
    outcome.table.rows.push_back(std::move(row));
    if (outcome.status == 0 && (!r.kernel_ok || (problem.certify && !r.certificate_ok))) {
      outcome.status = 3;
      outcome.kind = "numerical_failure";
      outcome.message = std::string(r.kernel_ok ? "grid refinement changed the spectrum" : "ground state not in the kernel") +
                        " at h = " + std::to_string(r.h);
    }
  }
  return outcome;
}

Outcome run_convexify(const Params& p) {
  ConvexificationParams cp;
  cp.alpha = p.real("alpha");
  cp.beta = p.real("beta");
  cp.n = p.count("cutoff-n");
  cp.validate();
  const double mu = p.real("mu");
  const double delta = p.real("delta");
  FloorSweep sweep_spec;
  sweep_spec.sizes = parse_int_grid(p.text("n-grid"));
  sweep_spec.samples_per_size = p.count("samples");
  sweep_spec.grid_points = p.count("sweep-points", 2);
  sweep_spec.seed = p.seed();
  const std::vector<double> hs = parse_grid(p.text("h-grid"));

  const CutoffFunction theta = build_cutoff(cp.n);
  const FloorCertificate floor = hessian_floor(cp, mu, sweep_spec);
  const auto per_particle = perturbation_bounds(cp, 1);

  std::vector<LogSobolevBound> bounds(hs.size());
  parallel_for(hs.size(), [&](std::size_t i) { bounds[i] = logsob_lower_bound(delta, hs[i], mu); });

  Outcome outcome;
  for (std::size_t i = 0; i < hs.size(); ++i) {
    const LogSobolevBound& b = bounds[i];
    Row row;
    row.add("alpha", cp.alpha)
        .add("beta", cp.beta)
        .add("cutoff_n", static_cast<long long>(cp.n))
        .add("mu", mu)
        .add("floor_1d", floor.one_d_min)
        .add("floor_1d_at", floor.one_d_argmin)
        .add("floor_sampled", floor.sampled_min)
        .add("floor", floor.floor)
        .add("floor_certified", floor.certified)
        .add("cutoff_min_second", theta.min_second())
        .add("cutoff_required_floor", theta.required_floor())
        .add("w_lower_per_particle", per_particle[0])
        .add("w_upper_per_particle", per_particle[1])
        .add("h", hs[i])
        .add("delta", delta)
        .add("logsob_alpha", b.chosen.alpha)
        .add("logsob_beta", b.chosen.beta)
        .add("logsob_cutoff_n", static_cast<long long>(b.chosen.n))
        .add("oscillation_rate", b.oscillation_rate)
        .add("target_rate", b.target_rate)
        .add("logsob_floor", b.hessian_floor)
        .add("logsob_bound", b.bound)
        .add("target_bound", b.target_bound);
    outcome.table.rows.push_back(std::move(row));
  }
  if (!floor.certified) {
    outcome.status = 4;
    outcome.kind = "precondition";
    outcome.message = "Hessian floor " + std::to_string(floor.floor) + " below beta";
  }
  return outcome;
}

SimulationConfig simulation_config(const Params& p) {
  SimulationConfig config(RingParameters(p.count("n"), p.real("mu"), p.real("h")));
  config.dt = p.is_auto("dt") ? 0.0 : p.real("dt");
  if (!p.is_auto("dt") && !(config.dt > 0)) throw InvalidArgument("--dt must be positive or auto");
  config.total_time = p.real("t");
  config.replicas = p.count("replicas");
  config.seed = p.seed();
  const std::string& init = p.text("init");
  if (init == "i_plus")
    config.initial.kind = InitialKind::at_i_plus;
  else if (init == "i_minus")
    config.initial.kind = InitialKind::at_i_minus;
  else
    throw InvalidArgument("--init must be i_plus or i_minus, got '" + init + "'");
  config.deterministic = p.flag("deterministic");
  config.validate();
  return config;
}

Outcome run_simulate(const Params& p, const RunSpec& spec, std::string& trajectory) {
  const SimulationConfig config = simulation_config(p);
  const double burn_in = p.is_auto("burn-in") ? 0.05 * config.total_time : p.real("burn-in");
  const std::string& mode = p.text("mode");

  Outcome outcome;
  Row row;
  row.add("N", static_cast<long long>(config.params.n()))
      .add("mu", config.params.mu())
      .add("h", config.params.h())
      .add("dt", config.step_size())
      .add("t", config.total_time)
      .add("replicas", static_cast<long long>(config.replicas));

  if (mode == "gap") {
    const double prediction = prefactor(config.params).p_n * std::exp(-0.25 / config.params.h());
    const double lag_max = p.is_auto("lag-max") ? 1.0 / prediction : p.real("lag-max");
    const double lag_min = p.is_auto("lag-min") ? std::min(2.0, 0.25 * lag_max) : p.real("lag-min");
    const GapEstimate g = estimate_gap(config, burn_in, lag_min, lag_max);
    row.add("rate", g.rate)
        .add("stderr", g.stderr_)
        .add("ek_prediction", g.ek_prediction)
        .add("ratio", g.ratio)
        .add("lag_min", g.lag_min)
        .add("lag_max", g.lag_max)
        .add("fit_rms", g.fit_rms)
        .add("low_confidence", g.low_confidence)
        .add("warning", g.warning);
    outcome.table.rows.push_back(std::move(row));
  } else if (mode == "transition") {
    const TransitionEstimate t = estimate_transition_time(config, p.real("radius"));
    row.add("radius", p.real("radius"))
        .add("mean_time", t.transitions > 0 ? Cell(t.mean_time) : Cell(std::monostate{}))
        .add("stderr", t.transitions > 1 ? Cell(t.stderr_) : Cell(std::monostate{}))
        .add("transitions", static_cast<long long>(t.transitions))
        .add("censored", static_cast<long long>(t.censored));
    outcome.table.rows.push_back(std::move(row));
  } else if (mode == "histogram") {
    const Histogram hist = mean_histogram(config, burn_in, p.count("bins", 2), p.real("range"));
    const BimodalityReport b = analyze_bimodality(hist);
    const double width = (hist.hi - hist.lo) / static_cast<double>(hist.density.size());
    for (std::size_t i = 0; i < hist.density.size(); ++i) {
      Row bin;
      bin.add("xbar", hist.lo + (static_cast<double>(i) + 0.5) * width)
          .add("density", hist.density[i])
          .add("bimodal", b.bimodal)
          .add("symmetric", b.symmetric)
          .add("asymmetry", b.asymmetry);
      outcome.table.rows.push_back(std::move(bin));
    }
  } else if (mode == "trajectory") {
    if (spec.output_format != OutputFormat::csv) throw InvalidArgument("mode=trajectory writes CSV only");
    const int replica = p.count("replica", 0);
    if (replica >= config.replicas) throw InvalidArgument("--replica must be below --replicas");
    std::ostringstream out;
    write_trajectory(config, replica, p.count("thin"), out);
    trajectory = out.str();
  } else {
    throw InvalidArgument("--mode must be gap, transition, histogram or trajectory, got '" + mode + "'");
  }
  return outcome;
}

}  // namespace

Outcome execute(const RunSpec& spec, std::string& raw_csv) {
  const Params p(spec);
  switch (spec.command) {
    case Command::model: return run_model(p);
    case Command::prefactor: return run_prefactor(p);
    case Command::partition: return run_partition(p);
    case Command::quasimode: return run_quasimode(p);
    case Command::spectrum: return run_spectrum(p);
    case Command::convexify: return run_convexify(p);
    case Command::simulate: return run_simulate(p, spec, raw_csv);
  }
  throw InvalidArgument("unknown command");
}

}  // namespace kramers::cli
