// Acceptance suite: one PASS/FAIL line per criterion. Runs every criterion by
// default, or one with --criterion k. Exit status 1 if any selected criterion
// fails.

#include "kramers/convexifier.hpp"
#include "kramers/dynamics.hpp"
#include "kramers/fit.hpp"
#include "kramers/gaussian_lab.hpp"
#include "kramers/laplace_partition.hpp"
#include "kramers/parallel.hpp"
#include "kramers/quasimode.hpp"
#include "kramers/ring_model.hpp"
#include "kramers/rng.hpp"
#include "kramers/witten_spectrum.hpp"
#include "kramers_cli/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace kramers;

namespace {

constexpr double kMu = 2.0;
const std::vector<double> kSpectrumH = {0.1, 0.07, 0.05};
const std::vector<double> kSweepH = {0.2, 0.1, 0.05, 0.025};

struct Verdict {
  bool pass = true;
  std::string detail;

  // Records one sub-check; the criterion passes only if all of them do.
  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "[x] ") + what;
  }
};

std::string fmt(const char* format, auto... args) {
  char buffer[256];
  std::snprintf(buffer, sizeof buffer, format, args...);
  return buffer;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

RingParameters ring(int n, double h) { return RingParameters(n, kMu, h); }

SecondGapCertificate n1_certificate() {
  return second_gap_certificate(WittenProblem(ring(1, kSpectrumH[0])), kSpectrumH);
}

double n1_gap(double h) {
  WittenProblem problem(ring(1, h));
  return solve_spectrum(problem, h).lambda_gap;
}

// 1. prefactor convergence
Verdict criterion_1() {
  const auto start = std::chrono::steady_clock::now();
  Verdict v;
  const double limit = prefactor_limit(kMu);
  double previous = INFINITY;
  bool monotone = true;
  double p4096 = 0.0;
  for (int n = 2; n <= 4096; n *= 2) {
    const PrefactorReport r = prefactor(ring(n, 0.1));
    const double gap = std::abs(r.p_n - limit);
    monotone = monotone && gap < previous;
    previous = gap;
    if (n == 4096) p4096 = r.p_n;
  }
  const double rel = std::abs(p4096 - limit) / limit;
  v.check(monotone, "|p(N) - limit| decreasing over N = 2..4096");
  v.check(rel < 5e-5, fmt("p(4096) = %.8f vs limit %.8f, rel %.2e < 5e-5", p4096, limit, rel));
  const double t = seconds_since(start);
  v.check(t < 1.0, fmt("runtime %.3f s < 1 s", t));
  return v;
}

// 2. Eyring-Kramers at N = 1
Verdict criterion_2() {
  Verdict v;
  std::vector<double> inv_h, log_gap, errors;
  double worst_time = 0.0;
  for (double h : kSpectrumH) {
    const auto start = std::chrono::steady_clock::now();
    WittenProblem problem(ring(1, h));
    const SpectralReport r = solve_spectrum(problem, h);
    worst_time = std::max(worst_time, seconds_since(start));
    v.check(r.grid_points >= 4001, fmt("h=%.2f grid %d >= 4001", h, r.grid_points));
    inv_h.push_back(1.0 / h);
    log_gap.push_back(std::log(r.lambda_gap));
    errors.push_back(std::abs(r.rel_error));
  }
  v.check(errors[0] <= 0.15, fmt("rel error at h=0.1: %.4f <= 0.15", errors[0]));
  const bool decreasing = errors[1] < errors[0] && errors[2] < errors[1];
  v.check(decreasing, fmt("rel error decreasing in h: %.4f, %.4f, %.4f", errors[0], errors[1], errors[2]));
  const LinearFit fit = fit_line(inv_h, log_gap);
  const double dev = std::abs(fit.slope / -0.25 - 1.0);
  v.check(dev <= 0.03, fmt("exponent %.5f vs -1/4, deviation %.2f%% <= 3%%", fit.slope, 100 * dev));
  v.check(worst_time < 60.0, fmt("slowest h %.1f s < 60 s", worst_time));
  return v;
}

// 3. second gap at N = 1 (three temperatures) and N = 2 (h = 0.1, 301^2)
Verdict criterion_3() {
  Verdict v;
  const SecondGapCertificate one = n1_certificate();
  v.check(one.pass, fmt("N=1: ell = %.4f >= 0.1, delta = %.4f, two eigenvalues below ell h", one.ell, one.delta));

  const auto start = std::chrono::steady_clock::now();
  WittenProblem two(ring(2, 0.1));
  two.grid_points = 301;
  const SecondGapCertificate cert = second_gap_certificate(two, {0.1});
  const double t = seconds_since(start);
  v.check(cert.pass, fmt("N=2 h=0.1 301^2: ell = %.4f >= 0.1, delta = %.4f", cert.ell, cert.delta));
  v.check(t < 600.0, fmt("N=2 runtime %.1f s < 600 s", t));
  return v;
}

// 4. sandwich at N = 1, h = 0.05
Verdict criterion_4() {
  Verdict v;
  const double h = 0.05;
  const double delta = n1_certificate().delta;
  const double gap = n1_gap(h);
  const SandwichResult s = sandwich_lower_bound(ring(1, h), delta, IntegrationMethod::quadrature);
  v.check(s.valid, fmt("Dirichlet form %.6e below delta/2 = %.4f", s.upper, delta / 2));
  v.check(s.lower <= gap && gap <= s.upper,
          fmt("lower %.6e <= gap %.6e <= upper %.6e", s.lower, gap, s.upper));
  const double width = s.lower > 0.0 ? s.upper / s.lower - 1.0 : INFINITY;
  v.check(width <= 0.2, fmt("upper/lower - 1 = %.4f <= 0.2 (E = %.4e, eps = %.4f)", width, s.e_functional,
                            s.epsilon_used));
  return v;
}

// |y| ≈ C h through the origin
ProportionalFit fit_abs(const std::vector<double>& y) {
  std::vector<double> a(y.size());
  std::transform(y.begin(), y.end(), a.begin(), [](double e) { return std::abs(e); });
  return fit_through_origin(kSweepH, a);
}

// 5. Z asymptotics at N = 1, 2
Verdict criterion_5() {
  Verdict v;
  for (int n : {1, 2}) {
    const auto start = std::chrono::steady_clock::now();
    std::vector<double> eps;
    for (double h : kSweepH) eps.push_back(partition_function(ring(n, h), IntegrationMethod::quadrature).epsilon);
    const double t = seconds_since(start);
    const ProportionalFit f = fit_abs(eps);
    v.check(f.coefficient > 0.0 && f.relative_residual < 0.2,
            fmt("N=%d: eps = %.4g, %.4g, %.4g, %.4g; C = %.4f, residual %.1f%% < 20%%", n, eps[0], eps[1], eps[2],
                eps[3], f.coefficient, 100 * f.relative_residual));
    v.check(t < 60.0, fmt("N=%d quadrature %.1f s < 60 s", n, t));
  }
  return v;
}

// 6. quasimode Dirichlet form
Verdict criterion_6() {
  Verdict v;
  for (int n : {1, 2}) {
    std::vector<double> eps;
    for (double h : kSweepH)
      eps.push_back(quasimode_integrals(ring(n, h), IntegrationMethod::quadrature).dirichlet_ratio - 1.0);
    const ProportionalFit f = fit_abs(eps);
    v.check(f.coefficient > 0.0 && f.relative_residual < 0.25,
            fmt("N=%d: ratio - 1 = %.4g, %.4g, %.4g, %.4g; C = %.4f, residual %.1f%% < 25%%", n, eps[0], eps[1],
                eps[2], eps[3], f.coefficient, 100 * f.relative_residual));
  }
  for (int n : {4, 8}) {
    const QuasimodeIntegrals q = quasimode_integrals(ring(n, 0.1), IntegrationMethod::importance_mc);
    const double se = q.dirichlet_ratio_stderr.value_or(0.0);
    const double z = std::abs(q.dirichlet_ratio - 1.0) / se;
    v.check(z <= 3.0, fmt("N=%d h=0.1: ratio %.4f +- %.4f, %.1f SE from 1 (<= 3)", n, q.dirichlet_ratio, se, z));
  }
  return v;
}

// 7. E-functional scaling band
Verdict criterion_7() {
  Verdict v;
  for (int n : {1, 2}) {
    std::vector<double> s;
    for (double h : kSweepH) s.push_back(quasimode_integrals(ring(n, h), IntegrationMethod::quadrature).e_scaling);
    const auto [lo, hi] = std::minmax_element(s.begin(), s.end());
    const double band = *hi / *lo;
    v.check(*lo > 0.0 && band <= 3.0,
            fmt("N=%d: scaled E = %.4g, %.4g, %.4g, %.4g; max/min %.3f <= 3", n, s[0], s[1], s[2], s[3], band));
  }
  return v;
}

// 8. Gaussian moments against Monte Carlo
Verdict criterion_8() {
  Verdict v;
  constexpr std::size_t kSamples = 1'000'000;
  constexpr std::size_t kStreams = 20;
  const double h = 0.1;
  for (int n : {4, 16, 64}) {
    const RingParameters p = ring(n, h);
    const GaussianOperator op = build_operator(p, 0.0, 2.0);
    struct Sums {
      double s4 = 0, q4 = 0, s6 = 0, q6 = 0;
    };
    std::vector<Sums> parts(kStreams);
    parallel_for(kStreams, [&](std::size_t b) {
      RandomStream rng(2024, b);
      Sums& acc = parts[b];
      for (std::size_t i = 0; i < kSamples / kStreams; ++i) {
        const Vector x = draw_gaussian(op, p, rng);
        const double m4 = x.array().pow(4).mean();
        const double m6 = x.array().pow(6).mean();
        acc.s4 += m4;
        acc.q4 += m4 * m4;
        acc.s6 += m6;
        acc.q6 += m6 * m6;
      }
    });
    Sums total;
    for (const Sums& s : parts) {
      total.s4 += s.s4;
      total.q4 += s.q4;
      total.s6 += s.s6;
      total.q6 += s.q6;
    }
    const double count = static_cast<double>(kSamples);
    for (int power : {4, 6}) {
      const double sum = power == 4 ? total.s4 : total.s6;
      const double sq = power == 4 ? total.q4 : total.q6;
      const double mean = sum / count;
      const double se = std::sqrt((sq / count - mean * mean) / (count - 1));
      const double exact = closed_form_moment(op, p, power);
      const double z = std::abs(mean - exact) / se;
      v.check(z <= 3.0, fmt("N=%d p=%d: MC %.6e vs %.6e, %.2f SE", n, power, mean, exact, z));
    }
  }
  return v;
}

// 9. convexification certificate
Verdict criterion_9() {
  Verdict v;
  const ConvexificationParams cp{0.6, 0.1, 100};
  FloorSweep sweep;
  sweep.sizes.clear();
  for (int n = 1; n <= 32; ++n) sweep.sizes.push_back(n);
  sweep.samples_per_size = 300;
  sweep.grid_points = 10000;
  const FloorCertificate floor = hessian_floor(cp, kMu, sweep);
  v.check(floor.sampled_min >= 0.0999, fmt("sampled min eigenvalue %.6f >= 0.0999 over N = 1..32", floor.sampled_min));
  v.check(floor.one_d_min >= 0.0999, fmt("coordinate sweep min %.6f >= 0.0999", floor.one_d_min));

  const CutoffFunction theta = build_cutoff(cp.n);
  double min_second = INFINITY;
  bool shape = true;
  for (int i = 0; i < 10000; ++i) {
    const double r = -2.0 + 4.0 * (i + 0.5) / 10000;
    min_second = std::min(min_second, theta.second(r));
    const double t = theta.value(r);
    shape = shape && t >= 0.0 && t <= 1.0;
  }
  v.check(shape && min_second >= theta.required_floor(),
          fmt("theta'' >= %.4f on 1e4 points (floor %.4f), 0 <= theta <= 1", min_second, theta.required_floor()));

  RandomStream rng(99, 0);
  const double c = cp.c_alpha_beta();
  bool bounded = true;
  for (int i = 0; i < 10000; ++i) {
    const int n = 1 + i % 32;
    const RingParameters p = ring(n, 0.1);
    Vector x(n);
    for (int k = 0; k < n; ++k) x[k] = (2.0 * rng.uniform() - 1.0) * 1.6 / c;
    const double w = perturbation_W(cp, theta, p, x);
    const auto b = perturbation_bounds(cp, n);
    bounded = bounded && w >= b[0] - 1e-12 && w <= b[1] + 1e-12;
  }
  v.check(bounded, "-N/4 <= W <= (N/4)((1+beta)^2/(1-alpha) - 1) on 1e4 points");

  const double delta = n1_certificate().delta;
  for (double h : kSpectrumH) {
    const LogSobolevBound ls = logsob_lower_bound(delta, h, kMu);
    const double gap = n1_gap(h);
    v.check(ls.bound <= gap, fmt("h=%.2f: log-Sobolev bound %.4e <= gap %.4e", h, ls.bound, gap));
  }
  return v;
}

// 10. dynamics against the eigensolver at N = 1, h = 0.15
Verdict criterion_10() {
  Verdict v;
  const auto start = std::chrono::steady_clock::now();
  const double h = 0.15;
  SimulationConfig cfg(ring(1, h));
  cfg.replicas = 16;
  cfg.seed = 7;
  const double prediction = prefactor(cfg.params).p_n * std::exp(-0.25 / h);
  cfg.total_time = std::ceil(200.0 / prediction);
  const GapEstimate g = estimate_gap(cfg, 0.05 * cfg.total_time);
  const double gap = n1_gap(h);
  const double rel = std::abs(g.rate / gap - 1.0);
  v.check(cfg.total_time >= 50.0 / prediction, fmt("T = %.0f >= 50/prediction = %.0f", cfg.total_time, 50.0 / prediction));
  v.check(rel <= 0.3, fmt("fitted rate %.5f +- %.5f vs eigensolver gap %.5f, rel %.3f <= 0.3", g.rate, g.stderr_, gap, rel));

  const Histogram hist = mean_histogram(cfg, 0.05 * cfg.total_time);
  const BimodalityReport b = analyze_bimodality(hist);
  v.check(b.bimodal && b.symmetric, fmt("histogram modes %.2f, %.2f, dip %.3f, asymmetry %.3f", b.left_mode,
                                        b.right_mode, b.dip_ratio, b.asymmetry));
  const double t = seconds_since(start);
  v.check(t < 300.0, fmt("runtime %.1f s < 300 s", t));
  return v;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// 11. manifest re-runs are bit identical, also across worker counts
Verdict criterion_11() {
  Verdict v;
  const auto dir = std::filesystem::temp_directory_path() / "kramers_acceptance_11";
  std::filesystem::create_directories(dir);
  struct Case {
    std::string name;
    std::vector<std::string> args;
    std::string extension;
  };
  const std::vector<Case> cases = {
      {"model", {"model", "--n", "8", "--mu", "2.5"}, ".json"},
      {"prefactor", {"prefactor"}, ".csv"},
      {"partition_quad", {"partition", "--n", "2", "--h-grid", "0.2,0.1"}, ".json"},
      {"partition_mc", {"partition", "--n", "6", "--method", "mc", "--h-grid", "0.1", "--samples", "20000"}, ".json"},
      {"quasimode", {"quasimode", "--n", "4", "--method", "mc", "--h-grid", "0.1", "--samples", "20000"}, ".json"},
      {"spectrum", {"spectrum", "--h-grid", "0.1", "--grid", "801", "--certify", "false"}, ".json"},
      {"convexify", {"convexify", "--n-grid", "1,3", "--samples", "50", "--sweep-points", "2000"}, ".json"},
      {"simulate_gap", {"simulate", "--t", "300", "--replicas", "3"}, ".json"},
      {"simulate_traj", {"simulate", "--mode", "trajectory", "--t", "20", "--thin", "10"}, ".csv"},
  };
  for (const Case& c : cases) {
    const auto first = dir / (c.name + c.extension);
    const auto again = dir / (c.name + "_rerun" + c.extension);
    std::ostringstream out, err;
    std::vector<std::string> args = {"--threads", "3", "--out", first.string()};
    args.insert(args.end(), c.args.begin(), c.args.end());
    const int s1 = cli::main_entry(args, out, err);
    const auto manifest = c.extension == ".csv" ? std::filesystem::path(first.string() + ".manifest.json") : first;
    const int s2 = cli::main_entry({"--threads", "1", "--from-manifest", manifest.string(), "--out", again.string()},
                                   out, err);
    const std::string a = slurp(first);
    const std::string b = slurp(again);
    v.check(s1 == s2 && !a.empty() && a == b,
            fmt("%s: status %d/%d, %zu bytes, %s", c.name.c_str(), s1, s2, a.size(), a == b ? "identical" : "differs"));
  }
  set_thread_count(0);
  std::filesystem::remove_all(dir);
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria, one PASS/FAIL line each", "kramers_acceptance"};
  int only = 0;
  app.add_option("--criterion", only, "run a single criterion (1-11)")->check(CLI::Range(1, 11));
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::function<Verdict()>> criteria = {
      criterion_1, criterion_2, criterion_3, criterion_4,  criterion_5, criterion_6,
      criterion_7, criterion_8, criterion_9, criterion_10, criterion_11,
  };
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int k = static_cast<int>(i) + 1;
    if (only != 0 && only != k) continue;
    Verdict v;
    try {
      v = criteria[i]();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    all = all && v.pass;
    std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << k << ": " << v.detail << std::endl;
  }
  return all ? 0 : 1;
}
