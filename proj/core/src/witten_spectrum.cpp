#include "kramers/witten_spectrum.hpp"

#include "kramers/error.hpp"
#include "kramers/gaussian_lab.hpp"
#include "kramers/parallel.hpp"
#include "kramers/rng.hpp"
#include "ring_integrals.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace kramers {
namespace {

constexpr double kKernelRatio = 1e-3;
constexpr double kCertificateChange = 0.01;
constexpr double kEllThreshold = 0.1;

// Node coordinates along one axis, boundary nodes included.
std::vector<double> axis(double half_width, int points) {
  std::vector<double> x(points);
  const double dx = 2.0 * half_width / (points - 1);
  for (int i = 0; i < points; ++i) x[i] = -half_width + dx * i;
  x.back() = half_width;
  return x;
}

double f_value(const RingParameters& params, const double* x) {
  const int n = params.n();
  double z[2];
  const double s = std::sqrt(static_cast<double>(n));
  for (int k = 0; k < n; ++k) z[k] = s * x[k];
  return detail::energy_at(params, z) / (2.0 * n);
}

void require_small(const RingParameters& params) {
  if (params.n() != 1 && params.n() != 2) throw InvalidArgument("witten_spectrum: only N in {1,2} is supported");
}

// Values of a callable on the interior nodes in solver order.
template <class F>
Vector on_interior(int n, const std::vector<double>& x, F&& fn) {
  const int m = static_cast<int>(x.size()) - 2;
  Vector out(n == 1 ? m : m * m);
  if (n == 1) {
    for (int i = 0; i < m; ++i) out[i] = fn(&x[i + 1]);
  } else {
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        const double p[2] = {x[i + 1], x[j + 1]};
        out[i * m + j] = fn(p);
      }
    }
  }
  return out;
}

}  // namespace

FValue build_f(const RingParameters& params, const Vector& x) {
  require_dimension(params, x, "build_f");
  const int n = params.n();
  const double s = std::sqrt(static_cast<double>(n));
  const Vector z = s * x;
  FValue out;
  out.value = energy(params, z) / (2.0 * n);
  out.gradient = gradient(params, z) / (2.0 * s);
  // ΔV(z) = Σ(3z_k² − 1) + tr K
  double trace_k = 0.0;
  for (double nu : k_spectrum(n, params.mu())) trace_k += nu;
  out.laplacian = 0.5 * ((3.0 * z.array().square() - 1.0).sum() + trace_k);
  return out;
}

double directional_gradient_constant(const RingParameters& params, const Vector& x) {
  require_dimension(params, x, "directional_gradient_constant");
  const double s = std::sqrt(static_cast<double>(params.n()));
  const double x_hat0 = x.sum() / s;
  return 0.5 * s * x.array().cube().sum() - 0.5 * x_hat0;
}

double directional_laplacian_constant(const RingParameters& params, const Vector& x) {
  require_dimension(params, x, "directional_laplacian_constant");
  return 0.5 * (3.0 * x.squaredNorm() - 1.0);
}

Matrix hessian_f(const RingParameters& params, const Vector& x) {
  require_dimension(params, x, "hessian_f");
  const int n = params.n();
  Matrix hess = k_matrix(params);
  for (int k = 0; k < n; ++k) hess(k, k) += -1.0 + 3.0 * n * x[k] * x[k];
  return 0.5 * hess;
}

std::string_view to_string(Discretization d) { return d == Discretization::factored ? "factored" : "pointwise"; }

Discretization parse_discretization(std::string_view text) {
  if (text == "factored") return Discretization::factored;
  if (text == "pointwise") return Discretization::pointwise;
  throw InvalidArgument("unknown discretization '" + std::string(text) + "'");
}

WittenProblem::WittenProblem(RingParameters p) : params(p) { require_small(params); }

double WittenProblem::box() const {
  return half_width > 0.0 ? half_width : 2.5 / std::sqrt(static_cast<double>(params.n()));
}

int WittenProblem::points() const {
  if (grid_points > 0) return grid_points;
  return params.n() == 1 ? 4001 : 301;
}

SparseMatrix witten_matrix(const WittenProblem& problem, double h, int grid_points) {
  const RingParameters params = problem.params.with_h(h);
  require_small(params);
  if (grid_points < 5) throw InvalidArgument("witten_matrix: need at least 5 grid points");
  const int n = params.n();
  const auto x = axis(problem.box(), grid_points);
  const double dx = x[1] - x[0];
  const int g = grid_points;
  const int m = g - 2;
  const Eigen::Index size = n == 1 ? m : static_cast<Eigen::Index>(m) * m;
  const double hop = (h / dx) * (h / dx);

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(size) * (2 * n + 1));

  if (problem.discretization == Discretization::factored) {
    // f on every node, boundary included
    std::vector<double> f(n == 1 ? g : static_cast<std::size_t>(g) * g);
    if (n == 1) {
      for (int i = 0; i < g; ++i) f[i] = f_value(params, &x[i]);
    } else {
      for (int i = 0; i < g; ++i) {
        for (int j = 0; j < g; ++j) {
          const double p[2] = {x[i], x[j]};
          f[static_cast<std::size_t>(i) * g + j] = f_value(params, p);
        }
      }
    }
    auto full = [&](int i, int j) { return n == 1 ? f[i] : f[static_cast<std::size_t>(i) * g + j]; };
    auto row = [&](int i, int j) -> Eigen::Index { return n == 1 ? i - 1 : static_cast<Eigen::Index>(i - 1) * m + (j - 1); };
    auto interior = [&](int i) { return i >= 1 && i <= g - 2; };

    const int jmax = n == 1 ? 1 : g - 1;
    for (int i = 1; i <= g - 2; ++i) {
      for (int j = (n == 1 ? 0 : 1); j < jmax; ++j) {
        const Eigen::Index r = row(i, j);
        const double fc = full(i, j);
        double diag = 0.0;
        const int di[4] = {1, -1, 0, 0};
        const int dj[4] = {0, 0, 1, -1};
        for (int e = 0; e < 2 * n; ++e) {
          const int ii = i + di[e];
          const int jj = j + dj[e];
          diag += hop * std::exp((fc - full(ii, jj)) / h);
          if (interior(ii) && (n == 1 || interior(jj))) triplets.emplace_back(r, row(ii, jj), -hop);
        }
        triplets.emplace_back(r, r, diag);
      }
    }
  } else {
    const Vector potential = on_interior(n, x, [&](const double* p) {
      Vector y(n);
      for (int k = 0; k < n; ++k) y[k] = p[k];
      const FValue fv = build_f(params, y);
      return fv.gradient.squaredNorm() - h * fv.laplacian;
    });
    for (Eigen::Index r = 0; r < size; ++r) {
      triplets.emplace_back(r, r, 2.0 * n * hop + potential[r]);
      if (n == 1) {
        if (r > 0) triplets.emplace_back(r, r - 1, -hop);
        if (r + 1 < size) triplets.emplace_back(r, r + 1, -hop);
      } else {
        const Eigen::Index i = r / m, j = r % m;
        if (i > 0) triplets.emplace_back(r, r - m, -hop);
        if (i + 1 < m) triplets.emplace_back(r, r + m, -hop);
        if (j > 0) triplets.emplace_back(r, r - 1, -hop);
        if (j + 1 < m) triplets.emplace_back(r, r + 1, -hop);
      }
    }
  }

  SparseMatrix a(size, size);
  a.setFromTriplets(triplets.begin(), triplets.end());
  a.makeCompressed();
  return a;
}

namespace {

struct RawSpectrum {
  std::vector<double> values;
  int iterations = 0;
};

RawSpectrum lowest_eigenvalues(const WittenProblem& problem, double h, int grid_points, int m) {
  const SparseMatrix a = witten_matrix(problem, h, grid_points);
  RawSpectrum out;
  if (problem.solver == EigenSolver::dense) {
    if (problem.params.n() != 1) throw InvalidArgument("solve_spectrum: dense solver is only available for N = 1");
    std::vector<double> d(a.rows()), e(a.rows() - 1);
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      d[i] = a.coeff(i, i);
      if (i + 1 < a.rows()) e[i] = a.coeff(i, i + 1);
    }
    auto all = tridiagonal_eigenvalues(d, e);
    out.values.assign(all.begin(), all.begin() + std::min<std::size_t>(m, all.size()));
    return out;
  }
  LanczosOptions opts;
  opts.wanted = m;
  opts.shift = -0.05 * h;
  const auto res = shift_invert_lanczos(a, opts);
  if (!res.converged) throw NumericalFailure("solve_spectrum: Lanczos did not converge");
  out.values = res.eigenvalues;
  out.iterations = res.iterations;
  return out;
}

}  // namespace

SpectralReport solve_spectrum(const WittenProblem& problem, double h, int m) {
  if (!(h > 0.0)) throw InvalidArgument("solve_spectrum: h must be positive");
  if (m < 3) throw InvalidArgument("solve_spectrum: need at least 3 eigenvalues");
  const RingParameters params = problem.params.with_h(h);
  SpectralReport rep;
  rep.n = params.n();
  rep.mu = params.mu();
  rep.h = h;
  rep.grid_points = problem.points();
  rep.half_width = problem.box();

  const auto coarse = lowest_eigenvalues(problem, h, rep.grid_points, m);
  rep.eigenvalues = coarse.values;
  rep.iterations = coarse.iterations;
  const double l0 = rep.eigenvalues[0], l1 = rep.eigenvalues[1], l2 = rep.eigenvalues[2];
  rep.lambda_gap = l1 / h;
  rep.second_gap_ratio = l2 / h;
  rep.ek_prediction = prefactor(params).p_n * std::exp(-0.25 / h);
  rep.rel_error = rep.lambda_gap / rep.ek_prediction - 1.0;
  rep.ground_ratio = std::abs(l0) / l1;
  rep.kernel_ok = rep.ground_ratio < kKernelRatio;

  if (problem.certify) {
    const auto fine = lowest_eigenvalues(problem, h, 2 * rep.grid_points - 1, m);
    rep.refined_eigenvalues = fine.values;
    double change = 0.0;
    for (std::size_t i = 1; i < fine.values.size() && i < rep.eigenvalues.size(); ++i) {
      change = std::max(change, std::abs(fine.values[i] - rep.eigenvalues[i]) / std::abs(fine.values[i]));
    }
    rep.refinement_change = change;
    rep.certificate_ok = change < kCertificateChange;
  }
  return rep;
}

SecondGapCertificate second_gap_certificate(const WittenProblem& problem, const std::vector<double>& h_grid, int m) {
  if (h_grid.empty()) throw InvalidArgument("second_gap_certificate: h grid is empty");
  SecondGapCertificate cert;
  cert.reports.resize(h_grid.size());
  parallel_for(h_grid.size(), [&](std::size_t i) { cert.reports[i] = solve_spectrum(problem, h_grid[i], m); });

  cert.ell = std::numeric_limits<double>::infinity();
  cert.delta = std::numeric_limits<double>::infinity();
  for (const auto& r : cert.reports) {
    cert.ell = std::min(cert.ell, r.second_gap_ratio);
    cert.delta = std::min(cert.delta, r.second_gap_ratio - r.lambda_gap);
  }
  bool two_below = true;
  for (const auto& r : cert.reports) {
    int below = 0;
    for (double v : r.eigenvalues) below += v < cert.ell * r.h ? 1 : 0;
    two_below = two_below && below == 2;
  }
  cert.pass = cert.ell >= kEllThreshold && two_below;
  return cert;
}

double generator_gap_1d(double mu, double h, double half_width, int grid_points) {
  if (grid_points < 5) throw InvalidArgument("generator_gap_1d: need at least 5 grid points");
  if (!(mu > 1.0) || !(h > 0.0)) throw InvalidArgument("generator_gap_1d: need mu > 1 and h > 0");
  const auto x = axis(half_width, grid_points);
  const double dx = x[1] - x[0];
  const int g = grid_points;
  // row i: lower_i u_{i−1} + diag u_i + upper_i u_{i+1}
  std::vector<double> lower(g), upper(g);
  const double diffusion = h / (dx * dx);
  for (int i = 0; i < g; ++i) {
    const double drift = x[i] * x[i] * x[i] - x[i];  // V'(x); K vanishes at N = 1
    lower[i] = -diffusion - drift / (2.0 * dx);
    upper[i] = -diffusion + drift / (2.0 * dx);
  }
  // reflecting ends: the ghost value equals the first interior neighbour
  upper[0] += lower[0];
  lower[0] = 0.0;
  lower[g - 1] += upper[g - 1];
  upper[g - 1] = 0.0;

  std::vector<double> d(g, 2.0 * diffusion), e(g - 1);
  for (int i = 0; i + 1 < g; ++i) {
    const double product = upper[i] * lower[i + 1];
    if (!(product > 0.0)) throw NumericalFailure("generator_gap_1d: grid too coarse for symmetrization");
    e[i] = -std::sqrt(product);
  }
  return tridiagonal_eigenvalues(d, e)[1];
}

std::vector<PartitionMember> two_piece_partition(int n, double center, double width) {
  if (!(width > 0.0)) throw InvalidArgument("two_piece_partition: width must be positive");
  const auto bump = [](double u) { return u > 0.0 ? std::exp(-1.0 / u) : 0.0; };
  const auto bump_d = [bump](double u) { return u > 0.0 ? bump(u) / (u * u) : 0.0; };
  // smooth step s on [−1, 1] and its derivative
  const auto step = [=](double t, double& s, double& ds) {
    const double a = bump(t + 1.0), b = bump(1.0 - t);
    const double sum = a + b;
    s = a / sum;
    ds = (bump_d(t + 1.0) * b + a * bump_d(1.0 - t)) / (sum * sum);
  };
  const auto angle = [=](const double* x, double& phi, double& dphi) {
    double xbar = 0.0;
    for (int k = 0; k < n; ++k) xbar += x[k];
    xbar /= n;
    double s, ds;
    step((xbar - center) / width, s, ds);
    phi = 0.5 * std::numbers::pi * s;
    dphi = 0.5 * std::numbers::pi * ds / width / n;  // per coordinate
  };
  PartitionMember first{[=](const double* x) {
                          double p, dp;
                          angle(x, p, dp);
                          return std::cos(p);
                        },
                        [=](const double* x, double* grad) {
                          double p, dp;
                          angle(x, p, dp);
                          for (int k = 0; k < n; ++k) grad[k] = -std::sin(p) * dp;
                        }};
  PartitionMember second{[=](const double* x) {
                           double p, dp;
                           angle(x, p, dp);
                           return std::sin(p);
                         },
                         [=](const double* x, double* grad) {
                           double p, dp;
                           angle(x, p, dp);
                           for (int k = 0; k < n; ++k) grad[k] = std::cos(p) * dp;
                         }};
  return {first, second};
}

ImsResult ims_identity_check(const WittenProblem& problem, double h, const std::vector<PartitionMember>& partition,
                             const std::function<double(const double* x)>& test_function, int grid_points) {
  if (partition.empty()) throw InvalidArgument("ims_identity_check: empty partition");
  const int n = problem.params.n();
  const int g = grid_points > 0 ? grid_points : problem.points();
  const auto x = axis(problem.box(), g);
  const double dx = x[1] - x[0];
  const double cell = std::pow(dx, n);

  const Vector psi = on_interior(n, x, test_function);
  Vector square_sum = Vector::Zero(psi.size());
  std::vector<Vector> etas;
  Vector grad_sq = Vector::Zero(psi.size());
  for (const auto& member : partition) {
    const Vector eta = on_interior(n, x, member.eta);
    square_sum += eta.cwiseProduct(eta);
    etas.push_back(eta);
    grad_sq += on_interior(n, x, [&](const double* p) {
      double gr[2] = {0.0, 0.0};
      member.grad(p, gr);
      return gr[0] * gr[0] + (n == 2 ? gr[1] * gr[1] : 0.0);
    });
  }
  if ((square_sum.array() - 1.0).abs().maxCoeff() > 1e-12) {
    throw InvalidArgument("ims_identity_check: partition members do not satisfy sum eta^2 = 1");
  }
  // compact support: the test function must vanish on the boundary layer
  const double peak = psi.cwiseAbs().maxCoeff();
  double edge = 0.0;
  for (int i = 0; i < g; ++i) {
    for (int j = 0; j < (n == 1 ? 1 : g); ++j) {
      const bool on_edge = i == 0 || i == g - 1 || (n == 2 && (j == 0 || j == g - 1));
      if (!on_edge) continue;
      const double p[2] = {x[i], n == 2 ? x[j] : 0.0};
      edge = std::max(edge, std::abs(test_function(p)));
    }
  }
  if (edge > 1e-12 * peak) throw InvalidArgument("ims_identity_check: test function is not supported inside the box");

  const SparseMatrix a = witten_matrix(problem, h, g);
  ImsResult res;
  res.lhs = cell * psi.dot(a * psi);
  double local = 0.0;
  for (const auto& eta : etas) {
    const Vector piece = eta.cwiseProduct(psi);
    local += cell * piece.dot(a * piece);
  }
  const double correction = h * h * cell * grad_sq.dot(psi.cwiseProduct(psi));
  res.rhs = local - correction;
  res.abs_residual = std::abs(res.lhs - res.rhs);
  res.rel_residual = res.abs_residual / std::abs(res.lhs);
  return res;
}

HessRegionReport hess_f_region_check(double mu, double r, int samples, const std::vector<int>& sizes,
                                     unsigned long long seed) {
  if (!(r > 0.0)) throw InvalidArgument("hess_f_region_check: r must be positive");
  if (samples < 1 || sizes.empty()) throw InvalidArgument("hess_f_region_check: need samples and sizes");
  HessRegionReport rep;
  rep.sizes = sizes;
  rep.minima.assign(sizes.size(), std::numeric_limits<double>::infinity());
  parallel_for(sizes.size(), [&](std::size_t s) {
    const int n = sizes[s];
    const RingParameters params(n, mu, 1.0);
    const Matrix k = k_matrix(params);
    RandomStream rng(seed, static_cast<std::uint64_t>(n));
    Eigen::SelfAdjointEigenSolver<Matrix> solver;
    const double root = std::sqrt(static_cast<double>(n));
    for (int t = 0; t < samples; ++t) {
      // ‖Px − J₊‖ = |shift| along the unit constant direction
      const double shift = r * (2.0 * rng.uniform() - 1.0);
      Vector x = Vector::Constant(n, (1.0 + shift) / root);
      if (n > 1) {
        Vector dir(n);
        for (int i = 0; i < n; ++i) dir[i] = rng.normal();
        dir = project_perp(dir);
        const double len = dir.norm();
        if (len > 0.0) x += dir * (r * std::pow(n, -0.25) * rng.uniform() / len);
      }
      Matrix hess = k;
      for (int i = 0; i < n; ++i) hess(i, i) += -1.0 + 3.0 * n * x[i] * x[i];
      solver.compute(0.5 * hess, Eigen::EigenvaluesOnly);
      rep.minima[s] = std::min(rep.minima[s], solver.eigenvalues()[0]);
    }
  });
  rep.rho = *std::min_element(rep.minima.begin(), rep.minima.end());
  const double top = *std::max_element(rep.minima.begin(), rep.minima.end());
  rep.positive = rep.rho > 0.0;
  rep.stable = rep.positive && top <= 2.0 * rep.rho;
  return rep;
}

}  // namespace kramers
