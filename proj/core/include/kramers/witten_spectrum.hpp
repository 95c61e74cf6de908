#pragma once

#include "kramers/lanczos.hpp"
#include "kramers/ring_model.hpp"

#include <functional>
#include <optional>
#include <string_view>
#include <vector>

namespace kramers {

/// f(x) = V(√N x)/(2N) with its gradient and Laplacian.
struct FValue {
  double value = 0.0;
  Vector gradient;
  double laplacian = 0.0;
};

FValue build_f(const RingParameters& params, const Vector& x);

/// Derivatives along the constant direction ê = (1,…,1)/√N:
/// ∇^C f = ½√N Σx_k³ − ½x̂₀ and Δ^C f = ½(3‖x‖² − 1).
double directional_gradient_constant(const RingParameters& params, const Vector& x);
double directional_laplacian_constant(const RingParameters& params, const Vector& x);

/// Dense Hess f(x) = ½(K − 1 + 3N diag(x²)).
Matrix hessian_f(const RingParameters& params, const Vector& x);

enum class Discretization {
  factored,   // Σ_j D_jᵀ D_j with D_j = h e^{−f/h} ∂_j e^{f/h} on grid edges
  pointwise,  // −h² Δ_h + |∇f|² − hΔf sampled at the nodes
};

std::string_view to_string(Discretization d);
Discretization parse_discretization(std::string_view text);

enum class EigenSolver { lanczos, dense };

/// Δ^(0)_{f,h} = −h²Δ + |∇f|² − hΔf on [−L, L]^N with Dirichlet boundary.
/// grid_points counts nodes per coordinate including both boundary nodes.
struct WittenProblem {
  RingParameters params;
  double half_width = 0.0;  // 0 selects 2.5/√N
  int grid_points = 0;      // 0 selects 4001 (N = 1) or 301 (N = 2)
  Discretization discretization = Discretization::factored;
  EigenSolver solver = EigenSolver::lanczos;  // dense only for N = 1
  bool certify = true;  // repeat on the doubled grid

  explicit WittenProblem(RingParameters p);
  double box() const;
  int points() const;
};

/// Sparse matrix of Δ^(0)_{f,h} on interior nodes (row-major in the
/// coordinate index, last coordinate fastest).
SparseMatrix witten_matrix(const WittenProblem& problem, double h, int grid_points);

struct SpectralReport {
  int n = 0;
  double mu = 0.0;
  double h = 0.0;
  int grid_points = 0;
  double half_width = 0.0;
  std::vector<double> eigenvalues;  // lowest m of Δ_{f,h}, ascending
  double lambda_gap = 0.0;          // λ₁/h
  double ek_prediction = 0.0;       // p(N) e^{−1/4h}
  double rel_error = 0.0;           // lambda_gap / ek_prediction − 1
  double second_gap_ratio = 0.0;    // λ₂/h
  double ground_ratio = 0.0;        // |λ₀| / λ₁
  bool kernel_ok = false;           // ground_ratio < 1e-3
  std::vector<double> refined_eigenvalues;  // on the doubled grid, if certified
  double refinement_change = 0.0;   // max relative change over indices ≥ 1
  bool certificate_ok = false;
  int iterations = 0;
};

/// Lowest m ≥ 3 eigenvalues of the discretized operator.
SpectralReport solve_spectrum(const WittenProblem& problem, double h, int m = 4);

struct SecondGapCertificate {
  double ell = 0.0;    // min over the grid of λ₂/h
  double delta = 0.0;  // min over the grid of (λ₂ − λ₁)/h, in L_h units
  bool pass = false;   // ell ≥ 0.1 and exactly two eigenvalues below ℓh everywhere
  std::vector<SpectralReport> reports;
};

SecondGapCertificate second_gap_certificate(const WittenProblem& problem, const std::vector<double>& h_grid,
                                            int m = 4);

/// Gap of −h u'' + V'(x) u' at N = 1 discretized directly in the weighted space
/// (central differences, reflecting ends), independent of the Witten route.
double generator_gap_1d(double mu, double h, double half_width, int grid_points);

/// Smooth quadratic partition of unity member with its gradient.
struct PartitionMember {
  std::function<double(const double* x)> eta;
  std::function<void(const double* x, double* grad)> grad;
};

/// Two members cos φ, sin φ with φ = (π/2) s((x̄ − center)/width) and s a
/// C^∞ step, so that η₁² + η₂² ≡ 1.
std::vector<PartitionMember> two_piece_partition(int n, double center, double width);

struct ImsResult {
  double lhs = 0.0;  // ⟨ψ, Δψ⟩
  double rhs = 0.0;  // Σ⟨η_kψ, Δ η_kψ⟩ − h² Σ‖|∇η_k|ψ‖²
  double abs_residual = 0.0;
  double rel_residual = 0.0;
};

/// Evaluates both sides of the IMS localization formula by grid quadrature.
/// Throws when the members do not sum to one in square or the test function
/// does not vanish near the box boundary.
ImsResult ims_identity_check(const WittenProblem& problem, double h, const std::vector<PartitionMember>& partition,
                             const std::function<double(const double* x)>& test_function, int grid_points = 0);

struct HessRegionReport {
  std::vector<int> sizes;
  std::vector<double> minima;  // per N
  double rho = 0.0;            // min over all N
  bool positive = false;
  bool stable = false;         // per-N minima within a factor 2 of each other
};

/// Samples Ω_r = {‖Px − J₊‖ ≤ r, ‖P⊥x‖ ≤ r N^{−1/4}} and returns the smallest
/// eigenvalue of Hess f seen for each N.
HessRegionReport hess_f_region_check(double mu, double r, int samples, const std::vector<int>& sizes,
                                     unsigned long long seed = 13);

}  // namespace kramers
