#pragma once

#include <Eigen/SparseCore>

#include <vector>

namespace kramers {

using SparseMatrix = Eigen::SparseMatrix<double>;

struct LanczosOptions {
  int wanted = 4;            // number of eigenvalues closest to the shift (from above)
  double shift = 0.0;        // sigma; (A − sigma)^{-1} is applied by a sparse LDLᵀ solve
  int max_basis = 80;
  double tolerance = 1e-10;  // relative residual of the inverted problem
  unsigned seed = 5;
};

struct LanczosResult {
  std::vector<double> eigenvalues;  // ascending
  std::vector<double> residuals;    // ‖A y − λ y‖ for each returned pair
  int iterations = 0;
  bool converged = false;
};

/// Shift-invert Lanczos with full reorthogonalization for a symmetric sparse
/// matrix. Targets the eigenvalues nearest sigma; with sigma below the
/// spectrum these are the lowest ones.
LanczosResult shift_invert_lanczos(const SparseMatrix& a, const LanczosOptions& options);

/// All eigenvalues of a symmetric tridiagonal matrix, ascending.
std::vector<double> tridiagonal_eigenvalues(const std::vector<double>& diagonal,
                                            const std::vector<double>& off_diagonal);

}  // namespace kramers
