#include "kramers/lanczos.hpp"

#include "kramers/error.hpp"
#include "kramers/rng.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>

namespace kramers {

std::vector<double> tridiagonal_eigenvalues(const std::vector<double>& diagonal,
                                            const std::vector<double>& off_diagonal) {
  const auto n = static_cast<Eigen::Index>(diagonal.size());
  if (n == 0) return {};
  if (static_cast<Eigen::Index>(off_diagonal.size()) != n - 1) {
    throw InvalidArgument("tridiagonal_eigenvalues: off-diagonal must have n-1 entries");
  }
  const Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(diagonal.data(), n);
  Eigen::VectorXd e(std::max<Eigen::Index>(n - 1, 0));
  for (Eigen::Index i = 0; i + 1 < n; ++i) e[i] = off_diagonal[i];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(d, e, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalFailure("tridiagonal_eigenvalues: QL iteration failed");
  std::vector<double> out(solver.eigenvalues().data(), solver.eigenvalues().data() + n);
  return out;
}

LanczosResult shift_invert_lanczos(const SparseMatrix& a, const LanczosOptions& options) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n) throw InvalidArgument("lanczos: matrix must be square");
  if (options.wanted < 1 || options.wanted > n) throw InvalidArgument("lanczos: invalid number of eigenvalues");
  const int max_basis = static_cast<int>(std::min<Eigen::Index>(options.max_basis, n));

  SparseMatrix shifted = a;
  for (Eigen::Index i = 0; i < n; ++i) shifted.coeffRef(i, i) -= options.shift;
  Eigen::SimplicialLDLT<SparseMatrix> factor(shifted);
  if (factor.info() != Eigen::Success) throw NumericalFailure("lanczos: factorization of A - sigma failed");

  Eigen::MatrixXd basis(n, max_basis + 1);
  std::vector<double> alpha, beta;
  RandomStream rng(options.seed, 0);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.normal();
  basis.col(0) = v.normalized();

  LanczosResult result;
  Eigen::VectorXd ritz;
  Eigen::MatrixXd ritz_vectors;
  int steps = 0;
  for (int j = 0; j < max_basis; ++j) {
    Eigen::VectorXd w = factor.solve(basis.col(j));
    if (factor.info() != Eigen::Success) throw NumericalFailure("lanczos: triangular solve failed");
    const double aj = basis.col(j).dot(w);
    alpha.push_back(aj);
    // two passes of classical Gram–Schmidt against the whole basis
    for (int pass = 0; pass < 2; ++pass) {
      const Eigen::VectorXd coeffs = basis.leftCols(j + 1).transpose() * w;
      w.noalias() -= basis.leftCols(j + 1) * coeffs;
    }
    const double bj = w.norm();
    steps = j + 1;

    if (steps >= options.wanted) {
      Eigen::MatrixXd t = Eigen::MatrixXd::Zero(steps, steps);
      for (int i = 0; i < steps; ++i) {
        t(i, i) = alpha[i];
        if (i + 1 < steps) t(i, i + 1) = t(i + 1, i) = beta[i];
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(t);
      ritz = small.eigenvalues();
      ritz_vectors = small.eigenvectors();
      bool done = true;
      for (int k = 0; k < options.wanted; ++k) {
        const int idx = steps - 1 - k;  // largest theta first
        const double estimate = std::abs(bj * ritz_vectors(steps - 1, idx));
        if (estimate > options.tolerance * std::abs(ritz[idx])) done = false;
      }
      if (done || bj < 1e-14 * std::abs(ritz[steps - 1])) {
        result.converged = true;
        break;
      }
    }
    if (j + 1 == max_basis) break;
    beta.push_back(bj);
    basis.col(j + 1) = w / bj;
  }
  result.iterations = steps;

  struct Pair {
    double lambda;
    Eigen::VectorXd y;
  };
  std::vector<Pair> pairs;
  for (int k = 0; k < std::min(options.wanted, steps); ++k) {
    const int idx = steps - 1 - k;
    const double theta = ritz[idx];
    Eigen::VectorXd y = basis.leftCols(steps) * ritz_vectors.col(idx);
    y.normalize();
    pairs.push_back({options.shift + 1.0 / theta, std::move(y)});
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& l, const Pair& r) { return l.lambda < r.lambda; });
  for (const auto& p : pairs) {
    result.eigenvalues.push_back(p.lambda);
    result.residuals.push_back((a * p.y - p.lambda * p.y).norm());
  }
  return result;
}

}  // namespace kramers
