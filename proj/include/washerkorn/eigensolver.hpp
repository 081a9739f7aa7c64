#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <cstdint>
#include <vector>

namespace wk {

struct EigenOptions {
  /// Subspace size; 0 picks max(k + 6, 2 k).
  int block = 0;
  /// Stop when every wanted pair has ||A x - lambda B x|| / ||B x|| <= tol.
  double tol = 1e-10;
  /// Pairs whose residual stagnates below this are accepted as converged.
  double accept = 1e-8;
  int max_iter = 2000;
  std::uint64_t seed = 0x5eed;
};

struct EigenPairs {
  std::vector<double> values;  ///< ascending
  Eigen::MatrixXd vectors;     ///< columns, B-normalized
  std::vector<double> residuals;
  int iterations = 0;
  bool converged = false;
  double shift = 0.0;
};

/// k smallest eigenpairs of A x = lambda B x for symmetric A and symmetric
/// positive definite B.  Shift-invert block subspace iteration: the shift s
/// is raised until A + s B factors as SPD, then the subspace is driven by
/// (A + s B)^{-1} B with Rayleigh-Ritz on (A, B) every step.  `start`
/// columns, if given, seed the subspace.  Throws SolverError when B is not
/// positive definite or the iteration stalls above `accept`.
EigenPairs smallest_eigenpairs(const Eigen::SparseMatrix<double>& A, const Eigen::SparseMatrix<double>& B, int k,
                               const EigenOptions& options = {}, const Eigen::MatrixXd* start = nullptr);

struct RayleighMin {
  double lambda = 0.0;
  Eigen::VectorXd x;
  double residual = 0.0;
  int iterations = 0;
};

/// Smallest generalized eigenvalue: min x^T A x / x^T B x.
RayleighMin min_rayleigh(const Eigen::SparseMatrix<double>& A, const Eigen::SparseMatrix<double>& B,
                         const EigenOptions& options = {});

struct PositivePair {
  bool found = false;  ///< false when no x has x^T D x > 0
  double lambda = 0.0;
  Eigen::VectorXd x;
  double residual = 0.0;
  int iterations = 0;
};

/// Smallest positive lambda of N x = lambda D x with N symmetric positive
/// definite and D symmetric (possibly indefinite), i.e. the largest positive
/// mu = 1/lambda of D x = mu N x.
PositivePair smallest_positive_eigenpair(const Eigen::SparseMatrix<double>& N, const Eigen::SparseMatrix<double>& D,
                                         const EigenOptions& options = {});

}  // namespace wk
