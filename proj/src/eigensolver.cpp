#include "washerkorn/eigensolver.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>

#include "washerkorn/error.hpp"

namespace wk {

namespace {

using Sp = Eigen::SparseMatrix<double>;

Eigen::MatrixXd random_block(Eigen::Index n, Eigen::Index m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Eigen::MatrixXd X(n, m);
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index i = 0; i < n; ++i) X(i, j) = static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5;
  return X;
}

Eigen::MatrixXd orthonormal(const Eigen::MatrixXd& Y) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(Y);
  return qr.householderQ() * Eigen::MatrixXd::Identity(Y.rows(), Y.cols());
}

struct Ritz {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

/// Rayleigh-Ritz for (A, B) on span(Q).
Ritz rayleigh_ritz(const Sp& A, const Sp& B, const Eigen::MatrixXd& Q) {
  Eigen::MatrixXd Ap = Q.transpose() * (A * Q);
  Eigen::MatrixXd Bp = Q.transpose() * (B * Q);
  Ap = 0.5 * (Ap + Ap.transpose()).eval();
  Bp = 0.5 * (Bp + Bp.transpose()).eval();
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Ap, Bp);
  if (es.info() != Eigen::Success) throw SolverError("Rayleigh-Ritz step failed");
  return {es.eigenvalues(), Q * es.eigenvectors()};
}

double pair_residual(const Sp& A, const Sp& B, const Eigen::VectorXd& x, double lambda) {
  const Eigen::VectorXd bx = B * x;
  const double d = bx.norm();
  return d > 0.0 ? (A * x - lambda * bx).norm() / d : INFINITY;
}

void check_pencil(const Sp& A, const Sp& B) {
  if (A.rows() != A.cols() || B.rows() != B.cols() || A.rows() != B.rows())
    throw InvalidArgument("eigensolver: matrices must be square and of equal size");
  if (A.rows() == 0) throw InvalidArgument("eigensolver: empty pencil");
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

double max_abs_diag(const Sp& M) {
  double m = 0.0;
  for (Eigen::Index i = 0; i < M.rows(); ++i) m = std::max(m, std::abs(M.coeff(i, i)));
  return m;
}

}  // namespace

EigenPairs smallest_eigenpairs(const Sp& A, const Sp& B, int k, const EigenOptions& opt, const Eigen::MatrixXd* start) {
  check_pencil(A, B);
  const Eigen::Index n = A.rows();
  if (k < 1 || k > n) throw InvalidArgument("eigensolver: k out of range");
  Eigen::SimplicialLLT<Sp> bfact(B);
  if (bfact.info() != Eigen::Success) throw SolverError("eigensolver: B is not positive definite");

  EigenPairs out;
  const Eigen::Index m = std::min<Eigen::Index>(n, opt.block > 0 ? std::max(opt.block, k) : std::max(k + 6, 2 * k));

  auto finish = [&](const Ritz& rz, int iters) {
    out.values.assign(rz.values.data(), rz.values.data() + k);
    out.vectors = rz.vectors.leftCols(k);
    out.residuals.resize(k);
    for (int i = 0; i < k; ++i) out.residuals[i] = pair_residual(A, B, out.vectors.col(i), out.values[i]);
    out.iterations = iters;
  };

  if (m == n) {
    finish(rayleigh_ritz(A, B, Eigen::MatrixXd::Identity(n, n)), 0);
    out.converged = true;
    return out;
  }

  // Shift until A + s B is positive definite.
  const double scale = std::max(max_abs_diag(A) / std::max(max_abs_diag(B), 1e-300), 1e-300);
  double s = 1e-4 * scale;
  Eigen::SimplicialLLT<Sp> fact;
  for (int tries = 0;; ++tries) {
    fact.compute(Sp(A + s * B));
    if (fact.info() == Eigen::Success) break;
    if (tries > 60) throw SolverError("eigensolver: no shift makes A + sB definite");
    s = 10.0 * s + scale;
  }
  out.shift = s;

  Eigen::MatrixXd X = random_block(n, m, opt.seed);
  if (start) {
    const Eigen::Index c = std::min<Eigen::Index>(start->cols(), m);
    X.leftCols(c) = start->leftCols(c);
  }
  Ritz rz = rayleigh_ritz(A, B, orthonormal(X));
  double best = INFINITY;
  int since_best = 0;
  for (int it = 1; it <= opt.max_iter; ++it) {
    const Eigen::MatrixXd Y = fact.solve(B * rz.vectors);
    if (!Y.allFinite()) throw NonFiniteError("eigensolver: non-finite iterate");
    rz = rayleigh_ritz(A, B, orthonormal(Y));
    double worst = 0.0;
    for (int i = 0; i < k; ++i) worst = std::max(worst, pair_residual(A, B, rz.vectors.col(i), rz.values[i]));
    if (worst <= opt.tol) {
      finish(rz, it);
      out.converged = true;
      return out;
    }
    if (worst < 0.7 * best) {
      best = worst;
      since_best = 0;
    } else if (++since_best > 40 && best <= opt.accept) {
      finish(rz, it);
      out.converged = true;
      return out;
    }
  }
  finish(rz, opt.max_iter);
  const double worst = *std::max_element(out.residuals.begin(), out.residuals.end());
  if (worst > opt.accept)
    throw SolverError("eigensolver: no convergence, residual " + sci(worst) + " after " +
                      std::to_string(opt.max_iter) + " iterations");
  out.converged = true;
  return out;
}

RayleighMin min_rayleigh(const Sp& A, const Sp& B, const EigenOptions& options) {
  const auto p = smallest_eigenpairs(A, B, 1, options);
  return {p.values[0], p.vectors.col(0), p.residuals[0], p.iterations};
}

PositivePair smallest_positive_eigenpair(const Sp& N, const Sp& D, const EigenOptions& opt) {
  check_pencil(N, D);
  const Eigen::Index n = N.rows();
  Eigen::SimplicialLLT<Sp> fact(N);
  if (fact.info() != Eigen::Success) throw SolverError("buckling: numerator form is not positive definite");
  const Eigen::Index m = std::min<Eigen::Index>(n, opt.block > 0 ? opt.block : 8);

  PositivePair out;
  // Ritz pairs for D x = mu N x; mu ascending.
  auto ritz = [&](const Eigen::MatrixXd& Q) { return rayleigh_ritz(D, N, Q); };
  auto rel_residual = [&](const Eigen::VectorXd& x, double mu) {
    const Eigen::VectorXd nx = N * x;
    return (D * x - mu * nx).norm() / (std::abs(mu) * nx.norm());
  };
  auto finish = [&](const Ritz& rz, int iters) {
    const double mu = rz.values[m - 1];
    out.iterations = iters;
    if (!(mu > 0.0)) return;
    out.found = true;
    out.lambda = 1.0 / mu;
    out.x = rz.vectors.col(m - 1);
    out.residual = rel_residual(out.x, mu);
  };

  if (m == n) {
    finish(ritz(Eigen::MatrixXd::Identity(n, n)), 0);
    return out;
  }

  Ritz rz = ritz(orthonormal(random_block(n, m, opt.seed)));
  double c = 0.0, best = INFINITY;
  int since_best = 0;
  for (int it = 1; it <= opt.max_iter; ++it) {
    const double lo = rz.values[0], hi = rz.values[m - 1];
    if (-lo > hi) c = std::max(c, -1.05 * lo);
    Eigen::MatrixXd Y = fact.solve(D * rz.vectors) + c * rz.vectors;
    if (!Y.allFinite()) throw NonFiniteError("buckling: non-finite iterate");
    rz = ritz(orthonormal(Y));
    const double mu = rz.values[m - 1];
    if (!(mu > 0.0)) {
      // Dominant part of the spectrum is non-positive; confirm with a few more sweeps.
      if (it > 50) {
        out.iterations = it;
        return out;
      }
      continue;
    }
    const double r = rel_residual(rz.vectors.col(m - 1), mu);
    if (r <= opt.tol) {
      finish(rz, it);
      return out;
    }
    if (r < 0.7 * best) {
      best = r;
      since_best = 0;
    } else if (++since_best > 40 && best <= opt.accept) {
      finish(rz, it);
      return out;
    }
  }
  finish(rz, opt.max_iter);
  if (out.found && out.residual > opt.accept)
    throw SolverError("buckling: no convergence, residual " + sci(out.residual));
  return out;
}

}  // namespace wk
