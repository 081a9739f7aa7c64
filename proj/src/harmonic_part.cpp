#include "washerkorn/harmonic_part.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <cmath>

#include "washerkorn/error.hpp"

namespace wk {

namespace {

double trap(int i, int n, double d) { return (i == 0 || i == n - 1) ? 0.5 * d : d; }

void check_grid(const GridFunction& f) {
  if (f.nx < 3 || f.ny < 3) throw InvalidArgument("grid function needs at least 3x3 nodes");
  if (f.v.size() != static_cast<std::size_t>(f.nx) * f.ny) throw InvalidArgument("grid function: size mismatch");
}

}  // namespace

GridFunction GridFunction::sample(const ScalarField2D& f, const RectGeometry& g, int nx, int ny) {
  GridFunction out{g, nx, ny, std::vector<double>(static_cast<std::size_t>(nx) * ny)};
  check_grid(out);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) out.at(i, j) = f.eval(out.x(i), out.y(j)).v;
  return out;
}

double grid_norm_sq_y(const GridFunction& v) {
  check_grid(v);
  const double dx = v.dx(), dy = v.dy();
  double acc = 0.0;
  for (int i = 0; i < v.nx; ++i)
    for (int j = 0; j < v.ny; ++j) acc += trap(i, v.nx, dx) * trap(j, v.ny, dy) * v.y(j) * v.at(i, j) * v.at(i, j);
  return acc;
}

double grid_grad_norm_sq_y(const GridFunction& v) {
  check_grid(v);
  const double dx = v.dx(), dy = v.dy();
  double acc = 0.0;
  for (int j = 0; j < v.ny; ++j)
    for (int i = 0; i + 1 < v.nx; ++i) {
      const double d = (v.at(i + 1, j) - v.at(i, j)) / dx;
      acc += dx * trap(j, v.ny, dy) * v.y(j) * d * d;
    }
  for (int i = 0; i < v.nx; ++i)
    for (int j = 0; j + 1 < v.ny; ++j) {
      const double d = (v.at(i, j + 1) - v.at(i, j)) / dy;
      acc += dy * trap(i, v.nx, dx) * 0.5 * (v.y(j) + v.y(j + 1)) * d * d;
    }
  return acc;
}

double grid_laplacian_max(const GridFunction& v) {
  check_grid(v);
  const double ix = 1.0 / (v.dx() * v.dx()), iy = 1.0 / (v.dy() * v.dy());
  double m = 0.0;
  for (int i = 1; i + 1 < v.nx; ++i)
    for (int j = 1; j + 1 < v.ny; ++j) {
      const double lap = (v.at(i + 1, j) - 2 * v.at(i, j) + v.at(i - 1, j)) * ix +
                         (v.at(i, j + 1) - 2 * v.at(i, j) + v.at(i, j - 1)) * iy;
      m = std::max(m, std::abs(lap));
    }
  return m;
}

HarmonicPart harmonic_part(const GridFunction& f, double tol) {
  check_grid(f);
  f.geometry.validate();
  const int mx = f.nx - 2, my = f.ny - 2;
  const int n = mx * my;
  const double ix = 1.0 / (f.dx() * f.dx()), iy = 1.0 / (f.dy() * f.dy());
  auto id = [my](int i, int j) { return (i - 1) * my + (j - 1); };

  // -Laplace(s) = 0 with boundary values moved to the right-hand side.
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(n) * 5);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  for (int i = 1; i <= mx; ++i)
    for (int j = 1; j <= my; ++j) {
      const int k = id(i, j);
      trip.emplace_back(k, k, 2 * ix + 2 * iy);
      const int ni[4] = {i - 1, i + 1, i, i};
      const int nj[4] = {j, j, j - 1, j + 1};
      const double c[4] = {ix, ix, iy, iy};
      for (int q = 0; q < 4; ++q) {
        const bool boundary = ni[q] == 0 || ni[q] == f.nx - 1 || nj[q] == 0 || nj[q] == f.ny - 1;
        if (boundary)
          b[k] += c[q] * f.at(ni[q], nj[q]);
        else
          trip.emplace_back(k, id(ni[q], nj[q]), -c[q]);
      }
    }
  Eigen::SparseMatrix<double> K(n, n);
  K.setFromTriplets(trip.begin(), trip.end());

  HarmonicPart out;
  Eigen::VectorXd x;
  if (n <= 100000) {
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(K);
    if (solver.info() != Eigen::Success) throw SolverError("harmonic_part: factorization failed");
    x = solver.solve(b);
    out.direct = true;
  } else {
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                             Eigen::IncompleteCholesky<double>>
        cg;
    cg.setTolerance(0.1 * tol);
    cg.setMaxIterations(20 * n);
    cg.compute(K);
    x = cg.solve(b);
    out.direct = false;
    out.iterations = static_cast<int>(cg.iterations());
  }
  const double bn = b.norm();
  out.residual = bn > 0.0 ? (K * x - b).norm() / bn : (K * x).norm();
  if (!std::isfinite(out.residual) || out.residual > tol)
    throw SolverError("harmonic_part: residual " + std::to_string(out.residual) + " above tolerance");

  out.s = f;
  for (int i = 1; i <= mx; ++i)
    for (int j = 1; j <= my; ++j) out.s.at(i, j) = x[id(i, j)];
  out.remainder = f;
  for (std::size_t k = 0; k < f.v.size(); ++k) out.remainder.v[k] = f.v[k] - out.s.v[k];
  return out;
}

HarmonicPart harmonic_part(const RectField& field, int nx, int ny, double tol) {
  if (!field.f) throw InvalidArgument("harmonic_part: field has no f component");
  return harmonic_part(GridFunction::sample(*field.f, field.geometry, nx, ny), tol);
}

}  // namespace wk
