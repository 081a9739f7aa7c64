#pragma once

#include <vector>

#include "washerkorn/field.hpp"
#include "washerkorn/geometry.hpp"

namespace wk {

/// Node values on the uniform (nx x ny) grid over T = [0, h] x [l, L],
/// stored with y fastest: v[i * ny + j] = f(x_i, y_j).
struct GridFunction {
  RectGeometry geometry;
  int nx = 0;
  int ny = 0;
  std::vector<double> v;

  double dx() const { return geometry.h / (nx - 1); }
  double dy() const { return geometry.width_y() / (ny - 1); }
  double x(int i) const { return i == nx - 1 ? geometry.h : geometry.h * i / (nx - 1); }
  double y(int j) const { return j == ny - 1 ? geometry.L : geometry.l + geometry.width_y() * j / (ny - 1); }
  double& at(int i, int j) { return v[static_cast<std::size_t>(i) * ny + j]; }
  double at(int i, int j) const { return v[static_cast<std::size_t>(i) * ny + j]; }

  static GridFunction sample(const ScalarField2D& f, const RectGeometry& g, int nx, int ny);
};

/// ||sqrt(y) v||^2 by the trapezoidal rule.
double grid_norm_sq_y(const GridFunction& v);
/// ||sqrt(y) grad v||^2 with forward differences on cell edges; each edge
/// difference is weighted by the y of its row (x-edges) or the trapezoid
/// average of its endpoints (y-edges).
double grid_grad_norm_sq_y(const GridFunction& v);
/// Max over interior nodes of |5-point Laplacian|.
double grid_laplacian_max(const GridFunction& v);

struct HarmonicPart {
  GridFunction s;          ///< discrete harmonic function with s = f on the boundary
  GridFunction remainder;  ///< f - s, exactly zero on the boundary
  double residual = 0.0;   ///< ||K s - b|| / ||b|| of the interior system (0 when b = 0)
  bool direct = true;      ///< direct sparse factorization or conjugate gradients
  int iterations = 0;
};

/// Solves the discrete Dirichlet problem  Laplace(s) = 0 in T, s = f on dT
/// with the 5-point stencil.  Direct factorization up to 1e5 unknowns,
/// preconditioned CG beyond.  Throws SolverError when the residual exceeds
/// `tol`.
HarmonicPart harmonic_part(const GridFunction& f, double tol = 1e-10);
HarmonicPart harmonic_part(const RectField& field, int nx, int ny, double tol = 1e-10);

}  // namespace wk
