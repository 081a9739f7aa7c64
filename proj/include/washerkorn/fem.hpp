#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <array>
#include <functional>
#include <string>
#include <vector>

#include "washerkorn/cylfield.hpp"
#include "washerkorn/field.hpp"
#include "washerkorn/geometry.hpp"

namespace wk {

using SpMat = Eigen::SparseMatrix<double>;

/// Tensor-product Lagrange elements on the (rho, z) cross-section.  n_rho and
/// n_z count cells; `order` is the polynomial degree per direction (1 =
/// bilinear).  Element nodes sit at Gauss-Lobatto points.
struct FemGrid {
  int n_rho = 32;
  int n_z = 4;
  int order = 2;

  void validate() const;
  FemGrid refined() const { return {2 * n_rho, 2 * n_z, order}; }
  std::string label() const;
  int nodes_rho() const { return n_rho * order + 1; }
  int nodes_z() const { return n_z * order + 1; }
};

/// Parses "AxB" (cells in rho x cells in z).
FemGrid parse_grid(const std::string& text, int order = 2);

/// Three scalar fields per mode n on the cross-section:
///   p = cosine part of u_rho, q = sine part of u_theta (u_theta itself for
///   n = 0), w = cosine part of u_z.
/// The remaining coefficients (b_rho, a_theta, b_z) give an isomorphic block
/// with identical forms, so one block carries the whole spectrum.
enum class Component { P = 0, Q = 1, W = 2 };

struct DofMap {
  int nodes_rho = 0;
  int nodes_z = 0;
  std::vector<double> rho;      ///< node coordinates in rho
  std::vector<double> z;        ///< node coordinates in z
  std::vector<int> free_index;  ///< full index -> free index, -1 if eliminated by the bc
  std::vector<int> free_to_full;
  /// Free-space null vectors of B admitted by the bc (fields with grad u = 0).
  std::vector<Eigen::VectorXd> null_vectors;
  /// Free indices pinned to zero to deflate the null vectors.
  std::vector<int> pinned;
  /// free index -> reduced index (pins removed), -1 if pinned.
  std::vector<int> reduced_index;

  int nodes() const { return nodes_rho * nodes_z; }
  int full_size() const { return 3 * nodes(); }
  int free_size() const { return static_cast<int>(free_to_full.size()); }
  int reduced_size() const { return free_size() - static_cast<int>(pinned.size()); }
  int full(Component c, int i, int j) const { return static_cast<int>(c) * nodes() + i * nodes_z + j; }

  Eigen::VectorXd reduce(const Eigen::VectorXd& free) const;
  Eigen::VectorXd lift(const Eigen::VectorXd& reduced) const;
  /// Free vector -> full nodal vector (eliminated entries are zero).
  Eigen::VectorXd expand(const Eigen::VectorXd& free) const;
  /// Full nodal vector -> free vector (drops eliminated entries).
  Eigen::VectorXd restrict_full(const Eigen::VectorXd& full) const;
  SpMat reduce(const SpMat& m) const;
};

/// Discretized per-mode forms on the bc-constrained (free) space:
///   A:  ||sqrt(rho) e(u)||^2     B:  ||sqrt(rho) grad u||^2
///   Mz: ||sqrt(rho) u_z||^2      T:  ||sqrt(rho) tr e(u)||^2
/// all with the theta integral (2 pi or pi) folded in.
struct FormMatrices {
  WasherGeometry geometry;
  int mode = 0;
  BoundaryCondition bc = BoundaryCondition::V2;
  FemGrid grid;
  SpMat A, B, Mz, T;
  DofMap dofs;
};

/// Pinned-DOF deflation tolerance relative to max|diag B|.
inline constexpr double kNullTolerance = 1e-10;

/// Assembles the forms.  Detects the admissible null space of B, pins one DOF
/// per null vector and checks (LDL^T pivots) that B is definite on the rest;
/// throws SolverError otherwise.
FormMatrices assemble(const WasherGeometry& geometry, int mode, BoundaryCondition bc, const FemGrid& grid);

/// Symmetric 3x3 stress value as a function of (rho, z).
using StressFn = std::function<Mat3(double rho, double z)>;

/// Form  -int rho (sigma, grad u^T grad u)  for the same discretization.
/// sigma must be theta-independent with sigma_{rho theta} = sigma_{theta z} = 0
/// so that the form separates over modes.
SpMat assemble_stress_form(const FormMatrices& fm, const StressFn& sigma);

/// Nodal interpolant (free vector) of the (p, q, w) block of a field mode.
Eigen::VectorXd interpolate(const FormMatrices& fm, const FourierMode& mode);

/// Grid values of one component from a free vector, rho-major, z fastest.
std::vector<double> component_values(const FormMatrices& fm, const Eigen::VectorXd& free, Component c);

/// Field view of a free vector: mode fm.mode with p, q, w interpolated
/// element-wise (piecewise polynomial, exact for the FE function).
FourierField to_field(const FormMatrices& fm, const Eigen::VectorXd& free);

}  // namespace wk
