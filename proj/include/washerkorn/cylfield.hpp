#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "washerkorn/field.hpp"
#include "washerkorn/geometry.hpp"
#include "washerkorn/quadrature.hpp"

namespace wk {

/// 3x3 matrix, rows/cols ordered (rho, theta, z).
using Mat3 = std::array<std::array<double, 3>, 3>;

/// Cylindrical-frame gradient of a displacement.
struct Grad3 {
  Mat3 m{};

  double operator()(int i, int j) const { return m[i][j]; }
  Mat3 symmetrized() const;
};

double frobenius_sq(const Mat3& m);

/// Gradient of the synthesized field at (rho, theta, z):
///   [ u_rho,rho    (u_rho,theta - u_theta)/rho    u_rho,z   ]
///   [ u_theta,rho  (u_theta,theta + u_rho)/rho    u_theta,z ]
///   [ u_z,rho       u_z,theta/rho                 u_z,z     ]
/// Throws DomainError when the point is outside the washer or rho <= 0.
Grad3 gradient_cyl(const FourierField& field, double rho, double theta, double z);

/// e = (G + G^T) / 2 of gradient_cyl.
Mat3 strain(const FourierField& field, double rho, double theta, double z);

/// Gradient of one mode split into its cos(n theta) and sin(n theta) parts:
/// G = cos * cos(n theta) + sin * sin(n theta).  For n = 0 `sin` is zero.
struct ModalGradient {
  Mat3 cos{};
  Mat3 sin{};
  ModeJets jets;
};

ModalGradient modal_gradient(const FourierMode& mode, double rho, double z);

enum class Weight { One, Rho, InvRho, Y, InvY };

/// Floor on r below which 1/rho weights are rejected.
inline constexpr double kInvWeightFloor = 1e-12;

/// Integrand returning the components of a scalar/vector/matrix quantity.
using WasherQuantity = std::function<std::vector<double>(double rho, double theta, double z)>;
using RectQuantity = std::function<std::vector<double>(double x, double y)>;

/// Quadrature of  int weight * |q|^2  over the washer, theta on [0, 2 pi]
/// by the trapezoidal rule with quad.n_theta points.
double weighted_norm_sq(const WasherGeometry& geometry, const WasherQuantity& q, Weight weight,
                        const QuadratureSpec& quad, std::span<const double> rho_breaks = {});

/// Quadrature of  int weight * |q|^2  over T = (0, h) x (l, L).  n_rho
/// panels are used along x and n_z along y.
double weighted_norm_sq(const RectGeometry& geometry, const RectQuantity& q, Weight weight,
                        const QuadratureSpec& quad, std::span<const double> x_breaks = {},
                        std::span<const double> y_breaks = {});

/// Quantities whose rho-weighted norms separate over Fourier modes.
enum class ModalQuantity {
  Grad,         ///< |grad u|^2
  Strain,       ///< |e(u)|^2
  Uz,           ///< u_z^2
  URhoOverRho,  ///< (u_rho / rho)^2, i.e. ||u_rho / sqrt(rho)||^2 after the rho weight
  GradUz,       ///< |grad u_z|^2 (cylindrical)
  URhoZ,        ///< u_z,rho^2 only
  BlockZ,       ///< ((u_rho,theta - u_theta)/rho)^2 + u_theta,rho^2
};

struct ModeNorms {
  std::vector<int> modes;
  std::vector<double> per_mode;
  double total = 0.0;
};

/// ||sqrt(rho) q||^2 per mode with analytic theta integration (factor 2 pi for
/// n = 0, pi otherwise) and their sum.
ModeNorms mode_norms(const FourierField& field, ModalQuantity which, const QuadratureSpec& quad);

/// Totals of several quantities from one pass over the quadrature points;
/// equal to mode_norms(field, q, quad).total for each q.
std::vector<double> mode_norm_totals(const FourierField& field, std::span<const ModalQuantity> which,
                                     const QuadratureSpec& quad);

/// Density (sum of squared cos and sin coefficients) of a modal quantity at
/// a (rho, z) point of one mode.  Integrating theta_factor(n) * rho * density
/// gives the norm-square.
double modal_density(const FourierMode& mode, ModalQuantity which, double rho, double z);
double modal_density(const ModalGradient& g, ModalQuantity which, double rho);

/// int_0^{2 pi} cos^2(n theta) d theta: 2 pi for n = 0, pi otherwise.
double theta_factor(int n);

/// Generic per-mode integral  theta_factor(n) * int int weight(rho) * density.
double modal_integral(const FourierField& field, const FourierMode& mode,
                      const std::function<double(double rho, double z)>& density, Weight weight,
                      const QuadratureSpec& quad);

}  // namespace wk
