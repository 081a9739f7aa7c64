#pragma once

#include <string>
#include <string_view>

namespace wk {

/// Annular solid {r <= rho <= R, 0 <= z <= h}.
struct WasherGeometry {
  double r = 0.5;
  double R = 1.0;
  double h = 0.1;
  /// Thinness bound: the washer theorems assume h <= c * r.
  double c = 1.0;

  /// Throws InvalidArgument unless 0 < r < R, h > 0, c > 0 and h <= c * r.
  void validate() const;
  WasherGeometry with_h(double new_h) const;
};

/// Rectangle T = (0, h) x (l, L).  l = 0 is accepted for the unweighted
/// rectangle inequality; the weighted statements additionally need l > 0.
struct RectGeometry {
  double h = 0.1;
  double l = 0.5;
  double L = 1.0;

  void validate() const;
  double width_y() const { return L - l; }
};

enum class BoundaryCondition {
  /// u_theta = u_rho = 0 at rho = r and rho = R.
  V1,
  /// u_theta = u_z = 0 at rho = r and rho = R.
  V2,
  /// f(x, l) = f(x, L) = 0.
  RectFZero,
  /// g(x, 0) = 0.
  RectGZeroAt0,
  /// f(x, 0) = f(x, L).
  RectFPeriodic,
  /// No constraint.  Only used for diagnostics of the discretized forms.
  Unconstrained,
};

std::string_view to_string(BoundaryCondition bc);
/// Accepts the canonical names and the lower-case CLI spellings (v1, v2, ...).
BoundaryCondition parse_boundary_condition(std::string_view name);

bool is_washer_bc(BoundaryCondition bc);
bool is_rect_bc(BoundaryCondition bc);

}  // namespace wk
