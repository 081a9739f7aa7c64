#include "washerkorn/geometry.hpp"

#include <cctype>
#include <cmath>
#include <string>

#include "washerkorn/error.hpp"

namespace wk {

void WasherGeometry::validate() const {
  if (!(std::isfinite(r) && std::isfinite(R) && std::isfinite(h) && std::isfinite(c)))
    throw InvalidArgument("washer geometry: non-finite parameter");
  if (!(r > 0.0 && r < R)) throw InvalidArgument("washer geometry: need 0 < r < R");
  if (!(h > 0.0)) throw InvalidArgument("washer geometry: need h > 0");
  if (!(c > 0.0)) throw InvalidArgument("washer geometry: need c > 0");
  if (h > c * r) throw InvalidArgument("washer geometry: need h <= c*r");
}

WasherGeometry WasherGeometry::with_h(double new_h) const {
  WasherGeometry g = *this;
  g.h = new_h;
  return g;
}

void RectGeometry::validate() const {
  if (!(std::isfinite(h) && std::isfinite(l) && std::isfinite(L)))
    throw InvalidArgument("rectangle geometry: non-finite parameter");
  if (!(h > 0.0)) throw InvalidArgument("rectangle geometry: need h > 0");
  if (!(l >= 0.0 && L > l)) throw InvalidArgument("rectangle geometry: need L > l >= 0");
}

std::string_view to_string(BoundaryCondition bc) {
  switch (bc) {
    case BoundaryCondition::V1: return "V1";
    case BoundaryCondition::V2: return "V2";
    case BoundaryCondition::RectFZero: return "RECT_F_ZERO";
    case BoundaryCondition::RectGZeroAt0: return "RECT_G_ZERO_AT_0";
    case BoundaryCondition::RectFPeriodic: return "RECT_F_PERIODIC";
    case BoundaryCondition::Unconstrained: return "UNCONSTRAINED";
  }
  return "?";
}

BoundaryCondition parse_boundary_condition(std::string_view name) {
  std::string up;
  for (char ch : name) up.push_back(ch == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(ch))));
  for (auto bc : {BoundaryCondition::V1, BoundaryCondition::V2, BoundaryCondition::RectFZero,
                  BoundaryCondition::RectGZeroAt0, BoundaryCondition::RectFPeriodic,
                  BoundaryCondition::Unconstrained}) {
    if (up == to_string(bc)) return bc;
  }
  if (up == "NONE") return BoundaryCondition::Unconstrained;
  throw InvalidArgument("unknown boundary condition '" + std::string(name) + "'");
}

bool is_washer_bc(BoundaryCondition bc) {
  return bc == BoundaryCondition::V1 || bc == BoundaryCondition::V2 || bc == BoundaryCondition::Unconstrained;
}

bool is_rect_bc(BoundaryCondition bc) {
  return bc == BoundaryCondition::RectFZero || bc == BoundaryCondition::RectGZeroAt0 ||
         bc == BoundaryCondition::RectFPeriodic || bc == BoundaryCondition::Unconstrained;
}

}  // namespace wk
