#include "washerkorn/scaling.hpp"

#include <cmath>

#include "washerkorn/error.hpp"

namespace wk {

ScalingFit fit_exponent(const std::vector<std::pair<double, double>>& pairs) {
  if (pairs.size() < 3) throw InvalidArgument("fit_exponent: need at least 3 pairs");
  const double n = static_cast<double>(pairs.size());
  double sx = 0, sy = 0;
  for (const auto& [h, v] : pairs) {
    if (!(h > 0.0) || !(v > 0.0) || !std::isfinite(h) || !std::isfinite(v))
      throw InvalidArgument("fit_exponent: h and value must be positive and finite");
    sx += std::log(h);
    sy += std::log(v);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (const auto& [h, v] : pairs) {
    const double dx = std::log(h) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(v) - my);
  }
  if (!(sxx > 0.0)) throw InvalidArgument("fit_exponent: need two distinct h values");
  ScalingFit f;
  f.pairs = pairs;
  f.exponent = sxy / sxx;
  f.intercept = my - f.exponent * mx;
  for (const auto& [h, v] : pairs)
    f.max_residual = std::max(f.max_residual, std::abs(std::log(v) - f.exponent * std::log(h) - f.intercept));
  return f;
}

}  // namespace wk
