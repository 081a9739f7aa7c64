#pragma once

#include <utility>
#include <vector>

namespace wk {

/// Least-squares line  log(value) = exponent log(h) + intercept.
struct ScalingFit {
  std::vector<std::pair<double, double>> pairs;
  double exponent = 0.0;
  double intercept = 0.0;
  /// Largest |log(value) - fitted line| over the pairs.
  double max_residual = 0.0;
};

/// Needs at least 3 pairs with h > 0 and value > 0 and two distinct h.
ScalingFit fit_exponent(const std::vector<std::pair<double, double>>& pairs);

}  // namespace wk
