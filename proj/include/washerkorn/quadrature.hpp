#pragma once

#include <span>
#include <vector>

namespace wk {

enum class QuadRule { GaussLegendre, Midpoint };

/// Tensor-product composite rule on a (rho, z) or (x, y) box.  n_rho and n_z
/// are panel counts; each panel carries `order` Gauss points (one point for
/// the midpoint rule).  theta integrals of modal quantities are done
/// analytically; n_theta is only used when a quantity is supplied as a
/// plain function of theta.
struct QuadratureSpec {
  int n_rho = 4;
  int n_z = 2;
  QuadRule rule = QuadRule::GaussLegendre;
  int order = 8;
  int n_theta = 64;

  void validate() const;
  /// Same rule with twice as many panels in each direction.
  QuadratureSpec refined() const;
};

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussLegendre& gauss_legendre(int n);

/// Gauss-Lobatto-Legendre nodes on [-1, 1] (n >= 2 points, endpoints included).
std::vector<double> gauss_lobatto_nodes(int n);

struct Rule1D {
  std::vector<double> x;
  std::vector<double> w;

  std::size_t size() const { return x.size(); }
};

/// Composite rule on [a, b] with `panels` equal panels.  Extra breakpoints
/// strictly inside (a, b) split panels so that kinks and support edges of
/// the integrand fall on panel boundaries.
Rule1D composite_rule(double a, double b, int panels, QuadRule rule, int order,
                      std::span<const double> breaks = {});

}  // namespace wk
