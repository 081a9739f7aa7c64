#include "washerkorn/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "washerkorn/error.hpp"

namespace wk {

void QuadratureSpec::validate() const {
  if (n_rho < 1 || n_z < 1) throw InvalidArgument("quadrature: empty panel count");
  if (rule == QuadRule::GaussLegendre && order < 1) throw InvalidArgument("quadrature: order must be >= 1");
  if (n_theta < 1) throw InvalidArgument("quadrature: n_theta must be >= 1");
}

QuadratureSpec QuadratureSpec::refined() const {
  QuadratureSpec q = *this;
  q.n_rho *= 2;
  q.n_z *= 2;
  q.n_theta *= 2;
  return q;
}

namespace {

// Legendre P_n and P_n' at x by the three-term recurrence.
std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0, p1 = x;
  if (n == 0) return {1.0, 0.0};
  for (int k = 2; k <= n; ++k) {
    const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = pk;
  }
  const double dp = n * (x * p1 - p0) / (x * x - 1.0);
  return {p1, dp};
}

GaussLegendre compute_gauss_legendre(int n) {
  GaussLegendre g;
  g.nodes.resize(n);
  g.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre(n, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const auto [p, dp] = legendre(n, x);
    (void)p;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    g.nodes[i] = -x;
    g.nodes[n - 1 - i] = x;
    g.weights[i] = w;
    g.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) g.nodes[n / 2] = 0.0;
  return g;
}

}  // namespace

const GaussLegendre& gauss_legendre(int n) {
  if (n < 1) throw InvalidArgument("gauss_legendre: n must be >= 1");
  static std::mutex mu;
  static std::map<int, GaussLegendre> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_gauss_legendre(n)).first;
  return it->second;
}

std::vector<double> gauss_lobatto_nodes(int n) {
  if (n < 2) throw InvalidArgument("gauss_lobatto_nodes: n must be >= 2");
  std::vector<double> x(n);
  x.front() = -1.0;
  x.back() = 1.0;
  const int m = n - 1;
  // Interior nodes are the roots of P_m'.
  for (int i = 1; i < m; ++i) {
    double t = -std::cos(std::numbers::pi * i / m);
    for (int it = 0; it < 100; ++it) {
      // P_m'' from the Legendre ODE: (1-t^2) P'' = 2 t P' - m (m+1) P.
      const auto [p, dp] = legendre(m, t);
      const double d2p = (2.0 * t * dp - m * (m + 1.0) * p) / (1.0 - t * t);
      const double dt = dp / d2p;
      t -= dt;
      if (std::abs(dt) < 1e-16) break;
    }
    x[i] = t;
  }
  if (n % 2 == 1) x[n / 2] = 0.0;
  return x;
}

Rule1D composite_rule(double a, double b, int panels, QuadRule rule, int order, std::span<const double> breaks) {
  if (!(b > a)) throw InvalidArgument("composite_rule: empty interval");
  if (panels < 1) throw InvalidArgument("composite_rule: empty quadrature");
  std::vector<double> edges;
  edges.reserve(panels + 1 + breaks.size());
  for (int i = 0; i <= panels; ++i) edges.push_back(a + (b - a) * i / panels);
  edges.back() = b;
  for (double x : breaks)
    if (x > a && x < b) edges.push_back(x);
  std::sort(edges.begin(), edges.end());
  const double tiny = 1e-14 * (b - a);
  edges.erase(std::unique(edges.begin(), edges.end(), [&](double u, double v) { return v - u <= tiny; }),
              edges.end());
  if (edges.back() != b) edges.back() = b;

  Rule1D out;
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    const double lo = edges[p], hi = edges[p + 1];
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    if (rule == QuadRule::Midpoint) {
      out.x.push_back(mid);
      out.w.push_back(hi - lo);
    } else {
      const auto& g = gauss_legendre(order);
      for (int k = 0; k < order; ++k) {
        out.x.push_back(mid + half * g.nodes[k]);
        out.w.push_back(half * g.weights[k]);
      }
    }
  }
  return out;
}

}  // namespace wk
