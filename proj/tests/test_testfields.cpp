#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <numbers>

#include "washerkorn/cylfield.hpp"
#include "washerkorn/error.hpp"
#include "washerkorn/harmonic_part.hpp"
#include "washerkorn/scaling.hpp"
#include "washerkorn/testfields.hpp"

using namespace wk;

TEST_SUITE_BEGIN("testfields");

namespace {

double adaptive(const std::function<double(double)>& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-13);
}

}  // namespace

TEST_CASE("bump vanishes with its derivatives at and outside the support") {
  for (auto kind : {BumpKind::ExpMollifier, BumpKind::PolySpline}) {
    const auto b = bump(0.75, 1.0, kind);
    for (double t : {0.75, 1.0}) {
      CHECK(std::abs(b.eval(t).v) < 1e-15);
      CHECK(std::abs(b.eval(t).d1) < 1e-12);
    }
    for (double t : {0.5, 0.74999, 1.00001, 2.0}) {
      const auto j = b.eval(t);
      CHECK(j.v == 0.0);
      CHECK(j.d1 == 0.0);
      CHECK(j.d2 == 0.0);
    }
    CHECK(b.eval(0.875).v > 0.0);
  }
}

TEST_CASE("bump normalization against adaptive quadrature") {
  const auto b = bump(0.75, 1.0);
  const double d1 = adaptive([&](double t) { return std::pow(b.eval(t).d1, 2); }, 0.75, 1.0);
  const double d2 = adaptive([&](double t) { return std::pow(b.eval(t).d2, 2); }, 0.75, 1.0);
  CHECK(d1 == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(b.d2phi_sq() == doctest::Approx(d2).epsilon(1e-8));
  CHECK(std::isfinite(d2));
  CHECK(d2 > 0.0);
  // Independent tanh-sinh check of the same second-derivative integral.
  boost::math::quadrature::tanh_sinh<double> ts;
  const double d2b = ts.integrate([&](double t) { return std::pow(b.eval(t).d2, 2); }, 0.75, 1.0, 1e-12);
  CHECK(d2b == doctest::Approx(d2).epsilon(1e-8));
}

TEST_CASE("bump derivatives agree with finite differences") {
  const auto b = bump(0.6, 0.9);
  for (double t : {0.65, 0.7, 0.75, 0.8, 0.85}) {
    const double s = 1e-6;
    CHECK(b.eval(t).d1 == doctest::Approx((b.eval(t + s).v - b.eval(t - s).v) / (2 * s)).epsilon(1e-6));
    CHECK(b.eval(t).d2 == doctest::Approx((b.eval(t + s).d1 - b.eval(t - s).d1) / (2 * s)).epsilon(1e-6));
  }
}

TEST_CASE("bump second-derivative energy is order one (0.1 <= int phi''^2 <= 10)") {
  const WasherGeometry g{0.5, 1.0, 0.1};
  for (auto kind : {BumpKind::ExpMollifier, BumpKind::PolySpline}) {
    const auto b = kirchhoff_bump(g, kind);
    CHECK(b.dphi_sq() == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(b.d2phi_sq() >= 0.1);
    CHECK(b.d2phi_sq() <= 10.0);
  }
}

TEST_CASE("Wirtinger bound on the bump second-derivative energy") {
  // phi' vanishes at both ends, so int phi''^2 >= (pi / w)^2 int phi'^2.
  for (double a : {0.5, 0.75, 0.875}) {
    const auto b = bump(a, 1.0);
    const double w = 1.0 - a;
    CHECK(b.d2phi_sq() >= std::pow(std::numbers::pi / w, 2) * b.dphi_sq());
  }
}

TEST_CASE("bump rejects empty or inverted supports") {
  CHECK_THROWS_AS(bump(1.0, 1.0), DomainError);
  CHECK_THROWS_AS(bump(1.0, 0.5), DomainError);
}

TEST_CASE("random fields are deterministic in the seed") {
  const WasherGeometry g{0.5, 1.0, 0.1};
  const auto a = random_admissible_field(42, g, BoundaryCondition::V2);
  const auto b = random_admissible_field(42, g, BoundaryCondition::V2);
  const auto c = random_admissible_field(43, g, BoundaryCondition::V2);
  bool differs = false;
  for (double rho : {0.6, 0.8})
    for (double th : {0.1, 2.0}) {
      const auto ua = a.displacement(rho, th, 0.03), ub = b.displacement(rho, th, 0.03),
                 uc = c.displacement(rho, th, 0.03);
      for (int k = 0; k < 3; ++k) {
        CHECK(ua[k] == ub[k]);
        differs = differs || ua[k] != uc[k];
      }
    }
  CHECK(differs);
}

TEST_CASE("seed-averaged strain norm is positive and finite") {
  const WasherGeometry g{0.5, 1.0, 0.1};
  double sum = 0.0;
  for (int s = 0; s < 100; ++s) sum += mode_norms(random_admissible_field(s, g, BoundaryCondition::V1), ModalQuantity::Strain, {}).total;
  CHECK(std::isfinite(sum));
  CHECK(sum / 100 > 0.0);
}

TEST_CASE("random rectangle fields satisfy their boundary conditions exactly") {
  const RectGeometry w{0.1, 0.5, 1.0}, u{0.1, 0.0, 1.0};
  for (int s = 0; s < 10; ++s) {
    const auto f = random_rect_field(s, w, BoundaryCondition::RectFZero);
    const auto g0 = random_rect_field(s, u, BoundaryCondition::RectGZeroAt0);
    const auto fp = random_rect_field(s, u, BoundaryCondition::RectFPeriodic);
    for (double x : {0.0, 0.03, 0.1}) {
      CHECK(f.f->eval(x, 0.5).v == 0.0);
      CHECK(f.f->eval(x, 1.0).v == 0.0);
      CHECK(g0.g->eval(x, 0.0).v == 0.0);
      CHECK(fp.f->eval(x, 0.0).v == doctest::Approx(fp.f->eval(x, 1.0).v).epsilon(1e-15));
    }
  }
}

TEST_CASE("harmonic field: single separable term") {
  const RectGeometry g{0.1, 0.5, 1.0};
  const auto f = harmonic_field(g, {{1, 1.0, 0.0}});
  const double D = 0.5;
  const double x = 0.04, y = 0.7;
  CHECK(f(x, y) == doctest::Approx(std::cosh(std::numbers::pi * x / D) * std::sin(std::numbers::pi * (y - 0.5) / D)));
  CHECK_THROWS_AS(harmonic_field(g, {{1, 0.0, 0.0}, {2, 0.0, 0.0}}), InvalidArgument);
}

TEST_CASE("random harmonic field has a vanishing finite-difference Laplacian") {
  const RectGeometry g{0.1, 0.5, 1.0};
  for (int s = 0; s < 5; ++s) {
    const auto f = random_harmonic_field(s, g);
    double fmax = 0.0, lmax = 0.0;
    const double d = 1e-3;
    for (int i = 1; i < 10; ++i)
      for (int j = 1; j < 10; ++j) {
        const double x = 0.1 * i / 10, y = 0.5 + 0.5 * j / 10;
        fmax = std::max(fmax, std::abs(f(x, y)));
        auto lap = [&](double h) {
          return (f(x + h, y) + f(x - h, y) + f(x, y + h) + f(x, y - h) - 4 * f(x, y)) / (h * h);
        };
        lmax = std::max(lmax, std::abs((4 * lap(d / 2) - lap(d)) / 3));
      }
    CHECK(lmax <= 1e-8 * fmax);
    for (double x : {0.0, 0.05, 0.1}) {
      CHECK(f(x, 0.5) == 0.0);
      CHECK(std::abs(f(x, 1.0)) <= 1e-15 * fmax);
    }
  }
}

TEST_CASE("harmonic part of a harmonic function is itself") {
  const RectGeometry g{0.1, 0.5, 1.0};
  const auto f = random_harmonic_field(3, g);
  double prev = 0.0;
  for (int n : {21, 41}) {
    const auto hp = harmonic_part(f.as_rect_field(), n, 4 * n);
    double m = 0.0, fm = 0.0;
    for (std::size_t k = 0; k < hp.remainder.v.size(); ++k) {
      m = std::max(m, std::abs(hp.remainder.v[k]));
      fm = std::max(fm, std::abs(hp.s.v[k]));
    }
    CHECK(m < 1e-2 * fm);
    if (prev > 0.0) CHECK(m < 0.35 * prev);  // O(grid^2)
    prev = m;
    CHECK(hp.residual <= 1e-10);
  }
}

TEST_CASE("harmonic part matches the boundary trace exactly and bounds the remainder") {
  const RectGeometry g{0.1, 0.5, 1.0};
  for (int s = 0; s < 40; ++s) {
    const auto rf = random_rect_field(s, g, BoundaryCondition::RectFZero);
    const auto hp = harmonic_part(rf, 21, 81);
    const auto& F = hp.s;
    for (int i = 0; i < F.nx; ++i)
      for (int j = 0; j < F.ny; ++j)
        if (i == 0 || j == 0 || i == F.nx - 1 || j == F.ny - 1) {
          CHECK(hp.remainder.at(i, j) == 0.0);
          CHECK(F.at(i, j) == rf.f->eval(F.x(i), F.y(j)).v);
        }
    CHECK(hp.residual <= 1e-10);
    CHECK(grid_laplacian_max(hp.s) <= 1e-10 * (1.0 + grid_laplacian_max(GridFunction::sample(*rf.f, g, 21, 81))));
    const double lhs = std::sqrt(grid_norm_sq_y(hp.remainder));
    const double rhs = g.h * std::sqrt(grid_grad_norm_sq_y(hp.remainder));
    CHECK(lhs <= rhs);
  }
}

TEST_CASE("harmonic part is a projection") {
  const RectGeometry g{0.1, 0.5, 1.0};
  const auto rf = random_rect_field(9, g, BoundaryCondition::RectFZero);
  const auto hp = harmonic_part(rf, 21, 61);
  const auto again = harmonic_part(hp.s);
  double d = 0.0, m = 0.0;
  for (std::size_t k = 0; k < hp.s.v.size(); ++k) {
    d = std::max(d, std::abs(again.s.v[k] - hp.s.v[k]));
    m = std::max(m, std::abs(hp.s.v[k]));
  }
  CHECK(d <= 1e-9 * m);
}

TEST_CASE("harmonic part with a zero trace") {
  const RectGeometry g{0.1, 0.5, 1.0};
  const auto bx = bump(0.0 + 1e-9, 0.1, BumpKind::PolySpline);
  const auto by = bump(0.5 + 1e-9, 1.0, BumpKind::PolySpline);
  RectField rf{g, make_coef([&](double x, double y) {
                 const auto a = bx.eval(x), b = by.eval(y);
                 return Jet{a.v * b.v, a.d1 * b.v, a.v * b.d1};
               }),
               nullptr, std::nullopt};
  const auto hp = harmonic_part(rf, 21, 41);
  double m = 0.0;
  for (double v : hp.s.v) m = std::max(m, std::abs(v));
  CHECK(m < 1e-12);
}

TEST_CASE("harmonic part switches to conjugate gradients on large grids") {
  const RectGeometry g{0.1, 0.5, 1.0};
  const auto hp = harmonic_part(random_rect_field(1, g, BoundaryCondition::RectFZero), 201, 801);
  CHECK_FALSE(hp.direct);
  CHECK(hp.residual <= 1e-10);
}

namespace {

double closed_form_1d(const BumpFunction& phi, const std::function<double(const BumpJet&, double)>& f) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      [&](double r) { return f(phi.eval(r), r); }, phi.a(), phi.b(), 15, 1e-13);
}

}  // namespace

TEST_CASE("Kirchhoff ansatz: structure and closed-form norms") {
  const WasherGeometry g{0.5, 1.0, 0.05};
  const auto phi = kirchhoff_bump(g);
  const auto u = kirchhoff_ansatz(g, phi);
  for (double rho : {0.8, 0.9})
    for (double z : {0.0, 0.02, 0.05}) {
      const auto e = strain(u, rho, 0.4, z);
      CHECK(std::abs(e[0][2]) < 1e-14);
      if (z == 0.0) {
        const auto d = u.displacement(rho, 0.4, z);
        CHECK(d[0] == 0.0);
        CHECK(d[1] == 0.0);
        CHECK(d[2] == phi.eval(rho).v);
      }
    }
  // ||sqrt(rho) e||^2 = 2 pi h^3 / 3 int (rho phi''^2 + phi'^2 / rho)
  const double h = g.h, tp = 2 * std::numbers::pi;
  const double bend = closed_form_1d(phi, [](const BumpJet& p, double r) { return r * p.d2 * p.d2 + p.d1 * p.d1 / r; });
  const double shear = closed_form_1d(phi, [](const BumpJet& p, double r) { return r * p.d1 * p.d1; });
  QuadratureSpec q{128, 2, QuadRule::GaussLegendre, 8};
  const double e2 = mode_norms(u, ModalQuantity::Strain, q).total;
  const double g2 = mode_norms(u, ModalQuantity::Grad, q).total;
  CHECK(e2 == doctest::Approx(tp * h * h * h / 3 * bend).epsilon(1e-6));
  CHECK(g2 == doctest::Approx(tp * (h * h * h / 3 * bend + 2 * h * shear)).epsilon(1e-6));
}

TEST_CASE("Kirchhoff ansatz rejects a bump outside [(R+r)/2, R]") {
  const WasherGeometry g{0.5, 1.0, 0.05};
  CHECK_THROWS_AS(kirchhoff_ansatz(g, bump(0.6, 1.0)), DomainError);
}

TEST_CASE("scaled ansatz at alpha = 0 is the Kirchhoff ansatz") {
  const WasherGeometry g{0.5, 1.0, 0.05};
  const auto phi = scaled_ansatz_bump(g);
  const auto a = scaled_ansatz(g, phi, 0.0, g.h), k = kirchhoff_ansatz(g, phi);
  for (double rho : {0.8, 0.9, 0.95})
    for (double z : {0.01, 0.04}) {
      const auto ga = gradient_cyl(a, rho, 0.0, z), gk = gradient_cyl(k, rho, 0.0, z);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(ga(i, j) == gk(i, j));
    }
}

TEST_CASE("scaled ansatz u_z norm scales like h^0.5 at alpha = 0") {
  std::vector<std::pair<double, double>> pts;
  for (double h : {0.1, 0.05, 0.025, 0.0125}) {
    const WasherGeometry g{0.5, 1.0, h};
    const auto u = scaled_ansatz(g, scaled_ansatz_bump(g), 0.0, h);
    pts.emplace_back(h, std::sqrt(mode_norms(u, ModalQuantity::Uz, {128, 2, QuadRule::GaussLegendre, 8}).total));
  }
  CHECK(fit_exponent(pts).exponent == doctest::Approx(0.5).epsilon(0.05 / 0.5));
}

TEST_CASE("scaled ansatz rejects supports leaving the annulus") {
  const WasherGeometry g{0.5, 1.0, 20.0, 100.0};
  CHECK_THROWS_AS(scaled_ansatz(g, scaled_ansatz_bump(g), 0.5, g.h), DomainError);
  CHECK_THROWS_AS(scaled_ansatz(WasherGeometry{0.5, 1.0, 0.1}, scaled_ansatz_bump(WasherGeometry{}), 0.7, 0.1),
                  InvalidArgument);
}

TEST_CASE("random splines are C1 and honour the left pin") {
  for (int s = 0; s < 10; ++s) {
    const auto sp = random_spline(s, 0.1, 1.0, true);
    CHECK(sp.eval(0.1).first == 0.0);
    for (std::size_t k = 1; k + 1 < sp.knots().size(); ++k) {
      const double t = sp.knots()[k], e = 1e-12;
      CHECK(sp.eval(t - e).first == doctest::Approx(sp.eval(t + e).first).epsilon(1e-6));
      CHECK(sp.eval(t - e).second == doctest::Approx(sp.eval(t + e).second).epsilon(1e-4));
    }
  }
}

TEST_SUITE_END();
