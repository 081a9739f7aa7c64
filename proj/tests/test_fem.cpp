#include <doctest.h>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "dense.hpp"
#include "washerkorn/cylfield.hpp"
#include "washerkorn/error.hpp"
#include "washerkorn/fem.hpp"
#include "washerkorn/testfields.hpp"

using namespace wk;

TEST_SUITE_BEGIN("fem");

namespace {

double quad_form(const SpMat& M, const Eigen::VectorXd& x) { return x.dot(M * x); }

double asym(const SpMat& M) { return SpMat(M - SpMat(M.transpose())).norm() / M.norm(); }

Eigen::VectorXd random_vector(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N;
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x(i) = N(rng);
  return x;
}

}  // namespace

TEST_CASE("grid validation and parsing") {
  CHECK_THROWS_AS(FemGrid({3, 8, 1}).validate(), InvalidArgument);
  CHECK_THROWS_AS(FemGrid({8, 8, 5}).validate(), InvalidArgument);
  const auto g = parse_grid("64x16", 1);
  CHECK(g.n_rho == 64);
  CHECK(g.n_z == 16);
  CHECK(g.label() == "64x16");
  CHECK(FemGrid({32, 4, 2}).label() == "32x4q2");
  CHECK_THROWS_AS(parse_grid("64-16"), InvalidArgument);
  CHECK_THROWS_AS(parse_grid("2x16"), InvalidArgument);
}

TEST_CASE("assembled forms are symmetric and positive semidefinite") {
  const WasherGeometry g{0.5, 1.0, 0.1};
  for (int n : {0, 1, 3})
    for (auto bc : {BoundaryCondition::V1, BoundaryCondition::V2, BoundaryCondition::Unconstrained}) {
      const auto fm = assemble(g, n, bc, {8, 4, 2});
      for (const SpMat* M : {&fm.A, &fm.B, &fm.Mz, &fm.T}) CHECK(asym(*M) < 1e-14);
      for (int k = 0; k < 5; ++k) {
        const auto x = random_vector(fm.dofs.free_size(), 10 * n + k);
        CHECK(quad_form(fm.A, x) >= 0.0);
        CHECK(quad_form(fm.B, x) > 0.0);
        CHECK(quad_form(fm.Mz, x) >= 0.0);
      }
    }
}

TEST_CASE("A <= B on the unconstrained assembly") {
  const WasherGeometry g{0.5, 1.0, 0.1};
  for (int n : {0, 1, 2, 5}) {
    const auto fm = assemble(g, n, BoundaryCondition::Unconstrained, {6, 4, 1});
    for (int k = 0; k < 100; ++k) {
      const auto x = random_vector(fm.dofs.free_size(), 1000 * n + k);
      CHECK(quad_form(fm.A, x) <= quad_form(fm.B, x) * (1 + 1e-12));
    }
    // Spectral check: B - A is positive semidefinite.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(fm.B - fm.A), Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues()(0) >= -1e-12 * es.eigenvalues().cwiseAbs().maxCoeff());
  }
}

TEST_CASE("rigid rotation: constrained versus unconstrained") {
  const WasherGeometry g{0.5, 1.0, 0.1};
  FourierMode rot;
  rot.n = 0;
  rot.a_theta = make_coef([](double r, double) { return Jet{0.7 * r, 0.7, 0.0}; });
  const auto fu = assemble(g, 0, BoundaryCondition::Unconstrained, {16, 4, 1});
  const auto xu = interpolate(fu, rot);
  CHECK(quad_form(fu.A, xu) <= 1e-8 * quad_form(fu.B, xu));
  for (auto bc : {BoundaryCondition::V1, BoundaryCondition::V2}) {
    const auto fc = assemble(g, 0, bc, {16, 4, 1});
    const auto xc = interpolate(fc, rot);
    CHECK(quad_form(fc.A, xc) > 1e-3 * quad_form(fc.B, xc));
  }
}

TEST_CASE("radial dilation has A = B") {
  const WasherGeometry g{0.5, 1.0, 0.1};
  FourierMode dil;
  dil.n = 0;
  dil.a_rho = make_coef([](double r, double) { return Jet{r, 1.0, 0.0}; });
  for (int nr : {8, 16, 32}) {
    const auto fm = assemble(g, 0, BoundaryCondition::Unconstrained, {nr, 4, 1});
    const auto x = interpolate(fm, dil);
    CHECK(quad_form(fm.A, x) / quad_form(fm.B, x) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("admissible null spaces are deflated") {
  const WasherGeometry g{0.5, 1.0, 0.1};
  CHECK(assemble(g, 0, BoundaryCondition::V1, {8, 4, 2}).dofs.null_vectors.size() == 1);
  CHECK(assemble(g, 0, BoundaryCondition::V2, {8, 4, 2}).dofs.null_vectors.empty());
  CHECK(assemble(g, 1, BoundaryCondition::V1, {8, 4, 2}).dofs.null_vectors.empty());
  CHECK(assemble(g, 0, BoundaryCondition::Unconstrained, {8, 4, 2}).dofs.null_vectors.size() == 1);
  CHECK(assemble(g, 1, BoundaryCondition::Unconstrained, {8, 4, 2}).dofs.null_vectors.size() == 1);
  const auto fm = assemble(g, 0, BoundaryCondition::V1, {8, 4, 2});
  const auto& z = fm.dofs.null_vectors[0];
  CHECK(quad_form(fm.B, z) < 1e-12 * fm.B.diagonal().maxCoeff() * z.squaredNorm());
  // On the reduced space B is definite.
  const auto Br = fm.dofs.reduce(fm.B);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(Br), Eigen::EigenvaluesOnly);
  CHECK(es.eigenvalues()(0) > 1e-10 * es.eigenvalues().maxCoeff());
}

TEST_CASE("rectangle boundary conditions are rejected by assemble") {
  CHECK_THROWS_AS(assemble(WasherGeometry{}, 0, BoundaryCondition::RectFZero, {8, 4, 1}), InvalidArgument);
}

TEST_CASE("FE field view reproduces the discrete forms") {
  const WasherGeometry g{0.5, 1.0, 0.1};
  const auto fm = assemble(g, 2, BoundaryCondition::V2, {8, 4, 2});
  const auto x = random_vector(fm.dofs.free_size(), 77);
  const auto f = to_field(fm, x);
  QuadratureSpec q{8, 4, QuadRule::GaussLegendre, 6};
  CHECK(mode_norms(f, ModalQuantity::Strain, q).total == doctest::Approx(quad_form(fm.A, x)).epsilon(1e-10));
  CHECK(mode_norms(f, ModalQuantity::Grad, q).total == doctest::Approx(quad_form(fm.B, x)).epsilon(1e-10));
  CHECK(mode_norms(f, ModalQuantity::Uz, q).total == doctest::Approx(quad_form(fm.Mz, x)).epsilon(1e-10));
}

TEST_CASE("Kirchhoff ansatz interpolant: bilinear strain energy converges at second order") {
  const WasherGeometry g{0.5, 1.0, 0.1};
  const auto phi = kirchhoff_bump(g);
  const auto u = kirchhoff_ansatz(g, phi);
  // Closed form: 2 pi h^3 / 3 int (rho phi''^2 + phi'^2 / rho).
  const double bend = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      [&](double r) {
        const auto p = phi.eval(r);
        return r * p.d2 * p.d2 + p.d1 * p.d1 / r;
      },
      phi.a(), phi.b(), 15, 1e-13);
  const double exact = 2 * std::numbers::pi * std::pow(g.h, 3) / 3 * bend;
  double errs[2];
  int k = 0;
  for (auto grid : {FemGrid{64, 16, 1}, FemGrid{128, 32, 1}}) {
    const auto fm = assemble(g, 0, BoundaryCondition::V2, grid);
    const auto x = interpolate(fm, u.modes()[0]);
    errs[k++] = std::abs(quad_form(fm.A, x) / exact - 1.0);
  }
  CHECK(errs[0] <= 1e-3);
  CHECK(errs[1] <= 2.5e-4);
}

TEST_SUITE_END();
