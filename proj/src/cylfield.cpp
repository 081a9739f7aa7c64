#include "washerkorn/cylfield.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "washerkorn/error.hpp"

namespace wk {

namespace {

void check_point(const WasherGeometry& g, double rho, double z) {
  if (!(rho > 0.0)) throw DomainError("gradient_cyl: rho must be positive");
  const double tr = 1e-12 * g.R, tz = 1e-12 * g.h;
  if (rho < g.r - tr || rho > g.R + tr || z < -tz || z > g.h + tz)
    throw DomainError("gradient_cyl: point outside the washer");
}

double weight_value(Weight w, double s) {
  switch (w) {
    case Weight::One: return 1.0;
    case Weight::Rho:
    case Weight::Y: return s;
    case Weight::InvRho:
    case Weight::InvY: return 1.0 / s;
  }
  return 1.0;
}

double finite_or_throw(double v, const char* what) {
  if (!std::isfinite(v)) throw NonFiniteError(std::string("non-finite value in ") + what);
  return v;
}

double sq(double x) { return x * x; }

}  // namespace

Mat3 Grad3::symmetrized() const {
  Mat3 e{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) e[i][j] = 0.5 * (m[i][j] + m[j][i]);
  return e;
}

double frobenius_sq(const Mat3& m) {
  double s = 0.0;
  for (const auto& row : m)
    for (double x : row) s += x * x;
  return s;
}

double theta_factor(int n) { return n == 0 ? 2.0 * std::numbers::pi : std::numbers::pi; }

ModalGradient modal_gradient(const FourierMode& mode, double rho, double z) {
  ModalGradient g;
  g.jets = eval_mode(mode, rho, z);
  const auto& a = g.jets.c[0];
  const auto& b = g.jets.c[1];
  const double n = mode.n;
  g.cos = {{{a[0].d1, (n * b[0].v - a[1].v) / rho, a[0].d2},
            {a[1].d1, (n * b[1].v + a[0].v) / rho, a[1].d2},
            {a[2].d1, n * b[2].v / rho, a[2].d2}}};
  g.sin = {{{b[0].d1, (-n * a[0].v - b[1].v) / rho, b[0].d2},
            {b[1].d1, (-n * a[1].v + b[0].v) / rho, b[1].d2},
            {b[2].d1, -n * a[2].v / rho, b[2].d2}}};
  return g;
}

Grad3 gradient_cyl(const FourierField& field, double rho, double theta, double z) {
  check_point(field.geometry(), rho, z);
  Grad3 out;
  for (const auto& mode : field.modes()) {
    const auto mg = modal_gradient(mode, rho, z);
    const double c = std::cos(mode.n * theta), s = std::sin(mode.n * theta);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) out.m[i][j] += mg.cos[i][j] * c + mg.sin[i][j] * s;
  }
  return out;
}

Mat3 strain(const FourierField& field, double rho, double theta, double z) {
  return gradient_cyl(field, rho, theta, z).symmetrized();
}

double modal_density(const ModalGradient& g, ModalQuantity which, double rho) {
  const auto& a = g.jets.c[0];
  const auto& b = g.jets.c[1];
  switch (which) {
    case ModalQuantity::Grad: return frobenius_sq(g.cos) + frobenius_sq(g.sin);
    case ModalQuantity::Strain:
      return frobenius_sq(Grad3{g.cos}.symmetrized()) + frobenius_sq(Grad3{g.sin}.symmetrized());
    case ModalQuantity::Uz: return sq(a[2].v) + sq(b[2].v);
    case ModalQuantity::URhoOverRho: return (sq(a[0].v) + sq(b[0].v)) / (rho * rho);
    case ModalQuantity::GradUz: {
      double s = 0.0;
      for (int j = 0; j < 3; ++j) s += sq(g.cos[2][j]) + sq(g.sin[2][j]);
      return s;
    }
    case ModalQuantity::URhoZ: return sq(g.cos[2][0]) + sq(g.sin[2][0]);
    case ModalQuantity::BlockZ:
      return sq(g.cos[0][1]) + sq(g.sin[0][1]) + sq(g.cos[1][0]) + sq(g.sin[1][0]);
  }
  return 0.0;
}

double modal_density(const FourierMode& mode, ModalQuantity which, double rho, double z) {
  return modal_density(modal_gradient(mode, rho, z), which, rho);
}

double modal_integral(const FourierField& field, const FourierMode& mode,
                      const std::function<double(double, double)>& density, Weight weight,
                      const QuadratureSpec& quad) {
  quad.validate();
  const auto& geo = field.geometry();
  if ((weight == Weight::InvRho) && geo.r < kInvWeightFloor)
    throw InvalidArgument("1/rho weight rejected: inner radius below floor");
  const auto rr = composite_rule(geo.r, geo.R, quad.n_rho, quad.rule, quad.order, field.rho_breaks());
  const auto rz = composite_rule(0.0, geo.h, quad.n_z, quad.rule, quad.order);
  double acc = 0.0;
  for (std::size_t i = 0; i < rr.size(); ++i) {
    const double wr = rr.w[i] * weight_value(weight, rr.x[i]);
    double inner = 0.0;
    for (std::size_t j = 0; j < rz.size(); ++j) inner += rz.w[j] * density(rr.x[i], rz.x[j]);
    acc += wr * inner;
  }
  return finite_or_throw(theta_factor(mode.n) * acc, "modal integral");
}

ModeNorms mode_norms(const FourierField& field, ModalQuantity which, const QuadratureSpec& quad) {
  ModeNorms out;
  for (const auto& mode : field.modes()) {
    const double v = modal_integral(
        field, mode, [&](double rho, double z) { return modal_density(mode, which, rho, z); }, Weight::Rho, quad);
    out.modes.push_back(mode.n);
    out.per_mode.push_back(v);
    out.total += v;
  }
  return out;
}

std::vector<double> mode_norm_totals(const FourierField& field, std::span<const ModalQuantity> which,
                                     const QuadratureSpec& quad) {
  quad.validate();
  const auto& geo = field.geometry();
  const auto rr = composite_rule(geo.r, geo.R, quad.n_rho, quad.rule, quad.order, field.rho_breaks());
  const auto rz = composite_rule(0.0, geo.h, quad.n_z, quad.rule, quad.order);
  std::vector<double> out(which.size(), 0.0), acc(which.size()), inner(which.size());
  for (const auto& mode : field.modes()) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (std::size_t i = 0; i < rr.size(); ++i) {
      std::fill(inner.begin(), inner.end(), 0.0);
      for (std::size_t j = 0; j < rz.size(); ++j) {
        const auto g = modal_gradient(mode, rr.x[i], rz.x[j]);
        for (std::size_t k = 0; k < which.size(); ++k) inner[k] += rz.w[j] * modal_density(g, which[k], rr.x[i]);
      }
      for (std::size_t k = 0; k < which.size(); ++k) acc[k] += rr.w[i] * rr.x[i] * inner[k];
    }
    for (std::size_t k = 0; k < which.size(); ++k) out[k] += finite_or_throw(theta_factor(mode.n) * acc[k], "mode norm");
  }
  return out;
}

double weighted_norm_sq(const WasherGeometry& geometry, const WasherQuantity& q, Weight weight,
                        const QuadratureSpec& quad, std::span<const double> rho_breaks) {
  quad.validate();
  geometry.validate();
  if (weight == Weight::Y || weight == Weight::InvY) throw InvalidArgument("washer norms take rho weights");
  if (weight == Weight::InvRho && geometry.r < kInvWeightFloor)
    throw InvalidArgument("1/rho weight rejected: inner radius below floor");
  const auto rr = composite_rule(geometry.r, geometry.R, quad.n_rho, quad.rule, quad.order, rho_breaks);
  const auto rz = composite_rule(0.0, geometry.h, quad.n_z, quad.rule, quad.order);
  const int nt = quad.n_theta;
  const double wt = 2.0 * std::numbers::pi / nt;
  double acc = 0.0;
  for (std::size_t i = 0; i < rr.size(); ++i) {
    const double wr = rr.w[i] * weight_value(weight, rr.x[i]);
    for (std::size_t j = 0; j < rz.size(); ++j) {
      double s = 0.0;
      for (int k = 0; k < nt; ++k) {
        const auto vals = q(rr.x[i], wt * k, rz.x[j]);
        for (double v : vals) s += v * v;
      }
      acc += wr * rz.w[j] * wt * s;
    }
  }
  return finite_or_throw(acc, "weighted_norm_sq");
}

double weighted_norm_sq(const RectGeometry& geometry, const RectQuantity& q, Weight weight, const QuadratureSpec& quad,
                        std::span<const double> x_breaks, std::span<const double> y_breaks) {
  quad.validate();
  geometry.validate();
  if (weight == Weight::Rho || weight == Weight::InvRho) throw InvalidArgument("rectangle norms take y weights");
  if (weight == Weight::InvY && geometry.l < kInvWeightFloor)
    throw InvalidArgument("1/y weight rejected: lower edge below floor");
  const auto rx = composite_rule(0.0, geometry.h, quad.n_rho, quad.rule, quad.order, x_breaks);
  const auto ry = composite_rule(geometry.l, geometry.L, quad.n_z, quad.rule, quad.order, y_breaks);
  double acc = 0.0;
  for (std::size_t j = 0; j < ry.size(); ++j) {
    const double wy = ry.w[j] * weight_value(weight, ry.x[j]);
    double inner = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
      const auto vals = q(rx.x[i], ry.x[j]);
      double s = 0.0;
      for (double v : vals) s += v * v;
      inner += rx.w[i] * s;
    }
    acc += wy * inner;
  }
  return finite_or_throw(acc, "weighted_norm_sq");
}

}  // namespace wk
