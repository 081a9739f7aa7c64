#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "washerkorn/geometry.hpp"

namespace wk {

/// Value and first partials of a scalar function of two variables.  For
/// washer coefficient functions the variables are (rho, z); for rectangle
/// fields they are (x, y).
struct Jet {
  double v = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;

  Jet& operator+=(const Jet& o) {
    v += o.v;
    d1 += o.d1;
    d2 += o.d2;
    return *this;
  }
  friend Jet operator*(double s, const Jet& j) { return {s * j.v, s * j.d1, s * j.d2}; }
  friend Jet operator*(const Jet& a, const Jet& b) {
    return {a.v * b.v, a.d1 * b.v + a.v * b.d1, a.d2 * b.v + a.v * b.d2};
  }
};

/// A scalar function of two variables with hand-supplied first partials.
class ScalarField2D {
 public:
  virtual ~ScalarField2D() = default;
  virtual Jet eval(double s, double t) const = 0;
};

using Coef = std::shared_ptr<const ScalarField2D>;

/// Closed-form field from a callable.
class LambdaField final : public ScalarField2D {
 public:
  explicit LambdaField(std::function<Jet(double, double)> fn) : fn_(std::move(fn)) {}
  Jet eval(double s, double t) const override { return fn_(s, t); }

 private:
  std::function<Jet(double, double)> fn_;
};

Coef make_coef(std::function<Jet(double, double)> fn);

inline Jet eval_or_zero(const Coef& c, double s, double t) { return c ? c->eval(s, t) : Jet{}; }

/// Samples on a uniform tensor grid over [s0, s1] x [t0, t1], stored
/// row-major with t fastest.  Partials come from second-order centered
/// differences (one-sided second order at the edges); values and partials
/// are bilinearly interpolated between nodes.
class GridSampledField final : public ScalarField2D {
 public:
  GridSampledField(double s0, double s1, int ns, double t0, double t1, int nt, std::vector<double> values);

  /// Samples `f` at the grid nodes.
  static std::shared_ptr<GridSampledField> sample(const ScalarField2D& f, double s0, double s1, int ns,
                                                  double t0, double t1, int nt);

  Jet eval(double s, double t) const override;

  int ns() const { return ns_; }
  int nt() const { return nt_; }
  double at(int i, int j) const { return values_[static_cast<std::size_t>(i) * nt_ + j]; }
  const std::vector<double>& values() const { return values_; }

 private:
  double s0_, s1_, t0_, t1_;
  int ns_, nt_;
  std::vector<double> values_;
  std::vector<double> ds_;
  std::vector<double> dt_;
};

/// One Fourier mode of a washer displacement:
///   u_rho   = a_rho cos(n theta) + b_rho sin(n theta), etc.
/// Null coefficients are zero.  For n = 0 the sine coefficients must be null.
struct FourierMode {
  int n = 0;
  Coef a_rho, b_rho, a_theta, b_theta, a_z, b_z;
};

/// Coefficient Jets of one mode at a (rho, z) point.  Index 0 = cosine part,
/// 1 = sine part; components ordered (rho, theta, z).
struct ModeJets {
  std::array<std::array<Jet, 3>, 2> c{};
};

ModeJets eval_mode(const FourierMode& m, double rho, double z);

class FourierField {
 public:
  FourierField() = default;
  FourierField(WasherGeometry geometry, std::vector<FourierMode> modes, std::vector<double> rho_breaks = {});

  const WasherGeometry& geometry() const { return geometry_; }
  const std::vector<FourierMode>& modes() const { return modes_; }
  /// Radii where coefficient functions may lose smoothness (support edges);
  /// quadrature panels are split there.
  const std::vector<double>& rho_breaks() const { return rho_breaks_; }

  /// Synthesized displacement (u_rho, u_theta, u_z) at a point.
  std::array<double, 3> displacement(double rho, double theta, double z) const;

  FourierField scaled(double s) const;
  /// Field restricted to a single mode (throws if absent).
  FourierField single_mode(int n) const;

 private:
  WasherGeometry geometry_;
  std::vector<FourierMode> modes_;
  std::vector<double> rho_breaks_;
};

/// Planar displacement U = (f, g) on a rectangle; Jets are in (x, y).
struct RectField {
  RectGeometry geometry;
  Coef f;
  Coef g;
  std::optional<BoundaryCondition> bc;

  RectField scaled(double s) const;
};

}  // namespace wk
