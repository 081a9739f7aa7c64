#pragma once

#include <cstdint>
#include <vector>

#include "washerkorn/field.hpp"
#include "washerkorn/geometry.hpp"

namespace wk {

enum class BumpKind { ExpMollifier, PolySpline };

/// phi and its first two derivatives.
struct BumpJet {
  double v = 0.0, d1 = 0.0, d2 = 0.0;
};

/// Smooth compactly supported profile on [a, b], scaled so that
/// int |phi'|^2 = 1.  All derivatives vanish outside the support.
class BumpFunction {
 public:
  BumpFunction(double a, double b, BumpKind kind = BumpKind::ExpMollifier);

  BumpJet eval(double t) const;
  double a() const { return a_; }
  double b() const { return b_; }
  BumpKind kind() const { return kind_; }
  /// int |phi'|^2 and int |phi''|^2 over the support.
  double dphi_sq() const { return dphi_sq_; }
  double d2phi_sq() const { return d2phi_sq_; }

 private:
  BumpJet raw(double t) const;

  double a_, b_;
  BumpKind kind_;
  double scale_ = 1.0;
  double dphi_sq_ = 0.0;
  double d2phi_sq_ = 0.0;
};

/// Throws DomainError on an empty/inverted interval or one that is not inside (lo, hi].
BumpFunction bump(double a, double b, BumpKind kind = BumpKind::ExpMollifier);

/// Bump on [(R + r)/2, R] used by the Kirchhoff ansatz.
BumpFunction kirchhoff_bump(const WasherGeometry& g, BumpKind kind = BumpKind::ExpMollifier);
/// Bump on [R - (R - r)/4, R] used by the scaled ansatz.
BumpFunction scaled_ansatz_bump(const WasherGeometry& g, BumpKind kind = BumpKind::ExpMollifier);

/// Mode-0 field u = (-z phi'(rho), 0, phi(rho)).  phi must be supported in
/// [(R + r)/2, R].
FourierField kirchhoff_ansatz(const WasherGeometry& geometry, const BumpFunction& phi);

/// Mode-0 field with a boundary layer of width O(h^alpha) at rho = R:
///   u_rho = -(z / h^alpha) phi'(s),  u_z = phi(s),  s = R + (rho - R) / h^alpha.
/// phi must end at R; alpha = 0 gives kirchhoff_ansatz exactly.
FourierField scaled_ansatz(const WasherGeometry& geometry, const BumpFunction& phi, double alpha, double h);

struct RandomFieldOptions {
  int mode_count = 5;
  /// Coefficient of degree d is scaled by decay^d.
  double decay = 0.5;
  int max_degree = 6;
};

/// Deterministic random washer field whose constrained components vanish
/// exactly at rho = r and rho = R (they carry a factor (rho - r)(R - rho)).
FourierField random_admissible_field(std::uint64_t seed, const WasherGeometry& geometry, BoundaryCondition bc,
                                     const RandomFieldOptions& options = {});

/// Deterministic random rectangle field satisfying bc exactly.
RectField random_rect_field(std::uint64_t seed, const RectGeometry& geometry, BoundaryCondition bc,
                            const RandomFieldOptions& options = {});

struct HarmonicTerm {
  int k = 1;
  double a = 0.0;
  double b = 0.0;
};

/// f(x, y) = sum_k [a_k cosh(k pi x / D) + b_k sinh(k pi x / D)] sin(k pi (y - l) / D),
/// D = L - l.  Harmonic, and zero on y = l and y = L.
class HarmonicRectField {
 public:
  HarmonicRectField(RectGeometry geometry, std::vector<HarmonicTerm> terms);

  const RectGeometry& geometry() const { return geometry_; }
  const std::vector<HarmonicTerm>& terms() const { return terms_; }

  /// Value and (d/dx, d/dy).
  Jet eval(double x, double y) const;
  /// Value at a point (convenience for finite-difference checks).
  double operator()(double x, double y) const { return eval(x, y).v; }
  /// U = (f, 0) view.
  RectField as_rect_field() const;
  HarmonicRectField scaled(double s) const;

 private:
  RectGeometry geometry_;
  std::vector<HarmonicTerm> terms_;
};

/// Throws InvalidArgument when every coefficient is zero.
HarmonicRectField harmonic_field(const RectGeometry& geometry, std::vector<HarmonicTerm> terms);

/// Random harmonic field with `terms` modes k = 1..terms.
HarmonicRectField random_harmonic_field(std::uint64_t seed, const RectGeometry& geometry, int terms = 6,
                                        double decay = 0.7);

/// C^1 piecewise-cubic Hermite function on [knots.front(), knots.back()].
class Spline1D {
 public:
  Spline1D(std::vector<double> knots, std::vector<double> values, std::vector<double> slopes);

  double a() const { return knots_.front(); }
  double b() const { return knots_.back(); }
  const std::vector<double>& knots() const { return knots_; }
  /// Value and derivative.
  std::pair<double, double> eval(double t) const;
  Spline1D scaled(double s) const;

 private:
  std::vector<double> knots_, values_, slopes_;
};

/// Random spline on [a, b]; `pin_left` forces f(a) = 0.
Spline1D random_spline(std::uint64_t seed, double a, double b, bool pin_left, int pieces = 6);

}  // namespace wk
