#include "washerkorn/testfields.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "washerkorn/error.hpp"
#include "washerkorn/quadrature.hpp"

namespace wk {

namespace {

// Portable uniform draw on [-1, 1] from a 64-bit engine.
double uniform_pm1(std::mt19937_64& rng) { return 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0; }

// Legendre values and derivatives P_0..P_d at x.
void legendre_all(int d, double x, std::vector<double>& p, std::vector<double>& dp) {
  p.assign(d + 1, 0.0);
  dp.assign(d + 1, 0.0);
  p[0] = 1.0;
  if (d >= 1) {
    p[1] = x;
    dp[1] = 1.0;
  }
  for (int k = 1; k < d; ++k) {
    p[k + 1] = ((2.0 * k + 1.0) * x * p[k] - k * p[k - 1]) / (k + 1.0);
    dp[k + 1] = dp[k - 1] + (2.0 * k + 1.0) * p[k];
  }
}

enum class Vanish { None, SBoth, TBoth, TLow };

// sum_{i,j} c_ij P_i(xi(s)) P_j(eta(t)) times an optional vanishing factor.
class PolySeries final : public ScalarField2D {
 public:
  PolySeries(double s0, double s1, double t0, double t1, int ds, int dt, std::vector<double> c, Vanish vanish)
      : s0_(s0), s1_(s1), t0_(t0), t1_(t1), ds_(ds), dt_(dt), c_(std::move(c)), vanish_(vanish) {}

  Jet eval(double s, double t) const override {
    thread_local std::vector<double> ps, dps, pt, dpt;
    const double ks = 2.0 / (s1_ - s0_), kt = 2.0 / (t1_ - t0_);
    legendre_all(ds_, ks * (s - s0_) - 1.0, ps, dps);
    legendre_all(dt_, kt * (t - t0_) - 1.0, pt, dpt);
    Jet out;
    for (int i = 0; i <= ds_; ++i)
      for (int j = 0; j <= dt_; ++j) {
        const double c = c_[static_cast<std::size_t>(i) * (dt_ + 1) + j];
        out.v += c * ps[i] * pt[j];
        out.d1 += c * ks * dps[i] * pt[j];
        out.d2 += c * kt * ps[i] * dpt[j];
      }
    switch (vanish_) {
      case Vanish::None: return out;
      case Vanish::SBoth: {
        const double n = 4.0 / ((s1_ - s0_) * (s1_ - s0_));
        const Jet m{n * (s - s0_) * (s1_ - s), n * (s1_ + s0_ - 2.0 * s), 0.0};
        return m * out;
      }
      case Vanish::TBoth: {
        const double n = 4.0 / ((t1_ - t0_) * (t1_ - t0_));
        const Jet m{n * (t - t0_) * (t1_ - t), 0.0, n * (t1_ + t0_ - 2.0 * t)};
        return m * out;
      }
      case Vanish::TLow: {
        const double n = 1.0 / (t1_ - t0_);
        const Jet m{n * (t - t0_), 0.0, n};
        return m * out;
      }
    }
    return out;
  }

 private:
  double s0_, s1_, t0_, t1_;
  int ds_, dt_;
  std::vector<double> c_;
  Vanish vanish_;
};

class SumField final : public ScalarField2D {
 public:
  SumField(Coef a, Coef b) : a_(std::move(a)), b_(std::move(b)) {}
  Jet eval(double s, double t) const override {
    Jet j = a_->eval(s, t);
    j += b_->eval(s, t);
    return j;
  }

 private:
  Coef a_, b_;
};

Coef random_series(std::mt19937_64& rng, double s0, double s1, double t0, double t1, int ds, int dt,
                   double decay, double amplitude, Vanish vanish) {
  std::vector<double> c(static_cast<std::size_t>(ds + 1) * (dt + 1));
  for (int i = 0; i <= ds; ++i)
    for (int j = 0; j <= dt; ++j)
      c[static_cast<std::size_t>(i) * (dt + 1) + j] = amplitude * std::pow(decay, i + j) * uniform_pm1(rng);
  return std::make_shared<PolySeries>(s0, s1, t0, t1, ds, dt, std::move(c), vanish);
}

void check_options(const RandomFieldOptions& o) {
  if (o.mode_count < 1) throw InvalidArgument("random field: mode_count must be >= 1");
  if (!(o.decay > 0.0)) throw InvalidArgument("random field: decay must be positive");
  if (o.max_degree < 0) throw InvalidArgument("random field: negative degree");
}

}  // namespace

BumpFunction::BumpFunction(double a, double b, BumpKind kind) : a_(a), b_(b), kind_(kind) {
  if (!(std::isfinite(a) && std::isfinite(b) && b > a)) throw DomainError("bump: empty or inverted support");
  const auto rule = composite_rule(a, b, 64, QuadRule::GaussLegendre, 10);
  double i1 = 0.0, i2 = 0.0;
  for (std::size_t k = 0; k < rule.size(); ++k) {
    const auto j = raw(rule.x[k]);
    i1 += rule.w[k] * j.d1 * j.d1;
    i2 += rule.w[k] * j.d2 * j.d2;
  }
  scale_ = 1.0 / std::sqrt(i1);
  dphi_sq_ = 1.0;
  d2phi_sq_ = scale_ * scale_ * i2;
}

BumpJet BumpFunction::raw(double t) const {
  const double k = 2.0 / (b_ - a_);
  const double s = k * (t - a_) - 1.0;
  if (!(std::abs(s) < 1.0)) return {};
  const double q = 1.0 - s * s;
  if (kind_ == BumpKind::ExpMollifier) {
    // exp(-1/q) is below 1e-170 there; avoids 0 * inf in the derivative factors.
    if (q < 2.5e-3) return {};
    const double g = std::exp(-1.0 / q);
    const double g1 = g * (-2.0 * s / (q * q));
    const double g2 = g * (4.0 * s * s / (q * q * q * q) - 2.0 / (q * q) - 8.0 * s * s / (q * q * q));
    return {g, k * g1, k * k * g2};
  }
  // (1 - s^2)^4
  const double q2 = q * q, q3 = q2 * q;
  return {q3 * q, k * (-8.0 * s * q3), k * k * (-8.0 * q3 + 48.0 * s * s * q2)};
}

BumpJet BumpFunction::eval(double t) const {
  auto j = raw(t);
  return {scale_ * j.v, scale_ * j.d1, scale_ * j.d2};
}

BumpFunction bump(double a, double b, BumpKind kind) { return BumpFunction(a, b, kind); }

BumpFunction kirchhoff_bump(const WasherGeometry& g, BumpKind kind) { return bump(0.5 * (g.R + g.r), g.R, kind); }

BumpFunction scaled_ansatz_bump(const WasherGeometry& g, BumpKind kind) {
  return bump(g.R - 0.25 * (g.R - g.r), g.R, kind);
}

FourierField kirchhoff_ansatz(const WasherGeometry& geometry, const BumpFunction& phi) {
  geometry.validate();
  const double tol = 1e-12 * geometry.R;
  if (phi.a() < 0.5 * (geometry.R + geometry.r) - tol || phi.b() > geometry.R + tol)
    throw DomainError("kirchhoff_ansatz: bump support must lie in [(R+r)/2, R]");
  FourierMode m;
  m.n = 0;
  m.a_rho = make_coef([phi](double rho, double z) {
    const auto p = phi.eval(rho);
    return Jet{-z * p.d1, -z * p.d2, -p.d1};
  });
  m.a_z = make_coef([phi](double rho, double) {
    const auto p = phi.eval(rho);
    return Jet{p.v, p.d1, 0.0};
  });
  return FourierField(geometry, {m}, {phi.a(), phi.b()});
}

FourierField scaled_ansatz(const WasherGeometry& geometry, const BumpFunction& phi, double alpha, double h) {
  if (!(alpha >= 0.0 && alpha <= 0.5)) throw InvalidArgument("scaled_ansatz: alpha must lie in [0, 1/2]");
  const WasherGeometry g = geometry.with_h(h);
  g.validate();
  if (std::abs(phi.b() - g.R) > 1e-12 * g.R) throw DomainError("scaled_ansatz: bump must end at R");
  const double ha = std::pow(h, alpha);
  const double lo = g.R - (g.R - phi.a()) * ha;
  if (!(lo > g.r)) throw DomainError("scaled_ansatz: support escapes the annulus");
  const double R = g.R;
  FourierMode m;
  m.n = 0;
  m.a_rho = make_coef([phi, ha, R](double rho, double z) {
    const auto p = phi.eval(R + (rho - R) / ha);
    return Jet{-z / ha * p.d1, -z / (ha * ha) * p.d2, -p.d1 / ha};
  });
  m.a_z = make_coef([phi, ha, R](double rho, double) {
    const auto p = phi.eval(R + (rho - R) / ha);
    return Jet{p.v, p.d1 / ha, 0.0};
  });
  return FourierField(g, {m}, {lo, R});
}

FourierField random_admissible_field(std::uint64_t seed, const WasherGeometry& geometry, BoundaryCondition bc,
                                     const RandomFieldOptions& options) {
  geometry.validate();
  check_options(options);
  if (!is_washer_bc(bc)) throw InvalidArgument("random_admissible_field: bc does not apply to washers");
  std::mt19937_64 rng(seed);
  const bool fix_rho = bc == BoundaryCondition::V1;
  const bool fix_theta = bc == BoundaryCondition::V1 || bc == BoundaryCondition::V2;
  const bool fix_z = bc == BoundaryCondition::V2;
  const int d = options.max_degree;
  std::vector<FourierMode> modes;
  for (int n = 0; n < options.mode_count; ++n) {
    const double amp = std::pow(options.decay, n);
    auto make = [&](bool fixed) {
      return random_series(rng, geometry.r, geometry.R, 0.0, geometry.h, d, d, options.decay, amp,
                           fixed ? Vanish::SBoth : Vanish::None);
    };
    FourierMode m;
    m.n = n;
    m.a_rho = make(fix_rho);
    m.a_theta = make(fix_theta);
    m.a_z = make(fix_z);
    if (n > 0) {
      m.b_rho = make(fix_rho);
      m.b_theta = make(fix_theta);
      m.b_z = make(fix_z);
    }
    modes.push_back(std::move(m));
  }
  return FourierField(geometry, std::move(modes));
}

RectField random_rect_field(std::uint64_t seed, const RectGeometry& geometry, BoundaryCondition bc,
                            const RandomFieldOptions& options) {
  geometry.validate();
  check_options(options);
  if (!is_rect_bc(bc)) throw InvalidArgument("random_rect_field: bc does not apply to rectangles");
  std::mt19937_64 rng(seed);
  const int d = options.max_degree;
  const double x0 = 0.0, x1 = geometry.h, y0 = geometry.l, y1 = geometry.L;
  auto series = [&](Vanish v, int dy) { return random_series(rng, x0, x1, y0, y1, d, dy, options.decay, 1.0, v); };
  RectField out;
  out.geometry = geometry;
  out.bc = bc;
  switch (bc) {
    case BoundaryCondition::RectFZero:
      out.f = series(Vanish::TBoth, d);
      out.g = series(Vanish::None, d);
      break;
    case BoundaryCondition::RectGZeroAt0:
      out.f = series(Vanish::None, d);
      out.g = series(Vanish::TLow, d);
      break;
    case BoundaryCondition::RectFPeriodic: {
      auto trace = series(Vanish::None, 0);
      out.f = std::make_shared<SumField>(trace, series(Vanish::TBoth, d));
      out.g = series(Vanish::None, d);
      break;
    }
    default:
      out.f = series(Vanish::None, d);
      out.g = series(Vanish::None, d);
      break;
  }
  return out;
}

HarmonicRectField::HarmonicRectField(RectGeometry geometry, std::vector<HarmonicTerm> terms)
    : geometry_(geometry), terms_(std::move(terms)) {
  geometry_.validate();
  for (const auto& t : terms_)
    if (t.k < 1) throw InvalidArgument("harmonic field: k must be a positive integer");
}

Jet HarmonicRectField::eval(double x, double y) const {
  const double D = geometry_.width_y();
  Jet out;
  for (const auto& t : terms_) {
    const double kap = t.k * std::numbers::pi / D;
    const double ch = std::cosh(kap * x), sh = std::sinh(kap * x);
    const double sy = std::sin(kap * (y - geometry_.l)), cy = std::cos(kap * (y - geometry_.l));
    const double X = t.a * ch + t.b * sh;
    const double dX = kap * (t.a * sh + t.b * ch);
    out.v += X * sy;
    out.d1 += dX * sy;
    out.d2 += X * kap * cy;
  }
  return out;
}

RectField HarmonicRectField::as_rect_field() const {
  auto self = std::make_shared<HarmonicRectField>(*this);
  RectField rf;
  rf.geometry = geometry_;
  rf.f = make_coef([self](double x, double y) { return self->eval(x, y); });
  rf.bc = BoundaryCondition::RectFZero;
  return rf;
}

HarmonicRectField HarmonicRectField::scaled(double s) const {
  auto t = terms_;
  for (auto& term : t) {
    term.a *= s;
    term.b *= s;
  }
  return HarmonicRectField(geometry_, std::move(t));
}

HarmonicRectField harmonic_field(const RectGeometry& geometry, std::vector<HarmonicTerm> terms) {
  const bool any = std::any_of(terms.begin(), terms.end(), [](const auto& t) { return t.a != 0.0 || t.b != 0.0; });
  if (!any) throw InvalidArgument("harmonic_field: all coefficients are zero");
  return HarmonicRectField(geometry, std::move(terms));
}

HarmonicRectField random_harmonic_field(std::uint64_t seed, const RectGeometry& geometry, int terms, double decay) {
  if (terms < 1) throw InvalidArgument("random_harmonic_field: need at least one term");
  std::mt19937_64 rng(seed);
  std::vector<HarmonicTerm> t;
  for (int k = 1; k <= terms; ++k) {
    const double amp = std::pow(decay, k - 1);
    // Normalize by cosh(k pi h / D) so that high-k terms do not swamp the field.
    const double kap_h = k * std::numbers::pi * geometry.h / geometry.width_y();
    const double norm = 1.0 / std::cosh(kap_h);
    t.push_back({k, amp * norm * uniform_pm1(rng), amp * norm * uniform_pm1(rng)});
  }
  return harmonic_field(geometry, std::move(t));
}

Spline1D::Spline1D(std::vector<double> knots, std::vector<double> values, std::vector<double> slopes)
    : knots_(std::move(knots)), values_(std::move(values)), slopes_(std::move(slopes)) {
  if (knots_.size() < 2 || values_.size() != knots_.size() || slopes_.size() != knots_.size())
    throw InvalidArgument("spline: inconsistent knot data");
  for (std::size_t i = 1; i < knots_.size(); ++i)
    if (!(knots_[i] > knots_[i - 1])) throw InvalidArgument("spline: knots must increase");
}

std::pair<double, double> Spline1D::eval(double t) const {
  if (t < a() || t > b()) throw DomainError("spline evaluated outside its interval");
  auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
  std::size_t i = std::min<std::size_t>(std::max<std::ptrdiff_t>(it - knots_.begin() - 1, 0), knots_.size() - 2);
  const double x0 = knots_[i], x1 = knots_[i + 1], dx = x1 - x0;
  const double u = (t - x0) / dx;
  const double h00 = (1 + 2 * u) * (1 - u) * (1 - u), h10 = u * (1 - u) * (1 - u);
  const double h01 = u * u * (3 - 2 * u), h11 = u * u * (u - 1);
  const double d00 = 6 * u * u - 6 * u, d10 = 3 * u * u - 4 * u + 1, d01 = -6 * u * u + 6 * u, d11 = 3 * u * u - 2 * u;
  const double v = h00 * values_[i] + h10 * dx * slopes_[i] + h01 * values_[i + 1] + h11 * dx * slopes_[i + 1];
  const double d =
      (d00 * values_[i] + d01 * values_[i + 1]) / dx + d10 * slopes_[i] + d11 * slopes_[i + 1];
  return {v, d};
}

Spline1D Spline1D::scaled(double s) const {
  auto v = values_, d = slopes_;
  for (auto& x : v) x *= s;
  for (auto& x : d) x *= s;
  return Spline1D(knots_, std::move(v), std::move(d));
}

Spline1D random_spline(std::uint64_t seed, double a, double b, bool pin_left, int pieces) {
  if (!(b > a)) throw InvalidArgument("random_spline: empty interval");
  if (pieces < 1) throw InvalidArgument("random_spline: need at least one piece");
  std::mt19937_64 rng(seed);
  std::vector<double> knots{a};
  std::vector<double> cuts;
  for (int i = 1; i < pieces; ++i) cuts.push_back(a + (b - a) * (0.5 + 0.5 * uniform_pm1(rng)));
  std::sort(cuts.begin(), cuts.end());
  for (double c : cuts)
    if (c > knots.back() + 1e-6 * (b - a) && c < b - 1e-6 * (b - a)) knots.push_back(c);
  knots.push_back(b);
  std::vector<double> vals, slopes;
  for (std::size_t i = 0; i < knots.size(); ++i) {
    vals.push_back(uniform_pm1(rng));
    slopes.push_back(uniform_pm1(rng) * 4.0 / (b - a));
  }
  if (pin_left) vals.front() = 0.0;
  return Spline1D(std::move(knots), std::move(vals), std::move(slopes));
}

}  // namespace wk
