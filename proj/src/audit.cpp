#include "washerkorn/audit.hpp"

#include <json.hpp>
#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <limits>

#include "washerkorn/cylfield.hpp"
#include "washerkorn/error.hpp"
#include "washerkorn/io.hpp"
#include "washerkorn/parallel.hpp"

namespace wk {

namespace {

const std::vector<InequalityInfo> kRegistry = {
    {InequalityId::HarmonicSep, "HARMONIC_SEP",
     "||sqrt(y) f_y||^2 <= 40 (||sqrt(y) f_x|| ||sqrt(y) f|| / h + ||sqrt(y) f_x||^2), f harmonic, f(x,l)=f(x,L)=0",
     40.0, InputClass::Harmonic},
    {InequalityId::Korn15RectW, "KORN15_RECT_W",
     "||sqrt(y) grad U||^2 <= C (||sqrt(y) f|| ||sqrt(y) e(U)|| / h + ||sqrt(y) e(U)||^2), f(x,l)=f(x,L)=0, h <= c l",
     std::nullopt, InputClass::Rect},
    {InequalityId::Korn15Washer, "KORN15_WASHER",
     "||sqrt(rho) grad u||^2 <= C (||sqrt(rho) u_z|| ||sqrt(rho) e(u)|| / h + ||sqrt(rho) e(u)||^2), u in V1 or V2",
     std::nullopt, InputClass::Washer},
    {InequalityId::Korn1Washer, "KORN1_WASHER", "||sqrt(rho) grad u||^2 <= C / h^2 ||sqrt(rho) e(u)||^2, u in V1 or V2",
     std::nullopt, InputClass::Washer},
    {InequalityId::Korn15RectU, "KORN15_RECT_U",
     "||grad U||^2 <= 100 (||f|| ||e(U)|| / h + ||e(U)||^2) on (0,h)x(0,L), g(x,0)=0 or f(x,0)=f(x,L)", 100.0,
     InputClass::Rect},
    {InequalityId::CaccioppoliW, "CACCIOPPOLI_W",
     "||sqrt(y) delta grad f||^2 <= 4 ||sqrt(y) f||^2, delta = min(x, h - x), f harmonic, f(x,l)=f(x,L)=0", 4.0,
     InputClass::Harmonic},
    {InequalityId::HardyInterval, "HARDY_INTERVAL",
     "int_{a+eps(b-a)}^b f^2 <= 2/eps int_a^{a+eps(b-a)} f^2 + 4 int_a^b f'^2 (b-t)^2", 1.0, InputClass::Spline},
    {InequalityId::HardyAnnulus, "HARDY_ANNULUS",
     "int_r^{(R+r)/2} t f^2 <= 4 int_{(R+r)/2}^R t f^2 + R^2 int_r^R t f'^2, f(r)=0, R > 2r", 1.0,
     InputClass::Spline},
    {InequalityId::BlockZ, "BLOCK_Z",
     "||sqrt(rho) (u_rho,theta - u_theta)/rho||^2 + ||sqrt(rho) u_theta,rho||^2 <= 12 ||sqrt(rho) e(u)||^2", 12.0,
     InputClass::Washer},
    {InequalityId::RadialTrace, "RADIAL_TRACE", "||u_rho / sqrt(rho)|| <= 3 ||sqrt(rho) e(u)||", 3.0,
     InputClass::Washer},
    {InequalityId::PoincareUzV2, "POINCARE_UZ_V2",
     "||sqrt(rho) u_z||^2 <= 5 R^2 ||sqrt(rho) u_z,rho||^2 (R^2 when 2r >= R), u in V2", 5.0, InputClass::Washer},
    {InequalityId::PoincareUzV1, "POINCARE_UZ_V1",
     "||sqrt(rho) (u_z - mean)||^2 <= C(R) ||sqrt(rho) grad u_z||^2, u in V1", std::nullopt, InputClass::Washer},
};

double sq(double x) { return x * x; }

/// Norm-squares computed at one quadrature level.
struct Terms {
  double lhs = 0.0;
  double bracket = 0.0;      ///< right-hand side without the constant
  double alt_bracket = NAN;  ///< printed reading of the weighted rectangle entry
  double scale = 0.0;        ///< field norm scale for the degenerate test
  std::vector<double> parts;  ///< every norm that enters, for the error estimate
};

// ---- hypothesis checks ----------------------------------------------------

bool in_space(const FourierField& f, BoundaryCondition bc, double& worst, double& scale) {
  const auto& g = f.geometry();
  const std::array<int, 2> comps = bc == BoundaryCondition::V1 ? std::array<int, 2>{0, 1} : std::array<int, 2>{1, 2};
  worst = 0.0;
  scale = 0.0;
  for (double rho : {g.r, g.R})
    for (int k = 0; k <= 8; ++k) {
      const double z = g.h * k / 8.0;
      for (const auto& m : f.modes()) {
        const auto j = eval_mode(m, rho, z);
        for (int part = 0; part < 2; ++part) {
          for (int c = 0; c < 3; ++c) scale = std::max(scale, std::abs(j.c[part][c].v));
          for (int c : comps) worst = std::max(worst, std::abs(j.c[part][c].v));
        }
      }
    }
  // Interior samples fix the scale for fields that vanish on the whole boundary.
  for (int i = 1; i < 8; ++i)
    for (const auto& m : f.modes()) {
      const auto j = eval_mode(m, g.r + (g.R - g.r) * i / 8.0, 0.5 * g.h);
      for (int part = 0; part < 2; ++part)
        for (int c = 0; c < 3; ++c) scale = std::max(scale, std::abs(j.c[part][c].v));
    }
  return worst <= 1e-12 * std::max(scale, 1e-300) || worst == 0.0;
}

void require_washer_space(const FourierField& f, bool allow_v1, bool allow_v2) {
  double w1 = INFINITY, w2 = INFINITY, s = 0.0;
  if (allow_v1 && in_space(f, BoundaryCondition::V1, w1, s)) return;
  if (allow_v2 && in_space(f, BoundaryCondition::V2, w2, s)) return;
  const std::string which = allow_v1 && allow_v2 ? "u in V1 or V2" : allow_v1 ? "u in V1" : "u in V2";
  throw HypothesisViolation(which + " (boundary values at rho = r, R)", std::min(w1, w2));
}

double max_abs_on_segment(const Coef& c, double x0, double y0, double x1, double y1) {
  if (!c) return 0.0;
  double m = 0.0;
  for (int k = 0; k <= 32; ++k) {
    const double t = k / 32.0;
    m = std::max(m, std::abs(c->eval(x0 + t * (x1 - x0), y0 + t * (y1 - y0)).v));
  }
  return m;
}

double max_abs_on_box(const Coef& c, const RectGeometry& g) {
  if (!c) return 0.0;
  double m = 0.0;
  for (int i = 0; i <= 8; ++i)
    for (int j = 0; j <= 8; ++j) m = std::max(m, std::abs(c->eval(g.h * i / 8.0, g.l + g.width_y() * j / 8.0).v));
  return m;
}

/// Max over interior sample points of a Richardson-extrapolated 5-point
/// Laplacian, scaled by min(h, L - l)^2 / max|f|.
double harmonic_residual(const ScalarField2D& f, const RectGeometry& g) {
  const double size = std::min(g.h, g.width_y());
  const double d = 1e-3 * size;
  double fmax = 0.0, lmax = 0.0;
  auto lap = [&](double x, double y, double s) {
    return (f.eval(x + s, y).v + f.eval(x - s, y).v + f.eval(x, y + s).v + f.eval(x, y - s).v - 4.0 * f.eval(x, y).v) /
           (s * s);
  };
  for (int i = 1; i < 6; ++i)
    for (int j = 1; j < 6; ++j) {
      const double x = g.h * i / 6.0, y = g.l + g.width_y() * j / 6.0;
      fmax = std::max(fmax, std::abs(f.eval(x, y).v));
      const double l = (4.0 * lap(x, y, 0.5 * d) - lap(x, y, d)) / 3.0;
      lmax = std::max(lmax, std::abs(l));
    }
  return fmax > 0.0 ? lmax * size * size / fmax : 0.0;
}

RectField harmonic_as_rect(const AuditInput& in, const char* who) {
  if (auto h = std::get_if<HarmonicRectField>(&in)) return h->as_rect_field();
  if (auto r = std::get_if<RectField>(&in)) {
    if (!r->f) throw InvalidArgument(std::string(who) + ": field has no f component");
    return *r;
  }
  throw InvalidArgument(std::string(who) + ": expects a harmonic rectangle field");
}

void require_harmonic_zero_y(const RectField& rf, bool closed_form_harmonic) {
  const auto& g = rf.geometry;
  if (!(g.l > 0.0)) throw HypothesisViolation("L > l > 0", g.l);
  const double scale = std::max(max_abs_on_box(rf.f, g), 1e-300);
  const double edge = std::max(max_abs_on_segment(rf.f, 0, g.l, g.h, g.l), max_abs_on_segment(rf.f, 0, g.L, g.h, g.L));
  if (edge > 1e-12 * scale) throw HypothesisViolation("f(x,l) = f(x,L) = 0", edge / scale);
  if (!closed_form_harmonic) {
    const double res = harmonic_residual(*rf.f, g);
    if (res > kHarmonicTolerance) throw HypothesisViolation("f harmonic (relative Laplacian residual)", res);
  }
}

// ---- norms ------------------------------------------------------------------

struct RectNorms {
  double f = 0, g = 0, grad = 0, strain = 0, fx = 0, fy = 0;
};

RectNorms rect_norms(const RectField& rf, Weight w, const QuadratureSpec& q) {
  const auto& geo = rf.geometry;
  std::vector<double> xb{0.5 * geo.h};
  RectNorms n;
  auto jets = [&](double x, double y) {
    return std::pair{eval_or_zero(rf.f, x, y), eval_or_zero(rf.g, x, y)};
  };
  n.f = weighted_norm_sq(geo, [&](double x, double y) { return std::vector<double>{jets(x, y).first.v}; }, w, q, xb);
  n.g = weighted_norm_sq(geo, [&](double x, double y) { return std::vector<double>{jets(x, y).second.v}; }, w, q, xb);
  n.fx = weighted_norm_sq(geo, [&](double x, double y) { return std::vector<double>{jets(x, y).first.d1}; }, w, q, xb);
  n.fy = weighted_norm_sq(geo, [&](double x, double y) { return std::vector<double>{jets(x, y).first.d2}; }, w, q, xb);
  n.grad = weighted_norm_sq(
      geo,
      [&](double x, double y) {
        const auto [f, g] = jets(x, y);
        return std::vector<double>{f.d1, f.d2, g.d1, g.d2};
      },
      w, q, xb);
  n.strain = weighted_norm_sq(
      geo,
      [&](double x, double y) {
        const auto [f, g] = jets(x, y);
        const double off = 0.5 * (f.d2 + g.d1);
        return std::vector<double>{f.d1, off, off, g.d2};
      },
      w, q, xb);
  return n;
}

/// Integral of fn over [a, b] with panels split at the spline knots and `cuts`.
double spline_integral(const Spline1D& s, double a, double b, const std::function<double(double)>& fn,
                       const QuadratureSpec& q) {
  if (!(b > a)) return 0.0;
  const auto rule = composite_rule(a, b, q.n_rho, QuadRule::GaussLegendre, std::max(q.order, 4), s.knots());
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) acc += rule.w[i] * fn(rule.x[i]);
  if (!std::isfinite(acc)) throw NonFiniteError("non-finite spline integral");
  return acc;
}

Terms washer_terms(InequalityId id, const FourierField& f, const QuadratureSpec& q) {
  const double h = f.geometry().h, R = f.geometry().R, r = f.geometry().r;
  using MQ = ModalQuantity;
  auto totals = [&](std::initializer_list<MQ> which) {
    return mode_norm_totals(f, std::span<const MQ>(which.begin(), which.size()), q);
  };
  Terms t;
  switch (id) {
    case InequalityId::Korn15Washer: {
      const auto v = totals({MQ::Grad, MQ::Strain, MQ::Uz});
      const double g = v[0], e = v[1], uz = v[2];
      t = {g, std::sqrt(uz * e) / h + e, NAN, g + uz, {g, e, uz}};
      break;
    }
    case InequalityId::Korn1Washer: {
      const auto v = totals({MQ::Grad, MQ::Strain});
      t = {v[0], v[1] / (h * h), NAN, v[0], {v[0], v[1]}};
      break;
    }
    case InequalityId::BlockZ: {
      const auto v = totals({MQ::BlockZ, MQ::Strain});
      t = {v[0], v[1], NAN, v[0] + v[1], {v[0], v[1]}};
      break;
    }
    case InequalityId::RadialTrace: {
      // Squared form: ||u_rho / sqrt(rho)||^2 <= 9 ||sqrt(rho) e||^2.
      const auto v = totals({MQ::URhoOverRho, MQ::Strain});
      t = {v[0], v[1], NAN, v[0] + v[1], {v[0], v[1]}};
      break;
    }
    case InequalityId::PoincareUzV2: {
      const auto v = totals({MQ::Uz, MQ::URhoZ});
      t = {v[0], (2.0 * r < R ? 5.0 : 1.0) * R * R * v[1], NAN, v[0] + v[1], {v[0], v[1]}};
      break;
    }
    case InequalityId::PoincareUzV1: {
      const auto v = totals({MQ::Uz, MQ::GradUz});
      const double u = v[0], d = v[1];
      double mean_part = 0.0;
      for (const auto& m : f.modes()) {
        if (m.n != 0) continue;
        const double s = modal_integral(
            f, m, [&](double rho, double z) { return eval_or_zero(m.a_z, rho, z).v; }, Weight::Rho, q);
        const double vol = std::numbers::pi * h * (R * R - r * r);
        mean_part = s * s / vol;
      }
      const double c = std::max(u - mean_part, 0.0);
      t = {c, d, NAN, u + d, {u, d}};
      break;
    }
    default: throw InvalidArgument("not a washer inequality");
  }
  return t;
}

std::optional<double> effective_constant(const InequalityInfo& inf, const AuditParams& p) {
  if (inf.constant) return inf.constant;
  return p.candidate;
}

double rhs_multiplier(InequalityId id, double constant) {
  // The trace entry is stated for norms; the squared form carries constant^2.
  if (id == InequalityId::RadialTrace) return constant * constant;
  return constant;
}

}  // namespace

const std::vector<InequalityInfo>& inequality_registry() { return kRegistry; }

const InequalityInfo& info(InequalityId id) {
  for (const auto& e : kRegistry)
    if (e.id == id) return e;
  throw InvalidArgument("unknown inequality id");
}

std::string_view to_string(InequalityId id) { return info(id).name; }

InequalityId parse_inequality(std::string_view name) {
  std::string s(name);
  for (auto& c : s) c = c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  for (const auto& e : kRegistry)
    if (e.name == s) return e.id;
  throw InvalidArgument("unknown inequality: " + std::string(name));
}

InequalityReport evaluate(InequalityId id, const AuditInput& input, const AuditParams& p) {
  const auto& inf = info(id);
  p.quad.validate();
  std::function<Terms(const QuadratureSpec&)> compute;

  switch (inf.input) {
    case InputClass::Washer: {
      const auto* f = std::get_if<FourierField>(&input);
      if (!f) throw InvalidArgument(std::string(inf.name) + ": expects a washer field");
      if (f->modes().empty()) throw InvalidArgument(std::string(inf.name) + ": empty field");
      const bool v1 = id != InequalityId::PoincareUzV2, v2 = id != InequalityId::PoincareUzV1;
      require_washer_space(*f, v1, v2);
      compute = [id, f](const QuadratureSpec& q) { return washer_terms(id, *f, q); };
      break;
    }
    case InputClass::Harmonic: {
      const RectField rf = harmonic_as_rect(input, inf.name.data());
      require_harmonic_zero_y(rf, std::holds_alternative<HarmonicRectField>(input));
      if (id == InequalityId::HarmonicSep) {
        compute = [rf](const QuadratureSpec& q) {
          const auto n = rect_norms(rf, Weight::Y, q);
          const double h = rf.geometry.h;
          return Terms{n.fy, std::sqrt(n.fx * n.f) / h + n.fx, NAN, n.f + n.fx + n.fy, {n.fy, n.fx, n.f}};
        };
      } else {
        compute = [rf](const QuadratureSpec& q) {
          const auto& g = rf.geometry;
          std::vector<double> xb{0.5 * g.h};
          const double lhs = weighted_norm_sq(
              g,
              [&](double x, double y) {
                const auto j = rf.f->eval(x, y);
                const double d = std::min(x, g.h - x);
                return std::vector<double>{d * j.d1, d * j.d2};
              },
              Weight::Y, q, xb);
          const double f2 = weighted_norm_sq(
              g, [&](double x, double y) { return std::vector<double>{rf.f->eval(x, y).v}; }, Weight::Y, q, xb);
          return Terms{lhs, f2, NAN, lhs + f2, {lhs, f2}};
        };
      }
      break;
    }
    case InputClass::Rect: {
      const auto* rfp = std::get_if<RectField>(&input);
      if (!rfp) throw InvalidArgument(std::string(inf.name) + ": expects a rectangle field");
      const RectField rf = *rfp;
      const auto& g = rf.geometry;
      g.validate();
      const double scale = std::max({max_abs_on_box(rf.f, g), max_abs_on_box(rf.g, g), 1e-300});
      if (id == InequalityId::Korn15RectW) {
        if (!(g.l > 0.0)) throw HypothesisViolation("L > l > 0", g.l);
        if (g.h > p.c * g.l) throw HypothesisViolation("h <= c l", g.h / g.l);
        const double edge =
            std::max(max_abs_on_segment(rf.f, 0, g.l, g.h, g.l), max_abs_on_segment(rf.f, 0, g.L, g.h, g.L));
        if (edge > 1e-12 * scale) throw HypothesisViolation("f(x,l) = f(x,L) = 0", edge / scale);
        compute = [rf](const QuadratureSpec& q) {
          const auto n = rect_norms(rf, Weight::Y, q);
          const double h = rf.geometry.h;
          return Terms{n.grad, std::sqrt(n.f * n.strain) / h + n.strain, n.f * n.strain / h + n.strain,
                       n.grad + n.f + n.g, {n.grad, n.strain, n.f}};
        };
      } else {
        if (g.l != 0.0) throw HypothesisViolation("rectangle (0,h) x (0,L)", g.l);
        if (!(g.h < 1.0)) throw HypothesisViolation("h in (0,1)", g.h);
        double gi = 0.0, fi = 0.0;
        for (int k = 0; k <= 32; ++k) {
          const double x = g.h * k / 32.0;
          gi = std::max(gi, std::abs(eval_or_zero(rf.g, x, 0.0).v));
          fi = std::max(fi, std::abs(eval_or_zero(rf.f, x, 0.0).v - eval_or_zero(rf.f, x, g.L).v));
        }
        if (std::min(gi, fi) > 1e-12 * scale)
          throw HypothesisViolation("g(x,0) = 0 or f(x,0) = f(x,L)", std::min(gi, fi) / scale);
        compute = [rf](const QuadratureSpec& q) {
          const auto n = rect_norms(rf, Weight::One, q);
          const double h = rf.geometry.h;
          return Terms{n.grad, std::sqrt(n.f * n.strain) / h + n.strain, NAN, n.grad + n.f + n.g,
                       {n.grad, n.strain, n.f}};
        };
      }
      break;
    }
    case InputClass::Spline: {
      const auto* sp = std::get_if<Spline1D>(&input);
      if (!sp) throw InvalidArgument(std::string(inf.name) + ": expects a spline");
      const Spline1D s = *sp;
      if (id == InequalityId::HardyInterval) {
        if (!(s.a() >= 0.0)) throw HypothesisViolation("b > a >= 0", s.a());
        if (!(p.epsilon > 0.0 && p.epsilon <= 1.0)) throw HypothesisViolation("epsilon in (0,1]", p.epsilon);
        const double eps = p.epsilon;
        compute = [s, eps](const QuadratureSpec& q) {
          const double a = s.a(), b = s.b(), m = a + eps * (b - a);
          auto f2 = [&](double t) { return sq(s.eval(t).first); };
          const double lhs = spline_integral(s, m, b, f2, q);
          const double head = spline_integral(s, a, m, f2, q);
          const double tail = spline_integral(s, a, b, [&](double t) { return sq(s.eval(t).second * (b - t)); }, q);
          return Terms{lhs, 2.0 / eps * head + 4.0 * tail, NAN, lhs + head + tail, {lhs, head, tail}};
        };
      } else {
        const double r = s.a(), R = s.b();
        if (!(R > 2.0 * r && r > 0.0)) throw HypothesisViolation("R > 2r > 0", R / r);
        const double f0 = std::abs(s.eval(r).first);
        const double fs = std::max(std::abs(s.eval(0.5 * (r + R)).first), std::abs(s.eval(R).first));
        if (f0 > 1e-12 * std::max(fs, 1e-300) && f0 != 0.0) throw HypothesisViolation("f(r) = 0", f0);
        compute = [s](const QuadratureSpec& q) {
          const double r = s.a(), R = s.b(), m = 0.5 * (R + r);
          auto tf2 = [&](double t) { return t * sq(s.eval(t).first); };
          const double lhs = spline_integral(s, r, m, tf2, q);
          const double outer = spline_integral(s, m, R, tf2, q);
          const double d = spline_integral(s, r, R, [&](double t) { return t * sq(s.eval(t).second); }, q);
          return Terms{lhs, 4.0 * outer + R * R * d, NAN, lhs + outer + d, {lhs, outer, d}};
        };
      }
      break;
    }
  }

  const Terms coarse = compute(p.quad);
  const Terms fine = compute(p.quad.refined());
  double qerr = 0.0;
  for (std::size_t i = 0; i < fine.parts.size(); ++i) {
    const double d = std::abs(fine.parts[i] - coarse.parts[i]);
    const double ref = std::max(std::abs(fine.parts[i]), 1e-300);
    if (d > 0.0) qerr = std::max(qerr, d / ref);
  }

  InequalityReport rep;
  rep.id = id;
  rep.digest = p.digest;
  rep.quad_error = qerr;
  rep.lhs = fine.lhs;
  rep.constant = effective_constant(inf, p);
  const double mult = rep.constant ? rhs_multiplier(id, *rep.constant) : 1.0;
  rep.rhs = mult * fine.bracket;
  const double slack = std::max(kAuditSlack, qerr);
  if (rep.rhs > 0.0) {
    rep.ratio = rep.lhs / rep.rhs;
    rep.pass = !rep.constant || rep.lhs <= rep.rhs * (1.0 + slack);
  } else {
    const bool tiny = rep.lhs <= kDegenerateTolerance * fine.scale;
    rep.ratio = tiny ? 0.0 : std::numeric_limits<double>::infinity();
    rep.pass = tiny;
  }
  if (!std::isnan(fine.alt_bracket)) {
    const double alt = mult * fine.alt_bracket;
    rep.alt_ratio = alt > 0.0 ? rep.lhs / alt : 0.0;
  }
  if (!std::isfinite(rep.lhs) || !std::isfinite(rep.rhs)) throw NonFiniteError("non-finite inequality terms");
  return rep;
}

AuditInput random_input(InequalityId id, std::uint64_t seed, const AuditDomain& d) {
  switch (info(id).input) {
    case InputClass::Washer: {
      BoundaryCondition bc = d.bc;
      if (id == InequalityId::PoincareUzV2) bc = BoundaryCondition::V2;
      if (id == InequalityId::PoincareUzV1) bc = BoundaryCondition::V1;
      return random_admissible_field(seed, d.washer, bc);
    }
    case InputClass::Harmonic: return random_harmonic_field(seed, d.rect);
    case InputClass::Rect:
      if (id == InequalityId::Korn15RectW) return random_rect_field(seed, d.rect, BoundaryCondition::RectFZero);
      return random_rect_field(seed, d.rect_unweighted,
                               seed % 2 == 0 ? BoundaryCondition::RectGZeroAt0 : BoundaryCondition::RectFPeriodic);
    case InputClass::Spline:
      if (id == InequalityId::HardyInterval) return random_spline(seed, d.interval_a, d.interval_b, false);
      return random_spline(seed, d.annulus_r, d.annulus_R, true);
  }
  throw InvalidArgument("random_input: unknown input class");
}

StressSummary stress_test(InequalityId id, std::uint64_t first_seed, int count, const AuditDomain& domain,
                          const AuditParams& params, int workers) {
  if (count < 1) throw InvalidArgument("stress_test: empty seed range");
  auto reports = parallel_map<InequalityReport>(count, resolve_workers(workers), [&](int i) {
    const std::uint64_t seed = first_seed + static_cast<std::uint64_t>(i);
    AuditParams p = params;
    p.digest = "seed=" + std::to_string(seed);
    try {
      return evaluate(id, random_input(id, seed, domain), p);
    } catch (const HypothesisViolation&) {
      throw;
    } catch (const std::exception& e) {
      throw Error(std::string(to_string(id)) + " seed " + std::to_string(seed) + ": " + e.what());
    }
  });
  StressSummary s;
  s.id = id;
  s.first_seed = first_seed;
  s.count = count;
  s.max_ratio = -1.0;
  for (int i = 0; i < count; ++i) {
    const std::uint64_t seed = first_seed + static_cast<std::uint64_t>(i);
    if (reports[i].pass) ++s.pass_count;
    if (reports[i].ratio > s.max_ratio) {
      s.max_ratio = reports[i].ratio;
      s.argmax_seed = seed;
    }
    s.reports.emplace_back(seed, std::move(reports[i]));
  }
  return s;
}

Calibration calibrate(InequalityId id, std::uint64_t first_seed, int count, const AuditDomain& domain,
                      const AuditParams& params, int workers) {
  AuditParams p = params;
  p.candidate.reset();
  const auto s = stress_test(id, first_seed, count, domain, p, workers);
  Calibration c;
  c.id = id;
  c.count = count;
  c.argmax_seed = s.argmax_seed;
  // Fixed-constant entries report ratios relative to their constant.
  const auto& inf = info(id);
  const double mult = inf.constant ? rhs_multiplier(id, *inf.constant) : 1.0;
  c.worst_ratio = s.max_ratio * mult;
  c.constant = kCalibrationFactor * c.worst_ratio;
  return c;
}

std::string format_double(double v) { return format_number(v); }

std::string report_csv_header() { return "id,seed,lhs,rhs,ratio,constant,pass"; }

std::string report_csv_row(const InequalityReport& r, std::uint64_t seed) {
  return std::string(to_string(r.id)) + "," + std::to_string(seed) + "," + format_double(r.lhs) + "," +
         format_double(r.rhs) + "," + format_double(r.ratio) + "," +
         (r.constant ? format_double(*r.constant) : std::string("empirical")) + "," + (r.pass ? "1" : "0");
}

namespace {

nlohmann::json num(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

nlohmann::json to_json(const InequalityReport& r) {
  nlohmann::json j;
  j["id"] = std::string(to_string(r.id));
  j["lhs"] = num(r.lhs);
  j["rhs"] = num(r.rhs);
  j["ratio"] = num(r.ratio);
  j["constant"] = r.constant ? nlohmann::json(*r.constant) : nlohmann::json("empirical");
  j["pass"] = r.pass;
  j["quadrature_error"] = num(r.quad_error);
  j["digest"] = r.digest;
  if (r.alt_ratio) j["alt_ratio"] = num(*r.alt_ratio);
  return j;
}

}  // namespace

std::string report_json(const InequalityReport& r) { return to_json(r).dump(2); }

std::string summary_json(const StressSummary& s) {
  nlohmann::json j;
  j["id"] = std::string(to_string(s.id));
  j["first_seed"] = s.first_seed;
  j["count"] = s.count;
  j["pass_count"] = s.pass_count;
  j["max_ratio"] = num(s.max_ratio);
  j["argmax_seed"] = s.argmax_seed;
  const auto& c = info(s.id).constant;
  j["constant"] = c ? nlohmann::json(*c) : nlohmann::json("empirical");
  return j.dump(2);
}

}  // namespace wk
