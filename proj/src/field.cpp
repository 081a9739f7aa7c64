#include "washerkorn/field.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "washerkorn/error.hpp"

namespace wk {

Coef make_coef(std::function<Jet(double, double)> fn) { return std::make_shared<LambdaField>(std::move(fn)); }

namespace {

class ScaledField final : public ScalarField2D {
 public:
  ScaledField(Coef base, double s) : base_(std::move(base)), s_(s) {}
  Jet eval(double s, double t) const override { return s_ * base_->eval(s, t); }

 private:
  Coef base_;
  double s_;
};

Coef scale_coef(const Coef& c, double s) { return c ? std::make_shared<ScaledField>(c, s) : nullptr; }

}  // namespace

GridSampledField::GridSampledField(double s0, double s1, int ns, double t0, double t1, int nt,
                                   std::vector<double> values)
    : s0_(s0), s1_(s1), t0_(t0), t1_(t1), ns_(ns), nt_(nt), values_(std::move(values)) {
  if (ns < 3 || nt < 3) throw InvalidArgument("grid-sampled field needs at least 3x3 samples");
  if (!(s1 > s0 && t1 > t0)) throw InvalidArgument("grid-sampled field: empty box");
  if (values_.size() != static_cast<std::size_t>(ns) * nt) throw InvalidArgument("grid-sampled field: size mismatch");
  const double hs = (s1 - s0) / (ns - 1), ht = (t1 - t0) / (nt - 1);
  ds_.resize(values_.size());
  dt_.resize(values_.size());
  auto v = [&](int i, int j) { return values_[static_cast<std::size_t>(i) * nt + j]; };
  for (int i = 0; i < ns; ++i) {
    for (int j = 0; j < nt; ++j) {
      double a, b;
      if (i == 0)
        a = (-3 * v(0, j) + 4 * v(1, j) - v(2, j)) / (2 * hs);
      else if (i == ns - 1)
        a = (3 * v(i, j) - 4 * v(i - 1, j) + v(i - 2, j)) / (2 * hs);
      else
        a = (v(i + 1, j) - v(i - 1, j)) / (2 * hs);
      if (j == 0)
        b = (-3 * v(i, 0) + 4 * v(i, 1) - v(i, 2)) / (2 * ht);
      else if (j == nt - 1)
        b = (3 * v(i, j) - 4 * v(i, j - 1) + v(i, j - 2)) / (2 * ht);
      else
        b = (v(i, j + 1) - v(i, j - 1)) / (2 * ht);
      ds_[static_cast<std::size_t>(i) * nt + j] = a;
      dt_[static_cast<std::size_t>(i) * nt + j] = b;
    }
  }
}

std::shared_ptr<GridSampledField> GridSampledField::sample(const ScalarField2D& f, double s0, double s1, int ns,
                                                           double t0, double t1, int nt) {
  std::vector<double> vals(static_cast<std::size_t>(ns) * nt);
  for (int i = 0; i < ns; ++i) {
    const double s = (i == ns - 1) ? s1 : s0 + (s1 - s0) * i / (ns - 1);
    for (int j = 0; j < nt; ++j) {
      const double t = (j == nt - 1) ? t1 : t0 + (t1 - t0) * j / (nt - 1);
      vals[static_cast<std::size_t>(i) * nt + j] = f.eval(s, t).v;
    }
  }
  return std::make_shared<GridSampledField>(s0, s1, ns, t0, t1, nt, std::move(vals));
}

Jet GridSampledField::eval(double s, double t) const {
  const double tol = 1e-12;
  if (s < s0_ - tol * (s1_ - s0_) || s > s1_ + tol * (s1_ - s0_) || t < t0_ - tol * (t1_ - t0_) ||
      t > t1_ + tol * (t1_ - t0_))
    throw DomainError("grid-sampled field evaluated outside its box");
  const double us = std::clamp((s - s0_) / (s1_ - s0_) * (ns_ - 1), 0.0, double(ns_ - 1));
  const double ut = std::clamp((t - t0_) / (t1_ - t0_) * (nt_ - 1), 0.0, double(nt_ - 1));
  const int i = std::min(static_cast<int>(us), ns_ - 2);
  const int j = std::min(static_cast<int>(ut), nt_ - 2);
  const double a = us - i, b = ut - j;
  auto lerp = [&](const std::vector<double>& arr) {
    auto at = [&](int p, int q) { return arr[static_cast<std::size_t>(p) * nt_ + q]; };
    return (1 - a) * (1 - b) * at(i, j) + a * (1 - b) * at(i + 1, j) + (1 - a) * b * at(i, j + 1) +
           a * b * at(i + 1, j + 1);
  };
  return {lerp(values_), lerp(ds_), lerp(dt_)};
}

ModeJets eval_mode(const FourierMode& m, double rho, double z) {
  ModeJets j;
  j.c[0][0] = eval_or_zero(m.a_rho, rho, z);
  j.c[0][1] = eval_or_zero(m.a_theta, rho, z);
  j.c[0][2] = eval_or_zero(m.a_z, rho, z);
  if (m.n != 0) {
    j.c[1][0] = eval_or_zero(m.b_rho, rho, z);
    j.c[1][1] = eval_or_zero(m.b_theta, rho, z);
    j.c[1][2] = eval_or_zero(m.b_z, rho, z);
  }
  return j;
}

FourierField::FourierField(WasherGeometry geometry, std::vector<FourierMode> modes, std::vector<double> rho_breaks)
    : geometry_(geometry), modes_(std::move(modes)), rho_breaks_(std::move(rho_breaks)) {
  geometry_.validate();
  std::set<int> seen;
  for (const auto& m : modes_) {
    if (m.n < 0) throw InvalidArgument("Fourier mode index must be non-negative");
    if (!seen.insert(m.n).second) throw InvalidArgument("duplicate Fourier mode " + std::to_string(m.n));
    if (m.n == 0 && (m.b_rho || m.b_theta || m.b_z))
      throw InvalidArgument("mode 0 carries only the constant-in-theta part");
  }
  std::sort(modes_.begin(), modes_.end(), [](const auto& a, const auto& b) { return a.n < b.n; });
}

std::array<double, 3> FourierField::displacement(double rho, double theta, double z) const {
  std::array<double, 3> u{};
  for (const auto& m : modes_) {
    const auto j = eval_mode(m, rho, z);
    const double c = std::cos(m.n * theta), s = std::sin(m.n * theta);
    for (int k = 0; k < 3; ++k) u[k] += j.c[0][k].v * c + j.c[1][k].v * s;
  }
  return u;
}

FourierField FourierField::scaled(double s) const {
  std::vector<FourierMode> out;
  for (const auto& m : modes_)
    out.push_back({m.n, scale_coef(m.a_rho, s), scale_coef(m.b_rho, s), scale_coef(m.a_theta, s),
                   scale_coef(m.b_theta, s), scale_coef(m.a_z, s), scale_coef(m.b_z, s)});
  return FourierField(geometry_, std::move(out), rho_breaks_);
}

FourierField FourierField::single_mode(int n) const {
  for (const auto& m : modes_)
    if (m.n == n) return FourierField(geometry_, {m}, rho_breaks_);
  throw InvalidArgument("field has no mode " + std::to_string(n));
}

RectField RectField::scaled(double s) const { return {geometry, scale_coef(f, s), scale_coef(g, s), bc}; }

}  // namespace wk
