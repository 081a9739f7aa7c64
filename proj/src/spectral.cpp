#include "washerkorn/spectral.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "washerkorn/error.hpp"
#include "washerkorn/parallel.hpp"

namespace wk {

void ElasticityTensor::validate() const {
  if (!(mu > 0.0) || !(lambda + 2.0 * mu / 3.0 >= 0.0))
    throw InvalidArgument("elasticity tensor needs mu > 0 and lambda + 2 mu / 3 >= 0");
}

double ElasticityTensor::energy(const Mat3& e) const {
  const double tr = e[0][0] + e[1][1] + e[2][2];
  return lambda * tr * tr + 2.0 * mu * frobenius_sq(e);
}

StressField StressField::scaled(double t) const {
  auto base = fn;
  return {[base, t](double rho, double z) {
            Mat3 s = base(rho, z);
            for (auto& row : s)
              for (auto& v : row) v *= t;
            return s;
          },
          label};
}

StressField StressField::radial_compression(double t) {
  return {[t](double, double) {
            Mat3 s{};
            s[0][0] = -t;
            return s;
          },
          "radial_compression"};
}

StressField StressField::uniform(const Mat3& sigma, std::string label) {
  return {[sigma](double, double) { return sigma; }, std::move(label)};
}

namespace {

void check_stress(const Mat3& s) {
  const double scale = std::abs(s[0][0]) + std::abs(s[1][1]) + std::abs(s[2][2]) + std::abs(s[0][2]);
  if (std::abs(s[0][1]) > 1e-14 * scale || std::abs(s[1][2]) > 1e-14 * scale)
    throw InvalidArgument("stress field must have sigma_rho_theta = sigma_theta_z = 0");
}

/// -(sigma, G^T G)
double stress_density(const Mat3& s, const Mat3& G) {
  double acc = 0.0;
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) acc += s[i][j] * G[k][i] * G[k][j];
  return -acc;
}

}  // namespace

BucklingQuotient buckling_quotient(const FourierField& field, const StressField& sigma, const ElasticityTensor& L0,
                                   const QuadratureSpec& quad) {
  L0.validate();
  BucklingQuotient q;
  for (const auto& mode : field.modes()) {
    q.numerator += modal_integral(
        field, mode,
        [&](double rho, double z) {
          const auto g = modal_gradient(mode, rho, z);
          return L0.energy(Grad3{g.cos}.symmetrized()) + L0.energy(Grad3{g.sin}.symmetrized());
        },
        Weight::Rho, quad);
    q.denominator += modal_integral(
        field, mode,
        [&](double rho, double z) {
          const Mat3 s = sigma(rho, z);
          check_stress(s);
          const auto g = modal_gradient(mode, rho, z);
          return stress_density(s, g.cos) + stress_density(s, g.sin);
        },
        Weight::Rho, quad);
  }
  q.destabilizing = q.denominator > 0.0;
  q.value = q.destabilizing ? q.numerator / q.denominator : std::numeric_limits<double>::infinity();
  return q;
}

ModeValue korn_mode(const FormMatrices& fm, const EigenOptions& eigen, Eigen::VectorXd* x) {
  const auto r = min_rayleigh(fm.dofs.reduce(fm.A), fm.dofs.reduce(fm.B), eigen);
  if (x) *x = fm.dofs.lift(r.x);
  return {fm.mode, r.lambda, r.residual, true};
}

namespace {

struct ModeSolve {
  ModeValue value;
  Eigen::VectorXd x;
  std::shared_ptr<const FormMatrices> forms;
};

std::vector<ModeSolve> solve_modes(int first, int last, int workers,
                                   const std::function<ModeSolve(int)>& solve_one) {
  return parallel_map<ModeSolve>(last - first + 1, workers, [&](int i) {
    try {
      return solve_one(first + i);
    } catch (const SolverError& e) {
      throw SolverError("mode " + std::to_string(first + i) + ": " + e.what());
    }
  });
}

/// Scans modes 0..cutoff (extending while the argmin sits on the cutoff) and
/// returns all solves; `better(a, b)` is true when a beats b.
std::vector<ModeSolve> scan_modes(const SpectralOptions& opt, const std::function<ModeSolve(int)>& solve_one,
                                  const std::function<bool(const ModeSolve&, const ModeSolve&)>& better,
                                  int& cutoff_used) {
  if (opt.mode_cutoff < 0) throw InvalidArgument("mode cutoff must be >= 0");
  const int workers = resolve_workers(opt.workers);
  int cutoff = opt.mode_cutoff;
  auto all = solve_modes(0, cutoff, workers, solve_one);
  auto argbest = [&] {
    std::size_t b = 0;
    for (std::size_t i = 1; i < all.size(); ++i)
      if (better(all[i], all[b])) b = i;
    return b;
  };
  while (opt.extend_modes && all[argbest()].value.mode == cutoff && cutoff < opt.mode_cap) {
    const int next = std::min(opt.mode_cap, cutoff + 4);
    auto more = solve_modes(cutoff + 1, next, workers, solve_one);
    all.insert(all.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
    cutoff = next;
  }
  cutoff_used = cutoff;
  std::swap(all[0], all[argbest()]);
  return all;
}

}  // namespace

KornResult korn_constant(const WasherGeometry& geometry, BoundaryCondition bc, const FemGrid& grid,
                         const SpectralOptions& options) {
  if (!is_washer_bc(bc)) throw InvalidArgument("korn_constant: bc must be V1 or V2");
  auto solve_one = [&](int n) {
    auto fm = std::make_shared<FormMatrices>(assemble(geometry, n, bc, grid));
    ModeSolve s;
    s.value = korn_mode(*fm, options.eigen, &s.x);
    s.forms = fm;
    return s;
  };
  KornResult out;
  auto all = scan_modes(
      options, solve_one, [](const ModeSolve& a, const ModeSolve& b) { return a.value.value < b.value.value; },
      out.cutoff_used);
  out.K = all[0].value.value;
  out.mode = all[0].value.mode;
  out.x = all[0].x;
  out.residual = all[0].value.residual;
  out.forms = all[0].forms;
  out.grid = grid;
  for (const auto& s : all) out.per_mode.push_back(s.value);
  std::sort(out.per_mode.begin(), out.per_mode.end(), [](const auto& a, const auto& b) { return a.mode < b.mode; });
  return out;
}

std::vector<FemGrid> grid_ladder(const FemGrid& base, int levels) {
  if (levels < 1) throw InvalidArgument("grid ladder needs at least one level");
  std::vector<FemGrid> out{base};
  for (int i = 1; i < levels; ++i) out.push_back(out.back().refined());
  return out;
}

LadderResult korn_constant_ladder(const WasherGeometry& geometry, BoundaryCondition bc,
                                  const std::vector<FemGrid>& ladder, const SpectralOptions& options, double tol) {
  if (ladder.empty()) throw InvalidArgument("empty grid ladder");
  LadderResult out;
  for (const auto& g : ladder) out.levels.push_back(korn_constant(geometry, bc, g, options));
  out.K = out.levels.back().K;
  if (out.levels.size() >= 2) {
    const double prev = out.levels[out.levels.size() - 2].K;
    out.change = std::abs(out.K / prev - 1.0);
    out.converged = out.change <= tol;
  }
  return out;
}

namespace {

/// Everything the korn15 ascent needs on the reduced space.
struct K15Problem {
  SpMat A, B, M;
  double h;
  /// Null directions in reduced coordinates: m(x) is reduced by (c^T x)^2 / d.
  std::vector<Eigen::VectorXd> c;
  std::vector<double> d;

  K15Problem(const FormMatrices& fm) : h(fm.geometry.h) {
    const auto& dm = fm.dofs;
    A = dm.reduce(fm.A);
    B = dm.reduce(fm.B);
    M = dm.reduce(fm.Mz);
    // m(x + t z) minimized over t for lifted x (pinned entries zero):
    //   m(x) - (z^T Mz x)^2 / (z^T Mz z).
    for (const auto& z : dm.null_vectors) {
      const Eigen::VectorXd mz = fm.Mz * z;
      const double zz = z.dot(mz);
      if (!(zz > 0.0)) continue;
      c.push_back(dm.reduce(mz));
      d.push_back(zz);
    }
  }

  struct Eval {
    double f, a, b, m;
    Eigen::VectorXd grad;
  };

  Eval eval(const Eigen::VectorXd& x, bool with_grad) const {
    const Eigen::VectorXd Ax = A * x, Bx = B * x;
    Eigen::VectorXd Mx = M * x;
    double m = x.dot(Mx);
    for (std::size_t k = 0; k < c.size(); ++k) {
      const double t = c[k].dot(x);
      m -= t * t / d[k];
      Mx -= (t / d[k]) * c[k];
    }
    m = std::max(m, 0.0);
    const double a = x.dot(Ax), b = x.dot(Bx);
    const double g = std::sqrt(m * a) / h + a;
    Eval e{b / g, a, b, m, {}};
    if (with_grad && a > 0.0 && m > 0.0) {
      const Eigen::VectorXd dg = (std::sqrt(a / m) / h) * Mx + (std::sqrt(m / a) / h + 2.0) * Ax;
      e.grad = (2.0 * Bx * g - b * dg) / (g * g);
    } else if (with_grad) {
      e.grad = Eigen::VectorXd::Zero(x.size());
    }
    return e;
  }
};

struct Ascent {
  double f;
  Eigen::VectorXd x;
  bool converged;
};

Ascent ascend(const K15Problem& p, const Eigen::SimplicialLLT<SpMat>& bfact, Eigen::VectorXd x,
              const Korn15Options& opt) {
  auto normalize = [&](Eigen::VectorXd& v) { v /= std::sqrt(v.dot(p.B * v)); };
  normalize(x);
  auto cur = p.eval(x, true);
  double t = 1.0;
  for (int it = 0; it < opt.max_iter; ++it) {
    Eigen::VectorXd dir = bfact.solve(cur.grad);
    const double slope = cur.grad.dot(dir);
    if (!(slope > 0.0) || std::sqrt(slope) <= opt.tol * cur.f) return {cur.f, x, true};
    bool moved = false;
    for (int k = 0; k < 40; ++k) {
      Eigen::VectorXd y = x + t * dir;
      normalize(y);
      auto next = p.eval(y, true);
      if (next.f >= cur.f + 1e-4 * t * slope) {
        x = std::move(y);
        cur = std::move(next);
        t *= 2.0;
        moved = true;
        break;
      }
      t *= 0.5;
    }
    if (!moved) return {cur.f, x, std::sqrt(slope) <= 1e3 * opt.tol * cur.f};
  }
  return {cur.f, x, false};
}

}  // namespace

double korn15_ratio(const FormMatrices& fm, const Eigen::VectorXd& free) {
  if (free.size() != fm.dofs.free_size()) throw InvalidArgument("korn15_ratio: vector size mismatch");
  const K15Problem p(fm);
  // The ratio is invariant along null directions of A and B; drop pinned entries
  // after shifting them out.
  Eigen::VectorXd v = free;
  for (std::size_t k = 0; k < fm.dofs.null_vectors.size(); ++k) {
    const auto& z = fm.dofs.null_vectors[k];
    const int pin = fm.dofs.pinned[k];
    v -= (v[pin] / z[pin]) * z;
  }
  const auto e = p.eval(fm.dofs.reduce(v), false);
  if (!(e.b > 0.0)) throw InvalidArgument("korn15_ratio: field has zero gradient");
  return e.f;
}

Korn15Result korn15_mode(const FormMatrices& fm, const Korn15Options& opt) {
  if (opt.starts < 1) throw InvalidArgument("korn15: need at least one start");
  const K15Problem p(fm);
  Eigen::SimplicialLLT<SpMat> bfact(p.B);
  if (bfact.info() != Eigen::Success) throw SolverError("korn15: B is not positive definite");
  const Eigen::Index n = p.B.rows();
  std::vector<Eigen::VectorXd> starts;
  const int ne = static_cast<int>(std::min<Eigen::Index>(std::min(opt.eigen_starts, opt.starts), n));
  if (ne > 0) {
    const auto pairs = smallest_eigenpairs(p.A, p.B, ne);
    for (int i = 0; i < ne; ++i) starts.push_back(pairs.vectors.col(i));
  }
  std::mt19937_64 rng(opt.seed);
  while (static_cast<int>(starts.size()) < opt.starts) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5;
    // Smooth the random start so it is not dominated by grid-scale noise.
    starts.push_back(bfact.solve(v));
  }
  Korn15Result out;
  out.mode = fm.mode;
  out.C = -1.0;
  for (const auto& s : starts) {
    auto a = ascend(p, bfact, s, opt);
    if (a.f > out.C) {
      out.C = a.f;
      out.x = fm.dofs.lift(a.x);
      out.converged = a.converged;
    }
  }
  out.per_mode.push_back({fm.mode, out.C, 0.0, out.converged});
  return out;
}

Korn15Result korn15_constant(const WasherGeometry& geometry, BoundaryCondition bc, const FemGrid& grid,
                             const SpectralOptions& options, const Korn15Options& k15) {
  if (!is_washer_bc(bc)) throw InvalidArgument("korn15_constant: bc must be V1 or V2");
  const int workers = resolve_workers(options.workers);
  auto res = parallel_map<Korn15Result>(options.mode_cutoff + 1, workers, [&](int n) {
    return korn15_mode(assemble(geometry, n, bc, grid), k15);
  });
  Korn15Result out;
  out.C = -1.0;
  for (const auto& r : res) {
    out.per_mode.push_back(r.per_mode.front());
    if (r.C > out.C) {
      out.C = r.C;
      out.mode = r.mode;
      out.x = r.x;
      out.converged = r.converged;
    }
  }
  return out;
}

SpMat elastic_form(const FormMatrices& fm, const ElasticityTensor& L0) {
  L0.validate();
  return SpMat(L0.lambda * fm.T + 2.0 * L0.mu * fm.A);
}

CriticalLoad critical_load(const WasherGeometry& geometry, const StressField& sigma, const ElasticityTensor& L0,
                           BoundaryCondition bc, const FemGrid& grid, const SpectralOptions& options) {
  if (!is_washer_bc(bc)) throw InvalidArgument("critical_load: bc must be V1 or V2");
  L0.validate();
  EigenOptions eig = options.eigen;
  eig.accept = std::max(eig.accept, kBucklingAccept);
  auto solve_one = [&](int n) {
    auto fm = std::make_shared<FormMatrices>(assemble(geometry, n, bc, grid));
    const SpMat N = fm->dofs.reduce(elastic_form(*fm, L0));
    const SpMat D = fm->dofs.reduce(assemble_stress_form(*fm, sigma.fn));
    const auto pp = smallest_positive_eigenpair(N, D, eig);
    ModeSolve s;
    s.value = {n, pp.found ? pp.lambda : std::numeric_limits<double>::infinity(), pp.residual, pp.found};
    if (pp.found) s.x = fm->dofs.lift(pp.x);
    s.forms = fm;
    return s;
  };
  CriticalLoad out;
  int cutoff = 0;
  auto all = scan_modes(
      options, solve_one, [](const ModeSolve& a, const ModeSolve& b) { return a.value.value < b.value.value; },
      cutoff);
  for (const auto& s : all) out.per_mode.push_back(s.value);
  std::sort(out.per_mode.begin(), out.per_mode.end(), [](const auto& a, const auto& b) { return a.mode < b.mode; });
  if (!all[0].value.found) return out;
  out.found = true;
  out.lambda = all[0].value.value;
  out.mode = all[0].value.mode;
  out.x = all[0].x;
  out.residual = all[0].value.residual;
  out.forms = all[0].forms;
  return out;
}

}  // namespace wk
