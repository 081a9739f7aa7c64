#include "washerkorn/fem.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <charconv>
#include <cmath>

#include "washerkorn/error.hpp"
#include "washerkorn/quadrature.hpp"

namespace wk {

namespace {

/// Lagrange basis on Gauss-Lobatto nodes of [-1, 1].
struct Lagrange1D {
  std::vector<double> nodes;

  explicit Lagrange1D(int order) : nodes(gauss_lobatto_nodes(order + 1)) {}

  int size() const { return static_cast<int>(nodes.size()); }

  void eval(double x, std::vector<double>& v, std::vector<double>& d) const {
    const int n = size();
    v.assign(n, 1.0);
    d.assign(n, 0.0);
    for (int k = 0; k < n; ++k) {
      for (int m = 0; m < n; ++m)
        if (m != k) v[k] *= (x - nodes[m]) / (nodes[k] - nodes[m]);
      for (int m = 0; m < n; ++m) {
        if (m == k) continue;
        double t = 1.0 / (nodes[k] - nodes[m]);
        for (int q = 0; q < n; ++q)
          if (q != k && q != m) t *= (x - nodes[q]) / (nodes[k] - nodes[q]);
        d[k] += t;
      }
    }
  }
};

/// Sample of all local basis functions at one quadrature point.
struct BasisPoint {
  double rho, z, weight;
  std::vector<double> N, Nr, Nz;
};

/// Loops over elements and quadrature points; `body` receives the local
/// full indices (3 * nl, component-major) and the basis sample.
template <class Body>
void for_each_element(const FormMatrices& fm, Body&& body) {
  const auto& g = fm.geometry;
  const auto& grid = fm.grid;
  const int p = grid.order;
  const Lagrange1D lag(p);
  const auto& gl = gauss_legendre(p + 2);
  const double hr = (g.R - g.r) / grid.n_rho, hz = g.h / grid.n_z;
  const int nl1 = p + 1, nl = nl1 * nl1;
  const double tf = theta_factor(fm.mode);

  // Basis tables on the reference element.
  const int ng = static_cast<int>(gl.nodes.size());
  std::vector<std::vector<double>> v(ng), d(ng);
  for (int q = 0; q < ng; ++q) lag.eval(gl.nodes[q], v[q], d[q]);

  std::vector<int> idx(3 * nl);
  BasisPoint bp;
  bp.N.resize(nl);
  bp.Nr.resize(nl);
  bp.Nz.resize(nl);
  for (int ei = 0; ei < grid.n_rho; ++ei)
    for (int ej = 0; ej < grid.n_z; ++ej) {
      for (int c = 0; c < 3; ++c)
        for (int a = 0; a < nl1; ++a)
          for (int b = 0; b < nl1; ++b)
            idx[c * nl + a * nl1 + b] = fm.dofs.full(static_cast<Component>(c), ei * p + a, ej * p + b);
      std::vector<BasisPoint> pts;
      pts.reserve(ng * ng);
      for (int qa = 0; qa < ng; ++qa)
        for (int qb = 0; qb < ng; ++qb) {
          bp.rho = g.r + hr * (ei + 0.5 * (gl.nodes[qa] + 1.0));
          bp.z = hz * (ej + 0.5 * (gl.nodes[qb] + 1.0));
          bp.weight = tf * bp.rho * gl.weights[qa] * gl.weights[qb] * 0.25 * hr * hz;
          for (int a = 0; a < nl1; ++a)
            for (int b = 0; b < nl1; ++b) {
              const int k = a * nl1 + b;
              bp.N[k] = v[qa][a] * v[qb][b];
              bp.Nr[k] = d[qa][a] * v[qb][b] * 2.0 / hr;
              bp.Nz[k] = v[qa][a] * d[qb][b] * 2.0 / hz;
            }
          pts.push_back(bp);
        }
      body(idx, pts);
    }
}

/// Rows G_ij (i, j in 0..2, row index 3 i + j) of the reduced modal gradient.
Eigen::MatrixXd gradient_rows(const BasisPoint& bp, int n) {
  const int nl = static_cast<int>(bp.N.size());
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(9, 3 * nl);
  const double ir = 1.0 / bp.rho;
  for (int a = 0; a < nl; ++a) {
    const int cp = a, cq = nl + a, cw = 2 * nl + a;
    G(0, cp) = bp.Nr[a];
    G(1, cp) = -n * bp.N[a] * ir;
    G(1, cq) = -bp.N[a] * ir;
    G(2, cp) = bp.Nz[a];
    G(3, cq) = bp.Nr[a];
    G(4, cp) = bp.N[a] * ir;
    G(4, cq) = n * bp.N[a] * ir;
    G(5, cq) = bp.Nz[a];
    G(6, cw) = bp.Nr[a];
    G(7, cw) = -n * bp.N[a] * ir;
    G(8, cw) = bp.Nz[a];
  }
  return G;
}

class Accumulator {
 public:
  explicit Accumulator(const DofMap& dofs) : dofs_(dofs) {}

  void add(const std::vector<int>& idx, const Eigen::MatrixXd& local) {
    const Eigen::MatrixXd sym = 0.5 * (local + local.transpose());
    for (std::size_t a = 0; a < idx.size(); ++a) {
      const int fa = dofs_.free_index[idx[a]];
      if (fa < 0) continue;
      for (std::size_t b = 0; b < idx.size(); ++b) {
        const int fb = dofs_.free_index[idx[b]];
        if (fb < 0 || sym(a, b) == 0.0) continue;
        trip_.emplace_back(fa, fb, sym(a, b));
      }
    }
  }

  SpMat build() const {
    SpMat m(dofs_.free_size(), dofs_.free_size());
    m.setFromTriplets(trip_.begin(), trip_.end());
    m.makeCompressed();
    return m;
  }

 private:
  const DofMap& dofs_;
  std::vector<Eigen::Triplet<double>> trip_;
};

bool constrained(BoundaryCondition bc, Component c) {
  switch (bc) {
    case BoundaryCondition::V1: return c == Component::P || c == Component::Q;
    case BoundaryCondition::V2: return c == Component::Q || c == Component::W;
    default: return false;
  }
}

DofMap make_dofs(const WasherGeometry& g, BoundaryCondition bc, const FemGrid& grid) {
  DofMap d;
  d.nodes_rho = grid.nodes_rho();
  d.nodes_z = grid.nodes_z();
  const Lagrange1D lag(grid.order);
  const double hr = (g.R - g.r) / grid.n_rho, hz = g.h / grid.n_z;
  for (int e = 0; e < grid.n_rho; ++e)
    for (int a = 0; a < grid.order; ++a) d.rho.push_back(g.r + hr * (e + 0.5 * (lag.nodes[a] + 1.0)));
  d.rho.push_back(g.R);
  for (int e = 0; e < grid.n_z; ++e)
    for (int a = 0; a < grid.order; ++a) d.z.push_back(hz * (e + 0.5 * (lag.nodes[a] + 1.0)));
  d.z.push_back(g.h);
  d.free_index.assign(d.full_size(), -1);
  for (int c = 0; c < 3; ++c)
    for (int i = 0; i < d.nodes_rho; ++i)
      for (int j = 0; j < d.nodes_z; ++j) {
        const bool edge = i == 0 || i == d.nodes_rho - 1;
        if (edge && constrained(bc, static_cast<Component>(c))) continue;
        const int f = d.full(static_cast<Component>(c), i, j);
        d.free_index[f] = static_cast<int>(d.free_to_full.size());
        d.free_to_full.push_back(f);
      }
  return d;
}

void deflate(FormMatrices& fm) {
  auto& d = fm.dofs;
  std::vector<Eigen::VectorXd> candidates;
  std::vector<Component> pin_component;
  if (fm.mode == 0) {
    Eigen::VectorXd z = Eigen::VectorXd::Zero(d.full_size());
    for (int i = 0; i < d.nodes_rho; ++i)
      for (int j = 0; j < d.nodes_z; ++j) z[d.full(Component::W, i, j)] = 1.0;
    candidates.push_back(z);
    pin_component.push_back(Component::W);
  } else if (fm.mode == 1) {
    Eigen::VectorXd z = Eigen::VectorXd::Zero(d.full_size());
    for (int i = 0; i < d.nodes_rho; ++i)
      for (int j = 0; j < d.nodes_z; ++j) {
        z[d.full(Component::P, i, j)] = 1.0;
        z[d.full(Component::Q, i, j)] = -1.0;
      }
    candidates.push_back(z);
    pin_component.push_back(Component::P);
  }
  const double scale = fm.B.diagonal().cwiseAbs().maxCoeff();
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    const auto& z = candidates[k];
    bool admissible = true;
    for (int f = 0; f < d.full_size(); ++f)
      if (z[f] != 0.0 && d.free_index[f] < 0) admissible = false;
    if (!admissible) continue;
    const Eigen::VectorXd zf = d.restrict_full(z);
    if (zf.dot(fm.B * zf) > kNullTolerance * scale * zf.squaredNorm()) continue;
    d.null_vectors.push_back(zf);
    d.pinned.push_back(d.free_index[d.full(pin_component[k], 0, 0)]);
  }
  std::sort(d.pinned.begin(), d.pinned.end());
  d.reduced_index.assign(d.free_size(), -1);
  int next = 0;
  for (int f = 0; f < d.free_size(); ++f)
    if (!std::binary_search(d.pinned.begin(), d.pinned.end(), f)) d.reduced_index[f] = next++;

  Eigen::SimplicialLDLT<SpMat> ldlt(d.reduce(fm.B));
  if (ldlt.info() != Eigen::Success) throw SolverError("assemble: factorization of B failed");
  const Eigen::VectorXd piv = ldlt.vectorD();
  const double pmax = piv.cwiseAbs().maxCoeff();
  int small = 0;
  for (Eigen::Index i = 0; i < piv.size(); ++i)
    if (piv[i] <= 1e-12 * pmax) ++small;
  if (small > 0)
    throw SolverError("assemble: B singular after deflation (null-space dimension " +
                      std::to_string(small + static_cast<int>(d.pinned.size())) + ", deflated " +
                      std::to_string(d.pinned.size()) + ")");
}

/// Exact evaluation of one FE component.
class FeComponentField final : public ScalarField2D {
 public:
  FeComponentField(const WasherGeometry& g, const FemGrid& grid, std::vector<double> values)
      : g_(g), grid_(grid), lag_(grid.order), values_(std::move(values)) {}

  Jet eval(double rho, double z) const override {
    const double hr = (g_.R - g_.r) / grid_.n_rho, hz = g_.h / grid_.n_z;
    const int ei = std::clamp(static_cast<int>(std::floor((rho - g_.r) / hr)), 0, grid_.n_rho - 1);
    const int ej = std::clamp(static_cast<int>(std::floor(z / hz)), 0, grid_.n_z - 1);
    const double xr = 2.0 * (rho - g_.r - ei * hr) / hr - 1.0;
    const double xz = 2.0 * (z - ej * hz) / hz - 1.0;
    thread_local std::vector<double> vr, dr, vz, dz;
    lag_.eval(xr, vr, dr);
    lag_.eval(xz, vz, dz);
    const int p = grid_.order, nz = grid_.nodes_z();
    Jet out;
    for (int a = 0; a <= p; ++a)
      for (int b = 0; b <= p; ++b) {
        const double c = values_[static_cast<std::size_t>(ei * p + a) * nz + ej * p + b];
        out.v += c * vr[a] * vz[b];
        out.d1 += c * dr[a] * vz[b] * 2.0 / hr;
        out.d2 += c * vr[a] * dz[b] * 2.0 / hz;
      }
    return out;
  }

 private:
  WasherGeometry g_;
  FemGrid grid_;
  Lagrange1D lag_;
  std::vector<double> values_;
};

}  // namespace

void FemGrid::validate() const {
  if (n_rho < 4 || n_z < 4) throw InvalidArgument("grid must have at least 4x4 cells");
  if (order < 1 || order > 4) throw InvalidArgument("element order must lie in 1..4");
}

std::string FemGrid::label() const {
  return std::to_string(n_rho) + "x" + std::to_string(n_z) + (order == 1 ? "" : "q" + std::to_string(order));
}

FemGrid parse_grid(const std::string& text, int order) {
  const auto x = text.find_first_of("xX");
  if (x == std::string::npos) throw InvalidArgument("grid must be given as AxB: " + text);
  FemGrid g;
  g.order = order;
  const char* s = text.data();
  auto r1 = std::from_chars(s, s + x, g.n_rho);
  auto r2 = std::from_chars(s + x + 1, s + text.size(), g.n_z);
  if (r1.ec != std::errc{} || r1.ptr != s + x || r2.ec != std::errc{} || r2.ptr != s + text.size())
    throw InvalidArgument("grid must be given as AxB: " + text);
  g.validate();
  return g;
}

Eigen::VectorXd DofMap::reduce(const Eigen::VectorXd& free) const {
  Eigen::VectorXd out(reduced_size());
  for (int f = 0; f < free_size(); ++f)
    if (reduced_index[f] >= 0) out[reduced_index[f]] = free[f];
  return out;
}

Eigen::VectorXd DofMap::lift(const Eigen::VectorXd& reduced) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(free_size());
  for (int f = 0; f < free_size(); ++f)
    if (reduced_index[f] >= 0) out[f] = reduced[reduced_index[f]];
  return out;
}

Eigen::VectorXd DofMap::expand(const Eigen::VectorXd& free) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(full_size());
  for (int f = 0; f < free_size(); ++f) out[free_to_full[f]] = free[f];
  return out;
}

Eigen::VectorXd DofMap::restrict_full(const Eigen::VectorXd& full) const {
  Eigen::VectorXd out(free_size());
  for (int f = 0; f < free_size(); ++f) out[f] = full[free_to_full[f]];
  return out;
}

SpMat DofMap::reduce(const SpMat& m) const {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(m.nonZeros());
  for (int k = 0; k < m.outerSize(); ++k)
    for (SpMat::InnerIterator it(m, k); it; ++it) {
      const int a = reduced_index[it.row()], b = reduced_index[it.col()];
      if (a >= 0 && b >= 0) t.emplace_back(a, b, it.value());
    }
  SpMat out(reduced_size(), reduced_size());
  out.setFromTriplets(t.begin(), t.end());
  out.makeCompressed();
  return out;
}

FormMatrices assemble(const WasherGeometry& geometry, int mode, BoundaryCondition bc, const FemGrid& grid) {
  geometry.validate();
  grid.validate();
  if (mode < 0) throw InvalidArgument("assemble: negative mode");
  if (!is_washer_bc(bc) && bc != BoundaryCondition::Unconstrained)
    throw InvalidArgument("assemble: bc must be V1, V2 or UNCONSTRAINED");
  FormMatrices fm;
  fm.geometry = geometry;
  fm.mode = mode;
  fm.bc = bc;
  fm.grid = grid;
  fm.dofs = make_dofs(geometry, bc, grid);

  Accumulator accA(fm.dofs), accB(fm.dofs), accM(fm.dofs), accT(fm.dofs);
  const double s2 = std::sqrt(2.0);
  for_each_element(fm, [&](const std::vector<int>& idx, const std::vector<BasisPoint>& pts) {
    const int m = static_cast<int>(idx.size()), nl = m / 3;
    Eigen::MatrixXd lA = Eigen::MatrixXd::Zero(m, m), lB = lA, lM = lA, lT = lA;
    Eigen::MatrixXd E(6, m);
    Eigen::RowVectorXd W = Eigen::RowVectorXd::Zero(m);
    for (const auto& bp : pts) {
      const Eigen::MatrixXd G = gradient_rows(bp, mode);
      E.row(0) = G.row(0);
      E.row(1) = G.row(4);
      E.row(2) = G.row(8);
      E.row(3) = (G.row(1) + G.row(3)) / s2;
      E.row(4) = (G.row(2) + G.row(6)) / s2;
      E.row(5) = (G.row(5) + G.row(7)) / s2;
      const Eigen::RowVectorXd tr = G.row(0) + G.row(4) + G.row(8);
      for (int a = 0; a < nl; ++a) W[2 * nl + a] = bp.N[a];
      lB.noalias() += bp.weight * G.transpose() * G;
      lA.noalias() += bp.weight * E.transpose() * E;
      lT.noalias() += bp.weight * tr.transpose() * tr;
      lM.noalias() += bp.weight * W.transpose() * W;
    }
    accA.add(idx, lA);
    accB.add(idx, lB);
    accM.add(idx, lM);
    accT.add(idx, lT);
  });
  fm.A = accA.build();
  fm.B = accB.build();
  fm.Mz = accM.build();
  fm.T = accT.build();
  deflate(fm);
  return fm;
}

SpMat assemble_stress_form(const FormMatrices& fm, const StressFn& sigma) {
  Accumulator acc(fm.dofs);
  for_each_element(fm, [&](const std::vector<int>& idx, const std::vector<BasisPoint>& pts) {
    const int m = static_cast<int>(idx.size());
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(m, m);
    for (const auto& bp : pts) {
      const Mat3 s = sigma(bp.rho, bp.z);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          if (!std::isfinite(s[i][j])) throw NonFiniteError("stress field is not finite");
          if (std::abs(s[i][j] - s[j][i]) > 1e-12 * (std::abs(s[i][j]) + std::abs(s[j][i]) + 1e-300))
            throw InvalidArgument("stress field must be symmetric");
        }
      const double scale = std::abs(s[0][0]) + std::abs(s[1][1]) + std::abs(s[2][2]) + std::abs(s[0][2]);
      if (std::abs(s[0][1]) > 1e-14 * scale || std::abs(s[1][2]) > 1e-14 * scale)
        throw InvalidArgument("stress field must have sigma_rho_theta = sigma_theta_z = 0");
      const Eigen::MatrixXd G = gradient_rows(bp, fm.mode);
      for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) {
            if (s[i][j] == 0.0) continue;
            l.noalias() -= bp.weight * s[i][j] * G.row(3 * k + i).transpose() * G.row(3 * k + j);
          }
    }
    acc.add(idx, l);
  });
  return acc.build();
}

Eigen::VectorXd interpolate(const FormMatrices& fm, const FourierMode& mode) {
  if (mode.n != fm.mode) throw InvalidArgument("interpolate: mode number mismatch");
  const auto& d = fm.dofs;
  Eigen::VectorXd full = Eigen::VectorXd::Zero(d.full_size());
  const Coef& q = mode.n == 0 ? mode.a_theta : mode.b_theta;
  for (int i = 0; i < d.nodes_rho; ++i)
    for (int j = 0; j < d.nodes_z; ++j) {
      full[d.full(Component::P, i, j)] = eval_or_zero(mode.a_rho, d.rho[i], d.z[j]).v;
      full[d.full(Component::Q, i, j)] = eval_or_zero(q, d.rho[i], d.z[j]).v;
      full[d.full(Component::W, i, j)] = eval_or_zero(mode.a_z, d.rho[i], d.z[j]).v;
    }
  return d.restrict_full(full);
}

std::vector<double> component_values(const FormMatrices& fm, const Eigen::VectorXd& free, Component c) {
  const Eigen::VectorXd full = fm.dofs.expand(free);
  const int n = fm.dofs.nodes();
  return {full.data() + static_cast<int>(c) * n, full.data() + (static_cast<int>(c) + 1) * n};
}

FourierField to_field(const FormMatrices& fm, const Eigen::VectorXd& free) {
  auto make = [&](Component c) {
    return std::make_shared<FeComponentField>(fm.geometry, fm.grid, component_values(fm, free, c));
  };
  FourierMode m;
  m.n = fm.mode;
  m.a_rho = make(Component::P);
  (fm.mode == 0 ? m.a_theta : m.b_theta) = make(Component::Q);
  m.a_z = make(Component::W);
  std::vector<double> breaks;
  const double hr = (fm.geometry.R - fm.geometry.r) / fm.grid.n_rho;
  for (int e = 1; e < fm.grid.n_rho; ++e) breaks.push_back(fm.geometry.r + e * hr);
  return FourierField(fm.geometry, {m}, breaks);
}

}  // namespace wk
