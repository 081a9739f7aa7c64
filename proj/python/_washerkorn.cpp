#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "washerkorn/audit.hpp"
#include "washerkorn/eigensolver.hpp"
#include "washerkorn/error.hpp"
#include "washerkorn/fem.hpp"
#include "washerkorn/scaling.hpp"
#include "washerkorn/spectral.hpp"
#include "washerkorn/sweep.hpp"
#include "washerkorn/testfields.hpp"

namespace py = pybind11;
using namespace wk;

namespace {

WasherGeometry washer(double r, double R, double h, double c) {
  WasherGeometry g{r, R, h, c};
  g.validate();
  return g;
}

SpectralOptions spectral(int modes, int workers) {
  SpectralOptions o;
  o.mode_cutoff = modes;
  o.workers = workers;
  return o;
}

py::list per_mode(const std::vector<ModeValue>& v) {
  py::list out;
  for (const auto& m : v) out.append(py::make_tuple(m.mode, m.value, m.residual, m.found));
  return out;
}

py::dict report_dict(const InequalityReport& r) {
  py::dict d;
  d["id"] = std::string(to_string(r.id));
  d["lhs"] = r.lhs;
  d["rhs"] = r.rhs;
  d["ratio"] = r.ratio;
  d["constant"] = r.constant ? py::cast(*r.constant) : py::none();
  d["passed"] = r.pass;
  d["quad_error"] = r.quad_error;
  d["alt_ratio"] = r.alt_ratio ? py::cast(*r.alt_ratio) : py::none();
  return d;
}

}  // namespace

PYBIND11_MODULE(_washerkorn, m) {
  m.doc() = "Korn constants of thin washers";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<NonFiniteError>(m, "NonFiniteError", base.ptr());
  py::register_exception<HypothesisViolation>(m, "HypothesisViolation", base.ptr());
  py::register_exception<SolverError>(m, "SolverError", base.ptr());

  m.def(
      "korn_constant",
      [](double r, double R, double h, const std::string& bc, const std::string& grid, int order, int modes,
         int levels, int workers) {
        const auto lad = korn_constant_ladder(washer(r, R, h, 1.0), parse_boundary_condition(bc),
                                              grid_ladder(parse_grid(grid, order), levels), spectral(modes, workers));
        const auto& fin = lad.levels.back();
        py::dict d;
        d["K"] = lad.K;
        d["mode"] = fin.mode;
        d["residual"] = fin.residual;
        d["grid"] = fin.grid.label();
        d["change"] = lad.change;
        d["converged"] = lad.converged;
        d["per_mode"] = per_mode(fin.per_mode);
        return d;
      },
      py::arg("r"), py::arg("R"), py::arg("h"), py::arg("bc") = "V2", py::arg("grid") = "32x4",
      py::arg("order") = 2, py::arg("modes") = 8, py::arg("levels") = 2, py::arg("workers") = 1);

  m.def(
      "korn15_constant",
      [](double r, double R, double h, const std::string& bc, const std::string& grid, int order, int modes,
         std::uint64_t seed) {
        Korn15Options k;
        k.seed = seed;
        const auto res = korn15_constant(washer(r, R, h, 1.0), parse_boundary_condition(bc), parse_grid(grid, order),
                                         spectral(modes, 1), k);
        py::dict d;
        d["C"] = res.C;
        d["mode"] = res.mode;
        d["converged"] = res.converged;
        d["per_mode"] = per_mode(res.per_mode);
        return d;
      },
      py::arg("r"), py::arg("R"), py::arg("h"), py::arg("bc") = "V2", py::arg("grid") = "32x4",
      py::arg("order") = 2, py::arg("modes") = 8, py::arg("seed") = 1);

  m.def(
      "critical_load",
      [](double r, double R, double h, const std::string& bc, const std::string& grid, int order, int modes,
         double stress, double lame_lambda, double lame_mu) {
        const ElasticityTensor L0{lame_lambda, lame_mu};
        L0.validate();
        const auto cl = critical_load(washer(r, R, h, 1.0), StressField::radial_compression(stress), L0,
                                      parse_boundary_condition(bc), parse_grid(grid, order), spectral(modes, 1));
        py::dict d;
        d["found"] = cl.found;
        d["lambda"] = cl.lambda;
        d["mode"] = cl.mode;
        d["residual"] = cl.residual;
        d["per_mode"] = per_mode(cl.per_mode);
        return d;
      },
      py::arg("r"), py::arg("R"), py::arg("h"), py::arg("bc") = "V2", py::arg("grid") = "32x4",
      py::arg("order") = 2, py::arg("modes") = 8, py::arg("stress") = 1.0, py::arg("lame_lambda") = 1.0,
      py::arg("lame_mu") = 1.0);

  m.def(
      "assemble_forms",
      [](double r, double R, double h, int mode, const std::string& bc, const std::string& grid, int order) {
        const auto fm = assemble(washer(r, R, h, 1.0), mode, parse_boundary_condition(bc), parse_grid(grid, order));
        py::dict d;
        d["A"] = fm.dofs.reduce(fm.A);
        d["B"] = fm.dofs.reduce(fm.B);
        d["Mz"] = fm.dofs.reduce(fm.Mz);
        d["T"] = fm.dofs.reduce(fm.T);
        return d;
      },
      "Reduced per-mode forms as scipy sparse matrices.", py::arg("r"), py::arg("R"), py::arg("h"), py::arg("mode"),
      py::arg("bc") = "V2", py::arg("grid") = "32x4", py::arg("order") = 2);

  m.def(
      "min_rayleigh",
      [](const SpMat& A, const SpMat& B) {
        const auto res = min_rayleigh(A, B);
        return py::make_tuple(res.lambda, res.x, res.residual);
      },
      "Smallest eigenvalue of the pencil (A, B): (lambda, x, residual).", py::arg("A"), py::arg("B"));

  m.def(
      "ansatz_norms",
      [](double r, double R, double h, double alpha, const std::string& bump) {
        const auto g = washer(r, R, h, 1.0);
        const auto kind = bump == "poly" ? BumpKind::PolySpline : BumpKind::ExpMollifier;
        const FourierField f = alpha == 0.0 ? kirchhoff_ansatz(g, kirchhoff_bump(g, kind))
                                            : scaled_ansatz(g, scaled_ansatz_bump(g, kind), alpha, h);
        const QuadratureSpec q = SweepConfig{}.ansatz_quad.refined();
        py::dict d;
        d["strain_sq"] = mode_norms(f, ModalQuantity::Strain, q).total;
        d["grad_sq"] = mode_norms(f, ModalQuantity::Grad, q).total;
        d["uz_sq"] = mode_norms(f, ModalQuantity::Uz, q).total;
        return d;
      },
      py::arg("r"), py::arg("R"), py::arg("h"), py::arg("alpha") = 0.0, py::arg("bump") = "mollifier");

  m.def("inequalities", [] {
    py::list out;
    for (const auto& e : inequality_registry()) out.append(std::string(e.name));
    return out;
  });

  m.def(
      "audit",
      [](const std::string& id, std::uint64_t seed, std::optional<double> candidate, double epsilon) {
        const auto iid = parse_inequality(id);
        AuditParams p;
        p.candidate = candidate;
        p.epsilon = epsilon;
        return report_dict(evaluate(iid, random_input(iid, seed, AuditDomain{}), p));
      },
      "Evaluates one inequality on the random input of a seed.", py::arg("id"), py::arg("seed"),
      py::arg("candidate") = py::none(), py::arg("epsilon") = 0.5);

  m.def(
      "stress_test",
      [](const std::string& id, std::uint64_t first_seed, int count, int workers) {
        const auto s = stress_test(parse_inequality(id), first_seed, count, AuditDomain{}, {}, workers);
        py::dict d;
        d["count"] = s.count;
        d["pass_count"] = s.pass_count;
        d["max_ratio"] = s.max_ratio;
        d["argmax_seed"] = s.argmax_seed;
        return d;
      },
      py::arg("id"), py::arg("first_seed") = 1, py::arg("count") = 100, py::arg("workers") = 1);

  m.def(
      "calibrate",
      [](const std::string& id, std::uint64_t first_seed, int count, int workers) {
        const auto c = calibrate(parse_inequality(id), first_seed, count, AuditDomain{}, {}, workers);
        return py::make_tuple(c.constant, c.worst_ratio, c.argmax_seed);
      },
      "(constant, worst_ratio, argmax_seed)", py::arg("id"), py::arg("first_seed") = 1, py::arg("count") = 20,
      py::arg("workers") = 1);

  m.def(
      "fit_exponent",
      [](const std::vector<double>& h, const std::vector<double>& v) {
        if (h.size() != v.size()) throw InvalidArgument("fit_exponent: h and values differ in length");
        std::vector<std::pair<double, double>> pts;
        for (std::size_t i = 0; i < h.size(); ++i) pts.emplace_back(h[i], v[i]);
        const auto f = fit_exponent(pts);
        return py::make_tuple(f.exponent, f.intercept, f.max_residual);
      },
      "(exponent, intercept, max_residual) of log v = exponent log h + intercept.", py::arg("h"), py::arg("values"));

  m.def(
      "sweep",
      [](const std::string& study, const std::vector<double>& h_list, const std::string& bc, const std::string& grid,
         int order, int levels, int modes, int trials, std::uint64_t seed, int workers, double alpha) {
        SweepConfig cfg;
        cfg.h_list = h_list;
        cfg.bc = parse_boundary_condition(bc);
        cfg.grid = parse_grid(grid, order);
        cfg.grid_levels = levels;
        cfg.mode_cutoff = modes;
        cfg.trials = trials;
        cfg.seed = seed;
        cfg.workers = workers;
        cfg.alpha = alpha;
        const auto res = run_sweep(cfg, parse_study(study));
        py::dict d;
        d["csv"] = res.csv_body();
        d["summary"] = res.summary();
        d["ok"] = res.ok();
        d["failures"] = res.failures;
        py::dict series;
        for (const auto& s : res.series) {
          py::dict e;
          e["h"] = s.h;
          e["value"] = s.value;
          e["converged"] = s.converged;
          e["exponent"] = s.fit ? py::cast(s.fit->exponent) : py::none();
          series[py::str(s.name)] = e;
        }
        d["series"] = series;
        return d;
      },
      py::arg("study"), py::arg("h_list") = std::vector<double>{0.1, 0.05, 0.025, 0.0125}, py::arg("bc") = "V2",
      py::arg("grid") = "32x4", py::arg("order") = 2, py::arg("levels") = 2, py::arg("modes") = 8,
      py::arg("trials") = 1000, py::arg("seed") = 1, py::arg("workers") = 1, py::arg("alpha") = 0.0);
}
