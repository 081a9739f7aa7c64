#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "washerkorn/audit.hpp"
#include "washerkorn/error.hpp"
#include "washerkorn/io.hpp"
#include "washerkorn/spectral.hpp"
#include "washerkorn/sweep.hpp"
#include "washerkorn/testfields.hpp"

namespace {

using namespace wk;

constexpr int kOk = 0;
constexpr int kAssertion = 1;
constexpr int kUsage = 2;

/// Raised for bad option combinations that CLI11 cannot see.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  double r = 0.5, R = 1.0, c = 1.0;
  std::optional<double> h;
  std::vector<double> h_list;
  std::string bc = "v2";
  int modes = 8;
  std::string grid = "32x4";
  int order = 2;
  int levels = 0;
  std::uint64_t seed = 1;
  int trials = 1000;
  std::string out;
  int workers = 1;
  std::string study = "korn1";
  std::vector<std::string> inequalities;
  double alpha = 0.0;
  std::string bump = "mollifier";
  std::optional<double> candidate;
  double epsilon = 0.5;
  double stress = 1.0;
  double lame_lambda = 1.0, lame_mu = 1.0;
  int mode = 0;
  int pairs = 6;
  std::string field;
  std::string field_out;
};

std::string fmt(double v) { return format_number(v); }

BoundaryCondition washer_bc(const Options& o) {
  const auto bc = parse_boundary_condition(o.bc);
  if (bc != BoundaryCondition::V1 && bc != BoundaryCondition::V2) throw UsageError("--bc must be v1 or v2");
  return bc;
}

WasherGeometry geometry(const Options& o) {
  if (!o.h) throw UsageError("--h is required");
  WasherGeometry g{o.r, o.R, *o.h, o.c};
  g.validate();
  return g;
}

FemGrid grid(const Options& o) { return parse_grid(o.grid, o.order); }

int levels_or(const Options& o, int fallback) { return o.levels > 0 ? o.levels : fallback; }

std::vector<double> h_values(const Options& o) {
  if (!o.h_list.empty()) return o.h_list;
  if (o.h) return {*o.h};
  return SweepConfig{}.h_list;
}

SweepConfig sweep_config(const Options& o, int default_levels) {
  SweepConfig cfg;
  cfg.r = o.r;
  cfg.R = o.R;
  cfg.c = o.c;
  cfg.h_list = h_values(o);
  cfg.bc = washer_bc(o);
  cfg.mode_cutoff = o.modes;
  cfg.grid = grid(o);
  cfg.grid_levels = levels_or(o, default_levels);
  cfg.seed = o.seed;
  cfg.trials = o.trials;
  cfg.workers = o.workers;
  cfg.alpha = o.alpha;
  cfg.bump = o.bump == "poly" ? BumpKind::PolySpline : BumpKind::ExpMollifier;
  if (!o.inequalities.empty()) {
    cfg.inequalities.clear();
    for (const auto& s : o.inequalities) cfg.inequalities.push_back(parse_inequality(s));
  }
  cfg.stress = o.stress;
  cfg.L0 = {o.lame_lambda, o.lame_mu};
  return cfg;
}

std::ofstream open_out(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream f(path);
  if (!f) throw Error("cannot write " + path);
  return f;
}

void print_table(const SweepResult& res) {
  std::cout << res.csv_body() << res.summary();
}

int finish(const SweepResult& res, const Options& o) {
  print_table(res);
  if (!o.out.empty()) write_sweep(res, o.out);
  return res.ok() ? kOk : kAssertion;
}

int cmd_korn(const Options& o) {
  SpectralOptions opt;
  opt.mode_cutoff = o.modes;
  opt.workers = o.workers;
  opt.eigen.seed = o.seed;
  const auto lad = korn_constant_ladder(geometry(o), washer_bc(o), grid_ladder(grid(o), levels_or(o, 2)), opt);
  const auto& fin = lad.levels.back();
  std::cout << "K = " << fmt(lad.K) << "\nmode = " << fin.mode << "\ngrid = " << fin.grid.label()
            << "\nresidual = " << fmt(fin.residual) << "\nmode_cutoff = " << fin.cutoff_used;
  if (lad.levels.size() >= 2)
    std::cout << "\ngrid_change = " << fmt(lad.change) << "\nconverged = " << (lad.converged ? "yes" : "no");
  std::cout << "\nmode,value,residual\n";
  for (const auto& m : fin.per_mode) std::cout << m.mode << ',' << fmt(m.value) << ',' << fmt(m.residual) << '\n';
  if (!o.out.empty()) {
    auto f = open_out(o.out);
    f << "mode,value,residual\n";
    for (const auto& m : fin.per_mode) f << m.mode << ',' << fmt(m.value) << ',' << fmt(m.residual) << '\n';
  }
  return lad.levels.size() < 2 || lad.converged ? kOk : kAssertion;
}

int cmd_sweep(const Options& o) {
  const auto study = parse_study(o.study);
  return finish(run_sweep(sweep_config(o, 3), study), o);
}

int cmd_ansatz(const Options& o) {
  auto cfg = sweep_config(o, 1);
  if (!o.field_out.empty()) {
    const auto g = cfg.geometry(cfg.h_list.front());
    const auto f = cfg.alpha == 0.0 ? kirchhoff_ansatz(g, kirchhoff_bump(g, cfg.bump))
                                    : scaled_ansatz(g, scaled_ansatz_bump(g, cfg.bump), cfg.alpha, g.h);
    auto out = open_out(o.field_out);
    write_field(out, f, cfg.bc);
  }
  return finish(run_sweep(cfg, Study::Ansatz), o);
}

int cmd_buckling(const Options& o) {
  if (!o.h_list.empty()) return finish(run_sweep(sweep_config(o, 2), Study::Buckling), o);
  SpectralOptions opt;
  opt.mode_cutoff = o.modes;
  opt.workers = o.workers;
  opt.eigen.seed = o.seed;
  const auto g = geometry(o);
  const ElasticityTensor L0{o.lame_lambda, o.lame_mu};
  L0.validate();
  if (!(o.stress > 0.0)) throw UsageError("--stress must be positive");
  const auto sigma = StressField::radial_compression(o.stress);
  const auto cl = critical_load(g, sigma, L0, washer_bc(o), grid(o), opt);
  std::cout << "stress = radial compression -" << fmt(o.stress) << " e_rho (x) e_rho\n"
            << "sign = denominator -int rho (sigma, grad u^T grad u), positive for compression\n";
  if (!cl.found) {
    std::cout << "lambda = none (no destabilizing direction)\n";
    return kAssertion;
  }
  const auto k = korn_constant(g, washer_bc(o), grid(o), opt);
  std::cout << "lambda = " << fmt(cl.lambda) << "\nmode = " << cl.mode << "\nresidual = " << fmt(cl.residual)
            << "\nK = " << fmt(k.K) << "\nlambda_sq_over_K = " << fmt(cl.lambda * cl.lambda / k.K) << '\n';
  return kOk;
}

AuditDomain audit_domain(const Options& o) {
  AuditDomain d;
  d.washer = WasherGeometry{o.r, o.R, o.h.value_or(0.1), o.c};
  d.washer.validate();
  d.bc = washer_bc(o);
  return d;
}

std::vector<InequalityId> inequality_list(const Options& o) {
  if (o.inequalities.empty()) return fixed_constant_inequalities();
  std::vector<InequalityId> ids;
  for (const auto& s : o.inequalities) ids.push_back(parse_inequality(s));
  return ids;
}

int cmd_audit(const Options& o) {
  AuditParams p;
  p.candidate = o.candidate;
  p.epsilon = o.epsilon;
  const auto ids = inequality_list(o);
  bool ok = true;
  if (!o.field.empty()) {
    std::ifstream in(o.field);
    if (!in) throw UsageError("cannot read " + o.field);
    const auto ff = read_field(in);
    p.digest = "file=" + o.field;
    for (auto id : ids) {
      const auto rep = evaluate(id, ff.field, p);
      std::cout << report_json(rep) << '\n';
      ok = ok && rep.pass;
    }
    return ok ? kOk : kAssertion;
  }
  std::optional<std::ofstream> csv;
  if (!o.out.empty()) {
    csv = open_out(o.out);
    *csv << report_csv_header() << '\n';
  }
  for (auto id : ids) {
    const auto s = stress_test(id, o.seed, o.trials, audit_domain(o), p, o.workers);
    std::cout << summary_json(s) << '\n';
    for (const auto& [seed, rep] : s.reports) {
      if (csv) *csv << report_csv_row(rep, seed) << '\n';
      if (!rep.pass) std::cout << "FAIL " << to_string(id) << " seed " << seed << " ratio " << fmt(rep.ratio) << '\n';
    }
    ok = ok && s.pass_count == s.count;
  }
  return ok ? kOk : kAssertion;
}

int cmd_calibrate(const Options& o) {
  AuditParams p;
  p.epsilon = o.epsilon;
  std::optional<std::ofstream> csv;
  if (!o.out.empty()) {
    csv = open_out(o.out);
    *csv << "id,count,worst_ratio,argmax_seed,constant\n";
  }
  for (auto id : inequality_list(o)) {
    const auto c = calibrate(id, o.seed, o.trials, audit_domain(o), p, o.workers);
    const std::string row = std::string(to_string(id)) + "," + std::to_string(c.count) + "," + fmt(c.worst_ratio) +
                            "," + std::to_string(c.argmax_seed) + "," + fmt(c.constant);
    std::cout << row << '\n';
    if (csv) *csv << row << '\n';
  }
  return kOk;
}

int cmd_export(const Options& o) {
  if (o.out.empty()) throw UsageError("export-matrix needs --out <directory>");
  const auto fm = assemble(geometry(o), o.mode, washer_bc(o), grid(o));
  std::filesystem::create_directories(o.out);
  const std::string tag = "mode " + std::to_string(o.mode) + ", bc " + std::string(to_string(fm.bc)) + ", grid " +
                          fm.grid.label() + ", h " + fmt(fm.geometry.h) + ", reduced free space";
  const std::pair<const char*, const SpMat*> mats[] = {{"A", &fm.A}, {"B", &fm.B}, {"Mz", &fm.Mz}, {"T", &fm.T}};
  for (const auto& [name, m] : mats) {
    auto f = open_out((std::filesystem::path(o.out) / (std::string(name) + ".mtx")).string());
    write_matrix_market(f, fm.dofs.reduce(*m), std::string(name) + ": " + tag);
  }
  const SpMat A = fm.dofs.reduce(fm.A), B = fm.dofs.reduce(fm.B);
  EigenOptions eo;
  eo.seed = o.seed;
  const auto pairs = smallest_eigenpairs(A, B, std::min<int>(o.pairs, static_cast<int>(A.rows())), eo);
  {
    auto f = open_out((std::filesystem::path(o.out) / "eigenpairs.csv").string());
    write_eigenpairs_csv(f, pairs);
  }
  {
    auto f = open_out((std::filesystem::path(o.out) / "eigenvectors.csv").string());
    write_eigenvectors_csv(f, pairs);
  }
  std::cout << "size = " << A.rows() << "\nnonzeros_A = " << A.nonZeros() << "\nsmallest = " << fmt(pairs.values[0])
            << "\nwritten = " << o.out << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Korn constants, inequality audits and buckling loads for thin washers"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "Flat key=value file; keys are the long option names (h-list = 0.1,0.05,0.025)");
  Options o;
  app.add_option("--r", o.r, "Inner radius")->capture_default_str();
  app.add_option("--R", o.R, "Outer radius")->capture_default_str();
  app.add_option("--c", o.c, "Thinness bound, h <= c r")->capture_default_str();
  app.add_option("--h", o.h, "Thickness");
  app.add_option("--h-list", o.h_list, "Strictly decreasing thicknesses (comma separated)")->delimiter(',');
  app.add_option("--bc", o.bc, "Boundary condition")->check(CLI::IsMember({"v1", "v2", "V1", "V2"}))->capture_default_str();
  app.add_option("--modes", o.modes, "Fourier mode cutoff N (modes 0..N)")->check(CLI::NonNegativeNumber)->capture_default_str();
  app.add_option("--grid", o.grid, "Cells AxB in rho x z")->capture_default_str();
  app.add_option("--order", o.order, "Element degree 1..4")->check(CLI::Range(1, 4))->capture_default_str();
  app.add_option("--levels", o.levels, "Grid refinement levels (0: command default)")->check(CLI::NonNegativeNumber);
  app.add_option("--seed", o.seed, "First seed")->capture_default_str();
  app.add_option("--trials", o.trials, "Random inputs per inequality")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--out", o.out, "Output file (korn, audit, calibrate) or directory (sweep, ansatz, buckling, export-matrix)");
  app.add_option("--workers", o.workers, "Worker threads, 0 = all cores")->check(CLI::NonNegativeNumber)->capture_default_str();
  app.add_option("--study", o.study, "Sweep study")
      ->check(CLI::IsMember({"korn1", "korn15", "ansatz", "buckling", "audit"}))
      ->capture_default_str();
  app.add_option("--inequality", o.inequalities, "Inequality ids (default: the fixed-constant set)")->delimiter(',');
  app.add_option("--alpha", o.alpha, "Scaled ansatz exponent in [0, 1/2]")->capture_default_str();
  app.add_option("--bump", o.bump, "Bump profile")->check(CLI::IsMember({"mollifier", "poly"}))->capture_default_str();
  app.add_option("--candidate", o.candidate, "Candidate constant for entries without a fixed one");
  app.add_option("--epsilon", o.epsilon, "Split parameter of the interval Hardy inequality")->capture_default_str();
  app.add_option("--stress", o.stress, "Radial compression magnitude")->capture_default_str();
  app.add_option("--lame-lambda", o.lame_lambda, "Lame lambda")->capture_default_str();
  app.add_option("--lame-mu", o.lame_mu, "Lame mu")->capture_default_str();
  app.add_option("--mode", o.mode, "Fourier mode for export-matrix")->check(CLI::NonNegativeNumber)->capture_default_str();
  app.add_option("--pairs", o.pairs, "Eigenpairs written by export-matrix")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--field", o.field, "Grid-sample field file to audit");
  app.add_option("--field-out", o.field_out, "Write the ansatz field (first h) as a grid-sample file");

  std::function<int(const Options&)> action;
  auto sub = [&](const char* name, const char* help, int (*fn)(const Options&)) {
    app.add_subcommand(name, help)->callback([&action, fn] { action = fn; });
  };
  sub("korn", "Korn constant K for one h with a grid-convergence check", cmd_korn);
  sub("sweep", "h-sweep of a study with scaling fits", cmd_sweep);
  sub("audit", "Random stress test (or one field file) of inequalities", cmd_audit);
  sub("ansatz", "Norms of the Kirchhoff or scaled ansatz over h", cmd_ansatz);
  sub("buckling", "Critical load under radial compression", cmd_buckling);
  sub("calibrate", "Empirical constants: 1.2 x worst observed ratio", cmd_calibrate);
  sub("export-matrix", "Write A, B, Mz, T (MatrixMarket) and lowest eigenpairs", cmd_export);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }
  try {
    return action(o);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const InvalidArgument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const HypothesisViolation& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const SweepError& e) {
    std::cerr << "error: " << e.what() << '\n';
    if (!o.out.empty()) write_sweep(e.partial(), o.out);
    return kAssertion;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kAssertion;
  }
}
