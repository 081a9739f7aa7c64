#include "washerkorn/sweep.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "washerkorn/cylfield.hpp"
#include "washerkorn/error.hpp"
#include "washerkorn/io.hpp"
#include "washerkorn/parallel.hpp"

namespace wk {

namespace {

constexpr std::pair<Study, std::string_view> kStudies[] = {{Study::Korn1, "korn1"},
                                                           {Study::Korn15, "korn15"},
                                                           {Study::Ansatz, "ansatz"},
                                                           {Study::Buckling, "buckling"},
                                                           {Study::Audit, "audit"}};

std::string fmt(double v) { return format_number(v); }

/// One task result: either rows plus per-series values, or an error.
struct TaskOut {
  std::vector<std::vector<std::string>> rows;
  /// series name -> (value, converged)
  std::vector<std::pair<std::string, std::pair<double, bool>>> values;
  std::vector<std::string> notes;
  std::vector<std::string> failures;
};

/// Runs fn over n tasks; collects successes in order and reports the first
/// failing task after every task has finished.
std::vector<std::optional<TaskOut>> run_tasks(int n, int workers, const std::function<TaskOut(int)>& fn,
                                              std::vector<std::string>& errors) {
  struct Slot {
    std::optional<TaskOut> out;
    std::string error;
  };
  auto slots = parallel_map<Slot>(n, workers, [&](int i) {
    Slot s;
    try {
      s.out = fn(i);
    } catch (const std::exception& e) {
      s.error = e.what();
    }
    return s;
  });
  std::vector<std::optional<TaskOut>> out;
  errors.assign(n, {});
  for (int i = 0; i < n; ++i) {
    out.push_back(std::move(slots[i].out));
    errors[i] = std::move(slots[i].error);
  }
  return out;
}

double norm_total(const FourierField& f, ModalQuantity q, const QuadratureSpec& quad) {
  return mode_norms(f, q, quad).total;
}

TaskOut korn1_task(const SweepConfig& cfg, double h) {
  SpectralOptions opt;
  opt.mode_cutoff = cfg.mode_cutoff;
  opt.eigen.seed = cfg.seed;
  const auto lad = korn_constant_ladder(cfg.geometry(h), cfg.bc, grid_ladder(cfg.grid, cfg.grid_levels), opt);
  const auto& fin = lad.levels.back();
  TaskOut t;
  t.rows.push_back({fmt(h), fmt(lad.K), std::to_string(fin.mode), fin.grid.label(), fmt(lad.change),
                    lad.converged ? "1" : "0", fmt(fin.residual), std::to_string(fin.cutoff_used)});
  t.values.push_back({"K", {lad.K, lad.converged}});
  if (!lad.converged) t.notes.push_back("h=" + fmt(h) + " K not grid-converged (change " + fmt(lad.change) + ")");
  return t;
}

TaskOut korn15_task(const SweepConfig& cfg, double h) {
  SpectralOptions opt;
  opt.mode_cutoff = cfg.mode_cutoff;
  opt.eigen.seed = cfg.seed;
  auto k15 = cfg.korn15;
  k15.seed = cfg.seed;
  const auto res = korn15_constant(cfg.geometry(h), cfg.bc, cfg.grid, opt, k15);
  TaskOut t;
  t.rows.push_back({fmt(h), fmt(res.C), std::to_string(res.mode), cfg.grid.label(), res.converged ? "1" : "0"});
  t.values.push_back({"C", {res.C, true}});
  if (!res.converged) t.notes.push_back("h=" + fmt(h) + " korn15 ascent hit the iteration limit on some start");
  return t;
}

TaskOut ansatz_task(const SweepConfig& cfg, double h) {
  const auto g = cfg.geometry(h);
  const FourierField f = cfg.alpha == 0.0 ? kirchhoff_ansatz(g, kirchhoff_bump(g, cfg.bump))
                                          : scaled_ansatz(g, scaled_ansatz_bump(g, cfg.bump), cfg.alpha, h);
  double qerr = 0.0;
  auto both = [&](ModalQuantity q) {
    const double a = norm_total(f, q, cfg.ansatz_quad), b = norm_total(f, q, cfg.ansatz_quad.refined());
    if (b > 0.0) qerr = std::max(qerr, std::abs(a - b) / b);
    return b;
  };
  const double e = both(ModalQuantity::Strain), gr = both(ModalQuantity::Grad), uz = both(ModalQuantity::Uz);
  const double ratio = gr / (std::sqrt(uz * e) / h + e);
  TaskOut t;
  t.rows.push_back({fmt(h), fmt(e), fmt(gr), fmt(uz), fmt(ratio), fmt(qerr)});
  t.values.push_back({"strain_sq", {e, true}});
  t.values.push_back({"grad_sq", {gr, true}});
  t.values.push_back({"uz_sq", {uz, true}});
  t.values.push_back({"ratio", {ratio, true}});
  return t;
}

TaskOut buckling_task(const SweepConfig& cfg, double h) {
  SpectralOptions opt;
  opt.mode_cutoff = cfg.mode_cutoff;
  opt.eigen.seed = cfg.seed;
  const auto g = cfg.geometry(h);
  const auto ladder = grid_ladder(cfg.grid, cfg.grid_levels);
  const auto sigma = StressField::radial_compression(cfg.stress);
  std::vector<CriticalLoad> loads;
  for (const auto& grid : ladder) loads.push_back(critical_load(g, sigma, cfg.L0, cfg.bc, grid, opt));
  const auto& cl = loads.back();
  if (!cl.found) throw SolverError("no destabilizing direction for the radial-compression stress");
  bool lam_conv = false;
  double lam_change = 0.0;
  if (loads.size() >= 2) {
    lam_change = std::abs(cl.lambda / loads[loads.size() - 2].lambda - 1.0);
    lam_conv = lam_change <= kGridConvergenceTolerance;
  }
  const auto lad = korn_constant_ladder(g, cfg.bc, ladder, opt);
  const bool conv = lam_conv && lad.converged;
  const double q = cl.lambda * cl.lambda / lad.K;
  TaskOut t;
  t.rows.push_back({fmt(h), fmt(cl.lambda), std::to_string(cl.mode), fmt(lad.K), std::to_string(lad.levels.back().mode),
                    fmt(q), ladder.back().label(), fmt(lam_change), fmt(lad.change), conv ? "1" : "0",
                    fmt(cl.residual)});
  t.values.push_back({"lambda", {cl.lambda, lam_conv}});
  t.values.push_back({"K", {lad.K, lad.converged}});
  t.values.push_back({"lambda_sq_over_K", {q, conv}});
  if (!conv) t.notes.push_back("h=" + fmt(h) + " lambda or K not grid-converged");
  return t;
}

std::vector<std::string> header_for(Study s) {
  switch (s) {
    case Study::Korn1: return {"h", "K", "mode", "grid", "grid_change", "converged", "residual", "mode_cutoff"};
    case Study::Korn15: return {"h", "C", "mode", "grid", "converged"};
    case Study::Ansatz: return {"h", "strain_sq", "grad_sq", "uz_sq", "ratio", "quad_error"};
    case Study::Buckling:
      return {"h",    "lambda",        "lambda_mode", "K",         "K_mode",   "lambda_sq_over_K",
              "grid", "lambda_change", "K_change",    "converged", "residual"};
    case Study::Audit: return {"id", "count", "pass_count", "max_ratio", "argmax_seed", "constant", "max_quad_error"};
  }
  return {};
}

void add_bands(const SweepConfig& cfg, Study study, SweepResult& res) {
  for (auto& s : res.series) {
    if (study == Study::Korn1 && s.name == "K") s.band = {1.8, 2.2};
    if (study == Study::Ansatz && cfg.alpha == 0.0) {
      if (s.name == "strain_sq") s.band = {2.95, 3.05};
      if (s.name == "grad_sq") s.band = {0.95, 1.05};
      if (s.name == "ratio") s.band = {-0.1, 0.1};
    }
  }
}

void finish_series(SweepResult& res) {
  for (auto& s : res.series) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < s.h.size(); ++i)
      if (s.converged[i] && s.value[i] > 0.0) pts.emplace_back(s.h[i], s.value[i]);
    if (pts.size() >= 3) s.fit = fit_exponent(pts);
    if (s.band && !s.fit && s.h.size() >= 3) res.failures.push_back(s.name + ": fewer than 3 converged points, no fit");
    if (s.band && s.fit && !s.in_band())
      res.failures.push_back(s.name + ": exponent " + format_number(s.fit->exponent) + " outside [" +
                             format_number(s.band->first) + ", " + format_number(s.band->second) + "]");
  }
}

SweepResult audit_sweep(const SweepConfig& cfg) {
  SweepResult res;
  res.study = Study::Audit;
  res.header = header_for(Study::Audit);
  AuditDomain dom;
  dom.washer = cfg.geometry(cfg.h_list.front());
  dom.bc = cfg.bc;
  AuditParams p;
  p.quad = cfg.quad;
  for (auto id : cfg.inequalities) {
    if (!info(id).constant) {
      res.notes.push_back(std::string(to_string(id)) + " has no fixed constant, skipped");
      continue;
    }
    StressSummary s;
    try {
      s = stress_test(id, cfg.seed, cfg.trials, dom, p, cfg.workers);
    } catch (const std::exception& e) {
      throw SweepError("id=" + std::string(to_string(id)), e.what(), res);
    }
    double qe = 0.0;
    for (const auto& [seed, r] : s.reports) {
      qe = std::max(qe, r.quad_error);
      if (!r.pass)
        res.notes.push_back(std::string(to_string(id)) + " seed " + std::to_string(seed) + " fails: ratio " +
                            format_number(r.ratio));
    }
    res.rows.push_back({std::string(to_string(id)), std::to_string(s.count), std::to_string(s.pass_count),
                        fmt(s.max_ratio), std::to_string(s.argmax_seed), fmt(*info(id).constant), fmt(qe)});
    if (s.pass_count != s.count)
      res.failures.push_back(std::string(to_string(id)) + ": " + std::to_string(s.count - s.pass_count) + " of " +
                             std::to_string(s.count) + " seeds fail");
  }
  return res;
}

}  // namespace

std::string_view to_string(Study s) {
  for (const auto& [k, name] : kStudies)
    if (k == s) return name;
  return "?";
}

Study parse_study(std::string_view name) {
  for (const auto& [k, n] : kStudies)
    if (n == name) return k;
  throw InvalidArgument("unknown study: " + std::string(name));
}

std::vector<InequalityId> fixed_constant_inequalities() {
  return {InequalityId::BlockZ,        InequalityId::RadialTrace, InequalityId::CaccioppoliW,
          InequalityId::HarmonicSep,   InequalityId::Korn15RectU, InequalityId::HardyInterval,
          InequalityId::HardyAnnulus,  InequalityId::PoincareUzV2};
}

void SweepConfig::validate() const {
  if (h_list.empty()) throw InvalidArgument("sweep: empty h list");
  for (std::size_t i = 0; i < h_list.size(); ++i) {
    if (i && !(h_list[i] < h_list[i - 1])) throw InvalidArgument("sweep: h list must be strictly decreasing");
    geometry(h_list[i]).validate();
  }
  if (mode_cutoff < 0) throw InvalidArgument("sweep: mode cutoff must be >= 0");
  grid.validate();
  if (grid_levels < 1) throw InvalidArgument("sweep: grid levels must be >= 1");
  quad.validate();
  ansatz_quad.validate();
  if (trials < 1) throw InvalidArgument("sweep: trials must be >= 1");
  if (!(alpha >= 0.0 && alpha <= 0.5)) throw InvalidArgument("sweep: alpha must be in [0, 1/2]");
  if (!(stress > 0.0)) throw InvalidArgument("sweep: stress magnitude must be positive");
  L0.validate();
}

WasherGeometry SweepConfig::geometry(double h) const { return {r, R, h, c}; }

bool SweepSeries::in_band() const {
  return fit && band && fit->exponent >= band->first && fit->exponent <= band->second;
}

const SweepSeries* SweepResult::find(std::string_view name) const {
  for (const auto& s : series)
    if (s.name == name) return &s;
  return nullptr;
}

std::string SweepResult::csv_body() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << '\n';
  }
  return os.str();
}

std::string SweepResult::summary() const {
  std::ostringstream os;
  os << "study = " << to_string(study) << '\n';
  for (const auto& s : series) {
    if (s.fit) {
      os << s.name << ".exponent = " << format_number(s.fit->exponent) << '\n';
      os << s.name << ".intercept = " << format_number(s.fit->intercept) << '\n';
      os << s.name << ".max_residual = " << format_number(s.fit->max_residual) << '\n';
    } else {
      os << s.name << ".exponent = none\n";
    }
    if (s.band) os << s.name << ".band = " << format_number(s.band->first) << " " << format_number(s.band->second) << '\n';
    std::size_t excluded = std::count(s.converged.begin(), s.converged.end(), false);
    os << s.name << ".excluded_unconverged = " << excluded << '\n';
  }
  for (const auto& n : notes) os << "note = " << n << '\n';
  for (const auto& f : failures) os << "failure = " << f << '\n';
  os << "status = " << (ok() ? "pass" : "fail") << '\n';
  return os.str();
}

SweepResult run_sweep(const SweepConfig& cfg, Study study) {
  cfg.validate();
  if (study == Study::Audit) return audit_sweep(cfg);

  std::function<TaskOut(const SweepConfig&, double)> task;
  switch (study) {
    case Study::Korn1: task = korn1_task; break;
    case Study::Korn15: task = korn15_task; break;
    case Study::Ansatz: task = ansatz_task; break;
    case Study::Buckling: task = buckling_task; break;
    case Study::Audit: break;
  }
  const int n = static_cast<int>(cfg.h_list.size());
  std::vector<std::string> errors;
  auto outs = run_tasks(n, resolve_workers(cfg.workers), [&](int i) { return task(cfg, cfg.h_list[i]); }, errors);

  SweepResult res;
  res.study = study;
  res.header = header_for(study);
  for (int i = 0; i < n; ++i) {
    if (!outs[i]) continue;
    auto& t = *outs[i];
    for (auto& row : t.rows) res.rows.push_back(std::move(row));
    for (auto& [name, vc] : t.values) {
      auto it = std::find_if(res.series.begin(), res.series.end(), [&](const auto& s) { return s.name == name; });
      if (it == res.series.end()) {
        res.series.push_back({name, {}, {}, {}, std::nullopt, std::nullopt});
        it = std::prev(res.series.end());
      }
      it->h.push_back(cfg.h_list[i]);
      it->value.push_back(vc.first);
      it->converged.push_back(vc.second);
    }
    for (auto& note : t.notes) res.notes.push_back(std::move(note));
  }
  for (int i = 0; i < n; ++i)
    if (!errors[i].empty()) throw SweepError("h=" + format_number(cfg.h_list[i]), errors[i], res);

  add_bands(cfg, study, res);
  finish_series(res);
  if (study == Study::Buckling) {
    const auto* q = res.find("lambda_sq_over_K");
    bool mono = true;
    for (std::size_t i = 1; q && i < q->value.size(); ++i) mono = mono && q->value[i] < q->value[i - 1];
    if (!mono) res.failures.push_back("lambda_sq_over_K is not decreasing as h decreases");
  }
  if (study == Study::Ansatz && cfg.alpha == 0.0) {
    const auto* q = res.find("ratio");
    if (q) {
      const auto [lo, hi] = std::minmax_element(q->value.begin(), q->value.end());
      res.notes.push_back("ratio band = " + format_number(*lo) + " " + format_number(*hi));
    }
  }
  return res;
}

void write_sweep(const SweepResult& result, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const std::string base = (fs::path(dir) / std::string(to_string(result.study))).string();
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ofstream csv(base + ".csv");
  csv << "# generated " << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ") << '\n' << result.csv_body();
  std::ofstream sum(base + "_summary.txt");
  sum << result.summary();
  if (!csv || !sum) throw Error("could not write sweep output under " + dir);
}

}  // namespace wk
