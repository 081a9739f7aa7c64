#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "washerkorn/audit.hpp"
#include "washerkorn/error.hpp"
#include "washerkorn/fem.hpp"
#include "washerkorn/scaling.hpp"
#include "washerkorn/spectral.hpp"
#include "washerkorn/testfields.hpp"

namespace wk {

enum class Study { Korn1, Korn15, Ansatz, Buckling, Audit };

std::string_view to_string(Study s);
Study parse_study(std::string_view name);

/// Inequalities with fixed constants, the default audit list.
std::vector<InequalityId> fixed_constant_inequalities();

struct SweepConfig {
  double r = 0.5;
  double R = 1.0;
  double c = 1.0;
  /// Strictly decreasing, each h <= c r.
  std::vector<double> h_list{0.1, 0.05, 0.025, 0.0125};
  BoundaryCondition bc = BoundaryCondition::V2;
  int mode_cutoff = 8;
  /// Coarsest grid; the same cell counts are used for every h, so cells keep
  /// a fixed number of elements across the thickness.
  FemGrid grid;
  /// Refinement levels for the K and lambda ladders (korn1, buckling).
  int grid_levels = 3;
  QuadratureSpec quad;
  /// Bump profiles need many more rho panels than polynomial fields.
  QuadratureSpec ansatz_quad{128, 2, QuadRule::GaussLegendre, 8};
  std::uint64_t seed = 1;
  int trials = 1000;
  int workers = 1;
  /// ansatz: 0 gives the Kirchhoff ansatz, alpha in (0, 1/2] the scaled one.
  double alpha = 0.0;
  BumpKind bump = BumpKind::ExpMollifier;
  std::vector<InequalityId> inequalities = fixed_constant_inequalities();
  /// Radial compression magnitude and elasticity tensor for buckling.
  double stress = 1.0;
  ElasticityTensor L0;
  Korn15Options korn15;

  void validate() const;
  WasherGeometry geometry(double h) const;
};

/// One quantity over the h-sweep.  The fit only uses converged points.
struct SweepSeries {
  std::string name;
  std::vector<double> h;
  std::vector<double> value;
  std::vector<bool> converged;
  std::optional<ScalingFit> fit;
  /// Expected exponent band, when one is known.
  std::optional<std::pair<double, double>> band;

  bool in_band() const;
};

struct SweepResult {
  Study study = Study::Korn1;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<SweepSeries> series;
  /// Failed assertions; empty on success.
  std::vector<std::string> failures;
  /// Informational lines for the summary (flags, failing seeds, ...).
  std::vector<std::string> notes;

  bool ok() const { return failures.empty(); }
  const SweepSeries* find(std::string_view name) const;
  /// Documented header line followed by the rows; deterministic given config.
  std::string csv_body() const;
  /// key = value summary with fits and failures.
  std::string summary() const;
};

/// A task of the sweep failed.  `key` names the failing task ("h=0.05"),
/// `partial` holds the rows of the tasks that did finish.
class SweepError : public Error {
 public:
  SweepError(std::string key, const std::string& what, SweepResult partial)
      : Error(key + ": " + what), key_(std::move(key)), partial_(std::move(partial)) {}
  const std::string& key() const noexcept { return key_; }
  const SweepResult& partial() const noexcept { return partial_; }

 private:
  std::string key_;
  SweepResult partial_;
};

SweepResult run_sweep(const SweepConfig& config, Study study);

/// Writes <dir>/<study>.csv and <dir>/<study>_summary.txt.  The CSV starts
/// with a single "# generated <UTC time>" comment line, so the remainder is
/// byte-identical between runs with the same config.
void write_sweep(const SweepResult& result, const std::string& dir);

}  // namespace wk
