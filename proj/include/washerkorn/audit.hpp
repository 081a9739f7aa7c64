#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "washerkorn/field.hpp"
#include "washerkorn/geometry.hpp"
#include "washerkorn/quadrature.hpp"
#include "washerkorn/testfields.hpp"

namespace wk {

enum class InequalityId {
  HarmonicSep,
  Korn15RectW,
  Korn15Washer,
  Korn1Washer,
  Korn15RectU,
  CaccioppoliW,
  HardyInterval,
  HardyAnnulus,
  BlockZ,
  RadialTrace,
  PoincareUzV2,
  PoincareUzV1,
};

enum class InputClass { Washer, Rect, Harmonic, Spline };

struct InequalityInfo {
  InequalityId id;
  std::string_view name;
  std::string_view statement;
  /// Fixed constant of the statement; empty for constants that are only known to exist.
  std::optional<double> constant;
  InputClass input;
};

const std::vector<InequalityInfo>& inequality_registry();
const InequalityInfo& info(InequalityId id);
std::string_view to_string(InequalityId id);
/// Accepts the registry names, case-insensitive, '-' for '_'.
InequalityId parse_inequality(std::string_view name);

using AuditInput = std::variant<FourierField, RectField, HarmonicRectField, Spline1D>;

struct AuditParams {
  /// Candidate for entries whose constant is not fixed; ignored otherwise.
  std::optional<double> candidate;
  /// Hardy interval split parameter in (0, 1].
  double epsilon = 0.5;
  /// Thinness bound h <= c l for the weighted rectangle inequality.
  double c = 1.0;
  QuadratureSpec quad{};
  std::string digest;
};

struct InequalityReport {
  InequalityId id;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  /// Constant that multiplies the right-hand side; empty means no candidate
  /// was supplied for an existence-only constant (rhs is then the bare
  /// bracket and ratio the empirical constant).
  std::optional<double> constant;
  bool pass = true;
  double quad_error = 0.0;
  std::string digest;
  /// Weighted rectangle entry only: ratio under the printed reading with squared norms.
  std::optional<double> alt_ratio;
};

/// Relative slack granted on top of the quadrature estimate.
inline constexpr double kAuditSlack = 1e-6;
/// rhs = 0 passes iff lhs <= kDegenerateTolerance * (field norm scale).
inline constexpr double kDegenerateTolerance = 1e-12;
/// Harmonicity residual accepted for harmonic inputs.
inline constexpr double kHarmonicTolerance = 1e-8;

/// Evaluates one inequality.  LHS and RHS use the same quadrature, at quad
/// and at quad.refined(); the refined values are reported and their relative
/// change is the quadrature error estimate.  Throws HypothesisViolation when
/// the input does not satisfy the statement's hypotheses.
InequalityReport evaluate(InequalityId id, const AuditInput& input, const AuditParams& params = {});

/// Domains used to generate random inputs.
struct AuditDomain {
  WasherGeometry washer{};
  BoundaryCondition bc = BoundaryCondition::V2;
  /// Rectangle (0, h) x (l, L) for the weighted entries.
  RectGeometry rect{0.1, 0.5, 1.0};
  /// Rectangle (0, h) x (0, L) for the unweighted entry.
  RectGeometry rect_unweighted{0.1, 0.0, 1.0};
  double interval_a = 0.5;
  double interval_b = 1.0;
  double annulus_r = 0.1;
  double annulus_R = 1.0;
};

/// Deterministic random input for an entry.
AuditInput random_input(InequalityId id, std::uint64_t seed, const AuditDomain& domain);

struct StressSummary {
  InequalityId id;
  std::uint64_t first_seed = 0;
  int count = 0;
  int pass_count = 0;
  double max_ratio = 0.0;
  std::uint64_t argmax_seed = 0;
  std::vector<std::pair<std::uint64_t, InequalityReport>> reports;
};

/// evaluate over seeds first..first+count-1 in parallel; aggregation is in
/// seed order, so the summary is independent of the worker count.  A failing
/// evaluation is rethrown as an Error naming the seed.
StressSummary stress_test(InequalityId id, std::uint64_t first_seed, int count, const AuditDomain& domain,
                          const AuditParams& params = {}, int workers = 1);

struct Calibration {
  InequalityId id;
  double worst_ratio = 0.0;
  std::uint64_t argmax_seed = 0;
  int count = 0;
  /// 1.2 x worst_ratio.
  double constant = 0.0;
};

inline constexpr double kCalibrationFactor = 1.2;

/// Empirical constant for an existence-only entry.
Calibration calibrate(InequalityId id, std::uint64_t first_seed, int count, const AuditDomain& domain,
                      const AuditParams& params = {}, int workers = 1);

/// CSV rows "id,seed,lhs,rhs,ratio,constant,pass".
std::string report_csv_header();
std::string report_csv_row(const InequalityReport& r, std::uint64_t seed);
std::string report_json(const InequalityReport& r);
std::string summary_json(const StressSummary& s);

/// Shortest round-trip decimal text, independent of the locale.
std::string format_double(double v);

}  // namespace wk
