#pragma once

#include <Eigen/Core>
#include <memory>
#include <string>
#include <vector>

#include "washerkorn/cylfield.hpp"
#include "washerkorn/eigensolver.hpp"
#include "washerkorn/fem.hpp"

namespace wk {

/// Isotropic tensor  L0 e = lambda tr(e) I + 2 mu e.
struct ElasticityTensor {
  double lambda = 1.0;
  double mu = 1.0;

  /// Throws InvalidArgument unless mu > 0 and lambda + 2 mu / 3 >= 0.
  void validate() const;
  /// (L0 e, e) for a symmetric e.
  double energy(const Mat3& e) const;
  ElasticityTensor scaled(double t) const { return {t * lambda, t * mu}; }
};

/// Trivial-branch stress sigma_h(rho, z).  Only theta-independent stresses
/// with sigma_{rho theta} = sigma_{theta z} = 0 are supported, which keeps the
/// denominator form separable over Fourier modes.
struct StressField {
  StressFn fn;
  std::string label;

  Mat3 operator()(double rho, double z) const { return fn(rho, z); }
  StressField scaled(double t) const;

  /// -t e_rho (x) e_rho: radial compression.
  static StressField radial_compression(double t = 1.0);
  /// Constant stress value.
  static StressField uniform(const Mat3& sigma, std::string label = "uniform");
};

/// Outcome of the buckling quotient.  The denominator carries the sign flip
///   D = -int rho (sigma, grad u^T grad u)
/// so compressive stresses give D > 0.  D <= 0 is not an error: the field is
/// simply not a destabilizing direction and `value` is left at infinity.
struct BucklingQuotient {
  double numerator = 0.0;
  double denominator = 0.0;
  double value = 0.0;
  bool destabilizing = false;
};

BucklingQuotient buckling_quotient(const FourierField& field, const StressField& sigma, const ElasticityTensor& L0,
                                   const QuadratureSpec& quad = {});

struct ModeValue {
  int mode = 0;
  double value = 0.0;
  double residual = 0.0;
  bool found = true;
};

struct SpectralOptions {
  /// Modes 0..mode_cutoff are scanned.
  int mode_cutoff = 8;
  /// Extend the scan while the minimizing mode equals the cutoff.
  bool extend_modes = true;
  int mode_cap = 64;
  int workers = 1;
  EigenOptions eigen;
};

struct KornResult {
  double K = 0.0;
  int mode = 0;
  /// Free-space minimizer in `forms` (the argmin mode).
  Eigen::VectorXd x;
  double residual = 0.0;
  std::shared_ptr<const FormMatrices> forms;
  std::vector<ModeValue> per_mode;
  int cutoff_used = 0;
  FemGrid grid;
};

/// K = min over modes of the smallest eigenvalue of (A, B): the discrete
/// Korn constant  inf ||sqrt(rho) e(u)||^2 / ||sqrt(rho) grad u||^2.
KornResult korn_constant(const WasherGeometry& geometry, BoundaryCondition bc, const FemGrid& grid,
                         const SpectralOptions& options = {});

/// Smallest eigenvalue of one mode.
ModeValue korn_mode(const FormMatrices& fm, const EigenOptions& eigen = {}, Eigen::VectorXd* x = nullptr);

inline constexpr double kGridConvergenceTolerance = 0.02;

struct LadderResult {
  std::vector<KornResult> levels;
  double K = 0.0;       ///< value on the finest grid
  double change = 0.0;  ///< |K_finest / K_previous - 1|
  bool converged = false;
};

/// korn_constant on every grid of a refinement ladder (coarse to fine); the
/// result is converged when the two finest values differ by at most `tol`.
LadderResult korn_constant_ladder(const WasherGeometry& geometry, BoundaryCondition bc,
                                  const std::vector<FemGrid>& ladder, const SpectralOptions& options = {},
                                  double tol = kGridConvergenceTolerance);

/// Ladder base, base.refined(), ... with `levels` grids.
std::vector<FemGrid> grid_ladder(const FemGrid& base, int levels);

struct Korn15Options {
  int starts = 20;
  /// Leading starts taken from the lowest eigenvectors of (A, B).
  int eigen_starts = 5;
  int max_iter = 400;
  double tol = 1e-7;
  std::uint64_t seed = 1;
};

struct Korn15Result {
  double C = 0.0;
  int mode = 0;
  Eigen::VectorXd x;
  bool converged = false;
  std::vector<ModeValue> per_mode;
};

/// Ratio  B(x) / (sqrt(Mz(x) A(x)) / h + A(x))  for a free vector; for modes
/// with a deflated null space Mz is minimized over the null directions.
/// Throws InvalidArgument for a field with B(x) = 0.
double korn15_ratio(const FormMatrices& fm, const Eigen::VectorXd& free);

/// Largest ratio found by preconditioned projected gradient ascent on the
/// B-sphere with multi-start.
Korn15Result korn15_mode(const FormMatrices& fm, const Korn15Options& options = {});

/// Maximum of korn15_mode over modes 0..cutoff.  The ratio of a multi-mode
/// field never exceeds the largest single-mode ratio, so this is the
/// empirical constant of the whole discrete space.
Korn15Result korn15_constant(const WasherGeometry& geometry, BoundaryCondition bc, const FemGrid& grid,
                             const SpectralOptions& options = {}, const Korn15Options& k15 = {});

struct CriticalLoad {
  bool found = false;  ///< false when no discrete direction has a positive denominator
  double lambda = 0.0;
  int mode = 0;
  Eigen::VectorXd x;
  double residual = 0.0;
  std::shared_ptr<const FormMatrices> forms;
  std::vector<ModeValue> per_mode;
};

/// Numerator form  lambda T + 2 mu A  of (L0 e, e).
SpMat elastic_form(const FormMatrices& fm, const ElasticityTensor& L0);

/// The elastic form is much stiffer than B on thin grids; buckling pairs whose
/// residual stagnates below this are accepted.
inline constexpr double kBucklingAccept = 1e-6;

/// lambda(h) = min over modes and discrete fields with positive denominator of
/// the buckling quotient.
CriticalLoad critical_load(const WasherGeometry& geometry, const StressField& sigma, const ElasticityTensor& L0,
                           BoundaryCondition bc, const FemGrid& grid, const SpectralOptions& options = {});

}  // namespace wk
