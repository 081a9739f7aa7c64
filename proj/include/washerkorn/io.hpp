#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "washerkorn/eigensolver.hpp"
#include "washerkorn/fem.hpp"
#include "washerkorn/field.hpp"

namespace wk {

/// Shortest round-trip decimal form, independent of the global locale.
std::string format_number(double v);
/// Strict locale-independent parse; throws InvalidArgument on trailing junk.
double parse_number(std::string_view text);

/// Grid-sample field file:
///
///   washerkorn-field 1
///   geometry <r> <R> <h> [<c>]
///   bc <V1|V2|Unconstrained>
///   modes <n0> <n1> ...
///   samples <n_rho> <n_z>
///   mode <n> <component>          (a_rho b_rho a_theta b_theta a_z b_z)
///   <n_z values>                  (one line per rho sample, rho-major)
///   ...
///
/// Samples sit on a uniform grid including both ends.  Reading back gives
/// bilinear GridSampledField coefficients.
struct FieldFile {
  FourierField field;
  BoundaryCondition bc = BoundaryCondition::V2;
};

void write_field(std::ostream& out, const FourierField& field, BoundaryCondition bc, int n_rho = 65, int n_z = 17);
FieldFile read_field(std::istream& in);

/// MatrixMarket "coordinate real general", 1-based (row, col, value) triplets.
void write_matrix_market(std::ostream& out, const SpMat& m, const std::string& comment = {});
SpMat read_matrix_market(std::istream& in);

/// Header "index,eigenvalue,residual"; vectors go to a separate file.
void write_eigenpairs_csv(std::ostream& out, const EigenPairs& pairs);
/// Eigenvectors as CSV: one row per DOF, one column per pair.
void write_eigenvectors_csv(std::ostream& out, const EigenPairs& pairs);

}  // namespace wk
