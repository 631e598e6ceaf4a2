#pragma once

#include <array>
#include <span>
#include <vector>

#include "qmx/grid.hpp"

namespace qmx {

/// Second-order discrete partial derivative along axis (1..3): central in the
/// interior (and across periodic wraps), one-sided second order at
/// non-periodic faces. Exact on per-axis quadratics everywhere.
std::vector<double> discrete_partial(const GridSpec& grid, std::span<const double> field, int axis);

/// In-place variant writing into `out` (size = node count).
void discrete_partial_into(const GridSpec& grid, std::span<const double> field, int axis,
                           std::span<double> out);

/// Summation-by-parts variant used by the stepper's flux terms: identical
/// central interior stencil, first-order one-sided closure at non-periodic
/// faces. Together with the trapezoid node weights it satisfies
/// H D = Q with Q + Q^T = diag(-1, 0, ..., 0, 1), which is what makes the
/// penalized conducting face energy-neutral.
void sbp_partial_into(const GridSpec& grid, std::span<const double> field, int axis,
                      std::span<double> out);

/// Components of a 3-vector grid function, node-major scalar arrays.
struct VectorField {
    std::array<std::vector<double>, 3> comp;
};

/// curl v realized as sum_j J_j d_j v; exactly the J_j of the first-order form.
VectorField discrete_curl(const GridSpec& grid, const VectorField& v);
std::vector<double> discrete_div(const GridSpec& grid, const VectorField& v);

/// Extracts (E1,E2,E3) or (H1,H2,H3) from a FieldState.
VectorField electric_part(const FieldState& u);
VectorField magnetic_part(const FieldState& u);

/// The coupling matrices J_j of curl = sum J_j d_j and the symmetric system
/// matrices A_j^co = [[0, -J_j], [J_j, 0]].
Mat3 curl_matrix(int axis);
Mat6 system_matrix(int axis);

}  // namespace qmx
