#include "qmx/boundary.hpp"

#include <cmath>
#include <stdexcept>

#include "qmx/stencil.hpp"

namespace qmx {

namespace {

int rank2x6(const double r[2][6]) {
    // rank of a 2x6 matrix by Gram determinant
    double g00 = 0, g01 = 0, g11 = 0;
    for (int j = 0; j < 6; ++j) {
        g00 += r[0][j] * r[0][j];
        g01 += r[0][j] * r[1][j];
        g11 += r[1][j] * r[1][j];
    }
    if (g00 == 0.0 && g11 == 0.0) return 0;
    return (g00 * g11 - g01 * g01) > 1e-14 ? 2 : 1;
}

}  // namespace

int BoundaryOperators::rank_B() const { return rank2x6(B); }
int BoundaryOperators::rank_C() const { return rank2x6(C); }

BoundaryOperators build_boundary_operators(const Vec3& nu) {
    if (!(nu[0] == 0.0 && nu[1] == 0.0 && nu[2] == -1.0))
        throw std::invalid_argument("build_boundary_operators: unsupported normal");

    BoundaryOperators ops;
    // rows of Eq-style B with nu = (0,0,-1): (-E2, E1); the third row vanishes.
    ops.B[0][1] = -1.0;
    ops.B[1][0] = 1.0;
    ops.C[0][3] = 2.0;
    ops.C[1][4] = 2.0;

    // A3 = (C^T B + B^T C) / 2, assembled exactly.
    Mat6 a{};
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) {
            double s = 0.0;
            for (int r = 0; r < 2; ++r) s += ops.C[r][i] * ops.B[r][j] + ops.B[r][i] * ops.C[r][j];
            a.m[i][j] = 0.5 * s;
        }
    ops.A3 = a;

    // sanity: must equal the co-system matrix for axis 3
    const Mat6 a3 = system_matrix(3);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j)
            if (a.m[i][j] != a3.m[i][j])
                throw std::logic_error("build_boundary_operators: splitting identity violated");
    return ops;
}

}  // namespace qmx
