#pragma once

#include "qmx/linalg.hpp"

namespace qmx {

/// Constant boundary matrices for the PEC face with normal (0,0,-1):
/// B u = (-E2, E1), C u = (2 H1, 2 H2), and the splitting
/// A3 = (C^T B + B^T C) / 2 holds exactly in integer arithmetic.
struct BoundaryOperators {
    double B[2][6]{};
    double C[2][6]{};
    Mat6 A3;

    std::array<double, 2> apply_B(const Vec6& u) const {
        std::array<double, 2> r{};
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 6; ++j) r[i] += B[i][j] * u[j];
        return r;
    }
    std::array<double, 2> apply_C(const Vec6& u) const {
        std::array<double, 2> r{};
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 6; ++j) r[i] += C[i][j] * u[j];
        return r;
    }
    /// C^T w for a 2-vector w.
    Vec6 apply_Ct(const std::array<double, 2>& w) const {
        Vec6 r{};
        for (int j = 0; j < 6; ++j) r[j] = C[0][j] * w[0] + C[1][j] * w[1];
        return r;
    }
    int rank_B() const;
    int rank_C() const;
};

/// Only nu = (0,0,-1) (conducting bottom face) is supported.
BoundaryOperators build_boundary_operators(const Vec3& nu);

}  // namespace qmx
