#include "qmx/linalg.hpp"

#include <algorithm>

namespace qmx {

Mat6 spd_inverse(const Mat6& a, bool* ok) {
    Mat6 inv;
    Ldlt6 f = Ldlt6::factor(a);
    if (ok) *ok = f.ok;
    if (!f.ok) return inv;
    for (int c = 0; c < 6; ++c) {
        Vec6 e{};
        e[c] = 1.0;
        Vec6 col = f.solve(e);
        for (int r = 0; r < 6; ++r) inv.m[r][c] = col[r];
    }
    return inv;
}

namespace {

// Cyclic Jacobi on an n x n symmetric matrix stored in w.
template <int N>
void jacobi_eigenvalues(double w[N][N], double* evals) {
    for (int sweep = 0; sweep < 50; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < N; ++p)
            for (int q = p + 1; q < N; ++q) off += w[p][q] * w[p][q];
        if (off < 1e-30) break;
        for (int p = 0; p < N; ++p) {
            for (int q = p + 1; q < N; ++q) {
                if (std::abs(w[p][q]) < 1e-300) continue;
                const double theta = (w[q][q] - w[p][p]) / (2.0 * w[p][q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < N; ++k) {
                    const double wkp = w[k][p], wkq = w[k][q];
                    w[k][p] = c * wkp - s * wkq;
                    w[k][q] = s * wkp + c * wkq;
                }
                for (int k = 0; k < N; ++k) {
                    const double wpk = w[p][k], wqk = w[q][k];
                    w[p][k] = c * wpk - s * wqk;
                    w[q][k] = s * wpk + c * wqk;
                }
            }
        }
    }
    for (int i = 0; i < N; ++i) evals[i] = w[i][i];
}

}  // namespace

EigenRange symmetric_eigen_range(const Mat6& a) {
    double w[6][6];
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) w[i][j] = 0.5 * (a.m[i][j] + a.m[j][i]);
    double ev[6];
    jacobi_eigenvalues<6>(w, ev);
    EigenRange r{ev[0], ev[0]};
    for (int i = 1; i < 6; ++i) {
        r.min = std::min(r.min, ev[i]);
        r.max = std::max(r.max, ev[i]);
    }
    return r;
}

EigenRange symmetric_eigen_range3(const Mat3& a) {
    double w[3][3];
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) w[i][j] = 0.5 * (a.m[i][j] + a.m[j][i]);
    double ev[3];
    jacobi_eigenvalues<3>(w, ev);
    EigenRange r{ev[0], ev[0]};
    for (int i = 1; i < 3; ++i) {
        r.min = std::min(r.min, ev[i]);
        r.max = std::max(r.max, ev[i]);
    }
    return r;
}

double spectral_norm(const Mat6& a) {
    Mat6 ata;
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) {
            double s = 0.0;
            for (int k = 0; k < 6; ++k) s += a.m[k][i] * a.m[k][j];
            ata.m[i][j] = s;
        }
    const EigenRange r = symmetric_eigen_range(ata);
    return std::sqrt(std::max(0.0, r.max));
}

}  // namespace qmx
