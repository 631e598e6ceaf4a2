#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace qmx {

using Vec3 = std::array<double, 3>;
using Vec6 = std::array<double, 6>;

inline double dot(const Vec3& a, const Vec3& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

inline double dot(const Vec6& a, const Vec6& b) {
    double s = 0.0;
    for (int i = 0; i < 6; ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline double norm2(const Vec6& a) { return std::sqrt(dot(a, a)); }

struct Mat3 {
    double m[3][3]{};

    static Mat3 identity() {
        Mat3 r;
        for (int i = 0; i < 3; ++i) r.m[i][i] = 1.0;
        return r;
    }
    static Mat3 scaled_identity(double c) {
        Mat3 r;
        for (int i = 0; i < 3; ++i) r.m[i][i] = c;
        return r;
    }

    Vec3 apply(const Vec3& v) const {
        Vec3 r{};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r[i] += m[i][j] * v[j];
        return r;
    }
};

struct Mat6 {
    double m[6][6]{};

    static Mat6 identity() {
        Mat6 r;
        for (int i = 0; i < 6; ++i) r.m[i][i] = 1.0;
        return r;
    }

    /// blkdiag(a, b) with 3x3 blocks.
    static Mat6 block_diag(const Mat3& a, const Mat3& b) {
        Mat6 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                r.m[i][j] = a.m[i][j];
                r.m[i + 3][j + 3] = b.m[i][j];
            }
        return r;
    }

    Vec6 apply(const Vec6& v) const {
        Vec6 r{};
        for (int i = 0; i < 6; ++i) {
            double s = 0.0;
            for (int j = 0; j < 6; ++j) s += m[i][j] * v[j];
            r[i] = s;
        }
        return r;
    }

    Mat6 operator+(const Mat6& o) const {
        Mat6 r;
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) r.m[i][j] = m[i][j] + o.m[i][j];
        return r;
    }
    Mat6 operator-(const Mat6& o) const {
        Mat6 r;
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) r.m[i][j] = m[i][j] - o.m[i][j];
        return r;
    }
    Mat6 operator*(double c) const {
        Mat6 r;
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) r.m[i][j] = m[i][j] * c;
        return r;
    }
    Mat6 matmul(const Mat6& o) const {
        Mat6 r;
        for (int i = 0; i < 6; ++i)
            for (int k = 0; k < 6; ++k) {
                const double a = m[i][k];
                if (a == 0.0) continue;
                for (int j = 0; j < 6; ++j) r.m[i][j] += a * o.m[k][j];
            }
        return r;
    }
    Mat6 transposed() const {
        Mat6 r;
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) r.m[i][j] = m[j][i];
        return r;
    }

    double max_abs() const {
        double v = 0.0;
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) v = std::max(v, std::abs(m[i][j]));
        return v;
    }
    double asymmetry() const {
        double v = 0.0;
        for (int i = 0; i < 6; ++i)
            for (int j = i + 1; j < 6; ++j) v = std::max(v, std::abs(m[i][j] - m[j][i]));
        return v;
    }
};

/// LDL^T factorization of a symmetric positive definite 6x6 matrix.
/// Throws nothing; returns false if a pivot degenerates.
struct Ldlt6 {
    double l[6][6]{};  // unit lower triangle
    double d[6]{};
    bool ok = false;

    static Ldlt6 factor(const Mat6& a) {
        Ldlt6 f;
        double w[6][6];
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) w[i][j] = 0.5 * (a.m[i][j] + a.m[j][i]);
        for (int j = 0; j < 6; ++j) {
            double dj = w[j][j];
            for (int k = 0; k < j; ++k) dj -= f.l[j][k] * f.l[j][k] * f.d[k];
            if (!(dj > 0.0) || !std::isfinite(dj)) return f;
            f.d[j] = dj;
            f.l[j][j] = 1.0;
            for (int i = j + 1; i < 6; ++i) {
                double s = w[i][j];
                for (int k = 0; k < j; ++k) s -= f.l[i][k] * f.l[j][k] * f.d[k];
                f.l[i][j] = s / dj;
            }
        }
        f.ok = true;
        return f;
    }

    Vec6 solve(const Vec6& b) const {
        Vec6 y = b;
        for (int i = 0; i < 6; ++i)
            for (int k = 0; k < i; ++k) y[i] -= l[i][k] * y[k];
        for (int i = 0; i < 6; ++i) y[i] /= d[i];
        for (int i = 5; i >= 0; --i)
            for (int k = i + 1; k < 6; ++k) y[i] -= l[k][i] * y[k];
        return y;
    }
};

/// Full inverse of a symmetric positive definite 6x6 via LDL^T column solves.
/// Returns identity-sized garbage with ok=false signaling through `ok` out-param
/// when the matrix is numerically singular.
Mat6 spd_inverse(const Mat6& a, bool* ok = nullptr);

/// Eigenvalue range of a symmetric 6x6 matrix (cyclic Jacobi).
struct EigenRange {
    double min = 0.0;
    double max = 0.0;
};
EigenRange symmetric_eigen_range(const Mat6& a);
EigenRange symmetric_eigen_range3(const Mat3& a);

/// Spectral norm of a (possibly nonsymmetric) 6x6 matrix, sqrt(lambda_max(A^T A)).
double spectral_norm(const Mat6& a);

}  // namespace qmx
