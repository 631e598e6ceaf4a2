#include "qmx/stencil.hpp"

#include <stdexcept>

namespace qmx {

namespace {

// line-derivative along a strided 1-D section
inline void line_partial(const double* f, double* out, int n, std::ptrdiff_t stride, double h,
                         bool periodic) {
    const double inv2h = 1.0 / (2.0 * h);
    if (periodic) {
        for (int i = 0; i < n; ++i) {
            const int ip = (i + 1 == n) ? 0 : i + 1;
            const int im = (i == 0) ? n - 1 : i - 1;
            out[i * stride] = (f[ip * stride] - f[im * stride]) * inv2h;
        }
    } else {
        out[0] = (-3.0 * f[0] + 4.0 * f[stride] - f[2 * stride]) * inv2h;
        for (int i = 1; i + 1 < n; ++i)
            out[i * stride] = (f[(i + 1) * stride] - f[(i - 1) * stride]) * inv2h;
        out[(n - 1) * stride] =
            (3.0 * f[(n - 1) * stride] - 4.0 * f[(n - 2) * stride] + f[(n - 3) * stride]) * inv2h;
    }
}

// SBP(2,1) closure: first-order one-sided boundary rows
inline void line_partial_sbp(const double* f, double* out, int n, std::ptrdiff_t stride, double h,
                             bool periodic) {
    if (periodic) {
        line_partial(f, out, n, stride, h, true);
        return;
    }
    const double inv2h = 1.0 / (2.0 * h);
    out[0] = (f[stride] - f[0]) / h;
    for (int i = 1; i + 1 < n; ++i)
        out[i * stride] = (f[(i + 1) * stride] - f[(i - 1) * stride]) * inv2h;
    out[(n - 1) * stride] = (f[(n - 1) * stride] - f[(n - 2) * stride]) / h;
}

template <typename LineOp>
void apply_partial(const GridSpec& grid, std::span<const double> field, int axis,
                   std::span<double> out, LineOp&& line) {
    if (axis < 1 || axis > 3) throw std::invalid_argument("discrete_partial: axis out of range");
    const int a = axis - 1;
    const int n = grid.cells_per_axis[a];
    if (n < 3) throw std::invalid_argument("discrete_partial: grid too small along axis");
    if (field.size() != grid.node_count() || out.size() != grid.node_count())
        throw std::invalid_argument("discrete_partial: field size mismatch");

    const int nx = grid.nx(), ny = grid.ny(), nz = grid.nz();
    const double h = grid.spacing[a];
    const bool per = grid.periodic(a);

    if (a == 0) {
        for (int k = 0; k < nz; ++k)
            for (int j = 0; j < ny; ++j) {
                const std::size_t base = grid.node_index(0, j, k);
                line(field.data() + base, out.data() + base, nx, std::ptrdiff_t{1}, h, per);
            }
    } else if (a == 1) {
        for (int k = 0; k < nz; ++k)
            for (int i = 0; i < nx; ++i) {
                const std::size_t base = grid.node_index(i, 0, k);
                line(field.data() + base, out.data() + base, ny, std::ptrdiff_t{nx}, h, per);
            }
    } else {
        const std::ptrdiff_t stride = static_cast<std::ptrdiff_t>(nx) * ny;
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                const std::size_t base = grid.node_index(i, j, 0);
                line(field.data() + base, out.data() + base, nz, stride, h, per);
            }
    }
}

}  // namespace

void discrete_partial_into(const GridSpec& grid, std::span<const double> field, int axis,
                           std::span<double> out) {
    apply_partial(grid, field, axis, out,
                  [](const double* f, double* o, int n, std::ptrdiff_t s, double h, bool p) {
                      line_partial(f, o, n, s, h, p);
                  });
}

void sbp_partial_into(const GridSpec& grid, std::span<const double> field, int axis,
                      std::span<double> out) {
    apply_partial(grid, field, axis, out,
                  [](const double* f, double* o, int n, std::ptrdiff_t s, double h, bool p) {
                      line_partial_sbp(f, o, n, s, h, p);
                  });
}

std::vector<double> discrete_partial(const GridSpec& grid, std::span<const double> field, int axis) {
    std::vector<double> out(grid.node_count());
    discrete_partial_into(grid, field, axis, out);
    return out;
}

Mat3 curl_matrix(int axis) {
    Mat3 j;
    switch (axis) {
        case 1:
            j.m[1][2] = -1.0;
            j.m[2][1] = 1.0;
            break;
        case 2:
            j.m[0][2] = 1.0;
            j.m[2][0] = -1.0;
            break;
        case 3:
            j.m[0][1] = -1.0;
            j.m[1][0] = 1.0;
            break;
        default:
            throw std::invalid_argument("curl_matrix: axis out of range");
    }
    return j;
}

Mat6 system_matrix(int axis) {
    const Mat3 j = curl_matrix(axis);
    Mat6 a;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) {
            a.m[r][c + 3] = -j.m[r][c];
            a.m[r + 3][c] = j.m[r][c];
        }
    return a;
}

VectorField discrete_curl(const GridSpec& grid, const VectorField& v) {
    VectorField out;
    for (auto& c : out.comp) c.assign(grid.node_count(), 0.0);
    for (int axis = 1; axis <= 3; ++axis) {
        const Mat3 j = curl_matrix(axis);
        for (int c = 0; c < 3; ++c) {
            const auto d = discrete_partial(grid, v.comp[static_cast<std::size_t>(c)], axis);
            for (int r = 0; r < 3; ++r) {
                const double w = j.m[r][c];
                if (w == 0.0) continue;
                auto& o = out.comp[static_cast<std::size_t>(r)];
                for (std::size_t n = 0; n < o.size(); ++n) o[n] += w * d[n];
            }
        }
    }
    return out;
}

std::vector<double> discrete_div(const GridSpec& grid, const VectorField& v) {
    std::vector<double> out(grid.node_count(), 0.0);
    for (int axis = 1; axis <= 3; ++axis) {
        const auto d = discrete_partial(grid, v.comp[static_cast<std::size_t>(axis - 1)], axis);
        for (std::size_t n = 0; n < out.size(); ++n) out[n] += d[n];
    }
    return out;
}

VectorField electric_part(const FieldState& u) {
    VectorField v;
    for (int c = 0; c < 3; ++c) v.comp[static_cast<std::size_t>(c)] = u.scalar_component(c);
    return v;
}

VectorField magnetic_part(const FieldState& u) {
    VectorField v;
    for (int c = 0; c < 3; ++c) v.comp[static_cast<std::size_t>(c)] = u.scalar_component(c + 3);
    return v;
}

}  // namespace qmx
