#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "qmx/linalg.hpp"

namespace qmx {

enum class BoundaryMode : std::uint8_t {
    periodic,
    pec_bottom_open_top,  // axis 3 only: conducting face at the low end, inert truncation at the top
    open,                 // one-sided closures on both faces, no boundary condition
};

const char* to_string(BoundaryMode m);

/// Structured collocated grid. cells_per_axis counts sample nodes per axis; on
/// periodic axes node i sits at origin + i*h with period n*h, on non-periodic
/// axes the nodes span [origin, origin + (n-1)*h].
struct GridSpec {
    std::array<int, 3> cells_per_axis{1, 1, 1};
    Vec3 spacing{1.0, 1.0, 1.0};
    Vec3 origin{0.0, 0.0, 0.0};
    std::array<BoundaryMode, 3> boundary{BoundaryMode::periodic, BoundaryMode::periodic,
                                         BoundaryMode::periodic};
    Vec3 pec_normal{0.0, 0.0, -1.0};
    std::int64_t cell_cap = std::int64_t{1} << 24;

    void validate() const;

    int nx() const { return cells_per_axis[0]; }
    int ny() const { return cells_per_axis[1]; }
    int nz() const { return cells_per_axis[2]; }
    std::size_t node_count() const {
        return static_cast<std::size_t>(nx()) * static_cast<std::size_t>(ny()) *
               static_cast<std::size_t>(nz());
    }
    std::size_t node_index(int i, int j, int k) const {
        return static_cast<std::size_t>(i) +
               static_cast<std::size_t>(nx()) *
                   (static_cast<std::size_t>(j) + static_cast<std::size_t>(ny()) * static_cast<std::size_t>(k));
    }
    Vec3 position(int i, int j, int k) const {
        return {origin[0] + spacing[0] * i, origin[1] + spacing[1] * j, origin[2] + spacing[2] * k};
    }
    bool periodic(int axis) const { return boundary[static_cast<std::size_t>(axis)] == BoundaryMode::periodic; }
    bool has_pec_face() const { return boundary[2] == BoundaryMode::pec_bottom_open_top; }

    /// Quadrature weight of a node (trapezoid closure on non-periodic axes).
    double node_weight(int i, int j, int k) const {
        double w = spacing[0] * spacing[1] * spacing[2];
        const int idx[3] = {i, j, k};
        for (int a = 0; a < 3; ++a) {
            if (!periodic(a) && (idx[a] == 0 || idx[a] == cells_per_axis[a] - 1)) w *= 0.5;
        }
        return w;
    }

    bool operator==(const GridSpec&) const = default;
};

/// Six-component electromagnetic state u = (E, H) sampled on a grid at one time.
/// Storage is node-major: values()[node*6 + component].
class FieldState {
public:
    FieldState() = default;
    FieldState(const GridSpec& grid, double time)
        : grid_(grid), time_(time), values_(grid.node_count() * 6, 0.0) {}

    const GridSpec& grid() const { return grid_; }
    double time() const { return time_; }
    void set_time(double t) { time_ = t; }

    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }

    Vec6 at(std::size_t node) const {
        Vec6 v;
        const double* p = values_.data() + node * 6;
        for (int c = 0; c < 6; ++c) v[c] = p[c];
        return v;
    }
    void set(std::size_t node, const Vec6& v) {
        double* p = values_.data() + node * 6;
        for (int c = 0; c < 6; ++c) p[c] = v[c];
    }
    double component(std::size_t node, int c) const { return values_[node * 6 + static_cast<std::size_t>(c)]; }

    bool finite() const;

    /// Extracts one component as a scalar grid function.
    std::vector<double> scalar_component(int c) const;

    // elementwise algebra (same grid assumed)
    FieldState& axpy(double a, const FieldState& x);
    FieldState& scale(double a);

private:
    GridSpec grid_;
    double time_ = 0.0;
    std::vector<double> values_;
};

/// Values of a 3-vector function on the PEC face (k = 0 plane), node-major.
class BoundaryTrace {
public:
    BoundaryTrace() = default;
    BoundaryTrace(const GridSpec& grid, double time)
        : grid_(grid), time_(time),
          values_(static_cast<std::size_t>(grid.nx()) * static_cast<std::size_t>(grid.ny()) * 3, 0.0) {}

    const GridSpec& grid() const { return grid_; }
    double time() const { return time_; }
    std::size_t face_index(int i, int j) const {
        return static_cast<std::size_t>(i) + static_cast<std::size_t>(grid_.nx()) * static_cast<std::size_t>(j);
    }
    Vec3 at(std::size_t f) const { return {values_[f * 3], values_[f * 3 + 1], values_[f * 3 + 2]}; }
    void set(std::size_t f, const Vec3& v) {
        values_[f * 3] = v[0];
        values_[f * 3 + 1] = v[1];
        values_[f * 3 + 2] = v[2];
    }
    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }

private:
    GridSpec grid_;
    double time_ = 0.0;
    std::vector<double> values_;
};

/// One stored time level: the state, its semi-discrete time derivative (from
/// the first Runge-Kutta stage), and optionally the integrated charge density.
struct TrajectorySample {
    double t = 0.0;
    FieldState state;
    FieldState time_derivative;
    std::optional<std::vector<double>> rho;
};

class Trajectory {
public:
    Trajectory() = default;
    explicit Trajectory(const GridSpec& grid) : grid_(grid) {}

    const GridSpec& grid() const { return grid_; }
    std::vector<TrajectorySample>& samples() { return samples_; }
    const std::vector<TrajectorySample>& samples() const { return samples_; }
    std::size_t size() const { return samples_.size(); }
    bool empty() const { return samples_.empty(); }
    const TrajectorySample& front() const { return samples_.front(); }
    const TrajectorySample& back() const { return samples_.back(); }

    double t_begin() const { return samples_.front().t; }
    double t_end() const { return samples_.back().t; }

    /// State linearly interpolated in t (exact at sample times).
    Vec6 interpolate(double t, std::size_t node) const;
    /// Bracketing sample pair and weight for time t.
    void bracket(double t, std::size_t* lo, std::size_t* hi, double* w) const;

    void append(TrajectorySample s) { samples_.push_back(std::move(s)); }

private:
    GridSpec grid_;
    std::vector<TrajectorySample> samples_;
};

}  // namespace qmx
