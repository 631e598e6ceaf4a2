#include "qmx/grid.hpp"

#include <cmath>

namespace qmx {

const char* to_string(BoundaryMode m) {
    switch (m) {
        case BoundaryMode::periodic: return "periodic";
        case BoundaryMode::pec_bottom_open_top: return "pec_bottom_open_top";
        case BoundaryMode::open: return "open";
    }
    return "?";
}

void GridSpec::validate() const {
    for (int a = 0; a < 3; ++a) {
        if (cells_per_axis[a] < 1) throw std::invalid_argument("grid: cells_per_axis must be positive");
        if (!(spacing[a] > 0.0)) throw std::invalid_argument("grid: spacing must be positive");
    }
    if (boundary[0] == BoundaryMode::pec_bottom_open_top || boundary[1] == BoundaryMode::pec_bottom_open_top)
        throw std::invalid_argument("grid: pec_bottom_open_top is only legal on axis 3");
    if (static_cast<std::int64_t>(node_count()) > cell_cap)
        throw std::invalid_argument("grid: total cell count exceeds the configured cap");
    if (has_pec_face()) {
        if (pec_normal[0] != 0.0 || pec_normal[1] != 0.0 || pec_normal[2] != -1.0)
            throw std::invalid_argument("grid: only the fixed PEC normal (0,0,-1) is supported");
    }
}

bool FieldState::finite() const {
    for (double v : values_)
        if (!std::isfinite(v)) return false;
    return true;
}

std::vector<double> FieldState::scalar_component(int c) const {
    const std::size_t n = grid_.node_count();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = values_[i * 6 + static_cast<std::size_t>(c)];
    return out;
}

FieldState& FieldState::axpy(double a, const FieldState& x) {
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += a * x.values_[i];
    return *this;
}

FieldState& FieldState::scale(double a) {
    for (double& v : values_) v *= a;
    return *this;
}

void Trajectory::bracket(double t, std::size_t* lo, std::size_t* hi, double* w) const {
    if (samples_.empty()) throw std::logic_error("trajectory: empty");
    if (t <= samples_.front().t) {
        *lo = *hi = 0;
        *w = 0.0;
        return;
    }
    if (t >= samples_.back().t) {
        *lo = *hi = samples_.size() - 1;
        *w = 0.0;
        return;
    }
    std::size_t a = 0, b = samples_.size() - 1;
    while (b - a > 1) {
        const std::size_t m = (a + b) / 2;
        if (samples_[m].t <= t)
            a = m;
        else
            b = m;
    }
    *lo = a;
    *hi = b;
    const double dt = samples_[b].t - samples_[a].t;
    *w = dt > 0.0 ? (t - samples_[a].t) / dt : 0.0;
}

Vec6 Trajectory::interpolate(double t, std::size_t node) const {
    std::size_t lo, hi;
    double w;
    bracket(t, &lo, &hi, &w);
    const Vec6 a = samples_[lo].state.at(node);
    if (lo == hi) return a;
    const Vec6 b = samples_[hi].state.at(node);
    Vec6 r;
    for (int c = 0; c < 6; ++c) r[c] = (1.0 - w) * a[c] + w * b[c];
    return r;
}

}  // namespace qmx
