#include "qmx/norms.hpp"

#include <cmath>
#include <stdexcept>

#include "qmx/stencil.hpp"

namespace qmx {

namespace {

std::vector<double> node_weights(const GridSpec& grid) {
    std::vector<double> w(grid.node_count());
    for (int k = 0; k < grid.nz(); ++k)
        for (int j = 0; j < grid.ny(); ++j)
            for (int i = 0; i < grid.nx(); ++i) w[grid.node_index(i, j, k)] = grid.node_weight(i, j, k);
    return w;
}

// Sum of squared weighted L2 norms of d^beta f for all spatial |beta| = order.
void accumulate_derivative_level(const std::vector<std::vector<double>>& level,
                                 const std::vector<double>& w, double* acc) {
    for (const auto& f : level) {
        double s = 0.0;
        for (std::size_t n = 0; n < f.size(); ++n) s += w[n] * f[n] * f[n];
        *acc += s;
    }
}

// All derivatives of the next order from the current level; derivatives are
// generated in the canonical nondecreasing-axis order so each multi-index
// appears exactly once.
struct DerivEntry {
    std::array<int, 3> beta;
    std::vector<double> values;
};

std::vector<DerivEntry> next_level(const GridSpec& grid, const std::vector<DerivEntry>& level) {
    std::vector<DerivEntry> out;
    for (const auto& e : level) {
        int first_axis = 1;
        // only differentiate along axes >= the last one used, to enumerate
        // each multi-index once
        for (int a = 3; a >= 1; --a)
            if (e.beta[static_cast<std::size_t>(a - 1)] > 0) {
                first_axis = a;
                break;
            }
        for (int a = first_axis; a <= 3; ++a) {
            DerivEntry d;
            d.beta = e.beta;
            d.beta[static_cast<std::size_t>(a - 1)] += 1;
            d.values = discrete_partial(grid, e.values, a);
            out.push_back(std::move(d));
        }
    }
    return out;
}

}  // namespace

double l2_norm(const GridSpec& grid, std::span<const double> f) {
    if (f.size() != grid.node_count()) throw std::invalid_argument("l2_norm: size mismatch");
    double s = 0.0;
    for (int k = 0; k < grid.nz(); ++k)
        for (int j = 0; j < grid.ny(); ++j)
            for (int i = 0; i < grid.nx(); ++i) {
                const double v = f[grid.node_index(i, j, k)];
                s += grid.node_weight(i, j, k) * v * v;
            }
    return std::sqrt(s);
}

double max_norm(std::span<const double> f) {
    double m = 0.0;
    for (double v : f) m = std::max(m, std::abs(v));
    return m;
}

double sobolev_norm_scalar(const GridSpec& grid, std::span<const double> f, int k) {
    if (k < 0 || k > 3) throw std::invalid_argument("sobolev_norm: only orders 0..3 supported");
    const auto w = node_weights(grid);
    double acc = 0.0;
    std::vector<DerivEntry> level{{std::array<int, 3>{0, 0, 0}, std::vector<double>(f.begin(), f.end())}};
    {
        std::vector<std::vector<double>> vals{level[0].values};
        accumulate_derivative_level(vals, w, &acc);
    }
    for (int order = 1; order <= k; ++order) {
        level = next_level(grid, level);
        std::vector<std::vector<double>> vals;
        vals.reserve(level.size());
        for (auto& e : level) vals.push_back(e.values);
        accumulate_derivative_level(vals, w, &acc);
    }
    return std::sqrt(acc);
}

double sobolev_norm(const FieldState& state, int k) {
    double acc = 0.0;
    for (int c = 0; c < 6; ++c) {
        const double v = sobolev_norm_scalar(state.grid(), state.scalar_component(c), k);
        acc += v * v;
    }
    return std::sqrt(acc);
}

double lipschitz_norm(const FieldState& state) {
    double m = max_norm(state.values());
    for (int c = 0; c < 6; ++c) {
        const auto f = state.scalar_component(c);
        for (int a = 1; a <= 3; ++a) m = std::max(m, max_norm(discrete_partial(state.grid(), f, a)));
    }
    return m;
}

FieldState trajectory_time_derivative(const Trajectory& traj, std::size_t s, int j) {
    const auto& samples = traj.samples();
    if (j == 0) return samples[s].state;
    if (j == 1) return samples[s].time_derivative;
    if (samples.size() < 3) throw std::invalid_argument("gm_norm: insufficient time resolution");

    // centered (one-sided at ends) differences of the stored first derivative
    const std::size_t n = samples.size();
    const std::size_t sm = (s == 0) ? 0 : s - 1;
    const std::size_t sp = (s + 1 == n) ? n - 1 : s + 1;
    const double dt = samples[sp].t - samples[sm].t;
    if (!(dt > 0.0)) throw std::invalid_argument("gm_norm: degenerate timebase");

    if (j == 2) {
        FieldState d = samples[sp].time_derivative;
        d.axpy(-1.0, samples[sm].time_derivative);
        d.scale(1.0 / dt);
        d.set_time(samples[s].t);
        return d;
    }
    if (j == 3) {
        // second difference of the stored derivative about s
        const std::size_t c = std::min(std::max<std::size_t>(s, 1), n - 2);
        const double h = 0.5 * (samples[c + 1].t - samples[c - 1].t);
        FieldState d = samples[c + 1].time_derivative;
        d.axpy(-2.0, samples[c].time_derivative);
        d.axpy(1.0, samples[c - 1].time_derivative);
        d.scale(1.0 / (h * h));
        d.set_time(samples[s].t);
        return d;
    }
    throw std::invalid_argument("gm_norm: time-derivative order not supported");
}

double gm_norm(const Trajectory& traj, int m, double gamma) {
    if (traj.size() < static_cast<std::size_t>(m) + 1)
        throw std::invalid_argument("gm_norm: trajectory has too few time levels");
    double best = 0.0;
    for (int j = 0; j <= m; ++j) {
        for (std::size_t s = 0; s < traj.size(); ++s) {
            const FieldState d = trajectory_time_derivative(traj, s, j);
            const double v = std::exp(-gamma * traj.samples()[s].t) * sobolev_norm(d, m - j);
            best = std::max(best, v);
        }
    }
    return best;
}

double gm_distance(const Trajectory& a, const Trajectory& b, int m, double gamma) {
    if (a.size() != b.size()) throw std::invalid_argument("gm_distance: timebase mismatch");
    Trajectory diff(a.grid());
    for (std::size_t s = 0; s < a.size(); ++s) {
        TrajectorySample d;
        d.t = a.samples()[s].t;
        d.state = a.samples()[s].state;
        d.state.axpy(-1.0, b.samples()[s].state);
        d.time_derivative = a.samples()[s].time_derivative;
        d.time_derivative.axpy(-1.0, b.samples()[s].time_derivative);
        diff.append(std::move(d));
    }
    return gm_norm(diff, m, gamma);
}

NormReport norm_report(const Trajectory& traj, int max_order, std::span<const double> gammas) {
    NormReport r;
    const FieldState& last = traj.back().state;
    for (int k = 0; k <= max_order; ++k) r.sobolev_orders[k] = sobolev_norm(last, k);
    r.lipschitz = lipschitz_norm(last);
    for (int m = 0; m <= max_order; ++m)
        for (double g : gammas) r.gm[{m, g}] = gm_norm(traj, m, g);
    return r;
}

}  // namespace qmx
