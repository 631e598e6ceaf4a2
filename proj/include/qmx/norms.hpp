#pragma once

#include <map>
#include <span>
#include <utility>
#include <vector>

#include "qmx/grid.hpp"

namespace qmx {

/// Discrete L2 norm of a scalar grid function with trapezoid node weights.
double l2_norm(const GridSpec& grid, std::span<const double> f);
double max_norm(std::span<const double> f);

/// Discrete surrogate of the H^k(G) norm: root of the weighted sum of squares
/// of all discrete spatial derivatives d^beta u (|beta| <= k) over all six
/// components. k <= 3 supported.
double sobolev_norm(const FieldState& state, int k);

/// Same quantity for a single scalar component.
double sobolev_norm_scalar(const GridSpec& grid, std::span<const double> f, int k);

/// Discrete W^{1,inf}: max over nodes/components of |u| and all first partials.
double lipschitz_norm(const FieldState& state);

/// max over j <= m of sup_t e^{-gamma t} * sobolev_norm(d_t^j u(t), m-j).
/// Time derivatives use the stored stage derivative for j = 1 and centered
/// finite differences of it for j >= 2.
double gm_norm(const Trajectory& traj, int m, double gamma);

/// Same norm applied to the difference of two trajectories sharing a timebase.
double gm_distance(const Trajectory& a, const Trajectory& b, int m, double gamma);

/// d_t^j at sample index s as a FieldState (j = 0 state, j = 1 stored
/// derivative, j >= 2 centered differences of the stored derivative).
FieldState trajectory_time_derivative(const Trajectory& traj, std::size_t s, int j);

struct NormReport {
    std::map<int, double> sobolev_orders;
    double lipschitz = 0.0;
    std::map<std::pair<int, double>, double> gm;
};

NormReport norm_report(const Trajectory& traj, int max_order, std::span<const double> gammas);

}  // namespace qmx
