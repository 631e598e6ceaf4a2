#pragma once

#include <string>
#include <vector>

#include "qmx/material.hpp"
#include "qmx/picard.hpp"

namespace qmx {

/// Space-time cone of slope C0: backward {|x - x0| < R - C0 (t - t_ref)},
/// forward {|x - x0| <= R + C0 (t - t_ref)}.
struct ConeSpec {
    enum class Direction { backward, forward };
    Vec3 apex_center{};
    double radius = 0.0;
    double speed = 0.0;
    Direction direction = Direction::forward;

    void validate() const;
};

/// C0 = (1/eta) sum_j ||A_j^co|| = 3 / eta with the constant system matrices.
double propagation_speed_bound(const MaterialLaw& law);
double propagation_speed_bound(double eta_floor);

struct ConeReport {
    std::vector<double> t;
    std::vector<double> max_violation;  // max |u| over the checked node set
    std::vector<std::size_t> checked_nodes;
    double tolerance = 0.0;
    bool pass = true;
    double initial_violation = 0.0;

    double worst() const {
        double w = 0.0;
        for (double v : max_violation) w = std::max(w, v);
        return w;
    }
};

/// For a backward cone: asserts the solution vanishes on interior nodes of the
/// shrinking cone; forward: on nodes outside the growing cone. Checked node
/// sets keep a one-cell safety margin off the cone boundary. Throws when the
/// forward cone outgrows the grid before the final sample, or when the first
/// sample already violates the tolerance (data support precondition).
ConeReport cone_support_check(const Trajectory& traj, const ConeSpec& cone, double tolerance);

struct DivergenceReport {
    std::vector<double> t;
    std::vector<double> div_b_l2, div_b_max;
    std::vector<double> div_d_minus_rho_l2, div_d_minus_rho_max;
    double initial_div_b_l2 = 0.0;
    double initial_div_d_minus_rho_l2 = 0.0;

    double max_div_b_l2() const;
    double max_div_d_minus_rho_l2() const;
};

/// Residual time series || div B(u) || and || div D(u) - rho ||; rho comes
/// from the stepper's quadrature when stored in the trajectory, otherwise it is
/// frozen at the initial value (exact when div J == 0).
DivergenceReport divergence_check(const MaterialLaw& law, const Trajectory& traj,
                                  const DataBundle& bundle);

/// Initial charge density: the bundle's rho0 or, when "derived", the discrete
/// divergence of D(u0).
std::vector<double> initial_charge_density(const MaterialLaw& law, const DataBundle& bundle);

/// Least-squares growth speed of the |u| > level support radius about a center.
double measured_support_speed(const Trajectory& traj, const Vec3& center, double level);

/// Truncation discipline: the forward cone of the data support (slope =
/// speed) must not reach any inert truncation face (open faces, and the top
/// of a pec_bottom_open_top axis) before the horizon.
struct TruncationCheck {
    bool ok = true;
    double support_gap = 0.0;  // distance from the data support to the nearest inert face
    double cone_reach = 0.0;   // speed * horizon
};
TruncationCheck truncation_face_check(const FieldState& u0, double speed, double horizon,
                                      double support_level = 1e-12);

struct ContinuousDependenceReport {
    std::vector<double> deltas;
    std::vector<double> ratios;           // ||Psi(d) - Psi(0)||_{G_{m-1}} / (d ||v||_{H^m})
    std::vector<double> weighted_ratios;  // same with the gamma weight from cfg
    bool aborted = false;
    std::string message;

    /// max over consecutive pairs of ratio(d)/ratio(d/next)
    double max_pair_spread() const;
};

/// Solves with u0 and u0 + delta v for each delta; the perturbed (and base)
/// boundary data are replaced by the jet-compatible polynomial g(t) =
/// sum_p (t-t0)^p/p! B S_p so that every run satisfies the compatibility
/// conditions exactly.
ContinuousDependenceReport continuous_dependence_experiment(
    const MaterialLaw& law, const DataBundle& bundle, int m, const FieldState& direction,
    const std::vector<double>& deltas, const PicardConfig& pcfg, const StepperConfig& scfg,
    double horizon);

/// The jet-compatible polynomial boundary source of a bundle (used by the
/// continuous-dependence projection).
BoundaryAnalyticSource compatibility_projected_boundary_source(const MaterialLaw& law,
                                                               const DataBundle& bundle, int m);

}  // namespace qmx
