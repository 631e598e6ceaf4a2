#pragma once

#include <optional>
#include <string>

#include "qmx/initial_data.hpp"
#include "qmx/linear_solver.hpp"

namespace qmx {

struct PicardConfig {
    double slab_width = 0.05;  // tau
    int max_iterations = 50;
    double fp_tolerance = 1e-9;      // relative G_{m-1} distance
    double contraction_warn = 0.9;   // warn when the measured ratio exceeds this
    std::optional<double> radius_R;  // advisory bound on iterate norms
    double kappa_guard = -1.0;       // < 0: half the initial boundary distance
    double lipschitz_threshold = 1e6;
    double gamma = 0.0;  // weight of the Picard metric
    int max_tau_halvings = 6;
    double compat_tolerance = 1e-10;
    double compat_relax_C = 10.0;  // relaxed tolerance C*h^2 at slab restarts

    void validate() const;
};

enum class SolveStatus {
    converged,
    blowup_lipschitz,
    left_state_domain,
    horizon_reached,
    picard_stalled,
    nonfinite,
};
const char* to_string(SolveStatus s);
int exit_code(SolveStatus s);

struct SlabReport {
    double t_start = 0.0;
    double tau = 0.0;
    int iterations = 0;
    double final_distance = 0.0;      // relative G_{m-1} distance at acceptance
    double contraction_ratio = 0.0;   // max valid per-iterate ratio
    double compat_max_residual = 0.0;
    int tau_halvings = 0;
    bool contraction_warning = false;
    bool radius_warning = false;
    bool compat_warning = false;
};

struct DiagnosticsSeries {
    std::vector<double> t;
    std::vector<double> lipschitz;
    std::vector<double> sobolev_m;
    std::vector<double> domain_distance;
};

struct SolveOutcome {
    Trajectory trajectory;
    SolveStatus status = SolveStatus::horizon_reached;
    std::vector<SlabReport> per_slab;
    DiagnosticsSeries diagnostics;
    double termination_time = 0.0;  // crossing time for blow-up style statuses
    std::string message;
};

struct BlowupSignal {
    enum class Kind { lipschitz, state_domain } kind;
    double value = 0.0;
};

/// Fires on lipschitz_norm > threshold or boundary distance < kappa_guard.
std::optional<BlowupSignal> blowup_monitor(const FieldState& state, const MaterialLaw& law,
                                           const PicardConfig& cfg);

struct SlabResult {
    Trajectory trajectory;
    SlabReport report;
    SolveStatus status = SolveStatus::converged;
};

/// One Picard slab: freeze u-hat, solve the linear problem with chi(u-hat),
/// sigma(u-hat), iterate from the jet-realizing extension until the relative
/// G_{m-1} distance of successive iterates drops below fp_tolerance.
/// `seed_shape` (optional) adds (t - t0)^m * shape to the seed - a different
/// start with the same jet (uniqueness probes).
/// `relaxed_compat`: use the grid-aware C*h^2 tolerance (slab restarts).
/// `charge` (optional): after convergence the accepted slab is re-solved once
/// with the converged coefficients and the stepper's charge quadrature on, so
/// the stored samples carry rho.
SlabResult picard_slab(const MaterialLaw& law, const DataBundle& bundle, int m,
                       const PicardConfig& cfg, const StepperConfig& scfg,
                       const FieldState* seed_shape = nullptr, bool relaxed_compat = false,
                       const ChargeTracking* charge = nullptr);

/// Chains slabs up to the horizon, recomputing the jet and compatibility at
/// each slab start from the running solution; stalls halve tau (bounded).
/// `track_charge` threads the charge quadrature through every slab.
SolveOutcome continue_maximal(const MaterialLaw& law, const DataBundle& bundle, int m,
                              const PicardConfig& cfg, const StepperConfig& scfg, double horizon,
                              bool track_charge = false);

struct ContractionEstimate {
    double ratio = 0.0;
    bool degenerate = false;
    double probe_distance = 0.0;
};

/// Applies the frozen-coefficient solution map to two probes sharing the jet
/// (the second is the first plus eps * (t-t0)^m * shape) and reports
/// d(Phi u1, Phi u2) / d(u1, u2) in the G_{m-1, gamma} metric.
ContractionEstimate contraction_estimate(const MaterialLaw& law, const DataBundle& bundle, int m,
                                         const PicardConfig& cfg, const StepperConfig& scfg,
                                         const FieldState& probe_shape, double eps);

/// Max over stored samples of the L2 norm of the nonlinear PDE residual
/// chi(u) d_t u + sum A_j d_j u + sigma(u) u - f, with d_t u taken from the
/// stored stage derivatives.
double nonlinear_residual(const MaterialLaw& law, const DataBundle& bundle, const Trajectory& traj);

}  // namespace qmx
