#pragma once

#include <functional>
#include <memory>
#include <optional>

#include "qmx/boundary.hpp"
#include "qmx/grid.hpp"
#include "qmx/initial_data.hpp"
#include "qmx/material.hpp"

namespace qmx {

/// Frozen coefficients A0 = chi(uhat), D = sigma(uhat) of one linear solve:
/// either constant matrices or a material law composed with a stored state
/// trajectory (sampled at stage times by linear interpolation).
struct FrozenCoefficients {
    std::optional<Mat6> const_A0;
    std::optional<Mat6> const_D;
    std::shared_ptr<const MaterialLaw> law;
    std::shared_ptr<const Trajectory> frozen;
    double eta_floor = 1.0;

    static FrozenCoefficients constants(const Mat6& a0, const Mat6& d, double eta);
    static FrozenCoefficients from_law(std::shared_ptr<const MaterialLaw> law,
                                       std::shared_ptr<const Trajectory> frozen);
    /// Vacuum: A0 = I, D = 0.
    static FrozenCoefficients vacuum();

    bool constant() const { return const_A0.has_value(); }
    bool identity_A0() const;
    bool zero_D() const;

    Mat6 A0(double t, std::size_t node, const Vec3& x) const;
    Mat6 D(double t, std::size_t node, const Vec3& x) const;
};

struct StepperConfig {
    double cfl = 0.5;               // (0, 1]
    double penalty_strength = 1.0;  // >= 1
    int rk_stages = 4;              // fixed
    double dissipation_coeff = 0.02;

    void validate() const;
    /// dt = cfl * min(spacing) * eta / sum_j ||A_j^co|| (each norm is 1).
    double max_dt(const GridSpec& grid, double eta_floor) const;
};

struct LinearProblem {
    FrozenCoefficients coeffs;
    DataBundle data;
    GridSpec grid;
    double horizon = 0.0;

    void validate() const;
};

/// Per-step record of the discrete a priori quantities.
struct EnergyRecord {
    std::vector<double> t;
    std::vector<double> energy;         // integral of u^T A0 u
    std::vector<double> source_norm;    // L2 of f(t)
    std::vector<double> boundary_norm;  // face L2 of g(t)
    std::vector<double> ratio;          // (E_{n+1} - E_n) / (dt E_n), 0 for the first entry
    std::vector<double> face_work;      // sum_face (Cu).(Bu - g) h1 h2 per step

    double max_growth_rate() const;
    double cumulative_face_work() const;
};

/// Optional accumulation of rho(t) = rho(t0) - int div J ds with the stepper's
/// own Runge-Kutta quadrature; J = J0 + sigma1(u) E, J0 = -f_E.
struct ChargeTracking {
    std::shared_ptr<const MaterialLaw> law;
    std::vector<double> rho0;  // initial charge density
};

struct SolveOptions {
    int store_every = 1;  // 0: first and last samples only
    bool record_energy = false;
    std::optional<ChargeTracking> charge;
    int min_steps = 1;  // lower bound on the step count (timebase alignment)
};

struct LinearSolveResult {
    Trajectory trajectory;
    EnergyRecord energy;
    bool nonfinite = false;
    double dt = 0.0;
    int steps = 0;
};

/// Semi-discrete time derivative A0^{-1} (f - sum A_j d_j u - D u - penalty -
/// dissipation) of the frozen-coefficient problem at time t.
FieldState spatial_residual(const FieldState& state, const FrozenCoefficients& coeffs, double t,
                            const TimeAnalyticSource& f, const BoundaryAnalyticSource& g,
                            const StepperConfig& cfg);

/// One classical four-stage Runge-Kutta step; *stage1 (when non-null) receives
/// the first-stage derivative, the semi-discrete d_t u at (t, state).
FieldState rk4_step(const FieldState& state, double t, double dt, const LinearProblem& problem,
                    const StepperConfig& cfg, FieldState* stage1 = nullptr);

LinearSolveResult solve_linear(const LinearProblem& problem, const StepperConfig& cfg,
                               const SolveOptions& options = {});

/// Samples the analytic interior source on the grid at time t / derivative order.
FieldState sample_source(const GridSpec& grid, const TimeAnalyticSource& f, int order, double t);

}  // namespace qmx
