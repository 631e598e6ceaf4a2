#include "qmx/picard.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "qmx/norms.hpp"
#include "qmx/stencil.hpp"

namespace qmx {

void PicardConfig::validate() const {
    if (!(slab_width > 0.0)) throw std::invalid_argument("picard: slab_width must be positive");
    if (max_iterations < 1) throw std::invalid_argument("picard: max_iterations must be >= 1");
    if (!(fp_tolerance > 0.0)) throw std::invalid_argument("picard: fp_tolerance must be positive");
    if (!(lipschitz_threshold > 0.0)) throw std::invalid_argument("picard: lipschitz_threshold must be positive");
    if (max_tau_halvings < 0) throw std::invalid_argument("picard: max_tau_halvings must be >= 0");
}

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::converged: return "converged";
        case SolveStatus::blowup_lipschitz: return "blowup_lipschitz";
        case SolveStatus::left_state_domain: return "left_state_domain";
        case SolveStatus::horizon_reached: return "horizon_reached";
        case SolveStatus::picard_stalled: return "picard_stalled";
        case SolveStatus::nonfinite: return "nonfinite";
    }
    return "?";
}

int exit_code(SolveStatus s) {
    switch (s) {
        case SolveStatus::converged:
        case SolveStatus::horizon_reached: return 0;
        case SolveStatus::blowup_lipschitz: return 2;
        case SolveStatus::left_state_domain: return 3;
        case SolveStatus::picard_stalled: return 4;
        case SolveStatus::nonfinite: return 5;
    }
    return 1;
}

std::optional<BlowupSignal> blowup_monitor(const FieldState& state, const MaterialLaw& law,
                                           const PicardConfig& cfg) {
    const double lip = lipschitz_norm(state);
    if (lip > cfg.lipschitz_threshold)
        return BlowupSignal{BlowupSignal::Kind::lipschitz, lip};
    if (cfg.kappa_guard >= 0.0 && law.state_domain().kind != StateDomain::Kind::all) {
        const double d = distance_to_state_boundary(law, state);
        if (d < cfg.kappa_guard) return BlowupSignal{BlowupSignal::Kind::state_domain, d};
    }
    return std::nullopt;
}

namespace {

std::vector<double> slab_times(double t0, double tau, double dt_max, int m) {
    // at least m+1 levels so the G_{m-1} metric can resolve its time derivatives
    const int steps = std::max(m, static_cast<int>(std::ceil(tau / dt_max - 1e-12)));
    std::vector<double> times(static_cast<std::size_t>(steps) + 1);
    for (int i = 0; i <= steps; ++i) times[static_cast<std::size_t>(i)] = t0 + tau * i / steps;
    return times;
}

// Adds eps * (t - t0)^m * shape to every sample (and the matching derivative),
// leaving the jet through order m-1 untouched.
void add_seed_perturbation(Trajectory& traj, const FieldState& shape, int m, double eps) {
    const double t0 = traj.t_begin();
    for (auto& s : traj.samples()) {
        const double tau = s.t - t0;
        s.state.axpy(eps * std::pow(tau, m), shape);
        if (m >= 1) s.time_derivative.axpy(eps * m * std::pow(tau, m - 1), shape);
    }
}

double relative_distance(const Trajectory& a, const Trajectory& b, int m, double gamma,
                         double* abs_out) {
    const double d = gm_distance(a, b, m, gamma);
    if (abs_out) *abs_out = d;
    const double scale = std::max(gm_norm(a, m, gamma), 1e-30);
    return d / scale;
}

}  // namespace

SlabResult picard_slab(const MaterialLaw& law, const DataBundle& bundle, int m,
                       const PicardConfig& cfg, const StepperConfig& scfg,
                       const FieldState* seed_shape, bool relaxed_compat,
                       const ChargeTracking* charge) {
    cfg.validate();
    const GridSpec& grid = bundle.u0.grid();

    SlabResult result;
    result.report.t_start = bundle.t0;
    result.report.tau = cfg.slab_width;

    // compatibility gate
    double tol = cfg.compat_tolerance;
    if (relaxed_compat) {
        const double h = std::min({grid.spacing[0], grid.spacing[1], grid.spacing[2]});
        tol = std::max(tol, cfg.compat_relax_C * h * h);
    }
    const CompatibilityReport compat = check_compatibility(law, bundle, m, tol);
    result.report.compat_max_residual = compat.worst();
    if (!compat.pass) {
        if (!relaxed_compat)
            throw std::invalid_argument("picard_slab: data violate the compatibility conditions:\n" +
                                        compat.table());
        result.report.compat_warning = true;
    }

    // kappa guard: the slab must start well inside the state domain
    if (law.state_domain().kind != StateDomain::Kind::all) {
        const double d0 = distance_to_state_boundary(law, bundle.u0);
        const double guard = cfg.kappa_guard >= 0.0 ? cfg.kappa_guard : 0.5 * d0;
        if (d0 < guard || d0 <= 0.0) {
            result.status = SolveStatus::left_state_domain;
            return result;
        }
    }

    const InitialJet jet = compute_jet(law, bundle, m);
    const double dt_max = scfg.max_dt(grid, law.eta());
    const auto times = slab_times(bundle.t0, cfg.slab_width, dt_max, m);
    const int n_steps = static_cast<int>(times.size()) - 1;

    auto uhat = std::make_shared<Trajectory>(
        jet_realizing_extension(jet, cfg.slab_width).sample(times));
    if (seed_shape) add_seed_perturbation(*uhat, *seed_shape, m, 1.0);

    LinearProblem problem;
    problem.data = bundle;
    problem.grid = grid;
    problem.horizon = cfg.slab_width;

    double prev_abs_distance = -1.0;
    double ratio_max = 0.0;
    bool ratio_valid = false;

    std::shared_ptr<MaterialLaw> law_alias(const_cast<MaterialLaw*>(&law), [](MaterialLaw*) {});

    for (int it = 1; it <= cfg.max_iterations; ++it) {
        problem.coeffs = FrozenCoefficients::from_law(law_alias, uhat);
        SolveOptions iter_opts;
        iter_opts.min_steps = n_steps;
        LinearSolveResult lin = solve_linear(problem, scfg, iter_opts);
        if (lin.nonfinite) {
            result.status = SolveStatus::nonfinite;
            result.report.iterations = it;
            return result;
        }

        double abs_d = 0.0;
        const double rel = relative_distance(lin.trajectory, *uhat, m - 1, cfg.gamma, &abs_d);
        result.report.iterations = it;
        result.report.final_distance = rel;

        if (prev_abs_distance > 1e3 * cfg.fp_tolerance * std::max(1.0, abs_d) &&
            prev_abs_distance > 0.0) {
            const double r = abs_d / prev_abs_distance;
            ratio_max = std::max(ratio_max, r);
            ratio_valid = true;
        }
        prev_abs_distance = abs_d;

        uhat = std::make_shared<Trajectory>(std::move(lin.trajectory));

        if (rel <= cfg.fp_tolerance) {
            if (charge) {
                // one more application with the converged coefficients, with
                // the charge quadrature switched on
                problem.coeffs = FrozenCoefficients::from_law(law_alias, uhat);
                SolveOptions opts;
                opts.charge = *charge;
                opts.min_steps = n_steps;
                LinearSolveResult fin = solve_linear(problem, scfg, opts);
                if (fin.nonfinite) {
                    result.status = SolveStatus::nonfinite;
                    return result;
                }
                uhat = std::make_shared<Trajectory>(std::move(fin.trajectory));
            }
            result.trajectory = *uhat;
            result.status = SolveStatus::converged;
            result.report.contraction_ratio = ratio_valid ? ratio_max : 0.0;
            result.report.contraction_warning = ratio_valid && ratio_max > cfg.contraction_warn;
            if (cfg.radius_R) {
                const double norm_m = gm_norm(result.trajectory, m, cfg.gamma);
                result.report.radius_warning = norm_m > *cfg.radius_R;
            }
            // monitors over the accepted slab: truncate at the first crossing
            auto& samples = result.trajectory.samples();
            for (std::size_t s = 0; s < samples.size(); ++s) {
                if (auto sig = blowup_monitor(samples[s].state, law, cfg)) {
                    result.status = sig->kind == BlowupSignal::Kind::lipschitz
                                        ? SolveStatus::blowup_lipschitz
                                        : SolveStatus::left_state_domain;
                    samples.erase(samples.begin() + static_cast<std::ptrdiff_t>(s) + 1, samples.end());
                    return result;
                }
            }
            return result;
        }
    }

    result.status = SolveStatus::picard_stalled;
    return result;
}

SolveOutcome continue_maximal(const MaterialLaw& law, const DataBundle& bundle, int m,
                              const PicardConfig& cfg, const StepperConfig& scfg, double horizon,
                              bool track_charge) {
    cfg.validate();
    if (!(horizon > 0.0)) throw std::invalid_argument("continue_maximal: horizon must be positive");

    SolveOutcome outcome;
    outcome.trajectory = Trajectory(bundle.u0.grid());

    std::shared_ptr<MaterialLaw> law_alias(const_cast<MaterialLaw*>(&law), [](MaterialLaw*) {});
    ChargeTracking charge;
    if (track_charge) charge.law = law_alias;

    PicardConfig slab_cfg = cfg;
    if (slab_cfg.kappa_guard < 0.0 && law.state_domain().kind != StateDomain::Kind::all)
        slab_cfg.kappa_guard = 0.5 * distance_to_state_boundary(law, bundle.u0);

    DataBundle current = bundle;
    double t = bundle.t0;
    const double t_end = bundle.t0 + horizon;
    bool first_slab = true;

    if (track_charge) {
        if (bundle.rho0) {
            charge.rho0 = *bundle.rho0;
        } else {
            // derived: rho0 = div D(u0)
            const GridSpec& grid = bundle.u0.grid();
            VectorField d;
            for (auto& c : d.comp) c.assign(grid.node_count(), 0.0);
            for (int kk = 0; kk < grid.nz(); ++kk)
                for (int jj = 0; jj < grid.ny(); ++jj)
                    for (int ii = 0; ii < grid.nx(); ++ii) {
                        const std::size_t node = grid.node_index(ii, jj, kk);
                        const Vec6 th = law.theta(grid.position(ii, jj, kk), bundle.u0.at(node));
                        for (int c = 0; c < 3; ++c) d.comp[static_cast<std::size_t>(c)][node] = th[c];
                    }
            charge.rho0 = discrete_div(grid, d);
        }
    }

    auto push_diagnostics = [&](const Trajectory& slab, std::size_t from) {
        for (std::size_t s = from; s < slab.size(); ++s) {
            const auto& sample = slab.samples()[s];
            outcome.diagnostics.t.push_back(sample.t);
            outcome.diagnostics.lipschitz.push_back(lipschitz_norm(sample.state));
            outcome.diagnostics.sobolev_m.push_back(sobolev_norm(sample.state, m));
            outcome.diagnostics.domain_distance.push_back(
                distance_to_state_boundary(law, sample.state));
        }
    };

    while (t < t_end - 1e-12 * std::max(1.0, std::abs(t_end))) {
        slab_cfg.slab_width = std::min(cfg.slab_width, t_end - t);
        current.t0 = t;

        SlabResult slab;
        int halvings = 0;
        for (;;) {
            slab = picard_slab(law, current, m, slab_cfg, scfg, nullptr, !first_slab,
                               track_charge ? &charge : nullptr);
            if (slab.status != SolveStatus::picard_stalled) break;
            if (halvings >= cfg.max_tau_halvings) break;
            ++halvings;
            slab_cfg.slab_width *= 0.5;
        }
        slab.report.tau_halvings = halvings;
        outcome.per_slab.push_back(slab.report);

        if (slab.status == SolveStatus::picard_stalled) {
            outcome.status = SolveStatus::picard_stalled;
            outcome.termination_time = t;
            outcome.message = "no contraction within max_iterations after tau halvings";
            return outcome;
        }
        if (slab.status == SolveStatus::nonfinite) {
            outcome.status = SolveStatus::nonfinite;
            outcome.termination_time = t;
            return outcome;
        }
        if (slab.trajectory.empty()) {
            outcome.status = slab.status;
            outcome.termination_time = t;
            return outcome;
        }

        const std::size_t skip = first_slab ? 0 : 1;
        push_diagnostics(slab.trajectory, skip);
        for (std::size_t s = skip; s < slab.trajectory.size(); ++s)
            outcome.trajectory.append(slab.trajectory.samples()[s]);

        if (slab.status == SolveStatus::blowup_lipschitz ||
            slab.status == SolveStatus::left_state_domain) {
            outcome.status = slab.status;
            outcome.termination_time = outcome.trajectory.t_end();
            std::ostringstream os;
            os << "monitor fired at t = " << outcome.termination_time;
            outcome.message = os.str();
            return outcome;
        }

        t = slab.trajectory.t_end();
        current.u0 = slab.trajectory.back().state;
        if (track_charge && slab.trajectory.back().rho) charge.rho0 = *slab.trajectory.back().rho;
        first_slab = false;
        // accepted slabs are immutable; retries only shrink future slabs
        slab_cfg.slab_width = std::min(cfg.slab_width, t_end - t);
    }

    outcome.status = SolveStatus::horizon_reached;
    outcome.termination_time = t_end;
    return outcome;
}

ContractionEstimate contraction_estimate(const MaterialLaw& law, const DataBundle& bundle, int m,
                                         const PicardConfig& cfg, const StepperConfig& scfg,
                                         const FieldState& probe_shape, double eps) {
    const GridSpec& grid = bundle.u0.grid();
    const InitialJet jet = compute_jet(law, bundle, m);
    const double dt_max = scfg.max_dt(grid, law.eta());
    const auto times = slab_times(bundle.t0, cfg.slab_width, dt_max, m);

    const int n_steps = static_cast<int>(times.size()) - 1;
    auto u1 = std::make_shared<Trajectory>(jet_realizing_extension(jet, cfg.slab_width).sample(times));
    auto u2 = std::make_shared<Trajectory>(*u1);
    add_seed_perturbation(*u2, probe_shape, m, eps);

    ContractionEstimate est;
    est.probe_distance = gm_distance(*u1, *u2, m - 1, cfg.gamma);
    if (est.probe_distance <= 0.0) {
        est.degenerate = true;
        return est;
    }

    std::shared_ptr<MaterialLaw> law_alias(const_cast<MaterialLaw*>(&law), [](MaterialLaw*) {});
    LinearProblem problem;
    problem.data = bundle;
    problem.grid = grid;
    problem.horizon = cfg.slab_width;

    SolveOptions opts;
    opts.min_steps = n_steps;
    problem.coeffs = FrozenCoefficients::from_law(law_alias, u1);
    const LinearSolveResult phi1 = solve_linear(problem, scfg, opts);
    problem.coeffs = FrozenCoefficients::from_law(law_alias, u2);
    const LinearSolveResult phi2 = solve_linear(problem, scfg, opts);
    if (phi1.nonfinite || phi2.nonfinite) {
        est.degenerate = true;
        return est;
    }

    const double d = gm_distance(phi1.trajectory, phi2.trajectory, m - 1, cfg.gamma);
    est.ratio = d / est.probe_distance;
    return est;
}

double nonlinear_residual(const MaterialLaw& law, const DataBundle& bundle, const Trajectory& traj) {
    const GridSpec& grid = traj.grid();
    double worst = 0.0;

    for (const auto& sample : traj.samples()) {
        // A(d)u = (curl H applied with the J_j signs): assemble via curls
        const VectorField curlE = discrete_curl(grid, electric_part(sample.state));
        const VectorField curlH = discrete_curl(grid, magnetic_part(sample.state));

        double acc = 0.0;
        for (int k = 0; k < grid.nz(); ++k)
            for (int j = 0; j < grid.ny(); ++j)
                for (int i = 0; i < grid.nx(); ++i) {
                    const std::size_t node = grid.node_index(i, j, k);
                    const Vec3 x = grid.position(i, j, k);
                    const Vec6 u = sample.state.at(node);
                    const Vec6 du = sample.time_derivative.at(node);
                    Vec6 r = law.chi(x, u).apply(du);
                    // + sum A_j d_j u = (-curl H, curl E)
                    r[0] -= curlH.comp[0][node];
                    r[1] -= curlH.comp[1][node];
                    r[2] -= curlH.comp[2][node];
                    r[3] += curlE.comp[0][node];
                    r[4] += curlE.comp[1][node];
                    r[5] += curlE.comp[2][node];
                    const Vec3 se = law.sigma1(x, u).apply({u[0], u[1], u[2]});
                    for (int c = 0; c < 3; ++c) r[c] += se[c];
                    if (!bundle.f.is_zero()) {
                        const Vec6 fv = bundle.f(0, sample.t, x);
                        for (int c = 0; c < 6; ++c) r[c] -= fv[c];
                    }
                    acc += grid.node_weight(i, j, k) * dot(r, r);
                }
        worst = std::max(worst, std::sqrt(acc));
    }
    return worst;
}

}  // namespace qmx
