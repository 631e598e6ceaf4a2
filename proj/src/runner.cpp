#include "qmx/runner.hpp"

#include <chrono>
#include <cmath>
#include <iostream>
#include <map>

#include <json.hpp>

#include "qmx/io.hpp"
#include "qmx/norms.hpp"

namespace qmx {

namespace {

using nlohmann::json;

double quadratic_energy(const MaterialLaw& law, const FieldState& u) {
    const GridSpec& grid = u.grid();
    double e = 0.0;
    for (int k = 0; k < grid.nz(); ++k)
        for (int j = 0; j < grid.ny(); ++j)
            for (int i = 0; i < grid.nx(); ++i) {
                const std::size_t node = grid.node_index(i, j, k);
                const Vec6 v = u.at(node);
                const Vec6 av = law.chi_is_identity() ? v : law.chi(grid.position(i, j, k), v).apply(v);
                e += grid.node_weight(i, j, k) * dot(v, av);
            }
    return e;
}

void write_diagnostics_csv(const std::filesystem::path& path, const DiagnosticsSeries& d) {
    std::string text = "t,lipschitz,sobolev_m,domain_distance\n";
    for (std::size_t i = 0; i < d.t.size(); ++i)
        text += format_double(d.t[i]) + "," + format_double(d.lipschitz[i]) + "," +
                format_double(d.sobolev_m[i]) + "," + format_double(d.domain_distance[i]) + "\n";
    atomic_write_text(path, text);
}

void write_divergence_csv(const std::filesystem::path& path, const DivergenceReport& r) {
    std::string text = "t,div_b_l2,div_b_max,div_d_minus_rho_l2,div_d_minus_rho_max\n";
    for (std::size_t i = 0; i < r.t.size(); ++i)
        text += format_double(r.t[i]) + "," + format_double(r.div_b_l2[i]) + "," +
                format_double(r.div_b_max[i]) + "," + format_double(r.div_d_minus_rho_l2[i]) + "," +
                format_double(r.div_d_minus_rho_max[i]) + "\n";
    atomic_write_text(path, text);
}

void write_cone_csv(const std::filesystem::path& path, const ConeReport& r) {
    std::string text = "t,max_violation,checked_nodes\n";
    for (std::size_t i = 0; i < r.t.size(); ++i)
        text += format_double(r.t[i]) + "," + format_double(r.max_violation[i]) + "," +
                std::to_string(r.checked_nodes[i]) + "\n";
    atomic_write_text(path, text);
}

void write_continuity_csv(const std::filesystem::path& path, const ContinuousDependenceReport& r) {
    std::string text = "delta,ratio,weighted_ratio\n";
    for (std::size_t i = 0; i < r.ratios.size(); ++i)
        text += format_double(r.deltas[i]) + "," + format_double(r.ratios[i]) + "," +
                format_double(r.weighted_ratios[i]) + "\n";
    atomic_write_text(path, text);
}

void write_compat_csv(const std::filesystem::path& path, const CompatibilityReport& r) {
    std::string text = "order,l2_residual,max_residual,pass\n";
    for (const auto& p : r.per_order)
        text += std::to_string(p.order) + "," + format_double(p.l2_residual) + "," +
                format_double(p.max_residual) + "," + (p.max_residual <= r.tolerance ? "1" : "0") +
                "\n";
    atomic_write_text(path, text);
}

}  // namespace

RunResult run_scenario(const ScenarioConfig& cfg, bool quiet) {
    const auto t_start = std::chrono::steady_clock::now();
    const ScenarioSetup setup = build_setup(cfg);

    RunResult rr;
    rr.output_dir = cfg.directory;
    std::filesystem::create_directories(rr.output_dir);

    json summary;
    summary["scenario"] = cfg.name;
    summary["version"] = kArtifactVersion;

    std::vector<std::filesystem::path> outputs;
    auto note = [&](const std::filesystem::path& p) { outputs.push_back(p); };

    std::size_t step_count = 0;

    if (setup.mode == ScenarioSetup::Mode::manufactured) {
        LinearProblem problem;
        problem.coeffs = setup.mms_coeffs;
        problem.data = setup.bundle;
        problem.grid = setup.grid;
        problem.horizon = setup.horizon;
        SolveOptions opts;
        opts.store_every = cfg.dump_every > 0 ? cfg.dump_every : 0;
        opts.record_energy = setup.want_energy;
        const LinearSolveResult lin = solve_linear(problem, setup.stepper, opts);
        step_count = static_cast<std::size_t>(lin.steps);

        if (lin.nonfinite) {
            rr.exit_code = 5;
            rr.status = "nonfinite";
        } else {
            const FieldState exact = setup.mms_exact(lin.trajectory.t_end());
            FieldState diff = lin.trajectory.back().state;
            diff.axpy(-1.0, exact);
            const double err = sobolev_norm(diff, 0);
            summary["mms_l2_error"] = err;
            summary["dt"] = lin.dt;
            if (!quiet) std::cout << "mms l2 error = " << err << " (dt = " << lin.dt << ")\n";
            rr.status = "horizon_reached";
        }
        if (setup.want_energy) {
            write_energy_csv(rr.output_dir / "energy.csv", lin.energy);
            note(rr.output_dir / "energy.csv");
        }
        if (cfg.dump_every > 0) {
            write_field_dump(rr.output_dir / "final.qmxf", lin.trajectory.back().state);
            note(rr.output_dir / "final.qmxf");
        }
    } else {
        // truncation discipline: the conservative cone must not reach an
        // inert face before the horizon
        const TruncationCheck guard = truncation_face_check(
            setup.bundle.u0, propagation_speed_bound(*setup.law), setup.horizon);
        summary["truncation_guard_ok"] = guard.ok;
        summary["truncation_gap"] = guard.support_gap;
        if (!guard.ok && !quiet)
            std::cout << "warning: the forward cone reaches an inert truncation face before the "
                         "horizon (gap "
                      << guard.support_gap << ", reach " << guard.cone_reach << ")\n";

        // compatibility report at the initial time
        const CompatibilityReport compat =
            check_compatibility(*setup.law, setup.bundle, setup.m, setup.picard.compat_tolerance);
        if (!quiet) std::cout << compat.table();
        write_compat_csv(rr.output_dir / "compatibility.csv", compat);
        note(rr.output_dir / "compatibility.csv");

        const SolveOutcome outcome = continue_maximal(*setup.law, setup.bundle, setup.m,
                                                      setup.picard, setup.stepper, setup.horizon,
                                                      setup.want_divergence);
        step_count = outcome.trajectory.size();
        rr.status = to_string(outcome.status);
        rr.exit_code = exit_code(outcome.status);

        summary["status"] = rr.status;
        summary["termination_time"] = outcome.termination_time;
        summary["slabs"] = outcome.per_slab.size();
        {
            json slabs = json::array();
            for (const auto& s : outcome.per_slab) {
                slabs.push_back({{"t_start", s.t_start},
                                 {"tau", s.tau},
                                 {"iterations", s.iterations},
                                 {"final_distance", s.final_distance},
                                 {"contraction_ratio", s.contraction_ratio},
                                 {"compat_max_residual", s.compat_max_residual},
                                 {"tau_halvings", s.tau_halvings}});
            }
            summary["per_slab"] = slabs;
        }

        write_diagnostics_csv(rr.output_dir / "diagnostics.csv", outcome.diagnostics);
        note(rr.output_dir / "diagnostics.csv");

        // norm time series
        if (!outcome.trajectory.empty()) {
            NormSeriesWriter ns;
            for (const auto& s : outcome.trajectory.samples()) {
                ns.add(s.t, "sobolev", 0, 0.0, sobolev_norm(s.state, 0));
                ns.add(s.t, "sobolev", setup.m, 0.0, sobolev_norm(s.state, setup.m));
                ns.add(s.t, "lipschitz", 1, 0.0, lipschitz_norm(s.state));
            }
            if (outcome.trajectory.size() > static_cast<std::size_t>(setup.m)) {
                for (int mm = 0; mm <= setup.m; ++mm)
                    ns.add(outcome.trajectory.t_end(), "gm", mm, setup.picard.gamma,
                           gm_norm(outcome.trajectory, mm, setup.picard.gamma));
            }
            ns.write(rr.output_dir / "norms.csv");
            note(rr.output_dir / "norms.csv");
        }

        if (setup.want_energy && !outcome.trajectory.empty()) {
            EnergyRecord rec;
            double prev_e = 0.0;
            for (std::size_t i = 0; i < outcome.trajectory.size(); ++i) {
                const auto& s = outcome.trajectory.samples()[i];
                const double e = quadratic_energy(*setup.law, s.state);
                rec.t.push_back(s.t);
                rec.energy.push_back(e);
                rec.source_norm.push_back(0.0);
                rec.boundary_norm.push_back(0.0);
                const double dt = i ? s.t - outcome.trajectory.samples()[i - 1].t : 0.0;
                rec.ratio.push_back(i && prev_e > 0.0 && dt > 0.0 ? (e - prev_e) / (dt * prev_e) : 0.0);
                rec.face_work.push_back(0.0);
                prev_e = e;
            }
            write_energy_csv(rr.output_dir / "energy.csv", rec);
            note(rr.output_dir / "energy.csv");
        }

        if (setup.want_divergence && !outcome.trajectory.empty()) {
            const DivergenceReport rep = divergence_check(*setup.law, outcome.trajectory, setup.bundle);
            write_divergence_csv(rr.output_dir / "divergence.csv", rep);
            note(rr.output_dir / "divergence.csv");
            summary["div_b_initial"] = rep.initial_div_b_l2;
            summary["div_b_max"] = rep.max_div_b_l2();
            summary["div_d_minus_rho_max"] = rep.max_div_d_minus_rho_l2();
        }

        if (setup.want_cone && !outcome.trajectory.empty()) {
            const ConeReport rep = cone_support_check(outcome.trajectory, setup.cone, setup.cone_tolerance);
            write_cone_csv(rr.output_dir / "cone.csv", rep);
            note(rr.output_dir / "cone.csv");
            summary["cone_pass"] = rep.pass;
            summary["cone_worst"] = rep.worst();
            if (!quiet)
                std::cout << "cone check: " << (rep.pass ? "pass" : "FAIL")
                          << " (worst " << rep.worst() << " at tolerance " << setup.cone_tolerance
                          << ")\n";
        }

        if (setup.want_continuity) {
            const ContinuousDependenceReport rep = continuous_dependence_experiment(
                *setup.law, setup.bundle, setup.m, setup.continuity_direction,
                setup.continuity_deltas, setup.picard, setup.stepper, setup.horizon);
            write_continuity_csv(rr.output_dir / "continuity.csv", rep);
            note(rr.output_dir / "continuity.csv");
            summary["continuity_aborted"] = rep.aborted;
            if (!rep.ratios.empty()) summary["continuity_spread"] = rep.max_pair_spread();
        }

        if (cfg.dump_every > 0 && !outcome.trajectory.empty()) {
            int idx = 0;
            for (std::size_t i = 0; i < outcome.trajectory.size();
                 i += static_cast<std::size_t>(cfg.dump_every), ++idx) {
                const auto p = rr.output_dir / ("field_" + std::to_string(idx) + ".qmxf");
                write_field_dump(p, outcome.trajectory.samples()[i].state);
                note(p);
            }
        }

        if (outcome.status == SolveStatus::blowup_lipschitz ||
            outcome.status == SolveStatus::left_state_domain) {
            summary["crossing_time"] = outcome.termination_time;
            atomic_write_text(rr.output_dir / "crossing_time.txt",
                              format_double(outcome.termination_time) + "\n");
            note(rr.output_dir / "crossing_time.txt");
        }

        if (!quiet) {
            std::cout << "status: " << rr.status;
            if (!outcome.trajectory.empty())
                std::cout << ", t_end = " << outcome.trajectory.t_end()
                          << ", samples = " << outcome.trajectory.size();
            std::cout << "\n";
        }
    }

    // manifest (wall clock excluded from determinism guarantees)
    const auto t_stop = std::chrono::steady_clock::now();
    json manifest;
    manifest["version"] = kArtifactVersion;
    manifest["config"] = emit_config(cfg);
    manifest["status"] = rr.status;
    manifest["steps"] = step_count;
    manifest["wall_clock_seconds"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(t_stop - t_start).count() / 1000.0;
    json hashes;
    for (const auto& p : outputs) hashes[p.filename().string()] = file_hash_hex(p);
    manifest["output_hashes"] = hashes;
    manifest["summary"] = summary;
    atomic_write_text(rr.output_dir / "manifest.json", manifest.dump(2) + "\n");

    return rr;
}

}  // namespace qmx
