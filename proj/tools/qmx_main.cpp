#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "qmx/config.hpp"
#include "qmx/faa_di_bruno.hpp"
#include "qmx/initial_data.hpp"
#include "qmx/runner.hpp"
#include "qmx/scenarios.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

// apply "section.key=value" overrides on top of the emitted config text
qmx::ScenarioConfig apply_overrides(qmx::ScenarioConfig cfg,
                                    const std::vector<std::string>& sets) {
    if (sets.empty()) return cfg;
    std::string text = qmx::emit_config(cfg);
    for (const auto& s : sets) {
        const auto eq = s.find('=');
        const auto dot = s.find('.');
        if (eq == std::string::npos || dot == std::string::npos || dot > eq)
            throw qmx::ConfigError("config: --set expects section.key=value, got '" + s + "'");
        text += "\n[" + s.substr(0, dot) + "]\n" + s.substr(dot + 1, eq - dot - 1) + " = " +
                s.substr(eq + 1) + "\n";
    }
    return qmx::parse_config(text);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qmx - quasilinear Maxwell laboratory"};
    app.require_subcommand(1);

    auto* list = app.add_subcommand("list", "list built-in scenarios");

    std::string config_path;
    std::string scenario;
    std::string output_dir;
    std::vector<std::string> sets;
    int grid_n = 0;
    double tau = 0.0, horizon = 0.0, cfl = 0.0, penalty = 0.0, dissipation = -1.0;
    int m = 0, dump_every = -1;

    auto* run = app.add_subcommand("run", "run a scenario from a config file");
    run->add_option("--config", config_path, "config file")->required();
    run->add_option("--output", output_dir, "output directory override");
    run->add_option("--set", sets, "section.key=value overrides");

    auto* solve = app.add_subcommand("solve", "run a built-in scenario");
    solve->add_option("--scenario", scenario, "scenario name")->required();
    solve->add_option("--m", m, "regularity order (1..3)");
    solve->add_option("--tau", tau, "Picard slab width");
    solve->add_option("--horizon", horizon, "time horizon");
    solve->add_option("--grid", grid_n, "cells per axis (cubical override)");
    solve->add_option("--cfl", cfl, "CFL number in (0,1]");
    solve->add_option("--penalty", penalty, "boundary penalty strength (>= 1)");
    solve->add_option("--dissipation", dissipation, "fourth-difference dissipation coefficient");
    solve->add_option("--dump-every", dump_every, "field dump cadence (0 = off)");
    solve->add_option("--output", output_dir, "output directory");
    solve->add_option("--set", sets, "section.key=value overrides");

    std::string alpha_str = "1,0,0,0";
    int ydim = 6;
    auto* terms = app.add_subcommand("terms", "print the chain-rule term table for a multi-index");
    terms->add_option("--alpha", alpha_str, "comma-separated (a0,a1,a2,a3)");
    terms->add_option("--ydim", ydim, "state dimension (1..6)");

    auto* compat = app.add_subcommand("compat", "print the compatibility table of a scenario");
    compat->add_option("--scenario", scenario, "scenario name")->required();
    compat->add_option("--set", sets, "section.key=value overrides");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (list->parsed()) {
            for (const auto& info : qmx::list_scenarios())
                std::cout << info.name << "  -  " << info.description << "\n";
            return 0;
        }
        if (terms->parsed()) {
            qmx::MultiIndex a;
            std::istringstream is(alpha_str);
            std::string tok;
            for (int i = 0; i < 4 && std::getline(is, tok, ','); ++i) a[i] = std::stoi(tok);
            std::cout << qmx::format_term_table(a, ydim);
            return 0;
        }

        qmx::ScenarioConfig cfg;
        if (run->parsed()) {
            cfg = qmx::parse_config(read_file(config_path));
        } else {
            cfg = qmx::preset_config(scenario);
        }
        if (solve->parsed()) {
            if (m > 0) cfg.m = m;
            if (tau > 0.0) cfg.tau = tau;
            if (horizon > 0.0) cfg.horizon = horizon;
            if (grid_n > 0) {
                // cubical override keeping the physical extent of each axis
                for (int a = 0; a < 3; ++a) {
                    const double extent = cfg.spacing[static_cast<std::size_t>(a)] *
                                          cfg.cells[static_cast<std::size_t>(a)];
                    cfg.cells[static_cast<std::size_t>(a)] = grid_n;
                    cfg.spacing[static_cast<std::size_t>(a)] = extent / grid_n;
                }
            }
            if (cfl > 0.0) cfg.cfl = cfl;
            if (penalty > 0.0) cfg.penalty = penalty;
            if (dissipation >= 0.0) cfg.dissipation = dissipation;
            if (dump_every >= 0) cfg.dump_every = dump_every;
        }
        cfg = apply_overrides(cfg, sets);
        if (!output_dir.empty()) cfg.directory = output_dir;
        qmx::validate_config(cfg);

        if (compat->parsed()) {
            const qmx::ScenarioSetup setup = qmx::build_setup(cfg);
            const auto rep = qmx::check_compatibility(*setup.law, setup.bundle, setup.m,
                                                      setup.picard.compat_tolerance);
            std::cout << rep.table();
            return rep.pass ? 0 : 1;
        }

        const qmx::RunResult rr = qmx::run_scenario(cfg);
        return rr.exit_code;
    } catch (const qmx::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return qmx::kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
