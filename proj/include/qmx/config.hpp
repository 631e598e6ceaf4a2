#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qmx/grid.hpp"

namespace qmx {

/// Flat, sectioned scenario configuration. Parsing is total: every key is
/// known, typed, and validated, or the parse fails naming section.key.
struct ScenarioConfig {
    // [scenario]
    std::string name = "vacuum_pulse";

    // [law]
    std::string law = "kerr";
    std::vector<double> vartheta{0.0};  // 1 (scalar) or 9 entries (row-major 3x3)
    double conductivity_scale = 0.0;
    double eta = 1.0;
    std::string state_domain = "all";  // all | ball | box
    double state_radius = 1.0;
    std::vector<double> state_lo{-1, -1, -1, -1, -1, -1};
    std::vector<double> state_hi{1, 1, 1, 1, 1, 1};

    // [grid]
    std::vector<int> cells{16, 16, 16};
    std::vector<double> spacing{0.0625, 0.0625, 0.0625};
    std::vector<double> origin{0, 0, 0};
    std::vector<std::string> boundary{"periodic", "periodic", "periodic"};
    long long cell_cap = 1ll << 24;

    // [data]
    std::string preset = "vacuum_pulse";
    double amplitude = 1.0;
    std::vector<double> center{0, 0, 0};
    double width = 0.2;

    // [solver]
    int m = 3;
    double tau = 0.05;
    double horizon = 0.2;
    double cfl = 0.5;
    double penalty = 1.0;
    double dissipation = 0.02;
    double fp_tolerance = 1e-9;
    int max_iterations = 50;
    double contraction_warn = 0.9;
    double radius_r = 0.0;  // 0: advisory bound disabled
    double kappa_guard = -1.0;
    double lipschitz_threshold = 1e6;
    double gamma = 0.0;
    int max_tau_halvings = 6;
    double compat_tolerance = 1e-10;
    double compat_relax_c = 10.0;

    // [diagnostics]
    bool divergence = false;
    bool energy = false;
    bool cone = false;
    std::vector<double> cone_center{0, 0, 0};
    double cone_radius = 0.25;
    double cone_speed = 0.0;  // 0: 3/eta
    std::string cone_direction = "forward";
    double cone_tolerance = 1e-6;
    bool continuity = false;
    std::vector<double> continuity_deltas{1e-2, 1e-3, 1e-4};

    // [output]
    std::string directory = "out";
    int dump_every = 0;
    long long seed = 12345;

    bool operator==(const ScenarioConfig&) const = default;
};

/// Parse errors carry the offending section.key (or line number).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

ScenarioConfig parse_config(const std::string& text);
std::string emit_config(const ScenarioConfig& cfg);
void validate_config(const ScenarioConfig& cfg);

GridSpec grid_from_config(const ScenarioConfig& cfg);

}  // namespace qmx
