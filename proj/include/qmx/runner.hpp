#pragma once

#include <filesystem>
#include <string>

#include "qmx/config.hpp"
#include "qmx/scenarios.hpp"

namespace qmx {

inline constexpr const char* kArtifactVersion = "0.1.0";
inline constexpr int kExitConfigError = 64;

struct RunResult {
    int exit_code = 0;
    std::string status = "ok";
    std::filesystem::path output_dir;
};

/// Executes a validated configuration: solves, writes the requested CSVs,
/// optional field dumps, and the run manifest. The exit code encodes the
/// termination class (0 converged/horizon, 2 blow-up, 3 left state domain,
/// 4 Picard stalled, 5 nonfinite).
RunResult run_scenario(const ScenarioConfig& cfg, bool quiet = false);

}  // namespace qmx
