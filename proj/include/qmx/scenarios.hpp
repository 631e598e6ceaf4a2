#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qmx/config.hpp"
#include "qmx/diagnostics.hpp"
#include "qmx/material.hpp"
#include "qmx/picard.hpp"

namespace qmx {

struct ScenarioInfo {
    std::string name;
    std::string description;
};

/// Built-in presets, each a fully validated default configuration.
std::vector<ScenarioInfo> list_scenarios();
bool is_known_scenario(const std::string& name);
ScenarioConfig preset_config(const std::string& name);

/// Everything a run needs, built from a validated config.
struct ScenarioSetup {
    enum class Mode { quasilinear, manufactured };

    Mode mode = Mode::quasilinear;
    GridSpec grid;
    std::shared_ptr<MaterialLaw> law;
    DataBundle bundle;
    PicardConfig picard;
    StepperConfig stepper;
    int m = 3;
    double horizon = 0.0;

    bool want_divergence = false;
    bool want_energy = false;
    bool want_cone = false;
    bool want_continuity = false;
    ConeSpec cone;
    double cone_tolerance = 1e-6;
    std::vector<double> continuity_deltas;
    FieldState continuity_direction;

    // manufactured mode: the exact solution and the frozen coefficients
    std::function<FieldState(double t)> mms_exact;
    FrozenCoefficients mms_coeffs;
};

ScenarioSetup build_setup(const ScenarioConfig& cfg);

/// Smooth compactly supported scalar bump: value 1 at the center, support
/// |x - c| < radius, all derivatives vanish at the support boundary.
double bump(double r_over_radius);
double bump_derivative(double r_over_radius);  // d/ds of bump(s)

/// Divergence-free vector bump (a curl of a scalar-bump potential), analytic.
Vec3 curl_bump(const Vec3& x, const Vec3& center, double radius, double amplitude);

}  // namespace qmx
