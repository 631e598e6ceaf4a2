#include "qmx/scenarios.hpp"

#include <cmath>
#include <stdexcept>

namespace qmx {

double bump(double s) {
    const double s2 = s * s;
    if (s2 >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - s2));
}

double bump_derivative(double s) {
    const double s2 = s * s;
    if (s2 >= 1.0) return 0.0;
    const double d = 1.0 - s2;
    return bump(s) * (-2.0 * s / (d * d));
}

namespace {

// bump'(s)/s, finite at s = 0
double bump_derivative_over_s(double s) {
    const double s2 = s * s;
    if (s2 >= 1.0) return 0.0;
    const double d = 1.0 - s2;
    return bump(s) * (-2.0 / (d * d));
}

}  // namespace

Vec3 curl_bump(const Vec3& x, const Vec3& center, double radius, double amplitude) {
    const Vec3 r{x[0] - center[0], x[1] - center[1], x[2] - center[2]};
    const double s = std::sqrt(dot(r, r)) / radius;
    // curl of the potential (0, 0, psi(|x-c|/R)); the 2.2 factor normalizes the
    // peak magnitude to ~amplitude
    const double w = amplitude * (radius / 2.2) * bump_derivative_over_s(s) / (radius * radius);
    return Vec3{w * r[1], -w * r[0], 0.0};
}

namespace {

FieldState sample_field(const GridSpec& grid, double t,
                        const std::function<Vec6(const Vec3&)>& fn) {
    FieldState u(grid, t);
    for (int k = 0; k < grid.nz(); ++k)
        for (int j = 0; j < grid.ny(); ++j)
            for (int i = 0; i < grid.nx(); ++i)
                u.set(grid.node_index(i, j, k), fn(grid.position(i, j, k)));
    return u;
}

KerrParams law_params(const ScenarioConfig& cfg) {
    KerrParams p;
    if (cfg.vartheta.size() == 1) {
        p.vartheta = Mat3::scaled_identity(cfg.vartheta[0]);
        p.scalar = true;
    } else {
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) p.vartheta.m[i][j] = cfg.vartheta[static_cast<std::size_t>(3 * i + j)];
        p.scalar = false;
    }
    p.conductivity_scale = cfg.conductivity_scale;
    p.eta = cfg.eta;
    if (cfg.state_domain == "all") {
        p.domain = StateDomain::everything();
    } else if (cfg.state_domain == "ball") {
        p.domain = StateDomain::centered_ball(cfg.state_radius);
    } else {
        Vec6 lo, hi;
        for (int c = 0; c < 6; ++c) {
            lo[c] = cfg.state_lo[static_cast<std::size_t>(c)];
            hi[c] = cfg.state_hi[static_cast<std::size_t>(c)];
        }
        p.domain = StateDomain::aligned_box(lo, hi);
    }
    return p;
}

// d^j/dt^j of cos(a t + phase0) scaled
double trig_deriv(double a, double t, int j, bool sine) {
    // d^j sin(at) = a^j sin(at + j pi/2); d^j cos(at) = a^j cos(at + j pi/2)
    const double shift = j * M_PI / 2.0;
    const double amp = std::pow(a, j);
    return sine ? amp * std::sin(a * t + shift) : amp * std::cos(a * t + shift);
}

// time profile of the manufactured solution and its derivatives
double mms_s(int j, double t) {
    return trig_deriv(1.3, t, j, false) + 0.4 * trig_deriv(2.1, t, j, true);
}

struct MmsFields {
    double kx = 2.0 * M_PI;
    double ky = 2.0 * M_PI;
    double z_width = 0.22;  // Gaussian width; ~1e-9 at the truncation face

    double psi(double z) const {
        const double s = z / z_width;
        return std::exp(-s * s);
    }
    double psi_p(double z) const { return -2.0 * z / (z_width * z_width) * psi(z); }

    Vec6 W(const Vec3& x) const {
        const double p = psi(x[2]);
        return Vec6{p * std::sin(kx * x[0]), p * std::sin(ky * x[1]), p * std::cos(kx * x[0]),
                    p * std::cos(ky * x[1]), p * std::sin(kx * x[0]), p * std::sin(ky * x[1])};
    }

    // sum_j A_j d_j W + D W with D = blkdiag(I/2, 0)
    Vec6 spatial(const Vec3& x) const {
        const double p = psi(x[2]);
        const double pp = psi_p(x[2]);
        const double sx = std::sin(kx * x[0]), cx = std::cos(kx * x[0]);
        const double sy = std::sin(ky * x[1]), cy = std::cos(ky * x[1]);
        // curl W_E and curl W_H, analytically
        const double c1 = -pp * sy;
        const double c2 = pp * sx + p * kx * sx;
        const double c3 = 0.0;
        const double d1 = p * ky * cy - pp * sx;
        const double d2 = pp * cy;
        const double d3 = p * kx * cx + p * ky * sy;
        Vec6 r{-d1, -d2, -d3, c1, c2, c3};
        const Vec6 w = W(x);
        for (int c = 0; c < 3; ++c) r[c] += 0.5 * w[c];
        return r;
    }

    Mat6 A0() const {
        Mat6 a = Mat6::identity();
        a.m[0][0] = 4.0;
        a.m[1][1] = 2.0;
        a.m[2][2] = 2.0;
        return a;
    }
    Mat6 D() const {
        Mat6 d{};
        for (int c = 0; c < 3; ++c) d.m[c][c] = 0.5;
        return d;
    }
};

struct PresetDef {
    std::string description;
    std::function<void(ScenarioConfig&)> fill;
};

const std::vector<std::pair<std::string, PresetDef>>& preset_table() {
    static const std::vector<std::pair<std::string, PresetDef>> table = [] {
        std::vector<std::pair<std::string, PresetDef>> t;

        t.push_back({"vacuum_pulse",
                     {"divergence-free vacuum pulse on a periodic box (smoke, divergence checks)",
                      [](ScenarioConfig& c) {
                          c.preset = "vacuum_pulse";
                          c.vartheta = {0.0};
                          c.cells = {24, 24, 24};
                          const double h = 1.0 / 24.0;
                          c.spacing = {h, h, h};
                          c.origin = {-0.5, -0.5, -0.5};
                          c.boundary = {"periodic", "periodic", "periodic"};
                          c.amplitude = 1.0;
                          c.center = {0, 0, 0};
                          c.width = 0.18;
                          c.tau = 0.08;
                          c.horizon = 0.24;
                          c.divergence = true;
                      }}});

        t.push_back({"vacuum_plane_wave",
                     {"exact traveling wave on a fully periodic box (convergence sanity)",
                      [](ScenarioConfig& c) {
                          c.preset = "vacuum_plane_wave";
                          c.vartheta = {0.0};
                          c.cells = {32, 8, 8};
                          c.spacing = {1.0 / 32.0, 1.0 / 8.0, 1.0 / 8.0};
                          c.origin = {0, 0, 0};
                          c.boundary = {"periodic", "periodic", "periodic"};
                          c.amplitude = 1.0;
                          c.tau = 0.25;
                          c.horizon = 0.5;
                          c.dissipation = 0.0;
                      }}});

        t.push_back({"pec_bounce",
                     {"vacuum packet reflecting off the conducting face (energy bookkeeping)",
                      [](ScenarioConfig& c) {
                          c.preset = "pec_bounce";
                          c.vartheta = {0.0};
                          // tall box: the artifact top face stays outside the
                          // forward cone of the packet over the whole horizon
                          c.cells = {4, 4, 105};
                          c.spacing = {0.25, 0.25, 1.0 / 32.0};
                          c.origin = {-0.5, -0.5, 0.0};
                          c.boundary = {"periodic", "periodic", "pec_bottom_open_top"};
                          c.amplitude = 1.0;
                          c.center = {0, 0, 0.5};
                          c.width = 0.12;
                          c.tau = 0.4;
                          c.horizon = 0.8;
                          c.dissipation = 0.0;
                          c.energy = true;
                      }}});

        t.push_back({"kerr_pulse",
                     {"small-amplitude Kerr pulse above the conducting face (Picard workhorse)",
                      [](ScenarioConfig& c) {
                          c.preset = "kerr_pulse";
                          c.vartheta = {1.0};
                          c.cells = {20, 20, 20};
                          const double h = 1.0 / 20.0;
                          c.spacing = {h, h, h};
                          c.origin = {-0.5, -0.5, 0.0};
                          c.boundary = {"periodic", "periodic", "pec_bottom_open_top"};
                          c.amplitude = 0.5;
                          c.center = {0, 0, 0.45};
                          c.width = 0.15;
                          c.tau = 0.03;
                          c.horizon = 0.12;
                          c.divergence = true;
                      }}});

        t.push_back({"kerr_ode_mode",
                     {"spatially uniform Kerr fields with conductivity (6-dim ODE oracle mode)",
                      [](ScenarioConfig& c) {
                          c.preset = "kerr_ode_mode";
                          c.vartheta = {1.0};
                          c.conductivity_scale = 1.0;
                          c.cells = {4, 4, 4};
                          c.spacing = {0.25, 0.25, 0.25};
                          c.origin = {0, 0, 0};
                          c.boundary = {"periodic", "periodic", "periodic"};
                          c.amplitude = 0.8;
                          c.tau = 0.1;
                          c.horizon = 0.5;
                          c.dissipation = 0.0;
                      }}});

        t.push_back({"kerr_ode_blowup",
                     {"anti-damped uniform Kerr mode crossing the Lipschitz threshold",
                      [](ScenarioConfig& c) {
                          c.preset = "kerr_ode_blowup";
                          c.vartheta = {1.0};
                          c.conductivity_scale = -4.0;
                          c.cells = {4, 4, 4};
                          c.spacing = {0.25, 0.25, 0.25};
                          c.origin = {0, 0, 0};
                          c.boundary = {"periodic", "periodic", "periodic"};
                          c.amplitude = 1.0;
                          c.lipschitz_threshold = 2.5;
                          c.tau = 0.25;
                          c.horizon = 3.0;
                          c.dissipation = 0.0;
                      }}});

        t.push_back({"manufactured",
                     {"frozen-coefficient solve against a manufactured exact solution",
                      [](ScenarioConfig& c) {
                          c.preset = "manufactured";
                          c.vartheta = {0.0};
                          c.cells = {32, 32, 33};
                          const double h = 1.0 / 32.0;
                          c.spacing = {h, h, h};
                          c.origin = {0, 0, 0};
                          c.boundary = {"periodic", "periodic", "pec_bottom_open_top"};
                          c.tau = 0.25;
                          c.horizon = 0.25;
                      }}});

        t.push_back({"cone_check",
                     {"pulse against the forward light cone of slope 3/eta",
                      [](ScenarioConfig& c) {
                          c.preset = "vacuum_pulse";
                          c.name = "cone_check";
                          c.vartheta = {0.0};
                          c.cells = {50, 50, 50};
                          c.spacing = {0.025, 0.025, 0.025};
                          c.origin = {-0.6125, -0.6125, -0.6125};
                          c.boundary = {"periodic", "periodic", "periodic"};
                          c.amplitude = 1.0;
                          c.center = {0, 0, 0};
                          c.width = 0.2;
                          c.tau = 0.1;
                          c.horizon = 0.1;
                          c.dissipation = 0.0;
                          c.cone = true;
                          c.cone_center = {0, 0, 0};
                          c.cone_radius = 0.25;
                          c.cone_speed = 0.0;  // 3/eta
                          c.cone_direction = "forward";
                          c.cone_tolerance = 1e-6;
                      }}});

        t.push_back({"continuity_sweep",
                     {"continuous-dependence scaling sweep for the Kerr pulse",
                      [](ScenarioConfig& c) {
                          c.preset = "continuity_sweep";
                          c.vartheta = {1.0};
                          c.cells = {16, 16, 16};
                          const double h = 1.0 / 16.0;
                          c.spacing = {h, h, h};
                          c.origin = {-0.5, -0.5, 0.0};
                          c.boundary = {"periodic", "periodic", "pec_bottom_open_top"};
                          c.amplitude = 0.2;
                          c.center = {0, 0, 0.45};
                          c.width = 0.15;
                          c.tau = 0.04;
                          c.horizon = 0.08;
                          c.continuity = true;
                          c.continuity_deltas = {1e-2, 1e-3, 1e-4};
                      }}});

        return t;
    }();
    return table;
}

}  // namespace

std::vector<ScenarioInfo> list_scenarios() {
    std::vector<ScenarioInfo> out;
    for (const auto& [name, def] : preset_table()) out.push_back({name, def.description});
    return out;
}

bool is_known_scenario(const std::string& name) {
    for (const auto& [n, def] : preset_table())
        if (n == name) return true;
    return false;
}

ScenarioConfig preset_config(const std::string& name) {
    for (const auto& [n, def] : preset_table())
        if (n == name) {
            ScenarioConfig cfg;
            cfg.name = name;
            def.fill(cfg);
            validate_config(cfg);
            return cfg;
        }
    throw ConfigError("config: scenario.name: unknown scenario '" + name + "'");
}

ScenarioSetup build_setup(const ScenarioConfig& cfg) {
    validate_config(cfg);
    ScenarioSetup setup;
    setup.grid = grid_from_config(cfg);
    setup.law = make_kerr_law(law_params(cfg));
    setup.m = cfg.m;
    setup.horizon = cfg.horizon;

    setup.picard.slab_width = cfg.tau;
    setup.picard.max_iterations = cfg.max_iterations;
    setup.picard.fp_tolerance = cfg.fp_tolerance;
    setup.picard.contraction_warn = cfg.contraction_warn;
    if (cfg.radius_r > 0.0) setup.picard.radius_R = cfg.radius_r;
    setup.picard.kappa_guard = cfg.kappa_guard;
    setup.picard.lipschitz_threshold = cfg.lipschitz_threshold;
    setup.picard.gamma = cfg.gamma;
    setup.picard.max_tau_halvings = cfg.max_tau_halvings;
    setup.picard.compat_tolerance = cfg.compat_tolerance;
    setup.picard.compat_relax_C = cfg.compat_relax_c;

    setup.stepper.cfl = cfg.cfl;
    setup.stepper.penalty_strength = cfg.penalty;
    setup.stepper.dissipation_coeff = cfg.dissipation;

    setup.want_divergence = cfg.divergence;
    setup.want_energy = cfg.energy;
    setup.want_cone = cfg.cone;
    setup.want_continuity = cfg.continuity;
    if (cfg.cone) {
        setup.cone.apex_center = {cfg.cone_center[0], cfg.cone_center[1], cfg.cone_center[2]};
        setup.cone.radius = cfg.cone_radius;
        setup.cone.speed = cfg.cone_speed > 0.0 ? cfg.cone_speed : propagation_speed_bound(cfg.eta);
        setup.cone.direction = cfg.cone_direction == "forward" ? ConeSpec::Direction::forward
                                                               : ConeSpec::Direction::backward;
        setup.cone_tolerance = cfg.cone_tolerance;
    }
    setup.continuity_deltas = cfg.continuity_deltas;

    const GridSpec& grid = setup.grid;
    const Vec3 center{cfg.center[0], cfg.center[1], cfg.center[2]};
    setup.bundle.t0 = 0.0;

    if (cfg.preset == "vacuum_pulse" || cfg.preset == "kerr_pulse") {
        setup.bundle.u0 = sample_field(grid, 0.0, [&](const Vec3& x) {
            const Vec3 e = curl_bump(x, center, cfg.width, cfg.amplitude);
            return Vec6{e[0], e[1], e[2], 0, 0, 0};
        });
    } else if (cfg.preset == "vacuum_plane_wave") {
        const double a = cfg.amplitude;
        setup.bundle.u0 = sample_field(grid, 0.0, [&](const Vec3& x) {
            const double v = a * std::sin(2.0 * M_PI * x[0]);
            return Vec6{0, v, 0, 0, 0, v};
        });
    } else if (cfg.preset == "pec_bounce") {
        const double a = cfg.amplitude, w = cfg.width, zc = cfg.center[2];
        setup.bundle.u0 = sample_field(grid, 0.0, [&](const Vec3& x) {
            const double v = a * bump((x[2] - zc) / w);
            return Vec6{v, 0, 0, 0, -v, 0};
        });
    } else if (cfg.preset == "kerr_ode_mode") {
        const double a = cfg.amplitude;
        setup.bundle.u0 = sample_field(grid, 0.0, [&](const Vec3&) {
            return Vec6{a, 0.5 * a, 0, 0.25 * a, 0.5 * a, 0};
        });
    } else if (cfg.preset == "kerr_ode_blowup") {
        const double a = cfg.amplitude;
        setup.bundle.u0 = sample_field(grid, 0.0, [&](const Vec3&) {
            return Vec6{a, 0, 0, 0, 0.5 * a, 0};
        });
    } else if (cfg.preset == "continuity_sweep") {
        setup.bundle.u0 = sample_field(grid, 0.0, [&](const Vec3& x) {
            const Vec3 e = curl_bump(x, center, cfg.width, cfg.amplitude);
            return Vec6{e[0], e[1], e[2], 0, 0, 0};
        });
        // perturbation direction: a bump overlapping the conducting face, so
        // the compatibility projection has to supply nontrivial boundary data
        const Vec3 pc{center[0], center[1], grid.origin[2] + 0.6 * cfg.width};
        setup.continuity_direction = sample_field(grid, 0.0, [&](const Vec3& x) {
            const Vec3 e = curl_bump(x, pc, 1.3 * cfg.width, 1.0);
            return Vec6{e[0], e[1], e[2], 0, 0, 0};
        });
    } else if (cfg.preset == "manufactured") {
        setup.mode = ScenarioSetup::Mode::manufactured;
        auto mms = std::make_shared<MmsFields>();
        mms->z_width = 0.22 * grid.spacing[2] * (grid.nz() - 1);
        setup.bundle.u0 = sample_field(grid, 0.0, [&](const Vec3& x) {
            Vec6 w = mms->W(x);
            const double s0 = mms_s(0, 0.0);
            for (int c = 0; c < 6; ++c) w[c] *= s0;
            return w;
        });
        setup.bundle.f.eval = [mms](int order, double t, const Vec3& x) {
            const Vec6 w = mms->W(x);
            const Vec6 sp = mms->spatial(x);
            const Mat6 a0 = mms->A0();
            const double sj = mms_s(order, t), sj1 = mms_s(order + 1, t);
            Vec6 r = a0.apply(w);
            for (int c = 0; c < 6; ++c) r[c] = r[c] * sj1 + sp[c] * sj;
            return r;
        };
        setup.bundle.g.eval = [mms](int order, double t, const Vec3& x) {
            const double sj = mms_s(order, t);
            return Vec3{-sj * std::sin(mms->ky * x[1]), sj * std::sin(mms->kx * x[0]), 0.0};
        };
        setup.mms_exact = [mms, grid](double t) {
            return sample_field(grid, t, [&](const Vec3& x) {
                Vec6 w = mms->W(x);
                const double s = mms_s(0, t);
                for (int c = 0; c < 6; ++c) w[c] *= s;
                return w;
            });
        };
        setup.mms_coeffs = FrozenCoefficients::constants(mms->A0(), mms->D(), 1.0);
    } else {
        throw ConfigError("config: data.preset: unknown preset '" + cfg.preset + "'");
    }

    return setup;
}

}  // namespace qmx
