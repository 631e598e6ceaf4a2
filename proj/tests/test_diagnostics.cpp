#include <doctest.h>

#include <cmath>
#include <functional>

#include "qmx/diagnostics.hpp"
#include "qmx/stencil.hpp"
#include "qmx/norms.hpp"
#include "qmx/scenarios.hpp"

using namespace qmx;

namespace {

GridSpec periodic_box(int n, double len, const Vec3& origin) {
    GridSpec g;
    g.cells_per_axis = {n, n, n};
    const double h = len / n;
    g.spacing = {h, h, h};
    g.origin = origin;
    return g;
}

FieldState sample(const GridSpec& g, const std::function<Vec6(const Vec3&)>& f) {
    FieldState u(g, 0.0);
    for (int k = 0; k < g.nz(); ++k)
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 0; i < g.nx(); ++i) u.set(g.node_index(i, j, k), f(g.position(i, j, k)));
    return u;
}

SolveOutcome run_pulse(const GridSpec& g, double vartheta, double conductivity,
                       const Vec3& center, double width, double amp, double horizon,
                       bool track_charge = false) {
    KerrParams p = KerrParams::scalar_coeff(vartheta, conductivity);
    auto law = make_kerr_law(p);
    DataBundle bundle;
    bundle.u0 = sample(g, [&](const Vec3& x) {
        const Vec3 e = curl_bump(x, center, width, amp);
        return Vec6{e[0], e[1], e[2], 0, 0, 0};
    });
    PicardConfig pc;
    pc.slab_width = horizon;
    StepperConfig sc;
    sc.dissipation_coeff = 0.0;
    return continue_maximal(*law, bundle, 3, pc, sc, horizon, track_charge);
}

}  // namespace

TEST_CASE("propagation speed bound") {
    CHECK(propagation_speed_bound(1.0) == doctest::Approx(3.0));
    CHECK(propagation_speed_bound(2.0) == doctest::Approx(1.5));
    auto kerr = make_kerr_law(KerrParams::scalar_coeff(1.0));
    CHECK(propagation_speed_bound(*kerr) == doctest::Approx(3.0));
}

TEST_CASE("system matrices have unit spectral norm") {
    for (int axis = 1; axis <= 3; ++axis)
        CHECK(spectral_norm(system_matrix(axis)) == doctest::Approx(1.0));
}

TEST_CASE("zero data pass the cone check at tolerance zero") {
    const GridSpec g = periodic_box(8, 1.0, Vec3{-0.5, -0.5, -0.5});
    Trajectory traj(g);
    for (int s = 0; s <= 3; ++s)
        traj.append({0.01 * s, FieldState(g, 0.01 * s), FieldState(g, 0.01 * s), {}});
    ConeSpec cone;
    cone.apex_center = {0, 0, 0};
    cone.radius = 0.2;
    cone.speed = 3.0;
    cone.direction = ConeSpec::Direction::forward;
    const ConeReport rep = cone_support_check(traj, cone, 0.0);
    CHECK(rep.pass);
    CHECK(rep.worst() == 0.0);
}

TEST_CASE("forward cone holds for a vacuum pulse and fails a slow negative control") {
    const GridSpec g = periodic_box(30, 1.25, Vec3{-0.625, -0.625, -0.625});
    const SolveOutcome out = run_pulse(g, 0.0, 0.0, Vec3{0, 0, 0}, 0.18, 1.0, 0.08);
    REQUIRE(out.status == SolveStatus::horizon_reached);

    // at this desk resolution the scheme tails sit below 5e-5 outside the cone
    ConeSpec cone;
    cone.apex_center = {0, 0, 0};
    cone.radius = 0.22;
    cone.speed = 3.0;
    cone.direction = ConeSpec::Direction::forward;
    const ConeReport rep = cone_support_check(out.trajectory, cone, 5e-5);
    CHECK(rep.pass);

    // negative control: a cone slower than the wave speed must fail
    ConeSpec slow = cone;
    slow.speed = 0.2;
    const ConeReport bad = cone_support_check(out.trajectory, slow, 5e-5);
    CHECK(!bad.pass);
    CHECK(bad.worst() > 100.0 * 5e-5);
}

TEST_CASE("backward cone: solutions vanish inside when the data do") {
    const GridSpec g = periodic_box(32, 1.25, Vec3{-0.625, -0.625, -0.625});
    // pulse in a corner region, backward cone around the opposite center
    const SolveOutcome out = run_pulse(g, 0.0, 0.0, Vec3{0.28, 0.28, 0.28}, 0.2, 1.0, 0.05);
    REQUIRE(out.status == SolveStatus::horizon_reached);

    ConeSpec cone;
    cone.apex_center = {-0.2, -0.2, -0.2};
    cone.radius = 0.35;
    cone.speed = 3.0;
    cone.direction = ConeSpec::Direction::backward;
    const ConeReport rep = cone_support_check(out.trajectory, cone, 1e-6);
    CHECK(rep.pass);

    // cone monotonicity: shrinking the backward cone cannot increase the violation
    ConeSpec smaller = cone;
    smaller.radius = 0.3;
    const ConeReport rep2 = cone_support_check(out.trajectory, smaller, 1e-6);
    CHECK(rep2.worst() <= rep.worst() + 1e-15);
}

TEST_CASE("a forward cone that outgrows the grid is a configuration error") {
    const GridSpec g = periodic_box(8, 1.0, Vec3{-0.5, -0.5, -0.5});
    Trajectory traj(g);
    for (int s = 0; s <= 3; ++s)
        traj.append({0.1 * s, FieldState(g, 0.1 * s), FieldState(g, 0.1 * s), {}});
    ConeSpec cone;
    cone.apex_center = {0, 0, 0};
    cone.radius = 0.3;
    cone.speed = 3.0;  // radius 0.6 at t = 0.1 already leaves the half-width 0.5 box
    cone.direction = ConeSpec::Direction::forward;
    CHECK_THROWS(cone_support_check(traj, cone, 1e-6));
}

TEST_CASE("cone data-support precondition is enforced") {
    const GridSpec g = periodic_box(16, 1.25, Vec3{-0.625, -0.625, -0.625});
    Trajectory traj(g);
    FieldState u = sample(g, [](const Vec3&) { return Vec6{1, 0, 0, 0, 0, 0}; });
    traj.append({0.0, u, FieldState(g, 0.0), {}});
    ConeSpec cone;
    cone.apex_center = {0, 0, 0};
    cone.radius = 0.2;
    cone.speed = 3.0;
    cone.direction = ConeSpec::Direction::forward;
    CHECK_THROWS(cone_support_check(traj, cone, 1e-6));  // support everywhere
}

TEST_CASE("divergence residuals vanish for zero fields") {
    const GridSpec g = periodic_box(8, 1.0, Vec3{0, 0, 0});
    auto law = make_kerr_law(KerrParams::scalar_coeff(1.0));
    Trajectory traj(g);
    for (int s = 0; s <= 2; ++s)
        traj.append({0.01 * s, FieldState(g, 0.01 * s), FieldState(g, 0.01 * s), {}});
    DataBundle bundle;
    bundle.u0 = FieldState(g, 0.0);
    const DivergenceReport rep = divergence_check(*law, traj, bundle);
    CHECK(rep.max_div_b_l2() == 0.0);
    CHECK(rep.max_div_d_minus_rho_l2() == 0.0);
}

TEST_CASE("analytically divergence-free vacuum data keep both residuals at their initial size") {
    const GridSpec g = periodic_box(20, 1.25, Vec3{-0.625, -0.625, -0.625});
    const SolveOutcome out = run_pulse(g, 0.0, 0.0, Vec3{0, 0, 0}, 0.25, 1.0, 0.1, true);
    REQUIRE(out.status == SolveStatus::horizon_reached);
    auto law = make_kerr_law(KerrParams::scalar_coeff(0.0));
    DataBundle bundle;
    bundle.u0 = out.trajectory.front().state;
    const DivergenceReport rep = divergence_check(*law, out.trajectory, bundle);
    CHECK(rep.initial_div_b_l2 == 0.0);  // H0 = 0
    CHECK(rep.initial_div_d_minus_rho_l2 == 0.0);  // rho derived from div D(u0)
    // the discrete identity keeps div E exactly frozen on periodic boxes
    CHECK(rep.max_div_d_minus_rho_l2() <= 1e-11);
    CHECK(rep.max_div_b_l2() <= 1e-11);
}

TEST_CASE("a deliberately bad div H stays constant: preserved, not repaired") {
    const GridSpec g = periodic_box(16, 1.0, Vec3{0, 0, 0});
    auto law = make_kerr_law(KerrParams::scalar_coeff(0.0));
    DataBundle bundle;
    bundle.u0 = sample(g, [](const Vec3& x) {
        return Vec6{0, 0, 0, std::sin(2 * M_PI * x[0]), 0, 0};  // div H != 0
    });
    PicardConfig pc;
    pc.slab_width = 0.05;
    StepperConfig sc;
    sc.dissipation_coeff = 0.0;
    const SolveOutcome out = continue_maximal(*law, bundle, 3, pc, sc, 0.05, true);
    REQUIRE(out.status == SolveStatus::horizon_reached);
    const DivergenceReport rep = divergence_check(*law, out.trajectory, bundle);
    REQUIRE(rep.initial_div_b_l2 > 0.1);
    for (double v : rep.div_b_l2)
        CHECK(v == doctest::Approx(rep.initial_div_b_l2).epsilon(1e-9));
}

TEST_CASE("charge quadrature tracks div D for a conducting Kerr run") {
    const GridSpec g = periodic_box(16, 1.25, Vec3{-0.625, -0.625, -0.625});
    const SolveOutcome out = run_pulse(g, 1.0, 0.5, Vec3{0, 0, 0}, 0.25, 0.4, 0.08, true);
    REQUIRE(out.status == SolveStatus::horizon_reached);
    REQUIRE(out.trajectory.back().rho.has_value());

    auto law = make_kerr_law(KerrParams::scalar_coeff(1.0, 0.5));
    DataBundle bundle;
    bundle.u0 = out.trajectory.front().state;
    const DivergenceReport rep = divergence_check(*law, out.trajectory, bundle);
    // the quadrature keeps || div D - rho || at the discretization level
    CHECK(rep.max_div_d_minus_rho_l2() <= 10.0 * std::max(rep.initial_div_d_minus_rho_l2, 2e-3));
}

TEST_CASE("measured support speed of an expanding pulse") {
    const GridSpec g = periodic_box(24, 1.25, Vec3{-0.625, -0.625, -0.625});
    const SolveOutcome out = run_pulse(g, 0.0, 0.0, Vec3{0, 0, 0}, 0.15, 1.0, 0.12);
    REQUIRE(out.status == SolveStatus::horizon_reached);
    const double speed = measured_support_speed(out.trajectory, Vec3{0, 0, 0}, 1e-4);
    CHECK(speed <= propagation_speed_bound(1.0));
    CHECK(speed >= 0.9 * 0.9);  // at least 0.9x the physical unit speed
}

TEST_CASE("truncation guard flags horizons whose cone reaches an inert face") {
    GridSpec g;
    g.cells_per_axis = {4, 4, 33};
    g.spacing = {0.25, 0.25, 1.0 / 32.0};
    g.boundary = {BoundaryMode::periodic, BoundaryMode::periodic, BoundaryMode::pec_bottom_open_top};
    const FieldState u0 = sample(g, [](const Vec3& x) {
        const double v = bump((x[2] - 0.5) / 0.1);
        return Vec6{v, 0, 0, 0, -v, 0};
    });
    const auto ok = truncation_face_check(u0, 3.0, 0.1);
    CHECK(ok.ok);  // reach 0.3 < gap 0.4
    const auto bad = truncation_face_check(u0, 3.0, 0.2);
    CHECK(!bad.ok);  // reach 0.6 > gap 0.4
}

TEST_CASE("vacuum continuous dependence is exactly linear") {
    ScenarioConfig cfg = preset_config("continuity_sweep");
    cfg.vartheta = {0.0};
    cfg.cells = {10, 10, 10};
    cfg.spacing = {0.1, 0.1, 0.1};
    cfg.horizon = 0.05;
    cfg.tau = 0.05;
    const ScenarioSetup setup = build_setup(cfg);
    const std::vector<double> deltas{1e-2, 1e-3};
    const ContinuousDependenceReport rep = continuous_dependence_experiment(
        *setup.law, setup.bundle, setup.m, setup.continuity_direction, deltas, setup.picard,
        setup.stepper, cfg.horizon);
    REQUIRE(!rep.aborted);
    REQUIRE(rep.ratios.size() == 2);
    CHECK(rep.ratios[0] > 0.0);
    CHECK(std::abs(rep.ratios[0] - rep.ratios[1]) / rep.ratios[0] <= 1e-8);
}

TEST_CASE("zero perturbation direction aborts the experiment") {
    ScenarioConfig cfg = preset_config("continuity_sweep");
    cfg.cells = {8, 8, 8};
    cfg.spacing = {0.125, 0.125, 0.125};
    const ScenarioSetup setup = build_setup(cfg);
    const FieldState zero(setup.grid, 0.0);
    const ContinuousDependenceReport rep = continuous_dependence_experiment(
        *setup.law, setup.bundle, setup.m, zero, {1e-2}, setup.picard, setup.stepper, 0.04);
    CHECK(rep.aborted);
}
