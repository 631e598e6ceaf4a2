// Acceptance suite: one pass/fail line per criterion, selectable by number.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "qmx/diagnostics.hpp"
#include "qmx/faa_di_bruno.hpp"
#include "qmx/norms.hpp"
#include "qmx/picard.hpp"
#include "qmx/runner.hpp"
#include "qmx/scenarios.hpp"
#include "support/oracles.hpp"
#include "support/poly.hpp"

using namespace qmx;
using qmxtest::Poly4;
using qmxtest::Poly9;

namespace {

struct Outcome {
    bool pass = true;
    std::string details;
};

struct Check {
    Outcome* out;
    void operator()(bool ok, const std::string& what) {
        if (!ok) {
            out->pass = false;
            out->details += (out->details.empty() ? "" : "; ") + what;
        }
    }
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

FieldState sample_field(const GridSpec& g, const std::function<Vec6(const Vec3&)>& f) {
    FieldState u(g, 0.0);
    for (int k = 0; k < g.nz(); ++k)
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 0; i < g.nx(); ++i) u.set(g.node_index(i, j, k), f(g.position(i, j, k)));
    return u;
}

// ---------------------------------------------------------------- criterion 1
Outcome criterion_1() {
    Outcome out;
    Check check{&out};
    auto law = make_kerr_law(KerrParams::scalar_coeff(1.0));
    std::mt19937 rng(20240801);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    const double h = 1e-5;
    double worst_chi = 0.0, worst_high = 0.0;

    for (int trial = 0; trial < 100; ++trial) {
        Vec6 y;
        for (int c = 0; c < 6; ++c) y[c] = dist(rng);

        // chi against central differences of theta
        const Mat6 chi = law->chi(Vec3{}, y);
        for (int b = 0; b < 6; ++b) {
            Vec6 yp = y, ym = y;
            yp[b] += h;
            ym[b] -= h;
            const Vec6 tp = law->theta(Vec3{}, yp), tm = law->theta(Vec3{}, ym);
            for (int a = 0; a < 6; ++a) {
                const double fd = (tp[a] - tm[a]) / (2 * h);
                worst_chi = std::max(worst_chi,
                                     std::abs(chi.m[a][b] - fd) / std::max(1.0, std::abs(chi.m[a][b])));
            }
        }

        // order-k evaluators against differences of the order k-1 evaluators
        for (const std::vector<int>& comps : {std::vector<int>{0, 1}, {2, 2}, {0, 1, 2}}) {
            const Vec6 exact = law->theta_y_derivative(Vec3{}, y, comps);
            std::vector<int> rest(comps.begin() + 1, comps.end());
            Vec6 yp = y, ym = y;
            yp[comps[0]] += h;
            ym[comps[0]] -= h;
            const Vec6 tp = law->theta_y_derivative(Vec3{}, yp, rest);
            const Vec6 tm = law->theta_y_derivative(Vec3{}, ym, rest);
            for (int a = 0; a < 6; ++a) {
                const double fd = (tp[a] - tm[a]) / (2 * h);
                worst_high = std::max(worst_high,
                                      std::abs(exact[a] - fd) / std::max(1.0, std::abs(exact[a])));
            }
        }
    }
    check(worst_chi <= 1e-6, "chi vs finite differences " + fmt(worst_chi));
    check(worst_high <= 1e-6, "higher derivatives vs finite differences " + fmt(worst_high));
    out.details = "worst chi " + fmt(worst_chi) + ", worst higher " + fmt(worst_high) +
                  (out.pass ? "" : " | " + out.details);
    return out;
}

// ---------------------------------------------------------------- criterion 2
Outcome criterion_2() {
    Outcome out;
    Check check{&out};

    // chain-rule evaluation vs direct differentiation of the composed polynomial
    std::mt19937 rng(7271);
    const std::vector<std::array<double, 4>> pts{
        {0.3, 0.1, -0.4, 0.7}, {0.0, 0.0, 0.0, 0.0}, {-0.6, 0.9, 0.2, -0.3}};
    double worst = 0.0;
    for (int trial = 0; trial < 6; ++trial) {
        const Poly9 theta = qmxtest::random_poly<9>(rng, 3, 0.15);
        std::array<Poly4, 6> v;
        for (auto& p : v) p = qmxtest::random_poly<4>(rng, 2, 0.4);

        CompositionFunction fn{[&theta](const std::array<int, 3>& beta, std::span<const int> ys,
                                        const Vec3& x, const Vec6& y) {
            Poly9 d = theta;
            for (int a = 0; a < 3; ++a)
                for (int e = 0; e < beta[static_cast<std::size_t>(a)]; ++e) d = d.derivative(a);
            for (int c : ys) d = d.derivative(3 + c);
            return d.eval({x[0], x[1], x[2], y[0], y[1], y[2], y[3], y[4], y[5]});
        }};
        FieldJet jet;
        jet.count = pts.size();
        jet.position = [&pts](std::size_t p) { return Vec3{pts[p][1], pts[p][2], pts[p][3]}; };
        jet.derivative = [&v, &pts](const MultiIndex& gamma, int comp, std::size_t p) {
            Poly4 d = v[static_cast<std::size_t>(comp)];
            for (int a = 0; a < 4; ++a)
                for (int e = 0; e < gamma[a]; ++e) d = d.derivative(a);
            return d.eval(pts[p]);
        };
        const Poly4 composed = qmxtest::compose_poly(theta, v);

        for (int a0 = 0; a0 <= 3; ++a0)
            for (int a1 = 0; a0 + a1 <= 3; ++a1)
                for (int a2 = 0; a0 + a1 + a2 <= 3; ++a2)
                    for (int a3 = 0; a0 + a1 + a2 + a3 <= 3; ++a3) {
                        const MultiIndex alpha{{a0, a1, a2, a3}};
                        if (alpha.order() == 0) continue;
                        Poly4 d = composed;
                        for (int ax = 0; ax < 4; ++ax)
                            for (int e = 0; e < alpha[ax]; ++e) d = d.derivative(ax);
                        const auto got = compose_derivative(fn, jet, alpha);
                        for (std::size_t p = 0; p < pts.size(); ++p) {
                            const double expect = d.eval(pts[p]);
                            worst = std::max(worst,
                                             std::abs(got[p] - expect) / std::max(1.0, std::abs(expect)));
                        }
                    }
    }
    check(worst <= 1e-10, "composition vs polynomial oracle " + fmt(worst));

    // Bell-polynomial coefficient counts for scalar states, p <= 4
    const std::map<std::multiset<int>, long long> expected[4] = {
        {{{1}, 1}},
        {{{2}, 1}, {{1, 1}, 1}},
        {{{3}, 1}, {{2, 1}, 3}, {{1, 1, 1}, 1}},
        {{{4}, 1}, {{3, 1}, 4}, {{2, 2}, 3}, {{2, 1, 1}, 6}, {{1, 1, 1, 1}, 1}},
    };
    for (int p = 1; p <= 4; ++p) {
        std::map<std::multiset<int>, long long> got;
        for (const auto& t : enumerate_terms(MultiIndex::time(p), 1)) {
            std::multiset<int> key;
            for (const auto& f : t.factors) key.insert(f.gamma.order());
            got[key] += t.coefficient;
        }
        check(got == expected[p - 1], "Bell counts at order " + std::to_string(p));
    }
    out.details = "worst composition error " + fmt(worst) + ", Bell counts 1..4 exact" +
                  (out.pass ? "" : " | " + out.details);
    return out;
}

// ---------------------------------------------------------------- criterion 3
Outcome criterion_3() {
    Outcome out;
    Check check{&out};

    // periodic-box polynomial scenario: the recursion and the truncated-Taylor
    // oracle share the discrete operators, so agreement isolates the
    // combinatorial machinery
    GridSpec g;
    g.cells_per_axis = {6, 6, 6};
    g.spacing = {0.2, 0.2, 0.2};
    auto law = make_kerr_law(KerrParams::scalar_coeff(0.5, 0.8));
    DataBundle bundle;
    bundle.u0 = sample_field(g, [](const Vec3& x) {
        return Vec6{0.3 * x[0] * x[0] - 0.1 * x[1], 0.2 + 0.4 * x[2], -0.2 * x[0] * x[1],
                    0.1 * x[2] * x[2], 0.3 - 0.2 * x[0], 0.15 * x[1]};
    });
    bundle.f.eval = [](int order, double, const Vec3& x) -> Vec6 {
        const Vec6 a{0.1 * x[0], -0.2, 0.05 * x[1], 0, 0.1, 0.2 * x[2]};
        const Vec6 b{0.3, 0.1 * x[2], 0, -0.2, 0, 0.1};
        const Vec6 c{-0.1, 0, 0.2, 0.1 * x[0], 0, 0};
        switch (order) {
            case 0: return a;
            case 1: return b;
            case 2: return c;
            default: return Vec6{};
        }
    };
    const InitialJet jet = compute_jet(*law, bundle, 3);
    const auto oracle = qmxtest::taylor_jet_oracle(0.5, 0.8, bundle, 3);
    double worst = 0.0;
    for (int p = 0; p <= 3; ++p) {
        double scale = 0.0, diff = 0.0;
        for (std::size_t i = 0; i < jet.entries[static_cast<std::size_t>(p)].values().size(); ++i) {
            scale = std::max(scale, std::abs(oracle[static_cast<std::size_t>(p)].values()[i]));
            diff = std::max(diff, std::abs(jet.entries[static_cast<std::size_t>(p)].values()[i] -
                                           oracle[static_cast<std::size_t>(p)].values()[i]));
        }
        worst = std::max(worst, diff / std::max(1.0, scale));
    }
    check(worst <= 1e-9, "polynomial-scenario jet vs Taylor oracle " + fmt(worst));

    // Kerr ODE mode jet oracle
    auto ode_law = make_kerr_law(KerrParams::scalar_coeff(1.0, 1.0));
    DataBundle ob;
    ob.u0 = sample_field(g, [](const Vec3&) { return Vec6{0.8, 0.4, 0, 0.2, 0.4, 0}; });
    const InitialJet ojet = compute_jet(*ode_law, ob, 3);
    const auto ooracle = qmxtest::taylor_jet_oracle(1.0, 1.0, ob, 3);
    double oworst = 0.0;
    for (int p = 0; p <= 3; ++p)
        for (int c = 0; c < 6; ++c) {
            const double a = ojet.entries[static_cast<std::size_t>(p)].component(0, c);
            const double b = ooracle[static_cast<std::size_t>(p)].component(0, c);
            oworst = std::max(oworst, std::abs(a - b) / std::max(1.0, std::abs(b)));
        }
    check(oworst <= 1e-9, "ODE-mode jet vs oracle " + fmt(oworst));
    out.details = "polynomial " + fmt(worst) + ", ODE mode " + fmt(oworst) +
                  (out.pass ? "" : " | " + out.details);
    return out;
}

// ---------------------------------------------------------------- criterion 4
Outcome criterion_4() {
    Outcome out;
    Check check{&out};
    const int m = 3;

    GridSpec g;
    g.cells_per_axis = {10, 10, 10};
    g.spacing = {0.1, 0.1, 0.1};
    g.boundary = {BoundaryMode::periodic, BoundaryMode::periodic, BoundaryMode::pec_bottom_open_top};
    auto law = make_kerr_law(KerrParams::scalar_coeff(1.0, 0.3));

    // manufactured compatible data: g := B (jet trace polynomial)
    DataBundle bundle;
    bundle.u0 = sample_field(g, [](const Vec3& x) {
        return Vec6{0.2 * std::sin(2 * M_PI * x[0]), 0.1 * std::cos(2 * M_PI * x[1]), 0.05, 0.1,
                    0.2 * std::sin(2 * M_PI * x[1]), 0.15 * x[2]};
    });
    bundle.g = compatibility_projected_boundary_source(*law, bundle, m);
    const CompatibilityReport good = check_compatibility(*law, bundle, m, 1e-10);
    check(good.pass && good.per_order.size() == 3, "manufactured data compatible at orders 0..2");
    check(good.worst() <= 1e-10, "max residual " + fmt(good.worst()));

    // constructed incompatible scenario: tangential curl trace at the face
    DataBundle bad;
    bad.u0 = sample_field(g, [](const Vec3& x) {
        return Vec6{0, 0, 0, 0, 0, std::sin(2 * M_PI * x[1]) * bump(x[2] / 0.5)};
    });
    const CompatibilityReport flagged = check_compatibility(*law, bad, m, 1e-10);
    check(!flagged.pass, "incompatible data flagged");
    check(flagged.per_order[0].max_residual <= 1e-10, "order 0 clean for the bad data");
    check(flagged.per_order[1].max_residual > 1e-3,
          "order 1 residual " + fmt(flagged.per_order[1].max_residual));
    out.details = "compatible worst " + fmt(good.worst()) + ", incompatible order-1 residual " +
                  fmt(flagged.per_order[1].max_residual) + (out.pass ? "" : " | " + out.details);
    return out;
}

// ---------------------------------------------------------------- criterion 5
Outcome criterion_5() {
    Outcome out;
    Check check{&out};
    std::vector<double> errs;
    for (int n : {16, 32, 64}) {
        ScenarioConfig cfg = preset_config("manufactured");
        cfg.cells = {n, n, n + 1};
        const double h = 1.0 / n;
        cfg.spacing = {h, h, h};
        const ScenarioSetup setup = build_setup(cfg);
        LinearProblem problem;
        problem.coeffs = setup.mms_coeffs;
        problem.data = setup.bundle;
        problem.grid = setup.grid;
        problem.horizon = setup.horizon;
        const auto res = solve_linear(problem, setup.stepper, SolveOptions{0, false, {}});
        check(!res.nonfinite, "solve finite at n=" + std::to_string(n));
        const FieldState exact = setup.mms_exact(res.trajectory.t_end());
        FieldState diff = res.trajectory.back().state;
        diff.axpy(-1.0, exact);
        errs.push_back(sobolev_norm(diff, 0));
    }
    const double o1 = std::log2(errs[0] / errs[1]);
    const double o2 = std::log2(errs[1] / errs[2]);
    check(o1 >= 1.8 && o1 <= 2.2, "order 16->32 = " + fmt(o1));
    check(o2 >= 1.8 && o2 <= 2.2, "order 32->64 = " + fmt(o2));
    out.details = "errors " + fmt(errs[0]) + " / " + fmt(errs[1]) + " / " + fmt(errs[2]) +
                  ", orders " + fmt(o1) + ", " + fmt(o2) + (out.pass ? "" : " | " + out.details);
    return out;
}

// ---------------------------------------------------------------- criterion 6
Outcome criterion_6() {
    Outcome out;
    Check check{&out};
    std::vector<double> growth, change;
    for (int level = 0; level < 2; ++level) {
        const int nz = level == 0 ? 105 : 209;
        GridSpec g;
        g.cells_per_axis = {4, 4, nz};
        const double h = level == 0 ? 1.0 / 32.0 : 1.0 / 64.0;
        g.spacing = {0.25, 0.25, h};
        g.boundary = {BoundaryMode::periodic, BoundaryMode::periodic,
                      BoundaryMode::pec_bottom_open_top};
        LinearProblem problem;
        problem.coeffs = FrozenCoefficients::vacuum();
        problem.grid = g;
        problem.horizon = 0.8;
        problem.data.u0 = sample_field(g, [](const Vec3& x) {
            const double v = bump((x[2] - 0.5) / 0.12);
            return Vec6{v, 0, 0, 0, -v, 0};
        });
        StepperConfig cfg;
        cfg.dissipation_coeff = 0.0;  // dissipation off for the energy test
        SolveOptions opts;
        opts.store_every = 0;
        opts.record_energy = true;
        const auto res = solve_linear(problem, cfg, opts);
        check(!res.nonfinite, "bounce finite");
        growth.push_back(std::max(0.0, res.energy.max_growth_rate()));
        change.push_back(std::abs(res.energy.energy.back() - res.energy.energy.front()) /
                         res.energy.energy.front());
    }
    check(change[0] <= 0.01, "total energy change (h) " + fmt(change[0]));
    check(change[1] <= 0.01, "total energy change (h/2) " + fmt(change[1]));
    // measured per-step growth constants agree within 30% (with an absolute
    // floor so two conservative runs compare as stable-at-zero)
    const double floor_c = 1e-3;
    const double c0 = std::max(growth[0], floor_c), c1 = std::max(growth[1], floor_c);
    check(std::abs(c0 - c1) <= 0.3 * std::max(c0, c1),
          "growth constants " + fmt(growth[0]) + " vs " + fmt(growth[1]));
    out.details = "energy change " + fmt(change[0]) + " / " + fmt(change[1]) +
                  ", growth constants " + fmt(growth[0]) + " / " + fmt(growth[1]) +
                  (out.pass ? "" : " | " + out.details);
    return out;
}

// ---------------------------------------------------------------- criterion 7
Outcome criterion_7() {
    Outcome out;
    Check check{&out};

    // analytically divergence-free Gaussian fields (smooth enough that the
    // sampled truncation residual is in its h^2 asymptotic regime at 16^3)
    auto gaussian_curl = [](const Vec3& x, const Vec3& c, double w, double amp) {
        const Vec3 r{x[0] - c[0], x[1] - c[1], x[2] - c[2]};
        const double g = std::exp(-(r[0] * r[0] + r[1] * r[1] + r[2] * r[2]) / (w * w));
        const double f = -2.0 / (w * w) * g * amp * w;
        return Vec3{f * r[1], -f * r[0], 0.0};
    };

    auto run_divergence = [&](double vartheta, double conductivity, int n) {
        GridSpec g;
        g.cells_per_axis = {n, n, n};
        const double h = 1.25 / n;
        g.spacing = {h, h, h};
        g.origin = {-0.625, -0.625, -0.625};
        auto law = make_kerr_law(KerrParams::scalar_coeff(vartheta, conductivity));
        DataBundle bundle;
        const double amp = vartheta > 0.0 ? 0.4 : 1.0;
        bundle.u0 = sample_field(g, [&](const Vec3& x) {
            const Vec3 e = gaussian_curl(x, Vec3{0, 0, 0}, 0.18, amp);
            const Vec3 hh = gaussian_curl(x, Vec3{0.05, -0.05, 0}, 0.2, 0.5 * amp);
            return Vec6{e[0], e[1], e[2], hh[0], hh[1], hh[2]};
        });
        PicardConfig pc;
        pc.slab_width = 0.05;
        StepperConfig sc;
        const SolveOutcome sol = continue_maximal(*law, bundle, 3, pc, sc, 0.1, true);
        DivergenceReport rep;
        if (sol.status == SolveStatus::horizon_reached)
            rep = divergence_check(*law, sol.trajectory, bundle);
        return std::make_pair(sol.status, rep);
    };

    // vacuum run: both residuals stay near their initial discretization size
    const auto [vst, vrep] = run_divergence(0.0, 0.0, 20);
    check(vst == SolveStatus::horizon_reached, "vacuum run reaches the horizon");
    check(vrep.initial_div_b_l2 > 0.0, "vacuum initial div B is a genuine discretization residual");
    check(vrep.max_div_b_l2() <= 10.0 * vrep.initial_div_b_l2,
          "vacuum div B within 10x initial: " + fmt(vrep.max_div_b_l2()) + " vs " +
              fmt(vrep.initial_div_b_l2));
    // rho is derived from div D(u0), so that residual starts at exactly zero;
    // the same-grid div B truncation sets the discretization scale
    check(vrep.max_div_d_minus_rho_l2() <= 10.0 * vrep.initial_div_b_l2,
          "vacuum div D - rho within 10x the discretization scale");

    // Kerr run at two resolutions: bound plus refinement order of the drift
    const auto [k1st, k1] = run_divergence(1.0, 0.5, 16);
    const auto [k2st, k2] = run_divergence(1.0, 0.5, 32);
    check(k1st == SolveStatus::horizon_reached && k2st == SolveStatus::horizon_reached,
          "Kerr runs reach the horizon");
    check(k1.max_div_b_l2() <= 10.0 * std::max(k1.initial_div_b_l2, 1e-12),
          "Kerr div B within 10x initial");
    check(k2.max_div_d_minus_rho_l2() <= 10.0 * std::max(k2.initial_div_b_l2, 1e-12),
          "Kerr div D - rho within 10x the discretization scale");
    const double drift1 = k1.max_div_d_minus_rho_l2();
    const double drift2 = k2.max_div_d_minus_rho_l2();
    const double order = std::log2(drift1 / drift2);
    check(order >= 1.8, "drift refinement order " + fmt(order));
    out.details = "vacuum divB " + fmt(vrep.max_div_b_l2()) + " (init " +
                  fmt(vrep.initial_div_b_l2) + "), Kerr drift order " + fmt(order) +
                  (out.pass ? "" : " | " + out.details);
    return out;
}

// ---------------------------------------------------------------- criterion 8
Outcome criterion_8() {
    Outcome out;
    Check check{&out};
    const ScenarioSetup setup = build_setup(preset_config("kerr_pulse"));

    PicardConfig pc = setup.picard;
    const SlabResult full = picard_slab(*setup.law, setup.bundle, setup.m, pc, setup.stepper);
    check(full.status == SolveStatus::converged, "slab converges");
    check(full.report.iterations <= 15,
          "iterations " + std::to_string(full.report.iterations) + " <= 15");
    check(full.report.contraction_ratio <= 0.75,
          "contraction ratio " + fmt(full.report.contraction_ratio));

    PicardConfig half = pc;
    half.slab_width = 0.5 * pc.slab_width;
    const SlabResult halved = picard_slab(*setup.law, setup.bundle, setup.m, half, setup.stepper);
    check(halved.status == SolveStatus::converged, "half-tau slab converges");
    check(halved.report.contraction_ratio < full.report.contraction_ratio,
          "ratio decreases when tau is halved: " + fmt(halved.report.contraction_ratio) + " vs " +
              fmt(full.report.contraction_ratio));

    const SolveOutcome sol = continue_maximal(*setup.law, setup.bundle, setup.m, pc, setup.stepper,
                                              setup.horizon);
    check(sol.status == SolveStatus::horizon_reached, "full horizon reached");
    const double resid = nonlinear_residual(*setup.law, setup.bundle, sol.trajectory);
    const double h = setup.grid.spacing[0];
    const double dt = setup.stepper.max_dt(setup.grid, setup.law->eta());
    const double budget = 1e-6 + 10.0 * (h * h + dt * dt * dt * dt);
    check(resid <= budget, "nonlinear residual " + fmt(resid) + " <= " + fmt(budget));
    out.details = "iterations " + std::to_string(full.report.iterations) + ", ratio " +
                  fmt(full.report.contraction_ratio) + " -> " +
                  fmt(halved.report.contraction_ratio) + ", residual " + fmt(resid) +
                  (out.pass ? "" : " | " + out.details);
    return out;
}

// ---------------------------------------------------------------- criterion 9
Outcome criterion_9() {
    Outcome out;
    Check check{&out};
    const ScenarioSetup setup = build_setup(preset_config("kerr_pulse"));
    PicardConfig pc = setup.picard;

    const SlabResult a = picard_slab(*setup.law, setup.bundle, setup.m, pc, setup.stepper);
    const FieldState shape = sample_field(setup.grid, [](const Vec3& x) {
        const Vec3 e = curl_bump(x, Vec3{0.1, -0.1, 0.5}, 0.3, 5.0);
        return Vec6{e[0], e[1], e[2], 0.5, 0, 0};
    });
    const SlabResult b = picard_slab(*setup.law, setup.bundle, setup.m, pc, setup.stepper, &shape);
    check(a.status == SolveStatus::converged && b.status == SolveStatus::converged,
          "both seeds converge");
    const double d = gm_distance(a.trajectory, b.trajectory, 0, 0.0);
    check(d <= 1e-8, "seed-independence distance " + fmt(d));
    out.details = "G_0 distance between seeds " + fmt(d) + (out.pass ? "" : " | " + out.details);
    return out;
}

// --------------------------------------------------------------- criterion 10
Outcome criterion_10() {
    Outcome out;
    Check check{&out};

    auto cone_run = [&](double vartheta) {
        ScenarioConfig cfg = preset_config("cone_check");
        if (vartheta > 0.0) {
            cfg.vartheta = {vartheta};
            cfg.amplitude = 0.25;
        }
        const ScenarioSetup setup = build_setup(cfg);
        const SolveOutcome sol = continue_maximal(*setup.law, setup.bundle, setup.m, setup.picard,
                                                  setup.stepper, setup.horizon);
        return std::make_pair(sol, setup);
    };

    const auto [vac, vsetup] = cone_run(0.0);
    check(vac.status == SolveStatus::horizon_reached, "vacuum cone run finishes");
    const ConeReport vrep = cone_support_check(vac.trajectory, vsetup.cone, 1e-6);
    check(vrep.pass, "vacuum forward cone at 1e-6 (worst " + fmt(vrep.worst()) + ")");

    ConeSpec wrong = vsetup.cone;
    wrong.speed = 0.2;
    const ConeReport neg = cone_support_check(vac.trajectory, wrong, 1e-6);
    check(!neg.pass, "negative control (speed 0.2) fails as expected");

    const auto [kerr, ksetup] = cone_run(1.0);
    check(kerr.status == SolveStatus::horizon_reached, "Kerr cone run finishes");
    const ConeReport krep = cone_support_check(kerr.trajectory, ksetup.cone, 1e-6);
    check(krep.pass, "Kerr forward cone at 1e-6 (worst " + fmt(krep.worst()) + ")");

    out.details = "vacuum worst " + fmt(vrep.worst()) + ", Kerr worst " + fmt(krep.worst()) +
                  ", negative control worst " + fmt(neg.worst()) +
                  (out.pass ? "" : " | " + out.details);
    return out;
}

// --------------------------------------------------------------- criterion 11
Outcome criterion_11() {
    Outcome out;
    Check check{&out};

    // Kerr sweep
    {
        const ScenarioSetup setup = build_setup(preset_config("continuity_sweep"));
        const ContinuousDependenceReport rep = continuous_dependence_experiment(
            *setup.law, setup.bundle, setup.m, setup.continuity_direction, setup.continuity_deltas,
            setup.picard, setup.stepper, setup.horizon);
        check(!rep.aborted, "Kerr sweep completes: " + rep.message);
        if (!rep.aborted) {
            const double spread = rep.max_pair_spread();
            check(spread <= 1.25, "Kerr ratio spread " + fmt(spread));
            out.details = "Kerr ratios";
            for (double r : rep.ratios) out.details += " " + fmt(r);
        }
    }

    // vacuum sweep: exact linearity
    {
        ScenarioConfig cfg = preset_config("continuity_sweep");
        cfg.vartheta = {0.0};
        const ScenarioSetup setup = build_setup(cfg);
        const ContinuousDependenceReport rep = continuous_dependence_experiment(
            *setup.law, setup.bundle, setup.m, setup.continuity_direction, setup.continuity_deltas,
            setup.picard, setup.stepper, setup.horizon);
        check(!rep.aborted, "vacuum sweep completes: " + rep.message);
        if (!rep.aborted) {
            double worst = 0.0;
            for (std::size_t i = 0; i + 1 < rep.ratios.size(); ++i)
                worst = std::max(worst,
                                 std::abs(rep.ratios[i] - rep.ratios[i + 1]) / rep.ratios[i]);
            check(worst <= 1e-8, "vacuum linearity spread " + fmt(worst));
            out.details += "; vacuum spread " + fmt(worst);
        }
    }
    if (!out.pass) out.details += " | failures recorded";
    return out;
}

// --------------------------------------------------------------- criterion 12
Outcome criterion_12() {
    Outcome out;
    Check check{&out};
    ScenarioConfig cfg = preset_config("kerr_ode_blowup");
    const auto dir = std::filesystem::temp_directory_path() / "qmx_acceptance_blowup";
    std::filesystem::remove_all(dir);
    cfg.directory = dir.string();

    const ScenarioSetup setup = build_setup(cfg);
    const auto ref = qmxtest::integrate_uniform_mode(*setup.law, setup.bundle.u0.at(0), 0.0,
                                                     cfg.horizon, 1e-5);
    const double t_ref = ref.crossing_time(cfg.lipschitz_threshold);
    check(t_ref > 0.0, "reference ODE crosses the threshold");

    const RunResult rr = run_scenario(cfg, true);
    check(rr.exit_code == 2, "exit code " + std::to_string(rr.exit_code) + " == 2 (blow-up)");
    check(std::filesystem::exists(dir / "crossing_time.txt"), "crossing time written");
    double t_got = -1.0;
    {
        std::ifstream is(dir / "crossing_time.txt");
        is >> t_got;
    }
    check(std::abs(t_got - t_ref) <= 0.1 * t_ref,
          "crossing " + fmt(t_got) + " within 10% of reference " + fmt(t_ref));
    std::filesystem::remove_all(dir);
    out.details = "reference crossing " + fmt(t_ref) + ", solver crossing " + fmt(t_got) +
                  (out.pass ? "" : " | " + out.details);
    return out;
}

struct Criterion {
    int id;
    const char* title;
    std::function<Outcome()> run;
};

const std::vector<Criterion>& criteria() {
    static const std::vector<Criterion> all = {
        {1, "Jacobian and derivative oracles", criterion_1},
        {2, "higher-order chain rule equivalence", criterion_2},
        {3, "initial-jet correctness", criterion_3},
        {4, "compatibility checker", criterion_4},
        {5, "linear manufactured-solution convergence", criterion_5},
        {6, "discrete energy inequality", criterion_6},
        {7, "divergence preservation", criterion_7},
        {8, "Picard contraction and fixed point", criterion_8},
        {9, "uniqueness surrogate", criterion_9},
        {10, "finite propagation speed", criterion_10},
        {11, "continuous dependence", criterion_11},
        {12, "blow-up monitoring", criterion_12},
    };
    return all;
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

    int failures = 0;
    for (const auto& c : criteria()) {
        if (!selected.empty() && !selected.count(c.id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out.pass = false;
            out.details = std::string("exception: ") + e.what();
        }
        const auto t1 = std::chrono::steady_clock::now();
        const double secs =
            std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count() / 1000.0;
        std::printf("[%s] criterion %2d: %s (%.1fs) - %s\n", out.pass ? "PASS" : "FAIL", c.id,
                    c.title, secs, out.details.c_str());
        std::fflush(stdout);
        if (!out.pass) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
