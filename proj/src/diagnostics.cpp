#include "qmx/diagnostics.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

#include "qmx/norms.hpp"
#include "qmx/stencil.hpp"

namespace qmx {

void ConeSpec::validate() const {
    if (!(radius > 0.0)) throw std::invalid_argument("cone: radius must be positive");
    if (!(speed > 0.0)) throw std::invalid_argument("cone: speed must be positive");
}

double propagation_speed_bound(double eta_floor) { return 3.0 / eta_floor; }

double propagation_speed_bound(const MaterialLaw& law) {
    return propagation_speed_bound(law.eta());
}

namespace {

bool sphere_inside_grid(const GridSpec& grid, const Vec3& c, double r) {
    for (int a = 0; a < 3; ++a) {
        const double lo = grid.origin[a];
        // a periodic axis covers the full period cell [origin, origin + n h)
        const int n = grid.cells_per_axis[a];
        const double hi = grid.origin[a] + grid.spacing[a] * (grid.periodic(a) ? n : n - 1);
        if (c[a] - r < lo - 1e-12 || c[a] + r > hi + 1e-12) return false;
    }
    return true;
}

}  // namespace

ConeReport cone_support_check(const Trajectory& traj, const ConeSpec& cone, double tolerance) {
    cone.validate();
    if (traj.empty()) throw std::invalid_argument("cone check: empty trajectory");
    const GridSpec& grid = traj.grid();
    const double t_ref = traj.t_begin();
    const double margin = std::max({grid.spacing[0], grid.spacing[1], grid.spacing[2]});

    // configuration check: the cone must stay on the grid over the horizon
    const double t_span = traj.t_end() - t_ref;
    if (cone.direction == ConeSpec::Direction::forward) {
        if (!sphere_inside_grid(grid, cone.apex_center, cone.radius + cone.speed * t_span + margin))
            throw std::invalid_argument("cone check: forward cone leaves the grid before the horizon");
    } else {
        if (!sphere_inside_grid(grid, cone.apex_center, cone.radius))
            throw std::invalid_argument("cone check: backward cone does not fit the grid");
    }

    ConeReport rep;
    rep.tolerance = tolerance;
    for (std::size_t s = 0; s < traj.size(); ++s) {
        const auto& sample = traj.samples()[s];
        const double dt = sample.t - t_ref;
        double rad;  // node set boundary with one-cell margin
        bool inside_set;
        if (cone.direction == ConeSpec::Direction::backward) {
            rad = cone.radius - cone.speed * dt - margin;
            inside_set = true;
        } else {
            rad = cone.radius + cone.speed * dt + margin;
            inside_set = false;
        }

        double worst = 0.0;
        std::size_t count = 0;
        for (int k = 0; k < grid.nz(); ++k)
            for (int j = 0; j < grid.ny(); ++j)
                for (int i = 0; i < grid.nx(); ++i) {
                    const Vec3 x = grid.position(i, j, k);
                    const double d = std::sqrt((x[0] - cone.apex_center[0]) * (x[0] - cone.apex_center[0]) +
                                               (x[1] - cone.apex_center[1]) * (x[1] - cone.apex_center[1]) +
                                               (x[2] - cone.apex_center[2]) * (x[2] - cone.apex_center[2]));
                    const bool in_check_set = inside_set ? (d < rad) : (d > rad);
                    if (!in_check_set) continue;
                    ++count;
                    const Vec6 u = sample.state.at(grid.node_index(i, j, k));
                    for (int c = 0; c < 6; ++c) worst = std::max(worst, std::abs(u[c]));
                }
        rep.t.push_back(sample.t);
        rep.max_violation.push_back(worst);
        rep.checked_nodes.push_back(count);
        if (s == 0) {
            rep.initial_violation = worst;
            if (worst > tolerance)
                throw std::invalid_argument(
                    "cone check: data support violates the cone at the initial time");
        }
        if (worst > tolerance) rep.pass = false;
    }
    return rep;
}

std::vector<double> initial_charge_density(const MaterialLaw& law, const DataBundle& bundle) {
    if (bundle.rho0) return *bundle.rho0;
    const GridSpec& grid = bundle.u0.grid();
    VectorField d;
    const std::size_t n = grid.node_count();
    for (auto& c : d.comp) c.assign(n, 0.0);
    for (int k = 0; k < grid.nz(); ++k)
        for (int j = 0; j < grid.ny(); ++j)
            for (int i = 0; i < grid.nx(); ++i) {
                const std::size_t node = grid.node_index(i, j, k);
                const Vec6 th = law.theta(grid.position(i, j, k), bundle.u0.at(node));
                for (int c = 0; c < 3; ++c) d.comp[static_cast<std::size_t>(c)][node] = th[c];
            }
    return discrete_div(grid, d);
}

double DivergenceReport::max_div_b_l2() const {
    double m = 0.0;
    for (double v : div_b_l2) m = std::max(m, v);
    return m;
}
double DivergenceReport::max_div_d_minus_rho_l2() const {
    double m = 0.0;
    for (double v : div_d_minus_rho_l2) m = std::max(m, v);
    return m;
}

DivergenceReport divergence_check(const MaterialLaw& law, const Trajectory& traj,
                                  const DataBundle& bundle) {
    DivergenceReport rep;
    const GridSpec& grid = traj.grid();
    const std::size_t n = grid.node_count();
    const std::vector<double> rho0 = initial_charge_density(law, bundle);

    for (std::size_t s = 0; s < traj.size(); ++s) {
        const auto& sample = traj.samples()[s];
        VectorField df, bf;
        for (auto& c : df.comp) c.assign(n, 0.0);
        for (auto& c : bf.comp) c.assign(n, 0.0);
        for (int k = 0; k < grid.nz(); ++k)
            for (int j = 0; j < grid.ny(); ++j)
                for (int i = 0; i < grid.nx(); ++i) {
                    const std::size_t node = grid.node_index(i, j, k);
                    const Vec6 th = law.theta(grid.position(i, j, k), sample.state.at(node));
                    for (int c = 0; c < 3; ++c) {
                        df.comp[static_cast<std::size_t>(c)][node] = th[c];
                        bf.comp[static_cast<std::size_t>(c)][node] = th[c + 3];
                    }
                }
        const auto div_d = discrete_div(grid, df);
        const auto div_b = discrete_div(grid, bf);
        const std::vector<double>& rho = sample.rho ? *sample.rho : rho0;

        std::vector<double> resid(n);
        for (std::size_t i = 0; i < n; ++i) resid[i] = div_d[i] - rho[i];

        rep.t.push_back(sample.t);
        rep.div_b_l2.push_back(l2_norm(grid, div_b));
        rep.div_b_max.push_back(max_norm(div_b));
        rep.div_d_minus_rho_l2.push_back(l2_norm(grid, resid));
        rep.div_d_minus_rho_max.push_back(max_norm(resid));
        if (s == 0) {
            rep.initial_div_b_l2 = rep.div_b_l2.back();
            rep.initial_div_d_minus_rho_l2 = rep.div_d_minus_rho_l2.back();
        }
    }
    return rep;
}

TruncationCheck truncation_face_check(const FieldState& u0, double speed, double horizon,
                                      double support_level) {
    const GridSpec& grid = u0.grid();
    TruncationCheck check;
    check.cone_reach = speed * horizon;
    check.support_gap = std::numeric_limits<double>::infinity();

    // inert faces per axis: both ends of an open axis, the top of a PEC axis
    for (int a = 0; a < 3; ++a) {
        const BoundaryMode mode = grid.boundary[static_cast<std::size_t>(a)];
        if (mode == BoundaryMode::periodic) continue;
        const bool low_inert = mode == BoundaryMode::open;
        const double lo = grid.origin[a];
        const double hi = grid.origin[a] + grid.spacing[a] * (grid.cells_per_axis[a] - 1);
        for (int k = 0; k < grid.nz(); ++k)
            for (int j = 0; j < grid.ny(); ++j)
                for (int i = 0; i < grid.nx(); ++i) {
                    const Vec6 u = u0.at(grid.node_index(i, j, k));
                    double mag = 0.0;
                    for (int c = 0; c < 6; ++c) mag = std::max(mag, std::abs(u[c]));
                    if (mag <= support_level) continue;
                    const double x = grid.position(i, j, k)[a];
                    check.support_gap = std::min(check.support_gap, hi - x);
                    if (low_inert) check.support_gap = std::min(check.support_gap, x - lo);
                }
    }
    check.ok = check.cone_reach < check.support_gap;
    return check;
}

double measured_support_speed(const Trajectory& traj, const Vec3& center, double level) {
    const GridSpec& grid = traj.grid();
    std::vector<double> ts, rs;
    for (const auto& sample : traj.samples()) {
        double r = 0.0;
        for (int k = 0; k < grid.nz(); ++k)
            for (int j = 0; j < grid.ny(); ++j)
                for (int i = 0; i < grid.nx(); ++i) {
                    const Vec6 u = sample.state.at(grid.node_index(i, j, k));
                    double mag = 0.0;
                    for (int c = 0; c < 6; ++c) mag = std::max(mag, std::abs(u[c]));
                    if (mag <= level) continue;
                    const Vec3 x = grid.position(i, j, k);
                    const double d = std::sqrt((x[0] - center[0]) * (x[0] - center[0]) +
                                               (x[1] - center[1]) * (x[1] - center[1]) +
                                               (x[2] - center[2]) * (x[2] - center[2]));
                    r = std::max(r, d);
                }
        ts.push_back(sample.t);
        rs.push_back(r);
    }
    // least-squares slope of radius vs time
    const std::size_t n = ts.size();
    if (n < 2) return 0.0;
    double st = 0, sr = 0, stt = 0, str = 0;
    for (std::size_t i = 0; i < n; ++i) {
        st += ts[i];
        sr += rs[i];
        stt += ts[i] * ts[i];
        str += ts[i] * rs[i];
    }
    const double den = n * stt - st * st;
    return den > 0.0 ? (n * str - st * sr) / den : 0.0;
}

BoundaryAnalyticSource compatibility_projected_boundary_source(const MaterialLaw& law,
                                                               const DataBundle& bundle, int m) {
    const GridSpec& grid = bundle.u0.grid();
    if (!grid.has_pec_face()) return BoundaryAnalyticSource{};

    const InitialJet jet = compute_jet(law, bundle, m - 1);
    const auto ops = build_boundary_operators(grid.pec_normal);
    const double t0 = bundle.t0;

    // face traces B S_p for p = 0..m-1
    auto traces = std::make_shared<std::vector<std::vector<std::array<double, 2>>>>();
    const std::size_t face_n = static_cast<std::size_t>(grid.nx()) * static_cast<std::size_t>(grid.ny());
    for (int p = 0; p <= m - 1; ++p) {
        std::vector<std::array<double, 2>> tr(face_n);
        for (int j = 0; j < grid.ny(); ++j)
            for (int i = 0; i < grid.nx(); ++i) {
                const std::size_t node = grid.node_index(i, j, 0);  // k = 0: node index == face index
                tr[node] = ops.apply_B(jet.entries[static_cast<std::size_t>(p)].at(node));
            }
        traces->push_back(std::move(tr));
    }

    const int nx = grid.nx();
    const Vec3 org = grid.origin;
    const Vec3 sp = grid.spacing;
    BoundaryAnalyticSource g;
    g.eval = [traces, t0, nx, org, sp](int order, double t, const Vec3& x) -> Vec3 {
        // face index from the position (nodes lie exactly on the lattice)
        const int i = static_cast<int>(std::lround((x[0] - org[0]) / sp[0]));
        const int j = static_cast<int>(std::lround((x[1] - org[1]) / sp[1]));
        const std::size_t f = static_cast<std::size_t>(i) + static_cast<std::size_t>(nx) * static_cast<std::size_t>(j);
        const double tau = t - t0;
        double v0 = 0.0, v1 = 0.0;
        double pw = 1.0;  // tau^(p-order)/(p-order)!
        for (std::size_t p = static_cast<std::size_t>(order); p < traces->size(); ++p) {
            v0 += (*traces)[p][f][0] * pw;
            v1 += (*traces)[p][f][1] * pw;
            pw *= tau / static_cast<double>(p - static_cast<std::size_t>(order) + 1);
        }
        return Vec3{v0, v1, 0.0};
    };
    return g;
}

double ContinuousDependenceReport::max_pair_spread() const {
    double worst = 1.0;
    for (std::size_t i = 0; i + 1 < ratios.size(); ++i) {
        if (ratios[i + 1] <= 0.0) continue;
        const double q = ratios[i] / ratios[i + 1];
        worst = std::max(worst, std::max(q, 1.0 / q));
    }
    return worst;
}

ContinuousDependenceReport continuous_dependence_experiment(
    const MaterialLaw& law, const DataBundle& bundle, int m, const FieldState& direction,
    const std::vector<double>& deltas, const PicardConfig& pcfg, const StepperConfig& scfg,
    double horizon) {
    ContinuousDependenceReport rep;
    rep.deltas = deltas;

    const double vnorm = sobolev_norm(direction, std::min(m, 3));
    if (!(vnorm > 0.0)) {
        rep.aborted = true;
        rep.message = "perturbation direction has zero H^m norm";
        return rep;
    }

    // base run with the projected boundary source
    DataBundle base = bundle;
    base.g = compatibility_projected_boundary_source(law, base, m);
    const SolveOutcome base_run = continue_maximal(law, base, m, pcfg, scfg, horizon);
    if (base_run.status != SolveStatus::horizon_reached) {
        rep.aborted = true;
        rep.message = std::string("base run terminated early: ") + to_string(base_run.status);
        return rep;
    }

    for (double d : deltas) {
        DataBundle pert = bundle;
        pert.u0 = bundle.u0;
        pert.u0.axpy(d, direction);
        pert.g = compatibility_projected_boundary_source(law, pert, m);
        const SolveOutcome run = continue_maximal(law, pert, m, pcfg, scfg, horizon);
        if (run.status != SolveStatus::horizon_reached) {
            rep.aborted = true;
            rep.message = std::string("perturbed run terminated early: ") + to_string(run.status);
            return rep;
        }
        const double num = gm_distance(run.trajectory, base_run.trajectory, m - 1, 0.0);
        rep.ratios.push_back(num / (d * vnorm));
        const double numw = gm_distance(run.trajectory, base_run.trajectory, m - 1, pcfg.gamma);
        rep.weighted_ratios.push_back(numw / (d * vnorm));
    }
    return rep;
}

}  // namespace qmx
