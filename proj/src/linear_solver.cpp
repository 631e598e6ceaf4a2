#include "qmx/linear_solver.hpp"

#include <cmath>
#include <stdexcept>

#include "qmx/norms.hpp"
#include "qmx/stencil.hpp"
#include "qmx/util.hpp"

namespace qmx {

FrozenCoefficients FrozenCoefficients::constants(const Mat6& a0, const Mat6& d, double eta) {
    FrozenCoefficients c;
    c.const_A0 = a0;
    c.const_D = d;
    c.eta_floor = eta;
    return c;
}

FrozenCoefficients FrozenCoefficients::from_law(std::shared_ptr<const MaterialLaw> law,
                                                std::shared_ptr<const Trajectory> frozen) {
    FrozenCoefficients c;
    c.law = std::move(law);
    c.frozen = std::move(frozen);
    c.eta_floor = c.law->eta();
    return c;
}

FrozenCoefficients FrozenCoefficients::vacuum() {
    return constants(Mat6::identity(), Mat6{}, 1.0);
}

bool FrozenCoefficients::identity_A0() const {
    if (law) return law->chi_is_identity();
    if (!const_A0) return false;
    const Mat6 diff = *const_A0 - Mat6::identity();
    return diff.max_abs() == 0.0;
}

bool FrozenCoefficients::zero_D() const {
    if (law) {
        if (!law->sigma_is_state_independent()) return false;
        const Mat3 s = law->sigma1(Vec3{}, Vec6{});
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                if (s.m[i][j] != 0.0) return false;
        return true;
    }
    return const_D && const_D->max_abs() == 0.0;
}

Mat6 FrozenCoefficients::A0(double t, std::size_t node, const Vec3& x) const {
    if (const_A0) return *const_A0;
    Vec6 y = frozen->interpolate(t, node);
    return law->chi(x, y);
}

Mat6 FrozenCoefficients::D(double t, std::size_t node, const Vec3& x) const {
    if (const_D) return *const_D;
    Vec6 y = frozen->interpolate(t, node);
    return law->sigma(x, y);
}

void StepperConfig::validate() const {
    if (!(cfl > 0.0 && cfl <= 1.0)) throw std::invalid_argument("stepper: cfl must lie in (0, 1]");
    if (!(penalty_strength >= 1.0)) throw std::invalid_argument("stepper: penalty_strength must be >= 1");
    if (rk_stages != 4) throw std::invalid_argument("stepper: rk_stages is fixed to 4");
    if (dissipation_coeff < 0.0) throw std::invalid_argument("stepper: dissipation_coeff must be >= 0");
}

double StepperConfig::max_dt(const GridSpec& grid, double eta_floor) const {
    const double hmin = std::min({grid.spacing[0], grid.spacing[1], grid.spacing[2]});
    return cfl * hmin * eta_floor / 3.0;
}

void LinearProblem::validate() const {
    grid.validate();
    if (!(horizon > 0.0)) throw std::invalid_argument("linear problem: horizon must be positive");
    if (!grid.has_pec_face() && !data.g.is_zero())
        throw std::invalid_argument("linear problem: boundary data given but the grid has no PEC face");
    if (data.u0.grid().node_count() != grid.node_count())
        throw std::invalid_argument("linear problem: initial state grid mismatch");
}

double EnergyRecord::max_growth_rate() const {
    double m = 0.0;
    for (double r : ratio) m = std::max(m, r);
    return m;
}

double EnergyRecord::cumulative_face_work() const {
    double s = 0.0;
    for (double w : face_work) s += w;
    return s;
}

FieldState sample_source(const GridSpec& grid, const TimeAnalyticSource& f, int order, double t) {
    FieldState out(grid, t);
    if (f.is_zero()) return out;
    for (int k = 0; k < grid.nz(); ++k)
        for (int j = 0; j < grid.ny(); ++j)
            for (int i = 0; i < grid.nx(); ++i)
                out.set(grid.node_index(i, j, k), f(order, t, grid.position(i, j, k)));
    return out;
}

namespace {

// nonzero entries (row, col, weight) of J_axis
struct JEntry {
    int r, c;
    double w;
};
constexpr JEntry kJ[3][2] = {
    {{1, 2, -1.0}, {2, 1, 1.0}},
    {{0, 2, 1.0}, {2, 0, -1.0}},
    {{0, 1, -1.0}, {1, 0, 1.0}},
};

struct Workspace {
    std::array<std::vector<double>, 6> comp;
    std::vector<double> dbuf;
    BoundaryOperators ops;
    bool has_ops = false;

    void prepare(const GridSpec& grid) {
        const std::size_t n = grid.node_count();
        for (auto& c : comp)
            if (c.size() != n) c.assign(n, 0.0);
        if (dbuf.size() != n) dbuf.assign(n, 0.0);
        if (grid.has_pec_face() && !has_ops) {
            ops = build_boundary_operators(grid.pec_normal);
            has_ops = true;
        }
    }
};

void fourth_difference_accumulate(const GridSpec& grid, const std::vector<double>& f, int axis,
                                  double coeff, std::vector<double>& out6, int comp) {
    const int a = axis - 1;
    const int n = grid.cells_per_axis[a];
    if (n < 5) return;
    const int nx = grid.nx(), ny = grid.ny(), nz = grid.nz();
    const bool per = grid.periodic(a);

    auto idx_of = [&](int i, int j, int k) { return grid.node_index(i, j, k); };
    auto apply_line = [&](auto&& at) {
        // at(i) returns the node index for line coordinate i
        const int lo = per ? 0 : 2;
        const int hi = per ? n - 1 : n - 3;
        for (int i = lo; i <= hi; ++i) {
            auto wrap = [&](int q) { return per ? ((q % n) + n) % n : q; };
            const double v = f[at(wrap(i - 2))] - 4.0 * f[at(wrap(i - 1))] + 6.0 * f[at(i)] -
                             4.0 * f[at(wrap(i + 1))] + f[at(wrap(i + 2))];
            out6[at(i) * 6 + static_cast<std::size_t>(comp)] -= coeff * v;
        }
    };

    if (a == 0) {
        for (int k = 0; k < nz; ++k)
            for (int j = 0; j < ny; ++j) apply_line([&](int i) { return idx_of(i, j, k); });
    } else if (a == 1) {
        for (int k = 0; k < nz; ++k)
            for (int i = 0; i < nx; ++i) apply_line([&](int j) { return idx_of(i, j, k); });
    } else {
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) apply_line([&](int k) { return idx_of(i, j, k); });
    }
}

// Shared residual core writing into `out`.
void residual_into(FieldState& out, Workspace& ws, const FieldState& state,
                   const FrozenCoefficients& coeffs, double t, const TimeAnalyticSource& f,
                   const BoundaryAnalyticSource& g, const StepperConfig& cfg) {
    const GridSpec& grid = state.grid();
    const std::size_t n = grid.node_count();
    ws.prepare(grid);

    // contiguous per-component views
    for (int c = 0; c < 6; ++c) {
        const double* src = state.values().data();
        auto& dst = ws.comp[static_cast<std::size_t>(c)];
        for (std::size_t i = 0; i < n; ++i) dst[i] = src[i * 6 + static_cast<std::size_t>(c)];
    }

    // out = f(t)
    if (!f.is_zero()) {
        out = sample_source(grid, f, 0, t);
    } else {
        out = FieldState(grid, t);
    }
    auto& ov = out.values();

    // out -= sum_j A_j d_j u (componentwise curl structure); the flux uses the
    // summation-by-parts closure so the penalized face stays energy-neutral
    for (int axis = 1; axis <= 3; ++axis) {
        for (const JEntry& e : kJ[axis - 1]) {
            // electric rows: out_E[r] += w * d_axis H_c
            sbp_partial_into(grid, ws.comp[static_cast<std::size_t>(e.c + 3)], axis, ws.dbuf);
            for (std::size_t i = 0; i < n; ++i) ov[i * 6 + static_cast<std::size_t>(e.r)] += e.w * ws.dbuf[i];
            // magnetic rows: out_H[r] -= w * d_axis E_c
            sbp_partial_into(grid, ws.comp[static_cast<std::size_t>(e.c)], axis, ws.dbuf);
            for (std::size_t i = 0; i < n; ++i) ov[i * 6 + static_cast<std::size_t>(e.r + 3)] -= e.w * ws.dbuf[i];
        }
    }

    // out -= D u
    if (!coeffs.zero_D()) {
        if (coeffs.const_D) {
            const Mat6 d = *coeffs.const_D;
            parallel_for(0, n, [&](std::size_t lo, std::size_t hi) {
                for (std::size_t i = lo; i < hi; ++i) {
                    const Vec6 du = d.apply(state.at(i));
                    for (int c = 0; c < 6; ++c) ov[i * 6 + static_cast<std::size_t>(c)] -= du[c];
                }
            });
        } else if (coeffs.law->sigma_is_state_independent()) {
            const Mat3 s1 = coeffs.law->sigma1(Vec3{}, Vec6{});
            parallel_for(0, n, [&](std::size_t lo, std::size_t hi) {
                for (std::size_t i = lo; i < hi; ++i) {
                    const Vec6 u = state.at(i);
                    const Vec3 se = s1.apply({u[0], u[1], u[2]});
                    for (int c = 0; c < 3; ++c) ov[i * 6 + static_cast<std::size_t>(c)] -= se[c];
                }
            });
        } else {
            parallel_for(0, n, [&](std::size_t lo, std::size_t hi) {
                for (std::size_t i = lo; i < hi; ++i) {
                    const Vec6 du = coeffs.D(t, i, Vec3{}).apply(state.at(i));
                    for (int c = 0; c < 6; ++c) ov[i * 6 + static_cast<std::size_t>(c)] -= du[c];
                }
            });
        }
    }

    // weak PEC penalty: out -= tau/h3 * C^T (B u - g) on the k = 0 face
    if (grid.has_pec_face()) {
        const double tau = cfg.penalty_strength / grid.spacing[2];
        for (int j = 0; j < grid.ny(); ++j)
            for (int i = 0; i < grid.nx(); ++i) {
                const std::size_t node = grid.node_index(i, j, 0);
                const Vec6 u = state.at(node);
                auto bu = ws.ops.apply_B(u);
                if (!g.is_zero()) {
                    const Vec3 gv = g(0, t, grid.position(i, j, 0));
                    bu[0] -= gv[0];
                    bu[1] -= gv[1];
                }
                // C^T w touches components 3 and 4 with weight 2
                ov[node * 6 + 3] -= tau * 2.0 * bu[0];
                ov[node * 6 + 4] -= tau * 2.0 * bu[1];
            }
    }

    // fourth-difference dissipation
    if (cfg.dissipation_coeff > 0.0) {
        for (int axis = 1; axis <= 3; ++axis) {
            const double coeff = cfg.dissipation_coeff / (16.0 * grid.spacing[axis - 1]);
            for (int c = 0; c < 6; ++c)
                fourth_difference_accumulate(grid, ws.comp[static_cast<std::size_t>(c)], axis, coeff, ov, c);
        }
    }

    // multiply by A0^{-1}
    if (coeffs.identity_A0()) return;
    if (coeffs.constant()) {
        const Ldlt6 f0 = Ldlt6::factor(*coeffs.const_A0);
        if (!f0.ok) throw std::runtime_error("residual: singular constant A0");
        parallel_for(0, n, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t i = lo; i < hi; ++i) {
                const Vec6 r = f0.solve(out.at(i));
                out.set(i, r);
            }
        });
        return;
    }

    // law-backed coefficients: interpolate the frozen state once per node
    std::size_t blo, bhi;
    double bw;
    coeffs.frozen->bracket(t, &blo, &bhi, &bw);
    const FieldState& slo = coeffs.frozen->samples()[blo].state;
    const FieldState& shi = coeffs.frozen->samples()[bhi].state;
    const MaterialLaw& law = *coeffs.law;
    parallel_for(0, n, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            Vec6 y = slo.at(i);
            if (blo != bhi) {
                const Vec6 yh = shi.at(i);
                for (int c = 0; c < 6; ++c) y[c] = (1.0 - bw) * y[c] + bw * yh[c];
            }
            const Mat6 a0 = law.chi(Vec3{}, y);
            const Ldlt6 fct = Ldlt6::factor(a0);
            if (!fct.ok) throw std::runtime_error("residual: singular A0 at a node");
            out.set(i, fct.solve(out.at(i)));
        }
    });
}

double weighted_energy(const FieldState& u, const FrozenCoefficients& coeffs, double t) {
    const GridSpec& grid = u.grid();
    double e = 0.0;
    const bool identity = coeffs.identity_A0();
    std::size_t blo = 0, bhi = 0;
    double bw = 0.0;
    if (!identity && !coeffs.constant()) coeffs.frozen->bracket(t, &blo, &bhi, &bw);
    for (int k = 0; k < grid.nz(); ++k)
        for (int j = 0; j < grid.ny(); ++j)
            for (int i = 0; i < grid.nx(); ++i) {
                const std::size_t node = grid.node_index(i, j, k);
                const Vec6 v = u.at(node);
                double q;
                if (identity) {
                    q = dot(v, v);
                } else if (coeffs.constant()) {
                    q = dot(v, coeffs.const_A0->apply(v));
                } else {
                    q = dot(v, coeffs.A0(t, node, grid.position(i, j, k)).apply(v));
                }
                e += grid.node_weight(i, j, k) * q;
            }
    return e;
}

double face_l2(const GridSpec& grid, const BoundaryAnalyticSource& g, double t) {
    if (!grid.has_pec_face() || g.is_zero()) return 0.0;
    double s = 0.0;
    const double w = grid.spacing[0] * grid.spacing[1];
    for (int j = 0; j < grid.ny(); ++j)
        for (int i = 0; i < grid.nx(); ++i) {
            const Vec3 gv = g(0, t, grid.position(i, j, 0));
            s += w * (gv[0] * gv[0] + gv[1] * gv[1] + gv[2] * gv[2]);
        }
    return std::sqrt(s);
}

double face_work(const GridSpec& grid, const BoundaryOperators& ops, const FieldState& u,
                 const BoundaryAnalyticSource& g, double t) {
    double s = 0.0;
    const double w = grid.spacing[0] * grid.spacing[1];
    for (int j = 0; j < grid.ny(); ++j)
        for (int i = 0; i < grid.nx(); ++i) {
            const std::size_t node = grid.node_index(i, j, 0);
            const Vec6 uv = u.at(node);
            auto bu = ops.apply_B(uv);
            const auto cu = ops.apply_C(uv);
            if (!g.is_zero()) {
                const Vec3 gv = g(0, t, grid.position(i, j, 0));
                bu[0] -= gv[0];
                bu[1] -= gv[1];
            }
            s += w * (cu[0] * bu[0] + cu[1] * bu[1]);
        }
    return s;
}

// -div J at the stage state; J = J0 + sigma1(u) E with J0 = -f_E.
std::vector<double> minus_div_current(const GridSpec& grid, const MaterialLaw& law,
                                      const TimeAnalyticSource& f, const FieldState& u, double t) {
    VectorField jf;
    const std::size_t n = grid.node_count();
    for (auto& c : jf.comp) c.assign(n, 0.0);
    for (int k = 0; k < grid.nz(); ++k)
        for (int j = 0; j < grid.ny(); ++j)
            for (int i = 0; i < grid.nx(); ++i) {
                const std::size_t node = grid.node_index(i, j, k);
                const Vec3 x = grid.position(i, j, k);
                const Vec6 uv = u.at(node);
                Vec3 jj = law.sigma1(x, uv).apply({uv[0], uv[1], uv[2]});
                if (!f.is_zero()) {
                    const Vec6 fv = f(0, t, x);
                    for (int c = 0; c < 3; ++c) jj[c] -= fv[c];  // J0 = -f_E
                }
                for (int c = 0; c < 3; ++c) jf.comp[static_cast<std::size_t>(c)][node] = jj[c];
            }
    auto d = discrete_div(grid, jf);
    for (double& v : d) v = -v;
    return d;
}

}  // namespace

FieldState spatial_residual(const FieldState& state, const FrozenCoefficients& coeffs, double t,
                            const TimeAnalyticSource& f, const BoundaryAnalyticSource& g,
                            const StepperConfig& cfg) {
    Workspace ws;
    FieldState out;
    residual_into(out, ws, state, coeffs, t, f, g, cfg);
    return out;
}

FieldState rk4_step(const FieldState& state, double t, double dt, const LinearProblem& problem,
                    const StepperConfig& cfg, FieldState* stage1) {
    if (dt > cfg.max_dt(state.grid(), problem.coeffs.eta_floor) * (1.0 + 1e-9))
        throw std::invalid_argument("rk4_step: dt violates the CFL bound");
    Workspace ws;
    const auto& f = problem.data.f;
    const auto& g = problem.data.g;
    const auto& coeffs = problem.coeffs;

    FieldState k1, k2, k3, k4;
    residual_into(k1, ws, state, coeffs, t, f, g, cfg);
    FieldState u2 = state;
    u2.axpy(0.5 * dt, k1);
    residual_into(k2, ws, u2, coeffs, t + 0.5 * dt, f, g, cfg);
    FieldState u3 = state;
    u3.axpy(0.5 * dt, k2);
    residual_into(k3, ws, u3, coeffs, t + 0.5 * dt, f, g, cfg);
    FieldState u4 = state;
    u4.axpy(dt, k3);
    residual_into(k4, ws, u4, coeffs, t + dt, f, g, cfg);

    FieldState next = state;
    next.axpy(dt / 6.0, k1);
    next.axpy(dt / 3.0, k2);
    next.axpy(dt / 3.0, k3);
    next.axpy(dt / 6.0, k4);
    next.set_time(t + dt);
    if (stage1) *stage1 = std::move(k1);
    return next;
}

LinearSolveResult solve_linear(const LinearProblem& problem, const StepperConfig& cfg,
                               const SolveOptions& options) {
    cfg.validate();
    problem.validate();
    const GridSpec& grid = problem.grid;
    const std::size_t n = grid.node_count();

    const double dt_max = cfg.max_dt(grid, problem.coeffs.eta_floor);
    const int steps = std::max(std::max(1, options.min_steps),
                               static_cast<int>(std::ceil(problem.horizon / dt_max - 1e-12)));
    const double dt = problem.horizon / steps;

    LinearSolveResult result;
    result.dt = dt;
    result.steps = steps;
    result.trajectory = Trajectory(grid);

    const auto& f = problem.data.f;
    const auto& g = problem.data.g;
    const auto& coeffs = problem.coeffs;
    Workspace ws;

    BoundaryOperators ops;
    if (grid.has_pec_face()) ops = build_boundary_operators(grid.pec_normal);

    // charge quadrature state
    std::vector<double> rho;
    if (options.charge) {
        rho = options.charge->rho0;
        if (rho.size() != n) throw std::invalid_argument("solve_linear: rho0 size mismatch");
    }

    auto record_sample = [&](double t, const FieldState& u, const FieldState& du) {
        TrajectorySample s;
        s.t = t;
        s.state = u;
        s.time_derivative = du;
        if (options.charge) s.rho = rho;
        result.trajectory.append(std::move(s));
    };

    auto record_energy = [&](double t, const FieldState& u, double prev_e, double dt_used) {
        if (!options.record_energy) return 0.0;
        const double e = weighted_energy(u, coeffs, t);
        result.energy.t.push_back(t);
        result.energy.energy.push_back(e);
        double fn = 0.0;
        if (!f.is_zero()) {
            const FieldState fs = sample_source(grid, f, 0, t);
            for (int c = 0; c < 6; ++c) {
                const double v = l2_norm(grid, fs.scalar_component(c));
                fn += v * v;
            }
            fn = std::sqrt(fn);
        }
        result.energy.source_norm.push_back(fn);
        result.energy.boundary_norm.push_back(face_l2(grid, g, t));
        const double r = (dt_used > 0.0 && prev_e > 0.0) ? (e - prev_e) / (dt_used * prev_e) : 0.0;
        result.energy.ratio.push_back(r);
        result.energy.face_work.push_back(grid.has_pec_face() ? face_work(grid, ops, u, g, t) : 0.0);
        return e;
    };

    FieldState u = problem.data.u0;
    u.set_time(problem.data.t0);
    double t = problem.data.t0;

    FieldState k1;
    residual_into(k1, ws, u, coeffs, t, f, g, cfg);
    record_sample(t, u, k1);
    double prev_e = record_energy(t, u, 0.0, 0.0);

    const double brk[4] = {0.0, 0.5, 0.5, 1.0};
    const double bw[4] = {1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0};

    for (int step = 1; step <= steps; ++step) {
        // staged integration, reusing k1 from the sample record
        FieldState k[4];
        k[0] = k1;
        FieldState stage = u;
        std::vector<double> drho;
        if (options.charge) {
            drho.assign(n, 0.0);
            const auto q = minus_div_current(grid, *options.charge->law, f, u, t);
            for (std::size_t i = 0; i < n; ++i) drho[i] += bw[0] * q[i];
        }
        for (int s = 1; s < 4; ++s) {
            stage = u;
            stage.axpy((s == 3 ? dt : 0.5 * dt), k[s - 1]);
            const double ts = t + brk[s] * dt;
            residual_into(k[s], ws, stage, coeffs, ts, f, g, cfg);
            if (options.charge) {
                const auto q = minus_div_current(grid, *options.charge->law, f, stage, ts);
                for (std::size_t i = 0; i < n; ++i) drho[i] += bw[s] * q[i];
            }
        }
        u.axpy(dt / 6.0, k[0]);
        u.axpy(dt / 3.0, k[1]);
        u.axpy(dt / 3.0, k[2]);
        u.axpy(dt / 6.0, k[3]);
        t = problem.data.t0 + step * (problem.horizon / steps);
        u.set_time(t);
        if (options.charge)
            for (std::size_t i = 0; i < n; ++i) rho[i] += dt * drho[i];

        if (!u.finite()) {
            result.nonfinite = true;
            // record the last good level only
            return result;
        }

        residual_into(k1, ws, u, coeffs, t, f, g, cfg);
        const bool store = (options.store_every > 0 && step % options.store_every == 0) || step == steps;
        if (store) record_sample(t, u, k1);
        prev_e = options.record_energy ? record_energy(t, u, prev_e, dt) : 0.0;
    }
    return result;
}

}  // namespace qmx
