#include "qmx/initial_data.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "qmx/faa_di_bruno.hpp"
#include "qmx/stencil.hpp"

namespace qmx {

std::vector<Mat6> compute_Mkp(const MaterialLaw& law, const FieldState& u0,
                              const std::vector<FieldState>& jet_entries, int k, int p) {
    if (k != 1 && k != 2) throw std::invalid_argument("compute_Mkp: k must be 1 or 2");
    const GridSpec& grid = u0.grid();
    const std::size_t n = grid.node_count();
    std::vector<Mat6> out(n);

    if (p == 0) {
        for (int kk = 0; kk < grid.nz(); ++kk)
            for (int jj = 0; jj < grid.ny(); ++jj)
                for (int ii = 0; ii < grid.nx(); ++ii) {
                    const std::size_t node = grid.node_index(ii, jj, kk);
                    const Vec3 x = grid.position(ii, jj, kk);
                    const Vec6 y = u0.at(node);
                    out[node] = (k == 1) ? law.chi(x, y) : law.sigma(x, y);
                }
        return out;
    }

    if (static_cast<int>(jet_entries.size()) <= p)
        throw std::invalid_argument("compute_Mkp: jet prefix incomplete (needs entries through order p)");

    // State-independent coefficient: every y-derivative vanishes.
    if ((k == 1 && law.chi_is_identity()) || (k == 2 && law.sigma_is_state_independent()))
        return out;

    const auto& terms = enumerate_terms(MultiIndex::time(p), 6);
    for (int kk = 0; kk < grid.nz(); ++kk)
        for (int jj = 0; jj < grid.ny(); ++jj)
            for (int ii = 0; ii < grid.nx(); ++ii) {
                const std::size_t node = grid.node_index(ii, jj, kk);
                const Vec3 x = grid.position(ii, jj, kk);
                const Vec6 y = u0.at(node);
                Mat6 acc{};
                for (const auto& t : terms) {
                    double factor = static_cast<double>(t.coefficient);
                    for (const auto& f : t.factors)
                        factor *= jet_entries[static_cast<std::size_t>(f.gamma.order())].component(node, f.comp);
                    if (factor == 0.0) continue;
                    const auto ys = t.y_indices();
                    const Mat6 dm = (k == 1) ? law.chi_y_derivative(x, y, ys)
                                             : law.sigma_y_derivative(x, y, ys);
                    for (int a = 0; a < 6; ++a)
                        for (int b = 0; b < 6; ++b) acc.m[a][b] += factor * dm.m[a][b];
                }
                out[node] = acc;
            }
    return out;
}

InitialJet compute_jet(const MaterialLaw& law, const DataBundle& bundle, int m) {
    const GridSpec& grid = bundle.u0.grid();
    const std::size_t n = grid.node_count();

    InitialJet jet;
    jet.t0 = bundle.t0;
    jet.entries.push_back(bundle.u0);
    jet.entries.front().set_time(bundle.t0);
    if (m == 0) return jet;

    // chi(u0)^{-1} factorizations, reused across orders.
    std::vector<Ldlt6> chol;
    const bool identity_chi = law.chi_is_identity();
    if (!identity_chi) {
        chol.resize(n);
        for (int kk = 0; kk < grid.nz(); ++kk)
            for (int jj = 0; jj < grid.ny(); ++jj)
                for (int ii = 0; ii < grid.nx(); ++ii) {
                    const std::size_t node = grid.node_index(ii, jj, kk);
                    const Vec3 x = grid.position(ii, jj, kk);
                    const Vec6 y = bundle.u0.at(node);
                    law.require_admissible(y);
                    chol[node] = Ldlt6::factor(law.chi(x, y));
                    if (!chol[node].ok)
                        throw std::runtime_error("compute_jet: chi(u0) numerically singular");
                }
    }

    const Mat6 aco[3] = {system_matrix(1), system_matrix(2), system_matrix(3)};

    for (int p = 1; p <= m; ++p) {
        FieldState rhs(grid, bundle.t0);

        // d_t^{p-1} f(t0)
        if (!bundle.f.is_zero()) {
            for (int kk = 0; kk < grid.nz(); ++kk)
                for (int jj = 0; jj < grid.ny(); ++jj)
                    for (int ii = 0; ii < grid.nx(); ++ii) {
                        const std::size_t node = grid.node_index(ii, jj, kk);
                        rhs.set(node, bundle.f(p - 1, bundle.t0, grid.position(ii, jj, kk)));
                    }
        }

        // - sum_j A_j d_j S_{p-1}
        const FieldState& prev = jet.entries.back();
        for (int axis = 1; axis <= 3; ++axis) {
            const Mat6& a = aco[axis - 1];
            std::array<std::vector<double>, 6> d;
            for (int c = 0; c < 6; ++c) d[static_cast<std::size_t>(c)] = discrete_partial(grid, prev.scalar_component(c), axis);
            for (std::size_t node = 0; node < n; ++node) {
                Vec6 v = rhs.at(node);
                for (int r = 0; r < 6; ++r) {
                    double s = 0.0;
                    for (int c = 0; c < 6; ++c) {
                        const double w = a.m[r][c];
                        if (w != 0.0) s += w * d[static_cast<std::size_t>(c)][node];
                    }
                    v[r] -= s;
                }
                rhs.set(node, v);
            }
        }

        // - sum_{l=1}^{p-1} C(p-1,l) M_1^l S_{p-l}
        if (!identity_chi) {
            for (int l = 1; l <= p - 1; ++l) {
                const auto m1 = compute_Mkp(law, bundle.u0, jet.entries, 1, l);
                const double w = static_cast<double>(binomial(p - 1, l));
                const FieldState& s = jet.entries[static_cast<std::size_t>(p - l)];
                for (std::size_t node = 0; node < n; ++node) {
                    const Vec6 mv = m1[node].apply(s.at(node));
                    Vec6 v = rhs.at(node);
                    for (int c = 0; c < 6; ++c) v[c] -= w * mv[c];
                    rhs.set(node, v);
                }
            }
        }

        // - sum_{l=0}^{p-1} C(p-1,l) M_2^l S_{p-1-l}
        for (int l = 0; l <= p - 1; ++l) {
            if (l >= 1 && law.sigma_is_state_independent()) break;
            const auto m2 = compute_Mkp(law, bundle.u0, jet.entries, 2, l);
            const double w = static_cast<double>(binomial(p - 1, l));
            const FieldState& s = jet.entries[static_cast<std::size_t>(p - 1 - l)];
            for (std::size_t node = 0; node < n; ++node) {
                const Vec6 mv = m2[node].apply(s.at(node));
                Vec6 v = rhs.at(node);
                for (int c = 0; c < 6; ++c) v[c] -= w * mv[c];
                rhs.set(node, v);
            }
        }

        // solve chi(u0) S_p = rhs
        FieldState sp(grid, bundle.t0);
        for (std::size_t node = 0; node < n; ++node)
            sp.set(node, identity_chi ? rhs.at(node) : chol[node].solve(rhs.at(node)));
        if (!sp.finite()) throw std::runtime_error("compute_jet: nonfinite jet entry");
        jet.entries.push_back(std::move(sp));
    }
    return jet;
}

std::string CompatibilityReport::table() const {
    std::ostringstream os;
    os << "order  l2_residual      max_residual     status\n";
    for (const auto& p : per_order) {
        os << "  " << p.order << "    ";
        os.setf(std::ios::scientific);
        os.precision(6);
        os << p.l2_residual << "   " << p.max_residual << "   "
           << (p.max_residual <= tolerance ? "ok" : "VIOLATED") << "\n";
    }
    os << (pass ? "compatible" : "incompatible") << " at tolerance " << tolerance
       << (vacuous ? " (no conducting face: vacuously compatible)" : "") << "\n";
    return os.str();
}

CompatibilityReport check_compatibility(const MaterialLaw& law, const DataBundle& bundle, int m,
                                        double tolerance) {
    CompatibilityReport rep;
    rep.tolerance = tolerance;
    const GridSpec& grid = bundle.u0.grid();
    if (!grid.has_pec_face()) {
        rep.vacuous = true;
        return rep;
    }

    const auto ops = build_boundary_operators(grid.pec_normal);
    const InitialJet jet = compute_jet(law, bundle, m - 1);

    const double face_w = grid.spacing[0] * grid.spacing[1];
    for (int p = 0; p <= m - 1; ++p) {
        CompatibilityReport::PerOrder po;
        po.order = p;
        double l2 = 0.0, mx = 0.0;
        for (int j = 0; j < grid.ny(); ++j)
            for (int i = 0; i < grid.nx(); ++i) {
                const std::size_t node = grid.node_index(i, j, 0);
                const Vec3 x = grid.position(i, j, 0);
                const auto bu = ops.apply_B(jet.entries[static_cast<std::size_t>(p)].at(node));
                const Vec3 gp = bundle.g(p, bundle.t0, x);
                const double r0 = bu[0] - gp[0];
                const double r1 = bu[1] - gp[1];
                const double rr = r0 * r0 + r1 * r1;
                l2 += face_w * rr;
                mx = std::max(mx, std::sqrt(rr));
            }
        po.l2_residual = std::sqrt(l2);
        po.max_residual = mx;
        if (mx > tolerance) rep.pass = false;
        rep.per_order.push_back(po);
    }
    return rep;
}

namespace {

// smooth transition: 1 on (-inf, 1/2], 0 on [1, inf)
double bump_f(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }
double bump_fp(double x) { return x > 0.0 ? bump_f(x) / (x * x) : 0.0; }

void cutoff(double s, double* c, double* cp) {
    if (s <= 0.5) {
        *c = 1.0;
        *cp = 0.0;
        return;
    }
    if (s >= 1.0) {
        *c = 0.0;
        *cp = 0.0;
        return;
    }
    const double a = bump_f(1.0 - s), b = bump_f(s - 0.5);
    const double ap = -bump_fp(1.0 - s), bp = bump_fp(s - 0.5);
    const double den = a + b;
    *c = a / den;
    *cp = (ap * b - a * bp) / (den * den);
}

}  // namespace

JetExtension::JetExtension(InitialJet jet, double horizon) : jet_(std::move(jet)), horizon_(horizon) {
    if (!(horizon_ > 0.0)) throw std::invalid_argument("jet extension: horizon must be positive");
    if (jet_.entries.empty()) throw std::invalid_argument("jet extension: empty jet");
}

FieldState JetExtension::value(double t) const {
    const double tau = t - jet_.t0;
    double c, cp;
    cutoff(tau / horizon_, &c, &cp);

    FieldState out = jet_.entries.front();
    out.set_time(t);
    double pw = 1.0;  // tau^p / p!
    for (std::size_t p = 1; p < jet_.entries.size(); ++p) {
        pw *= tau / static_cast<double>(p);
        const double w = c * pw;
        if (w != 0.0) out.axpy(w, jet_.entries[p]);
    }
    return out;
}

FieldState JetExtension::time_derivative(double t) const {
    const double tau = t - jet_.t0;
    double c, cp;
    cutoff(tau / horizon_, &c, &cp);
    cp /= horizon_;

    FieldState out(jet_.entries.front().grid(), t);
    double pw = 1.0;  // tau^{p-1} / (p-1)!
    for (std::size_t p = 1; p < jet_.entries.size(); ++p) {
        out.axpy(c * pw, jet_.entries[p]);
        pw *= tau / static_cast<double>(p);  // now tau^p / p!
        if (cp != 0.0) out.axpy(cp * pw, jet_.entries[p]);
    }
    return out;
}

Trajectory JetExtension::sample(const std::vector<double>& times) const {
    Trajectory traj(jet_.entries.front().grid());
    for (double t : times) {
        TrajectorySample s;
        s.t = t;
        s.state = value(t);
        s.time_derivative = time_derivative(t);
        traj.append(std::move(s));
    }
    return traj;
}

JetExtension jet_realizing_extension(InitialJet jet, double horizon) {
    return JetExtension(std::move(jet), horizon);
}

}  // namespace qmx
