#include "qmx/material.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qmx {

double StateDomain::boundary_distance(const Vec6& y) const {
    switch (kind) {
        case Kind::all:
            return std::numeric_limits<double>::infinity();
        case Kind::ball:
            return radius - norm2(y);
        case Kind::box: {
            double d = std::numeric_limits<double>::infinity();
            for (int c = 0; c < 6; ++c) d = std::min({d, y[c] - lo[c], hi[c] - y[c]});
            return d;
        }
    }
    return 0.0;
}

Mat6 MaterialLaw::chi(const Vec3& x, const Vec6& y) const {
    Mat6 c;
    for (int b = 0; b < 6; ++b) {
        const int comps[1] = {b};
        const Vec6 col = theta_y_derivative(x, y, comps);
        for (int a = 0; a < 6; ++a) c.m[a][b] = col[a];
    }
    return c;
}

Mat6 MaterialLaw::chi_inverse(const Vec3& x, const Vec6& y) const {
    if (chi_is_identity()) return Mat6::identity();
    bool ok = false;
    const Mat6 inv = spd_inverse(chi(x, y), &ok);
    if (!ok) throw std::runtime_error("material law: chi is numerically singular (eta floor violated)");
    return inv;
}

Mat6 MaterialLaw::chi_y_derivative(const Vec3& x, const Vec6& y, std::span<const int> comps) const {
    Mat6 d;
    std::vector<int> ext(comps.begin(), comps.end());
    ext.push_back(0);
    for (int b = 0; b < 6; ++b) {
        ext.back() = b;
        const Vec6 col = theta_y_derivative(x, y, ext);
        for (int a = 0; a < 6; ++a) d.m[a][b] = col[a];
    }
    return d;
}

Mat6 MaterialLaw::sigma(const Vec3& x, const Vec6& y) const {
    return Mat6::block_diag(sigma1(x, y), Mat3{});
}

void MaterialLaw::require_admissible(const Vec6& y) const {
    if (!state_domain().contains(y))
        throw std::domain_error("material law: state outside the admissible domain");
}

double distance_to_state_boundary(const MaterialLaw& law, const FieldState& state) {
    const StateDomain& dom = law.state_domain();
    if (dom.kind == StateDomain::Kind::all) return std::numeric_limits<double>::infinity();
    double d = std::numeric_limits<double>::infinity();
    const std::size_t n = state.grid().node_count();
    for (std::size_t i = 0; i < n; ++i) d = std::min(d, dom.boundary_distance(state.at(i)));
    return d;
}

namespace {

class KerrLaw final : public MaterialLaw {
public:
    explicit KerrLaw(const KerrParams& p) : p_(p) {
        zero_ = true;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                if (p_.vartheta.m[i][j] != 0.0) zero_ = false;
    }

    std::string name() const override { return zero_ ? "kerr(vacuum)" : "kerr"; }

    Vec6 theta(const Vec3&, const Vec6& y) const override {
        Vec6 out;
        const Vec3 e{y[0], y[1], y[2]};
        const Vec3 te = p_.vartheta.apply(e);
        const double s = dot(e, e);
        const double p = dot(e, te);
        for (int a = 0; a < 3; ++a) out[a] = e[a] + 0.5 * s * te[a] + 0.5 * p * e[a];
        for (int a = 0; a < 3; ++a) out[a + 3] = y[a + 3];
        return out;
    }

    // Closed-form y-derivatives of the potential-form Kerr map. With
    // T = vartheta, Q = T E, S = |E|^2, P = E.T E:
    //   d_b theta_a     = delta_ab (1 + P/2) + E_b Q_a + S T_ab / 2 + Q_b E_a
    //   d_c d_b theta_a = delta_ab Q_c + delta_bc Q_a + delta_ac Q_b
    //                     + E_a T_bc + E_b T_ac + E_c T_ab
    //   d_d d_c d_b theta_a = sum over pairings of delta * T (constant)
    // All derivatives in H directions vanish except the first (identity block),
    // and derivatives of order >= 4 vanish (cubic law).
    Vec6 theta_y_derivative(const Vec3&, const Vec6& y, std::span<const int> comps) const override {
        Vec6 out{};
        const std::size_t k = comps.size();
        if (k == 0) throw std::invalid_argument("theta_y_derivative: empty derivative order");
        if (k > static_cast<std::size_t>(m_max()))
            throw std::invalid_argument("theta_y_derivative: order exceeds m_max");

        int n_electric = 0;
        for (int c : comps)
            if (c < 3) ++n_electric;

        if (k == 1) {
            const int b = comps[0];
            if (b >= 3) {
                out[b] = 1.0;  // H block is the identity
                return out;
            }
            const Vec3 e{y[0], y[1], y[2]};
            const Vec3 q = p_.vartheta.apply(e);
            const double s = dot(e, e);
            const double p = dot(e, q);
            for (int a = 0; a < 3; ++a) {
                out[a] = (a == b ? 1.0 + 0.5 * p : 0.0) + e[b] * q[a] + 0.5 * s * p_.vartheta.m[a][b] +
                         q[b] * e[a];
            }
            return out;
        }

        // Mixed or magnetic higher derivatives vanish.
        if (n_electric != static_cast<int>(k)) return out;

        if (k == 2) {
            const int b = comps[0], c = comps[1];
            const Vec3 e{y[0], y[1], y[2]};
            const Vec3 q = p_.vartheta.apply(e);
            for (int a = 0; a < 3; ++a) {
                double v = 0.0;
                if (a == b) v += q[c];
                if (b == c) v += q[a];
                if (a == c) v += q[b];
                v += e[a] * p_.vartheta.m[b][c] + e[b] * p_.vartheta.m[a][c] + e[c] * p_.vartheta.m[a][b];
                out[a] = v;
            }
            return out;
        }
        if (k == 3) {
            const int b = comps[0], c = comps[1], d = comps[2];
            for (int a = 0; a < 3; ++a) {
                double v = 0.0;
                if (a == b) v += p_.vartheta.m[c][d];
                if (a == c) v += p_.vartheta.m[b][d];
                if (a == d) v += p_.vartheta.m[b][c];
                if (b == c) v += p_.vartheta.m[a][d];
                if (b == d) v += p_.vartheta.m[a][c];
                if (c == d) v += p_.vartheta.m[a][b];
                out[a] = v;
            }
            return out;
        }
        return out;  // order >= 4: cubic polynomial, identically zero
    }

    Mat3 sigma1(const Vec3&, const Vec6&) const override {
        return Mat3::scaled_identity(p_.conductivity_scale);
    }

    double eta() const override { return p_.eta; }
    const StateDomain& state_domain() const override { return p_.domain; }
    int m_max() const override { return 8; }
    bool chi_is_identity() const override { return zero_; }

private:
    KerrParams p_;
    bool zero_ = false;
};

class FrozenLaw final : public MaterialLaw {
public:
    FrozenLaw(const Mat6& chi0, const Mat6& sigma0, double eta, StateDomain domain)
        : chi0_(chi0), sigma0_(sigma0), eta_(eta), domain_(domain) {
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) sigma1_.m[i][j] = sigma0.m[i][j];
    }

    std::string name() const override { return "frozen"; }

    Vec6 theta(const Vec3&, const Vec6& y) const override { return chi0_.apply(y); }

    Vec6 theta_y_derivative(const Vec3&, const Vec6&, std::span<const int> comps) const override {
        Vec6 out{};
        if (comps.size() == 1) {
            for (int a = 0; a < 6; ++a) out[a] = chi0_.m[a][comps[0]];
        }
        return out;
    }

    Mat3 sigma1(const Vec3&, const Vec6&) const override { return sigma1_; }
    double eta() const override { return eta_; }
    const StateDomain& state_domain() const override { return domain_; }
    int m_max() const override { return 8; }

private:
    Mat6 chi0_, sigma0_;
    Mat3 sigma1_;
    double eta_;
    StateDomain domain_;
};

}  // namespace

std::shared_ptr<MaterialLaw> make_kerr_law(const KerrParams& params) {
    return std::make_shared<KerrLaw>(params);
}

std::shared_ptr<MaterialLaw> make_frozen_law(const Mat6& chi0, const Mat6& sigma0, double eta,
                                             StateDomain domain) {
    return std::make_shared<FrozenLaw>(chi0, sigma0, eta, domain);
}

}  // namespace qmx
