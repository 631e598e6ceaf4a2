#pragma once

// Sparse multivariate polynomials over double coefficients. Test-only oracle
// machinery: compositions are expanded symbolically and differentiated
// monomial by monomial, fully independent of the chain-rule enumeration under
// test.

#include <array>
#include <cstddef>
#include <map>
#include <random>

namespace qmxtest {

template <int N>
struct Poly {
    using Key = std::array<int, N>;
    std::map<Key, double> terms;

    static Poly constant(double c) {
        Poly p;
        if (c != 0.0) p.terms[Key{}] = c;
        return p;
    }
    static Poly var(int i, int power = 1) {
        Poly p;
        Key k{};
        k[static_cast<std::size_t>(i)] = power;
        p.terms[k] = 1.0;
        return p;
    }

    Poly operator+(const Poly& o) const {
        Poly r = *this;
        for (const auto& [k, c] : o.terms) {
            r.terms[k] += c;
            if (r.terms[k] == 0.0) r.terms.erase(k);
        }
        return r;
    }
    Poly operator-(const Poly& o) const { return *this + o.scaled(-1.0); }
    Poly scaled(double s) const {
        Poly r;
        if (s == 0.0) return r;
        for (const auto& [k, c] : terms) r.terms[k] = c * s;
        return r;
    }
    Poly operator*(const Poly& o) const {
        Poly r;
        for (const auto& [ka, ca] : terms)
            for (const auto& [kb, cb] : o.terms) {
                Key k;
                for (int i = 0; i < N; ++i) k[static_cast<std::size_t>(i)] = ka[static_cast<std::size_t>(i)] + kb[static_cast<std::size_t>(i)];
                r.terms[k] += ca * cb;
            }
        for (auto it = r.terms.begin(); it != r.terms.end();)
            it = (it->second == 0.0) ? r.terms.erase(it) : std::next(it);
        return r;
    }
    Poly pow(int e) const {
        Poly r = constant(1.0);
        for (int i = 0; i < e; ++i) r = r * (*this);
        return r;
    }
    Poly derivative(int axis) const {
        Poly r;
        for (const auto& [k, c] : terms) {
            const int e = k[static_cast<std::size_t>(axis)];
            if (e == 0) continue;
            Key kk = k;
            kk[static_cast<std::size_t>(axis)] = e - 1;
            r.terms[kk] += c * e;
        }
        return r;
    }
    double eval(const std::array<double, N>& x) const {
        double s = 0.0;
        for (const auto& [k, c] : terms) {
            double m = c;
            for (int i = 0; i < N; ++i)
                for (int e = 0; e < k[static_cast<std::size_t>(i)]; ++e) m *= x[static_cast<std::size_t>(i)];
            s += m;
        }
        return s;
    }
};

using Poly4 = Poly<4>;  // (t, x1, x2, x3)
using Poly9 = Poly<9>;  // (x1, x2, x3, y1..y6)

/// Substitutes x_i -> x_i and y_l -> v_l(t,x) into a 9-variable polynomial,
/// producing a 4-variable polynomial in (t, x).
inline Poly4 compose_poly(const Poly9& theta, const std::array<Poly4, 6>& v) {
    Poly4 out;
    for (const auto& [k, c] : theta.terms) {
        Poly4 term = Poly4::constant(c);
        for (int i = 0; i < 3; ++i)
            if (k[static_cast<std::size_t>(i)] > 0) term = term * Poly4::var(1 + i, k[static_cast<std::size_t>(i)]);
        for (int l = 0; l < 6; ++l)
            for (int e = 0; e < k[static_cast<std::size_t>(3 + l)]; ++e) term = term * v[static_cast<std::size_t>(l)];
        out = out + term;
    }
    return out;
}

/// Random polynomial of total degree <= deg with small integer coefficients.
template <int N>
Poly<N> random_poly(std::mt19937& rng, int deg, double density = 0.4) {
    std::uniform_real_distribution<double> coeff(-2.0, 2.0);
    std::uniform_real_distribution<double> keep(0.0, 1.0);
    Poly<N> p;
    std::array<int, N> k{};
    // enumerate exponent tuples with sum <= deg
    const auto enumerate = [&](auto&& self, int pos, int remaining) -> void {
        if (pos == N) {
            if (keep(rng) < density) {
                const double c = coeff(rng);
                if (c != 0.0) p.terms[k] = c;
            }
            return;
        }
        for (int e = 0; e <= remaining; ++e) {
            k[static_cast<std::size_t>(pos)] = e;
            self(self, pos + 1, remaining - e);
        }
        k[static_cast<std::size_t>(pos)] = 0;
    };
    enumerate(enumerate, 0, deg);
    return p;
}

}  // namespace qmxtest
