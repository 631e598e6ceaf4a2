#include "qmx/faa_di_bruno.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

namespace qmx {

namespace {

struct TermKey {
    MultiIndex beta;
    std::vector<JetFactor> factors;
    auto operator<=>(const TermKey&) const = default;
};

// Differentiate a merged term list by one order along `axis` (0 = time).
std::vector<PartitionTerm> differentiate_once(const std::vector<PartitionTerm>& terms, int axis,
                                              int ydim) {
    std::map<TermKey, std::int64_t> merged;
    auto add = [&](MultiIndex beta, std::vector<JetFactor> factors, std::int64_t coeff) {
        std::sort(factors.begin(), factors.end());
        merged[TermKey{beta, std::move(factors)}] += coeff;
    };

    for (const auto& t : terms) {
        // Explicit x-dependence of theta; time derivatives have no such branch.
        if (axis != 0) {
            add(t.beta + MultiIndex::unit(axis), t.factors, t.coefficient);
        }
        // Chain rule: new first-order factor for each state component.
        for (int l = 0; l < ydim; ++l) {
            auto f = t.factors;
            f.push_back(JetFactor{MultiIndex::unit(axis), l});
            add(t.beta, std::move(f), t.coefficient);
        }
        // Product rule over existing factors.
        for (std::size_t i = 0; i < t.factors.size(); ++i) {
            auto f = t.factors;
            f[i].gamma = f[i].gamma + MultiIndex::unit(axis);
            add(t.beta, std::move(f), t.coefficient);
        }
    }

    std::vector<PartitionTerm> out;
    out.reserve(merged.size());
    for (const auto& [key, coeff] : merged) {
        if (coeff == 0) continue;
        out.push_back(PartitionTerm{coeff, key.beta, key.factors});
    }
    return out;
}

std::vector<PartitionTerm> build_terms(const MultiIndex& alpha, int ydim) {
    // theta(v) itself: single term with no factors.
    std::vector<PartitionTerm> terms{PartitionTerm{1, MultiIndex{}, {}}};
    for (int axis = 0; axis < 4; ++axis)
        for (int k = 0; k < alpha[axis]; ++k) terms = differentiate_once(terms, axis, ydim);
    return terms;
}

}  // namespace

const std::vector<PartitionTerm>& enumerate_terms(const MultiIndex& alpha, int ydim) {
    if (alpha.order() < 1) throw std::invalid_argument("enumerate_terms: |alpha| must be >= 1");
    if (ydim < 1 || ydim > 6) throw std::invalid_argument("enumerate_terms: ydim out of range");

    static std::map<std::pair<MultiIndex, int>, std::vector<PartitionTerm>> cache;
    static std::mutex mutex;
    std::lock_guard<std::mutex> lock(mutex);
    auto key = std::make_pair(alpha, ydim);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, build_terms(alpha, ydim)).first;
    return it->second;
}

std::vector<double> compose_derivative(const CompositionFunction& theta, const FieldJet& v,
                                       const MultiIndex& alpha) {
    if (!theta.derivative) throw std::invalid_argument("compose_derivative: missing theta evaluator");
    if (!v.position || !v.derivative)
        throw std::invalid_argument("compose_derivative: missing jet component supplier");
    std::vector<double> out(v.count, 0.0);

    auto y_at = [&](std::size_t p) {
        Vec6 y{};
        const MultiIndex zero{};
        for (int c = 0; c < 6; ++c) y[c] = v.derivative(zero, c, p);
        return y;
    };

    if (alpha.order() == 0) {
        for (std::size_t p = 0; p < v.count; ++p) out[p] = theta.value(v.position(p), y_at(p));
        return out;
    }

    const auto& terms = enumerate_terms(alpha, 6);
    for (std::size_t p = 0; p < v.count; ++p) {
        const Vec3 x = v.position(p);
        const Vec6 y = y_at(p);
        double sum = 0.0;
        for (const auto& t : terms) {
            const auto ys = t.y_indices();
            const std::array<int, 3> beta{t.beta[1], t.beta[2], t.beta[3]};
            double val = theta.derivative(beta, ys, x, y);
            if (val == 0.0) continue;
            for (const auto& f : t.factors) val *= v.derivative(f.gamma, f.comp, p);
            sum += static_cast<double>(t.coefficient) * val;
        }
        out[p] = sum;
    }
    return out;
}

DifferenceOracleResult difference_norm_oracle(const CompositionFunction& theta,
                                              const FieldJet& v1, const FieldJet& v2,
                                              const MultiIndex& alpha, int mtilde,
                                              std::span<const double> weights) {
    if (v1.count != v2.count) throw std::invalid_argument("difference_norm_oracle: grid mismatch");
    auto weighted_l2 = [&](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double d = a[i] - b[i];
            const double w = weights.empty() ? 1.0 : weights[i];
            s += w * d * d;
        }
        return std::sqrt(s);
    };

    DifferenceOracleResult res;
    const auto c1 = compose_derivative(theta, v1, alpha);
    const auto c2 = compose_derivative(theta, v2, alpha);
    res.lhs = weighted_l2(c1, c2);

    // All space-time beta with |beta| <= mtilde - 1, in lexicographic order.
    for (int b0 = 0; b0 <= mtilde - 1; ++b0)
        for (int b1 = 0; b0 + b1 <= mtilde - 1; ++b1)
            for (int b2 = 0; b0 + b1 + b2 <= mtilde - 1; ++b2)
                for (int b3 = 0; b0 + b1 + b2 + b3 <= mtilde - 1; ++b3) {
                    const MultiIndex beta{{b0, b1, b2, b3}};
                    double s = 0.0;
                    for (int c = 0; c < 6; ++c) {
                        std::vector<double> a(v1.count), b(v2.count);
                        for (std::size_t p = 0; p < v1.count; ++p) {
                            a[p] = v1.derivative(beta, c, p);
                            b[p] = v2.derivative(beta, c, p);
                        }
                        const double d = weighted_l2(a, b);
                        s += d * d;
                    }
                    res.rhs_terms.emplace_back(beta, std::sqrt(s));
                }
    return res;
}

std::string format_term_table(const MultiIndex& alpha, int ydim) {
    const auto& terms = enumerate_terms(alpha, ydim);
    std::ostringstream os;
    os << "d^" << alpha.str() << " theta(v), ydim=" << ydim << ", " << terms.size()
       << " terms\n";
    for (const auto& t : terms) {
        os << "  " << t.coefficient << " * (d_x^(" << t.beta[1] << "," << t.beta[2] << ","
           << t.beta[3] << ")";
        for (const auto& f : t.factors) os << " d_y" << f.comp + 1;
        os << " theta)(v)";
        for (const auto& f : t.factors) os << " * d^" << f.gamma.str() << " v_" << f.comp + 1;
        os << "\n";
    }
    return os.str();
}

}  // namespace qmx
