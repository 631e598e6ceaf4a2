#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qmx/linalg.hpp"
#include "qmx/multi_index.hpp"

namespace qmx {

/// One factor d^gamma v_comp of a chain-rule term.
struct JetFactor {
    MultiIndex gamma;  // nonzero derivative multi-order
    int comp = 0;      // state component, 0-based

    auto operator<=>(const JetFactor&) const = default;
};

/// One term of the higher-order chain rule for d^alpha theta(v):
///   coefficient * (d_y^{comps} d_x^beta theta)(v) * prod_i d^{gamma_i} v_{l_i}
/// where comps is the multiset {l_i} of the factors. beta has zero time order
/// by construction (theta carries no explicit time dependence).
struct PartitionTerm {
    std::int64_t coefficient = 1;
    MultiIndex beta;                 // explicit x-derivative of theta, beta[0] == 0
    std::vector<JetFactor> factors;  // canonically sorted, may be empty only for alpha == 0

    std::vector<int> y_indices() const {
        std::vector<int> ys;
        ys.reserve(factors.size());
        for (const auto& f : factors) ys.push_back(f.comp);
        return ys;
    }
};

/// Enumerates the chain-rule expansion of d^alpha theta(v) for v taking values
/// in R^ydim. Terms are produced by differentiating one order at a time and
/// merging like terms; the result is cached per (alpha, ydim) and returned in a
/// deterministic canonical order. Requires 1 <= |alpha|.
const std::vector<PartitionTerm>& enumerate_terms(const MultiIndex& alpha, int ydim = 6);

/// Scalar function theta(x, y) with all derivative evaluators supplied
/// analytically; the shape composition calculus consumes.
struct CompositionFunction {
    /// (d_y^{ys} d_x^{beta} theta)(x, y); ys lists y-components (0-based), any order.
    std::function<double(const std::array<int, 3>& beta, std::span<const int> ys,
                         const Vec3& x, const Vec6& y)>
        derivative;

    double value(const Vec3& x, const Vec6& y) const {
        return derivative({0, 0, 0}, {}, x, y);
    }
};

/// Jet of a 6-vector field on a set of evaluation points: supplies values of
/// d^gamma v_comp and the point positions.
struct FieldJet {
    std::size_t count = 0;
    std::function<Vec3(std::size_t point)> position;
    std::function<double(const MultiIndex& gamma, int comp, std::size_t point)> derivative;
};

/// Evaluates d^alpha theta(v) on the jet's points by summing enumerated terms.
/// alpha == 0 returns theta(v) directly.
std::vector<double> compose_derivative(const CompositionFunction& theta, const FieldJet& v,
                                       const MultiIndex& alpha);

/// Both sides of the composition difference estimate: the left-hand side
/// ||d^alpha theta(v1) - d^alpha theta(v2)||_{l2,w} and the per-beta summands
/// sum_c ||d^beta (v1 - v2)_c||_{l2,w} for |beta| <= mtilde - 1. Weights w are
/// the caller's quadrature weights (pass 1.0 for plain root-mean-square sums).
struct DifferenceOracleResult {
    double lhs = 0.0;
    std::vector<std::pair<MultiIndex, double>> rhs_terms;

    double rhs_sum() const {
        double s = 0.0;
        for (const auto& [b, v] : rhs_terms) s += v;
        return s;
    }
};
DifferenceOracleResult difference_norm_oracle(const CompositionFunction& theta,
                                              const FieldJet& v1, const FieldJet& v2,
                                              const MultiIndex& alpha, int mtilde,
                                              std::span<const double> weights);

/// Pretty-printed term table (debug CLI).
std::string format_term_table(const MultiIndex& alpha, int ydim);

}  // namespace qmx
