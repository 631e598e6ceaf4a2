#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "qmx/boundary.hpp"
#include "qmx/grid.hpp"
#include "qmx/material.hpp"

namespace qmx {

/// Time-analytic interior source: supplies d_t^j f(t) pointwise. A null
/// callable means f == 0.
struct TimeAnalyticSource {
    std::function<Vec6(int order, double t, const Vec3& x)> eval;

    Vec6 operator()(int order, double t, const Vec3& x) const {
        return eval ? eval(order, t, x) : Vec6{};
    }
    bool is_zero() const { return !eval; }
};

/// Time-analytic boundary source on the PEC face; third component must vanish
/// (structure of B).
struct BoundaryAnalyticSource {
    std::function<Vec3(int order, double t, const Vec3& x)> eval;

    Vec3 operator()(int order, double t, const Vec3& x) const {
        return eval ? eval(order, t, x) : Vec3{};
    }
    bool is_zero() const { return !eval; }
};

/// Data tuple (t0, f, g, u0) plus the initial charge density (empty optional =
/// derived from div D(u0)).
struct DataBundle {
    double t0 = 0.0;
    TimeAnalyticSource f;
    BoundaryAnalyticSource g;
    FieldState u0;
    std::optional<std::vector<double>> rho0;  // nullopt: "derived"
};

/// The sequence S_0..S_m of time derivatives of the solution at t0.
struct InitialJet {
    double t0 = 0.0;
    std::vector<FieldState> entries;

    int order() const { return static_cast<int>(entries.size()) - 1; }
};

/// The matrix coefficient M_k^p of the jet recursion: the p-th time derivative
/// of chi(u) (k = 1) or sigma(u) (k = 2) at t0 expressed through the jet.
/// Needs jet entries through order p (the j = 1 partition consumes S_p).
/// Returned node-major. M_2^0 = sigma(u0); M_1^0 = chi(u0).
std::vector<Mat6> compute_Mkp(const MaterialLaw& law, const FieldState& u0,
                              const std::vector<FieldState>& jet_entries, int k, int p);

/// Recursive initial-jet operators of the quasilinear system:
///   S_p = chi(u0)^{-1} ( d_t^{p-1} f(t0) - sum_j A_j d_j S_{p-1}
///         - sum_{l=1}^{p-1} C(p-1,l) M_1^l S_{p-l}
///         - sum_{l=0}^{p-1} C(p-1,l) M_2^l S_{p-1-l} ).
InitialJet compute_jet(const MaterialLaw& law, const DataBundle& bundle, int m);

struct CompatibilityReport {
    struct PerOrder {
        int order = 0;
        double l2_residual = 0.0;
        double max_residual = 0.0;
    };
    std::vector<PerOrder> per_order;
    double tolerance = 0.0;
    bool pass = true;
    bool vacuous = false;  // no PEC face on the grid

    double worst() const {
        double w = 0.0;
        for (const auto& p : per_order) w = std::max(w, p.max_residual);
        return w;
    }
    std::string table() const;
};

/// Evaluates || B S_p - d_t^p g(t0) || on the PEC face for p = 0..m-1.
CompatibilityReport check_compatibility(const MaterialLaw& law, const DataBundle& bundle, int m,
                                        double tolerance = 1e-10);

/// Smooth-in-time function realizing the jet: the Taylor polynomial of the jet
/// with a smooth cutoff that is identically one on the first half of the
/// horizon. Derivatives at t0 equal the jet entries exactly.
class JetExtension {
public:
    JetExtension(InitialJet jet, double horizon);

    FieldState value(double t) const;
    FieldState time_derivative(double t) const;

    /// Materializes the extension on a timebase, with analytic derivatives.
    Trajectory sample(const std::vector<double>& times) const;

    const InitialJet& jet() const { return jet_; }

private:
    InitialJet jet_;
    double horizon_;
};

JetExtension jet_realizing_extension(InitialJet jet, double horizon);

}  // namespace qmx
