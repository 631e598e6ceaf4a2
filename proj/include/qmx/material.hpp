#pragma once

#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "qmx/grid.hpp"
#include "qmx/linalg.hpp"

namespace qmx {

/// Admissible state domain U in R^6: everything, a centered ball, or an
/// axis-aligned box.
struct StateDomain {
    enum class Kind { all, ball, box } kind = Kind::all;
    double radius = 0.0;                 // ball
    Vec6 lo{}, hi{};                     // box

    static StateDomain everything() { return {}; }
    static StateDomain centered_ball(double r) {
        StateDomain d;
        d.kind = Kind::ball;
        d.radius = r;
        return d;
    }
    static StateDomain aligned_box(const Vec6& lo, const Vec6& hi) {
        StateDomain d;
        d.kind = Kind::box;
        d.lo = lo;
        d.hi = hi;
        return d;
    }

    /// Signed distance of y to the domain boundary (positive inside,
    /// +inf for the unconstrained domain).
    double boundary_distance(const Vec6& y) const;
    bool contains(const Vec6& y) const { return boundary_distance(y) >= 0.0; }
};

/// Instantaneous constitutive law theta = (theta1, theta2) with its full
/// y-derivative bundle, the conductivity block sigma1, the positivity floor
/// eta, and the admissible state domain. Evaluators are pure; instances are
/// immutable after construction.
class MaterialLaw {
public:
    virtual ~MaterialLaw() = default;

    virtual std::string name() const = 0;

    /// theta(x, y) = (D, B).
    virtual Vec6 theta(const Vec3& x, const Vec6& y) const = 0;

    /// d_{y_{c1}} ... d_{y_{ck}} theta(x, y), k = comps.size() >= 1 (0-based comps).
    virtual Vec6 theta_y_derivative(const Vec3& x, const Vec6& y, std::span<const int> comps) const = 0;

    /// 3x3 conductivity block; sigma = blkdiag(sigma1, 0).
    virtual Mat3 sigma1(const Vec3& x, const Vec6& y) const = 0;

    /// d_y^{comps} of the full 6x6 sigma (zero for state-independent laws).
    virtual Mat6 sigma_y_derivative(const Vec3&, const Vec6&, std::span<const int>) const {
        return Mat6{};
    }

    virtual double eta() const = 0;
    virtual const StateDomain& state_domain() const = 0;
    virtual int m_max() const = 0;

    /// True when chi(x,y) == I identically (vacuum fast path).
    virtual bool chi_is_identity() const { return false; }
    virtual bool sigma_is_state_independent() const { return true; }

    // ---- derived evaluators -------------------------------------------------

    /// chi = d_y theta, assembled column-by-column from theta_y_derivative.
    Mat6 chi(const Vec3& x, const Vec6& y) const;

    /// chi(x,y)^{-1}; throws std::runtime_error on a numerically singular chi
    /// (material-law defect against the eta floor).
    Mat6 chi_inverse(const Vec3& x, const Vec6& y) const;

    /// d_y^{comps} chi as a 6x6 matrix, (d_y^L chi)_{ab} = d_y^{L+b} theta_a.
    Mat6 chi_y_derivative(const Vec3& x, const Vec6& y, std::span<const int> comps) const;

    /// sigma(x,y) = blkdiag(sigma1, 0) as a 6x6.
    Mat6 sigma(const Vec3& x, const Vec6& y) const;

    /// Throws std::domain_error when y lies outside the admissible domain.
    void require_admissible(const Vec6& y) const;
};

/// Minimum over grid nodes of the distance of u(x) to the state-domain
/// boundary; +inf when the domain is all of R^6. Negative values indicate
/// nodes outside the domain.
double distance_to_state_boundary(const MaterialLaw& law, const FieldState& state);

/// Kerr parameters: scalar or symmetric PSD 3x3 coefficient, and the
/// conductivity scale (sigma1 = scale * I; negative scale models the
/// anti-damping used by the blow-up scenario).
struct KerrParams {
    Mat3 vartheta = Mat3{};  // zero = vacuum
    bool scalar = true;      // true when vartheta = v * I
    double conductivity_scale = 0.0;
    double eta = 1.0;
    StateDomain domain = StateDomain::everything();

    static KerrParams scalar_coeff(double v, double conductivity = 0.0) {
        KerrParams p;
        p.vartheta = Mat3::scaled_identity(v);
        p.scalar = true;
        p.conductivity_scale = conductivity;
        return p;
    }
};

/// Kerr instance: for scalar vartheta exactly D = E + vartheta |E|^2 E and
/// B = H. A symmetric tensor coefficient is supported through the potential
/// form D = E + |E|^2 T E / 2 + (E.T E) E / 2, which reduces to the scalar law
/// when T = vartheta I and keeps chi symmetric.
std::shared_ptr<MaterialLaw> make_kerr_law(const KerrParams& params);

/// State-independent law with frozen chi and sigma matrices (linear-theory
/// consistency checks and coefficient plumbing).
std::shared_ptr<MaterialLaw> make_frozen_law(const Mat6& chi0, const Mat6& sigma0, double eta,
                                             StateDomain domain = StateDomain::everything());

}  // namespace qmx
