#pragma once

// Ellipsoidal friction with a torsional term, and area-proportional adhesion.

#include "tumblesim/geometry.hpp"
#include "tumblesim/types.hpp"

#include <array>
#include <optional>

namespace tumble {

struct FrictionParams {
    Real mu = 0.3;
    Real e_t = 1.0;
    Real e_o = 1.0;
    Real e_r = 0.01; // mm
    Real creep = 1e-9; // mm/s added to sigma; bounds sticking creep speed

    void validate() const;
};

/// Three slip equalities followed by the ellipsoid slack xi, which must be
/// complementary to sigma.
template <typename S>
struct FrictionResiduals {
    std::array<S, 3> eq;
    S xi;
};

/// Fritz-John conditions of maximum dissipation over the friction ellipsoid.
/// `lam` holds (lambda_t, lambda_o, lambda_r), `vel` the contact velocity
/// (v_t, v_o, w_n), both for the same contact frame.
template <typename S>
FrictionResiduals<S> friction_residuals(const Eigen::Matrix<S, 3, 1>& lam, const S& sigma,
                                        const Eigen::Matrix<S, 3, 1>& vel, const FrictionParams& fp,
                                        const S& lambda_n)
{
    using std::exp;
    const Real e[3] = {fp.e_t, fp.e_o, fp.e_r};
    // sigma + creep, continued as c exp(sigma / c) below zero so it never changes sign
    const S slip = sigma >= S(0.0) ? S(sigma + S(fp.creep)) : S(S(fp.creep) * exp(sigma / S(fp.creep)));
    FrictionResiduals<S> r;
    S xi = S(fp.mu) * lambda_n * S(fp.mu) * lambda_n;
    for (int i = 0; i < 3; ++i) {
        r.eq[i] = S(fp.mu * e[i] * e[i]) * lambda_n * vel[i] + lam[i] * slip;
        xi -= lam[i] * lam[i] / S(e[i] * e[i]);
    }
    r.xi = xi;
    return r;
}

/// Closed-form maximizer of -(v . lambda) over the ellipsoid, with the slip
/// multiplier sigma that makes the residuals vanish. Sticking returns zeros.
struct SlidingSolution {
    Vec3 lambda = Vec3::Zero();
    Real sigma = 0.0;
};
SlidingSolution sliding_friction(const Vec3& vel, const FrictionParams& fp, Real lambda_n);

struct AdhesionState {
    Real coefficient = 0.0;   // C, g/(mm s^2) which equals N/m^2 numerically
    Real area = 0.0;          // mm^2
    Real lambda_a = 0.0;      // g*mm/s^2
    std::optional<std::size_t> active_piece;
    std::optional<std::size_t> active_face;
    Real friction_radius = 0.0; // e_r for the next step, mm
};

struct ContactMultipliers {
    std::size_t piece = 0;
    std::vector<Real> robot;   // one per constraint of the piece
    Real substrate = 0.0;
};

struct AreaRule {
    Real multiplier_tol = 1e-6; // l_i above this counts as active
    Real dominance_ratio = 0.84; // runner-up / largest above this is an edge, A = 0 (about 40 deg at a right-angle edge)
    Real normal_tol = 1e-9; // g*mm/s^2
};

/// Face in contact from the solved multipliers. A single active planar face
/// gives that face's area; edges, vertices and curved contact give zero.
AdhesionState identify_contact_area(const ContactMultipliers& mult, Real lambda_n, const ShapeModel& shape,
                                    Real coefficient, const AreaRule& rule = {});

/// Torsional ellipsoid radius used with an adhesion state.
Real friction_radius(const AdhesionState& state, const ShapeModel& shape);

/// p_a = h * lambda_a.
Real adhesion_impulse(const AdhesionState& state, Real h);

} // namespace tumble
