#include "tumblesim/friction.hpp"

#include <algorithm>
#include <cmath>

namespace tumble {

void FrictionParams::validate() const
{
    if (!(mu > 0) || !(e_t > 0) || !(e_o > 0) || !(e_r > 0) || !(creep >= 0))
        throw ModelError("friction parameters mu, e_t, e_o, e_r must be positive");
}

SlidingSolution sliding_friction(const Vec3& vel, const FrictionParams& fp, Real lambda_n)
{
    const Vec3 e2(fp.e_t * fp.e_t, fp.e_o * fp.e_o, fp.e_r * fp.e_r);
    const Real s = std::sqrt(e2.dot(vel.cwiseProduct(vel)));
    SlidingSolution out;
    if (s == 0.0 || lambda_n <= 0.0)
        return out;
    out.sigma = std::max(0.0, s - fp.creep);
    out.lambda = -fp.mu * lambda_n * e2.cwiseProduct(vel) / s;
    return out;
}

AdhesionState identify_contact_area(const ContactMultipliers& mult, Real lambda_n, const ShapeModel& shape,
                                    Real coefficient, const AreaRule& rule)
{
    AdhesionState st;
    st.coefficient = coefficient;
    if (lambda_n > rule.normal_tol && mult.piece < shape.pieces().size()) {
        const auto& cs = shape.pieces()[mult.piece].constraints();
        // largest multiplier wins; a runner-up above the ratio means edge contact
        std::size_t idx = 0;
        Real best = -1.0;
        for (std::size_t i = 0; i < mult.robot.size() && i < cs.size(); ++i)
            if (mult.robot[i] > best) {
                best = mult.robot[i];
                idx = i;
            }
        bool dominant = best > rule.multiplier_tol;
        for (std::size_t i = 0; i < mult.robot.size() && i < cs.size(); ++i)
            if (i != idx && mult.robot[i] > rule.multiplier_tol && mult.robot[i] > rule.dominance_ratio * best)
                dominant = false;
        if (dominant && cs[idx].planar() && !cs[idx].internal) {
            st.active_piece = mult.piece;
            st.active_face = idx;
            st.area = cs[idx].face_area;
        }
    }
    st.lambda_a = coefficient * st.area;
    st.friction_radius = friction_radius(st, shape);
    return st;
}

Real friction_radius(const AdhesionState& state, const ShapeModel& shape)
{
    if (state.area > 0.0)
        return std::sqrt(state.area / kPi);
    const auto& d = shape.dims();
    return 0.1 * std::min({d.length, d.width, d.height});
}

Real adhesion_impulse(const AdhesionState& state, Real h)
{
    if (!(h > 0))
        throw ModelError("time step must be positive");
    return h * state.lambda_a;
}

} // namespace tumble
