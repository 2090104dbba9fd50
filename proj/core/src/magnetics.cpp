#include "tumblesim/magnetics.hpp"

#include <cmath>

namespace tumble {

Vec3 magnetization_axis(Real theta1_deg, Real theta2_deg, Real aperture_deg)
{
    if (!(aperture_deg >= 0.0 && aperture_deg < 90.0))
        throw ModelError("cone aperture must lie in [0, 90) degrees");
    if (!(theta1_deg >= 0.0 && theta1_deg <= aperture_deg + 1e-12))
        throw ModelError("theta1 must lie in [0, aperture] degrees");
    if (!(theta2_deg >= 0.0 && theta2_deg < 360.0))
        throw ModelError("theta2 must lie in [0, 360) degrees");
    const Real t1 = deg2rad(theta1_deg);
    const Real t2 = deg2rad(theta2_deg);
    return Vec3(std::sin(t2) * std::sin(t1), std::cos(t1), std::cos(t2) * std::sin(t1));
}

Vec3 MagneticActuation::body_axis() const
{
    const Vec3 u = magnetization_axis(cone.theta1_deg, cone.theta2_deg, cone.aperture_deg);
    return rot_x(deg2rad(alpha_deg)) * u;
}

void MagneticActuation::validate() const
{
    if (!(field_tesla >= 0.0))
        throw ModelError("field strength must be nonnegative");
    if (!(frequency >= 0.0))
        throw ModelError("field frequency must be nonnegative");
    if (!(magnetic_volume > 0.0))
        throw ModelError("magnetic volume must be positive");
    if (!(magnetization >= 0.0))
        throw ModelError("magnetization must be nonnegative");
    body_axis();
}

Vec3 field_at(Real t, const MagneticActuation& act)
{
    const Real th = 2.0 * kPi * act.frequency * t + act.phase;
    const Vec3 b(0.0, std::cos(th), -std::sin(th));
    return act.field_tesla * (rot_x(-act.tilt) * b);
}

} // namespace tumble
