#pragma once

// Rotating actuation field, magnetic torque and the magnetization error cone.

#include "tumblesim/types.hpp"

namespace tumble {

/// Magnetization-axis error as a point on a cone about the ideal axis (0,1,0).
struct ErrorCone {
    Real aperture_deg = 10.0;
    Real theta1_deg = 0.0; // polar offset, in [0, aperture]
    Real theta2_deg = 0.0; // azimuth, in [0, 360)
};

struct MagneticActuation {
    Real field_tesla = 0.01;  // B0
    Real frequency = 1.0;     // Hz
    Real phase = 0.0;         // rad
    Real tilt = 0.0;          // rad; substrate incline, field plane turned by -tilt about x
    Real magnetic_volume = 0.029; // mm^3
    Real magnetization = 15000.0; // |E|, A/m
    Real alpha_deg = 0.0;     // in-plane alignment offset about body x
    ErrorCone cone;

    /// Body-frame unit magnetization direction including cone error and alpha.
    Vec3 body_axis() const;
    void validate() const;
};

/// u(theta1, theta2) = (sin t2 sin t1, cos t1, cos t2 sin t1).
Vec3 magnetization_axis(Real theta1_deg, Real theta2_deg, Real aperture_deg = 10.0);

/// Field in the substrate frame at time t (tesla). At t = 0 and zero phase it
/// points along +y; it turns so that an aligned robot tumbles towards +y.
Vec3 field_at(Real t, const MagneticActuation& act);

/// World-frame torque in g*mm^2/s^2 for body rotation `rotation`.
template <typename S>
Eigen::Matrix<S, 3, 1> magnetic_torque(const MagneticActuation& act, const Eigen::Matrix<S, 3, 3>& rotation,
                                       const Vec3& field)
{
    const Vec3 m = act.magnetic_volume * act.magnetization * act.body_axis();
    const Eigen::Matrix<S, 3, 1> mw = rotation * m.cast<S>();
    return mw.cross(field.cast<S>());
}

} // namespace tumble
