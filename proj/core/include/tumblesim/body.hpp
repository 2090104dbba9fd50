#pragma once

#include "tumblesim/types.hpp"

#include <cmath>

namespace tumble {

/// Pose and generalized velocity of the robot. Angular velocity is expressed
/// in the world frame; the quaternion maps body coordinates to world.
struct BodyConfiguration {
    Vec3 position = Vec3::Zero();       // mm
    Quat orientation = Quat::Identity();
    Vec3 linear_velocity = Vec3::Zero();  // mm/s
    Vec3 angular_velocity = Vec3::Zero(); // rad/s

    Vec6 generalized_velocity() const
    {
        Vec6 v;
        v << linear_velocity, angular_velocity;
        return v;
    }

    void set_generalized_velocity(const Vec6& v)
    {
        linear_velocity = v.head<3>();
        angular_velocity = v.tail<3>();
    }

    Mat3 rotation() const { return orientation.toRotationMatrix(); }

    Vec3 to_world(const Vec3& body_point) const { return position + orientation * body_point; }
    Vec3 to_body(const Vec3& world_point) const { return orientation.conjugate() * (world_point - position); }
};

/// Rotation matrix of exp([theta]_x), generic over the scalar so the stepper
/// can differentiate through it. Uses a series expansion near zero.
template <typename S>
Eigen::Matrix<S, 3, 3> so3_exp(const Eigen::Matrix<S, 3, 1>& theta)
{
    using std::cos;
    using std::sin;
    using std::sqrt;
    const S angle2 = theta.squaredNorm();
    S a;
    S b;
    if (angle2 < S(1e-12)) {
        a = S(1.0) - angle2 / S(6.0);
        b = S(0.5) - angle2 / S(24.0);
    } else {
        const S angle = sqrt(angle2);
        a = sin(angle) / angle;
        b = (S(1.0) - cos(angle)) / angle2;
    }
    Eigen::Matrix<S, 3, 3> k;
    k << S(0), -theta.z(), theta.y(),
         theta.z(), S(0), -theta.x(),
        -theta.y(), theta.x(), S(0);
    return Eigen::Matrix<S, 3, 3>::Identity() + a * k + b * (k * k);
}

/// Quaternion of a rotation vector.
inline Quat quat_exp(const Vec3& theta)
{
    const Real angle = theta.norm();
    if (angle < 1e-12) {
        Quat q(1.0, 0.5 * theta.x(), 0.5 * theta.y(), 0.5 * theta.z());
        return q.normalized();
    }
    return Quat(Eigen::AngleAxisd(angle, theta / angle));
}

/// Advances the pose by one step using the end-of-step velocity already
/// stored in `config` (symplectic Euler). Orientation is renormalized.
inline void integrate_pose(BodyConfiguration& config, Real h)
{
    config.position += h * config.linear_velocity;
    config.orientation = quat_exp(h * config.angular_velocity) * config.orientation;
    config.orientation.normalize();
}

} // namespace tumble
