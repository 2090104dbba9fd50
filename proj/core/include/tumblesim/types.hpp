#pragma once

// Scalar/vector aliases and the SI <-> internal unit conversions.
//
// Internally everything runs in grams, millimetres and seconds. In that
// system one newton is 1e6 g*mm/s^2 and one newton-metre is 1e9 g*mm^2/s^2.

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <numbers>
#include <stdexcept>
#include <string>

namespace tumble {

using Real = double;
using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Quat = Eigen::Quaterniond;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

inline constexpr Real kPi = std::numbers::pi;

inline constexpr Real deg2rad(Real deg) { return deg * kPi / 180.0; }
inline constexpr Real rad2deg(Real rad) { return rad * 180.0 / kPi; }

inline Mat3 skew(const Vec3& v)
{
    Mat3 s;
    s << 0.0, -v.z(), v.y(),
         v.z(), 0.0, -v.x(),
        -v.y(), v.x(), 0.0;
    return s;
}

// Rotation about the world x axis by `angle` radians.
inline Mat3 rot_x(Real angle)
{
    return Eigen::AngleAxisd(angle, Vec3::UnitX()).toRotationMatrix();
}

namespace units {

inline constexpr Real kMetre = 1e3;            // m -> mm
inline constexpr Real kKilogram = 1e3;         // kg -> g
inline constexpr Real kNewton = 1e6;           // N -> g*mm/s^2
inline constexpr Real kNewtonMetre = 1e9;      // N*m -> g*mm^2/s^2
inline constexpr Real kCubicMetre = 1e9;       // m^3 -> mm^3
inline constexpr Real kSquareMetre = 1e6;      // m^2 -> mm^2
inline constexpr Real kPascal = 1.0;           // N/m^2 -> g/(mm*s^2)
inline constexpr Real kGravity = 9.81;         // m/s^2, standard value used throughout

inline constexpr Real micron_to_mm(Real um) { return um * 1e-3; }
inline constexpr Real mm_to_micron(Real mm) { return mm * 1e3; }

} // namespace units

// Thrown for invalid user-facing inputs (bad dimensions, angles out of range).
class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace tumble
