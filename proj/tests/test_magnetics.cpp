#include "tumblesim/magnetics.hpp"

#include <catch_amalgamated.hpp>

#include <random>

using namespace tumble;
using Catch::Approx;

TEST_CASE("rotating field reference, quarter period and periodicity", "[magnetics]")
{
    MagneticActuation act;
    act.field_tesla = 0.01;
    act.frequency = 2.0;
    CHECK((field_at(0.0, act) - Vec3(0.0, 0.01, 0.0)).norm() < 1e-15);
    // turns from +y towards -z, which tumbles the robot towards +y
    CHECK((field_at(0.125, act) - Vec3(0.0, 0.0, -0.01)).norm() < 1e-15);
    CHECK((field_at(0.5, act) - field_at(0.0, act)).norm() < 1e-12);
    CHECK((field_at(0.37, act) - field_at(0.87, act)).norm() < 1e-12);
    for (Real t : {0.0, 0.1, 0.3})
        CHECK(field_at(t, act).norm() == Approx(0.01));
}

TEST_CASE("incline tilts the field plane", "[magnetics]")
{
    MagneticActuation act;
    act.tilt = deg2rad(30.0);
    const Vec3 b = field_at(0.0, act);
    CHECK(b.x() == 0.0);
    CHECK(b.y() == Approx(0.01 * std::cos(deg2rad(30.0))));
    CHECK(b.z() == Approx(-0.01 * std::sin(deg2rad(30.0))));
}

TEST_CASE("magnetization cone", "[magnetics]")
{
    CHECK((magnetization_axis(0.0, 0.0) - Vec3::UnitY()).norm() < 1e-15);
    const Vec3 u = magnetization_axis(10.0, 90.0);
    CHECK(u.x() == Approx(0.17365).epsilon(1e-4));
    CHECK(u.y() == Approx(0.98481).epsilon(1e-4));
    CHECK(std::abs(u.z()) < 1e-15);
    for (int t2 = 0; t2 < 360; t2 += 10) {
        const Vec3 v = magnetization_axis(10.0, t2);
        CHECK(std::abs(v.dot(Vec3::UnitY()) - std::cos(deg2rad(10.0))) < 1e-12);
        CHECK(v.norm() == Approx(1.0).epsilon(1e-14));
    }
    CHECK_THROWS_AS(magnetization_axis(11.0, 0.0), ModelError);
    CHECK_THROWS_AS(magnetization_axis(5.0, 360.0), ModelError);
}

TEST_CASE("torque magnitude and orthogonality", "[magnetics]")
{
    MagneticActuation act;
    act.magnetic_volume = 2.9e-11 * units::kCubicMetre;
    act.magnetization = 15000.0;
    act.alpha_deg = 0.0;
    act.field_tesla = 0.01;

    SECTION("parallel field gives no torque")
    {
        const Vec3 t = magnetic_torque<Real>(act, Mat3::Identity(), Vec3(0.0, 0.01, 0.0));
        CHECK(t.norm() == 0.0);
    }
    SECTION("perpendicular field")
    {
        const Vec3 t = magnetic_torque<Real>(act, Mat3::Identity(), Vec3(0.0, 0.0, 0.01));
        CHECK(t.norm() / units::kNewtonMetre == Approx(2.9e-11 * 15000.0 * 0.01));
        CHECK(t.norm() / units::kNewtonMetre == Approx(4.35e-9));
    }
    SECTION("random poses")
    {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<Real> u(-1.0, 1.0);
        act.alpha_deg = 27.0;
        act.cone = ErrorCone{10.0, 10.0, 40.0};
        for (int k = 0; k < 50; ++k) {
            const Mat3 r = Quat(u(rng), u(rng), u(rng), u(rng)).normalized().toRotationMatrix();
            const Vec3 b = 0.02 * Vec3(u(rng), u(rng), u(rng));
            const Vec3 t = magnetic_torque<Real>(act, r, b);
            const Vec3 e = r * act.body_axis();
            CHECK(std::abs(t.dot(e)) <= 1e-14 * t.norm());
            CHECK(std::abs(t.dot(b)) <= 1e-14 * t.norm() * b.norm());
        }
    }
}

TEST_CASE("alignment offset turns the axis about body x", "[magnetics]")
{
    MagneticActuation act;
    act.alpha_deg = 27.0;
    const Vec3 a = act.body_axis();
    CHECK(a.x() == 0.0);
    CHECK(a.y() == Approx(std::cos(deg2rad(27.0))));
    CHECK(a.z() == Approx(std::sin(deg2rad(27.0))));
}

TEST_CASE("actuation validation", "[magnetics]")
{
    MagneticActuation act;
    CHECK_NOTHROW(act.validate());
    act.field_tesla = -1.0;
    CHECK_THROWS_AS(act.validate(), ModelError);
    act = {};
    act.magnetic_volume = 0.0;
    CHECK_THROWS_AS(act.validate(), ModelError);
}
