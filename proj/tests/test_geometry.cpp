#include "tumblesim/geometry.hpp"

#include <catch_amalgamated.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <random>

using namespace tumble;
using Catch::Approx;

namespace {

// Fraction of uniform samples in the bounding box that land inside the shape.
Real monte_carlo_volume(const ShapeModel& shape, int n, unsigned seed = 7)
{
    Vec3 lo = Vec3::Constant(1e9), hi = Vec3::Constant(-1e9);
    for (const auto& p : shape.pieces()) {
        lo = lo.cwiseMin(p.aabb_min());
        hi = hi.cwiseMax(p.aabb_max());
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<Real> u(0.0, 1.0);
    int inside = 0;
    for (int i = 0; i < n; ++i) {
        Vec3 p(lo.x() + (hi.x() - lo.x()) * u(rng), lo.y() + (hi.y() - lo.y()) * u(rng),
               lo.z() + (hi.z() - lo.z()) * u(rng));
        if (shape.contains(p))
            ++inside;
    }
    return (hi - lo).prod() * inside / n;
}

std::vector<Real> sorted_face_areas(const ConvexPiece& piece)
{
    std::vector<Real> a;
    for (const auto& c : piece.constraints())
        a.push_back(c.face_area);
    std::sort(a.begin(), a.end());
    return a;
}

} // namespace

TEST_CASE("cuboid faces, rest height and volume", "[geometry]")
{
    const auto s = make_cuboid(0.8, 0.4, 0.1);
    REQUIRE(s.pieces().size() == 1);
    REQUIRE(s.pieces()[0].size() == 6);
    const auto a = sorted_face_areas(s.pieces()[0]);
    CHECK(a[0] == Approx(0.04).epsilon(1e-12));
    CHECK(a[1] == Approx(0.04).epsilon(1e-12));
    CHECK(a[2] == Approx(0.08).epsilon(1e-12));
    CHECK(a[3] == Approx(0.08).epsilon(1e-12));
    CHECK(a[4] == Approx(0.32).epsilon(1e-12));
    CHECK(a[5] == Approx(0.32).epsilon(1e-12));
    CHECK(s.rest_height() == Approx(0.05).epsilon(1e-12));
    CHECK(s.volume() == Approx(0.032).epsilon(1e-12));
}

TEST_CASE("unit cube is centred with unit faces", "[geometry]")
{
    const auto s = make_cuboid(1, 1, 1);
    for (const auto& c : s.pieces()[0].constraints())
        CHECK(c.face_area == Approx(1.0).epsilon(1e-12));
    CHECK(s.pieces()[0].mass_properties().centroid.norm() < 1e-12);
}

TEST_CASE("cuboid volume agrees with containment sampling", "[geometry][oracle]")
{
    const auto s = make_cuboid(0.4, 0.2, 0.1);
    // box is exactly the shape here, so sample a padded box instead
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<Real> u(-0.3, 0.3);
    const int n = 400000;
    int inside = 0;
    for (int i = 0; i < n; ++i)
        if (s.contains(Vec3(u(rng), u(rng), u(rng))))
            ++inside;
    const Real mc = 0.216 * inside / n;
    CHECK(s.volume() == Approx(8e-3).epsilon(1e-12));
    CHECK(mc == Approx(s.volume()).epsilon(0.005 * 4)); // 4 sigma at this n
}

TEST_CASE("nonpositive dimensions are rejected", "[geometry]")
{
    CHECK_THROWS_AS(make_cuboid(0.0, 1, 1), ModelError);
    CHECK_THROWS_AS(make_cuboid(1, -1, 1), ModelError);
}

TEST_CASE("cuboid inertia matches closed form", "[geometry]")
{
    const Real l = 0.8, w = 0.4, h = 0.1, m = 3.78e-5;
    const auto in = InertiaModel::from_shape(make_cuboid(l, w, h), m);
    CHECK(in.inertia(0, 0) == Approx(m / 12 * (l * l + h * h)).epsilon(1e-10));
    CHECK(in.inertia(1, 1) == Approx(m / 12 * (w * w + h * h)).epsilon(1e-10));
    CHECK(in.inertia(2, 2) == Approx(m / 12 * (l * l + w * w)).epsilon(1e-10));
    CHECK(std::abs(in.inertia(0, 1)) < 1e-20);
    const Mat6 big = in.generalized_mass(Mat3::Identity());
    CHECK(big(0, 0) == m);
    CHECK(big(5, 5) == in.inertia(2, 2));
}

TEST_CASE("preset shapes hit their rest heights", "[geometry]")
{
    CHECK(preset_shape("cuboid").rest_height() == Approx(0.100 / 2).epsilon(0.01));
    CHECK(preset_shape("ss").rest_height() == Approx(0.325).epsilon(0.01));
    CHECK(preset_shape("ses").rest_height() == Approx(0.275).epsilon(0.01));
    CHECK(preset_shape("curved").rest_height() == Approx(0.220).epsilon(0.01));
}

TEST_CASE("spiked shapes are unions and the curved one has a curved underside", "[geometry]")
{
    CHECK(preset_shape("ss").pieces().size() > 1);
    CHECK(preset_shape("ses").pieces().size() > 1);
    const auto c = preset_shape("curved");
    REQUIRE(c.pieces().size() == 1);
    const auto& cs = c.pieces()[0].constraints();
    CHECK(std::count_if(cs.begin(), cs.end(), [](const Constraint& k) { return !k.planar(); }) == 1);
}

TEST_CASE("curved shape end faces are W by end height rectangles", "[geometry]")
{
    const auto c = preset_shape("curved");
    REQUIRE(c.curve);
    const Real w = c.dims().width;
    for (const auto& k : c.pieces()[0].constraints()) {
        if (!k.planar())
            continue;
        if (std::abs(std::abs(k.normal.y()) - 1.0) < 1e-12)
            CHECK(k.face_area == Approx(w * c.curve->end_height).epsilon(1e-3));
        if (k.normal.z() > 0.5)
            CHECK(k.face_area == Approx(w * c.dims().length).epsilon(1e-3));
    }
}

TEST_CASE("half-scale ideal tumbling speeds", "[geometry]")
{
    // perimeter in mm per revolution = speed in mm/s at 1 Hz
    CHECK(preset_shape("ses-half").tumbling_perimeter_yz() * 1e3 == Approx(1197).epsilon(1e-6));
    CHECK(preset_shape("ss-half").tumbling_perimeter_yz() * 1e3 == Approx(1093).epsilon(1e-6));
    CHECK(preset_shape("ses-half").tumbling_perimeter_xy() * 1e3 == Approx(1200).epsilon(1e-6));
    CHECK(make_cuboid(0.8, 0.4, 0.1).tumbling_perimeter_yz() == Approx(1.8).epsilon(1e-12));
}

TEST_CASE("full-scale perimeters rank curved > SES > SS > cuboid", "[geometry]")
{
    const Real cu = preset_shape("cuboid").tumbling_perimeter_yz();
    const Real ss = preset_shape("ss").tumbling_perimeter_yz();
    const Real ses = preset_shape("ses").tumbling_perimeter_yz();
    const Real cv = preset_shape("curved").tumbling_perimeter_yz();
    CHECK(cu < ss);
    CHECK(ss < ses);
    CHECK(ses < cv);
}

TEST_CASE("shape volumes agree with containment sampling", "[geometry][oracle]")
{
    for (const char* name : {"ss", "ses", "curved", "ses-half"}) {
        const auto s = preset_shape(name);
        INFO(name);
        CHECK(monte_carlo_volume(s, 400000) == Approx(s.volume()).epsilon(0.02));
    }
}

TEST_CASE("inertia tensors are symmetric positive definite", "[geometry]")
{
    for (const char* name : {"cuboid", "ss", "ses", "curved", "ss-half", "ses-half"}) {
        const auto in = InertiaModel::from_shape(preset_shape(name), 1.0);
        INFO(name);
        CHECK((in.inertia - in.inertia.transpose()).norm() < 1e-15);
        CHECK(Eigen::SelfAdjointEigenSolver<Mat3>(in.inertia).eigenvalues().minCoeff() > 0);
    }
}

TEST_CASE("draft angle", "[geometry][draft]")
{
    const auto base = preset_shape("ses-half");

    SECTION("zero is the identity")
    {
        const auto d = apply_draft(base, 0.0);
        for (std::size_t i = 0; i < base.pieces().size(); ++i)
            for (std::size_t j = 0; j < base.pieces()[i].size(); ++j) {
                const auto& a = base.pieces()[i].constraints()[j];
                const auto& b = d.pieces()[i].constraints()[j];
                CHECK(a.normal == b.normal);
                CHECK(a.offset == b.offset);
            }
    }

    SECTION("sweep domain is constructible and volume decreases")
    {
        Real prev = base.volume();
        for (int phi = 1; phi <= 15; ++phi) {
            const auto d = apply_draft(base, phi);
            CHECK(d.volume() < prev);
            prev = d.volume();
        }
    }

    SECTION("5 degrees loses volume by containment sampling too")
    {
        const auto d = apply_draft(base, 5.0);
        CHECK(monte_carlo_volume(d, 300000, 11) < monte_carlo_volume(base, 300000, 11));
    }

    SECTION("tiny angle converges to the original constraints")
    {
        const auto d = apply_draft(base, 1e-6);
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<Real> u(-0.3, 0.3);
        for (int k = 0; k < 200; ++k) {
            const Vec3 p(u(rng), u(rng), u(rng));
            for (std::size_t i = 0; i < base.pieces().size(); ++i)
                for (std::size_t j = 0; j < base.pieces()[i].size(); ++j) {
                    const Real fa = base.pieces()[i].constraints()[j].value<Real>(p);
                    const Real fb = d.pieces()[i].constraints()[j].value<Real>(p);
                    CHECK(std::abs(fa - fb) < 1e-8);
                }
        }
    }

    SECTION("out of range is rejected")
    {
        CHECK_THROWS_AS(apply_draft(base, -1.0), ModelError);
        CHECK_THROWS_AS(apply_draft(base, 21.0), ModelError);
    }
}

TEST_CASE("world constraint evaluation", "[geometry]")
{
    const auto s = make_cuboid(0.8, 0.4, 0.1);
    BodyConfiguration rest;
    rest.position = Vec3(0, 0, 0.05);

    SECTION("bottom face centre")
    {
        const auto ev = world_constraint_eval(s, rest, Vec3::Zero());
        bool found = false;
        for (const auto& e : ev)
            if ((e.gradient - Vec3(0, 0, -1)).norm() < 1e-12) {
                CHECK(std::abs(e.value) < 1e-12);
                found = true;
            }
        CHECK(found);
    }

    SECTION("centre of mass is interior")
    {
        for (const auto& e : world_constraint_eval(s, rest, rest.position))
            CHECK(e.value < 0);
    }

    SECTION("rotation maps the top normal")
    {
        BodyConfiguration c = rest;
        c.orientation = Quat(Eigen::AngleAxisd(kPi / 2, Vec3::UnitX()));
        const auto ev = world_constraint_eval(s, c, c.position);
        // top face is constraint 4 of the cuboid
        const Vec3 expected = c.orientation * Vec3::UnitZ();
        CHECK((ev[4].gradient - expected).norm() < 1e-12);
        CHECK((ev[4].gradient - Vec3(0, -1, 0)).norm() < 1e-12);
    }
}

TEST_CASE("random interior points satisfy every constraint of their piece", "[geometry][property]")
{
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<Real> u(0.0, 1.0);
    for (const char* name : {"cuboid", "ss", "ses", "curved"}) {
        const auto s = preset_shape(name);
        for (const auto& piece : s.pieces()) {
            const auto& pts = piece.boundary_samples();
            for (int k = 0; k < 100; ++k) {
                // convex combination of boundary samples, pulled towards the centroid
                Vec3 p = Vec3::Zero();
                Real wsum = 0;
                for (int j = 0; j < 4; ++j) {
                    const Real w = u(rng);
                    p += w * pts[static_cast<std::size_t>(u(rng) * pts.size()) % pts.size()];
                    wsum += w;
                }
                p = 0.5 * (p / wsum) + 0.5 * piece.mass_properties().centroid;
                for (const auto& c : piece.constraints())
                    CHECK(c.value<Real>(p) < 0);
            }
        }
    }
}
