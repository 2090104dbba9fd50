#include "tumblesim/mncp.hpp"

#include <catch_amalgamated.hpp>

#include <random>

using namespace tumble;
using Catch::Approx;

namespace {

MncpProblem scalar_lcp(Real q)
{
    MncpProblem p;
    p.n_comp = 1;
    p.residual = [q](const VecX& z, VecX& r) { r[0] = z[0] + q; };
    return p;
}

// x^2 + y = 4 with 0 <= y _|_ y + x - 3 >= 0
MncpProblem mixed()
{
    MncpProblem p;
    p.n_eq = 1;
    p.n_comp = 1;
    p.residual = [](const VecX& z, VecX& r) {
        r[0] = z[0] * z[0] + z[1] - 4.0;
        r[1] = z[1] + z[0] - 3.0;
    };
    return p;
}

} // namespace

TEST_CASE("Fischer-Burmeister zero set", "[mncp]")
{
    for (Real b : {0.0, 0.5, 3.0})
        CHECK(fischer_burmeister(0.0, b) == 0.0);
    for (Real a : {0.0, 0.5, 3.0})
        CHECK(fischer_burmeister(a, 0.0) == 0.0);
    CHECK(fischer_burmeister(1.0, 1.0) > 0.0);
    CHECK(fischer_burmeister(-1.0, 1.0) < 0.0);
}

TEST_CASE("scalar LCPs", "[mncp]")
{
    SECTION("active")
    {
        const auto r = solve(scalar_lcp(-1.0), VecX::Constant(1, 5.0));
        REQUIRE(r.converged());
        CHECK(r.z[0] == Approx(1.0).epsilon(1e-10));
    }
    SECTION("inactive")
    {
        const auto r = solve(scalar_lcp(1.0), VecX::Constant(1, 5.0));
        REQUIRE(r.converged());
        CHECK(std::abs(r.z[0]) < 1e-10);
    }
}

TEST_CASE("mixed problem converges and the merit is below tolerance", "[mncp]")
{
    const auto p = mixed();
    VecX z0(2);
    z0 << 0.5, 0.5;
    const auto r = solve(p, z0);
    REQUIRE(r.converged());
    CHECK(r.residual < SolverConfig{}.tolerance);
    CHECK(merit(p, r.z) < SolverConfig{}.tolerance);
    // y = 0 would need x = +-2 and x >= 3
    CHECK(r.z[1] > 0.0);
    CHECK(r.z[0] * r.z[0] + r.z[1] == Approx(4.0));
    CHECK(r.z[0] + r.z[1] == Approx(3.0));
    REQUIRE(!r.merit_trace.empty());
    CHECK(r.merit_trace.back() <= r.merit_trace.front());
}

TEST_CASE("analytic Jacobian agrees with finite differences", "[mncp][oracle]")
{
    auto p = mixed();
    p.jacobian = [](const VecX& z, VecX& r, MatX& j) {
        r.resize(2);
        r[0] = z[0] * z[0] + z[1] - 4.0;
        r[1] = z[1] + z[0] - 3.0;
        j.resize(2, 2);
        j << 2.0 * z[0], 1.0, 1.0, 1.0;
    };
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<Real> u(-3.0, 3.0);
    for (int k = 0; k < 20; ++k) {
        VecX z(2);
        z << u(rng), u(rng);
        const MatX ja = jacobian(p, z);
        const MatX jf = fd_jacobian(p, z);
        CHECK((ja - jf).cwiseAbs().maxCoeff() <= 1e-4 * std::max(1.0, ja.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("non-finite residual is reported, not hidden", "[mncp]")
{
    MncpProblem p;
    p.n_eq = 1;
    p.residual = [](const VecX& z, VecX& r) { r[0] = std::log(z[0]); };
    CHECK_THROWS_AS(merit(p, VecX::Constant(1, -1.0)), ModelError);
    const auto r = solve(p, VecX::Constant(1, -1.0));
    CHECK_FALSE(r.converged());
    CHECK(r.status == SolveStatus::NonFinite);
}

TEST_CASE("unsolvable problem reports non-convergence", "[mncp]")
{
    MncpProblem p;
    p.n_eq = 1;
    p.residual = [](const VecX& z, VecX& r) { r[0] = z[0] * z[0] + 1.0; };
    SolverConfig cfg;
    cfg.max_iters = 30;
    const auto r = solve(p, VecX::Constant(1, 0.3), cfg);
    CHECK_FALSE(r.converged());
    CHECK(to_string(r.status) != "converged");
}

TEST_CASE("solver configuration validation", "[mncp]")
{
    SolverConfig c;
    CHECK_NOTHROW(c.validate());
    c.tolerance = 0.0;
    CHECK_THROWS_AS(c.validate(), ModelError);
    c = {};
    c.max_iters = 0;
    CHECK_THROWS_AS(c.validate(), ModelError);
}
