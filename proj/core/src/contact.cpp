#include "tumblesim/contact.hpp"

#include <cmath>
#include <limits>

namespace tumble {

ContactFrame make_frame(const Substrate& s)
{
    ContactFrame f;
    f.n = s.normal.normalized();
    Vec3 t = Vec3::UnitY() - f.n * f.n.dot(Vec3::UnitY());
    if (t.norm() < 1e-9)
        t = Vec3::UnitX() - f.n * f.n.dot(Vec3::UnitX());
    f.t = t.normalized();
    f.o = f.n.cross(f.t);
    return f;
}

WrenchMaps wrench_maps(const ContactFrame& frame, const BodyConfiguration& config)
{
    return wrench_maps<Real>(frame, frame.a1, config.position);
}

Real piece_gap(const ConvexPiece& piece, const Vec3& position, const Mat3& rotation, const Substrate& s)
{
    const Vec3 lowest = piece.support(-(rotation.transpose() * s.normal));
    return s.value<Real>(Vec3(position + rotation * lowest));
}

std::size_t select_piece(const ShapeModel& shape, const Vec3& position, const Mat3& rotation, const Substrate& s)
{
    std::size_t best = 0;
    Real best_gap = std::numeric_limits<Real>::infinity();
    for (std::size_t i = 0; i < shape.pieces().size(); ++i) {
        const Real g = piece_gap(shape.pieces()[i], position, rotation, s);
        if (g < best_gap - 1e-12) {
            best_gap = g;
            best = i;
        }
    }
    return best;
}

ClosestPoints closest_points(const ShapeModel& shape, const BodyConfiguration& config, const Substrate& s,
                             const SolverConfig& cfg)
{
    const Mat3 rot = config.rotation();
    ClosestPoints out;
    out.piece = select_piece(shape, config.position, rot, s);
    const ConvexPiece& piece = shape.pieces()[out.piece];
    const int m = static_cast<int>(piece.size());

    MncpProblem prob;
    prob.n_eq = 6;
    prob.n_comp = m + 1;
    prob.residual = [&](const VecX& z, VecX& r) {
        const Vec3 a1 = z.segment<3>(0);
        const Vec3 a2 = z.segment<3>(3);
        const VecX l = z.segment(6, m);
        auto eq = r.head(6);
        auto comp = r.tail(m + 1);
        assemble_nonpenetration<Real>(piece, s, a1, a2, l, z[6 + m], config.position, rot, eq, comp);
    };

    // start from the support point with the most opposed active face
    const Vec3 nb = rot.transpose() * s.normal;
    const Vec3 low = piece.support(-nb);
    VecX z0 = VecX::Zero(prob.size());
    const Vec3 a1 = config.position + rot * low;
    const Real gap = s.value<Real>(a1);
    z0.segment<3>(0) = a1;
    z0.segment<3>(3) = a1 - gap * s.normal;
    z0[6 + m] = std::max(gap, 0.0);
    int best = -1;
    Real best_dot = 0.0;
    for (int i = 0; i < m; ++i) {
        const auto& c = piece.constraints()[static_cast<std::size_t>(i)];
        if (std::abs(c.value<Real>(low)) > 1e-9)
            continue;
        const Real d = -c.gradient<Real>(low).dot(nb);
        if (d > best_dot) {
            best_dot = d;
            best = i;
        }
    }
    if (best >= 0)
        z0[6 + best] = 1.0 / best_dot;

    out.solve = solve(prob, z0, cfg);
    if (!out.solve.converged())
        throw ModelError("closest-point solve failed: " + to_string(out.solve.status));
    const VecX& z = out.solve.z;
    out.frame = make_frame(s);
    out.frame.a1 = z.segment<3>(0);
    out.frame.a2 = z.segment<3>(3);
    out.frame.gap = s.value<Real>(out.frame.a1);
    out.l.assign(z.data() + 6, z.data() + 6 + m);
    out.l2 = z[6 + m];
    return out;
}

} // namespace tumble
