#pragma once

// Equivalent contact point (ECP) between the robot and a flat substrate.
//
// The substrate is the halfspace g(x) = n.x - d <= 0. The contact model used
// everywhere is
//
//   a2 - a1 + l2 n = 0,         0 <= l_i _|_ -f_i(a1) >= 0
//   n + sum_i l_i grad f_i(a1) = 0,   0 <= l2 _|_ -g(a2) >= 0
//
// with robot constraints f_i evaluated at the end-of-step pose.

#include "tumblesim/body.hpp"
#include "tumblesim/geometry.hpp"
#include "tumblesim/mncp.hpp"
#include "tumblesim/types.hpp"

#include <vector>

namespace tumble {

struct Substrate {
    Vec3 normal = Vec3::UnitZ();
    Real offset = 0.0;

    template <typename S>
    S value(const Eigen::Matrix<S, 3, 1>& p) const
    {
        return S(normal.x()) * p.x() + S(normal.y()) * p.y() + S(normal.z()) * p.z() - S(offset);
    }
};

struct ContactFrame {
    Vec3 n = Vec3::UnitZ();
    Vec3 t = Vec3::UnitY();
    Vec3 o = -Vec3::UnitX();
    Vec3 a1 = Vec3::Zero();
    Vec3 a2 = Vec3::Zero();
    Real gap = 0.0;
};

/// n from the substrate; t is world y projected onto the plane; o = n x t.
ContactFrame make_frame(const Substrate& s);

template <typename S>
struct WrenchMapsT {
    Eigen::Matrix<S, 6, 1> n, t, o, r;
    Eigen::Matrix<S, 3, 1> arm;
};
using WrenchMaps = WrenchMapsT<Real>;

/// W_k = [k; arm x k] for k in {n, t, o}; W_r = [0; n]; arm = a1 - centre of mass.
template <typename S>
WrenchMapsT<S> wrench_maps(const ContactFrame& f, const Eigen::Matrix<S, 3, 1>& a1,
                           const Eigen::Matrix<S, 3, 1>& centre)
{
    WrenchMapsT<S> w;
    w.arm = a1 - centre;
    auto fill = [&](const Vec3& k) {
        Eigen::Matrix<S, 6, 1> out;
        const Eigen::Matrix<S, 3, 1> ks = k.cast<S>();
        out << ks, w.arm.cross(ks);
        return out;
    };
    w.n = fill(f.n);
    w.t = fill(f.t);
    w.o = fill(f.o);
    w.r << S(0), S(0), S(0), f.n.cast<S>();
    return w;
}

WrenchMaps wrench_maps(const ContactFrame& frame, const BodyConfiguration& config);

/// Lowest-gap piece at a pose. Ties go to the lowest index.
std::size_t select_piece(const ShapeModel& shape, const Vec3& position, const Mat3& rotation, const Substrate& s);

/// Support-point gap of one piece.
Real piece_gap(const ConvexPiece& piece, const Vec3& position, const Mat3& rotation, const Substrate& s);

/// Writes the six contact equalities and the m + 1 geometric complementarity
/// partners (-f_i(a1), -g(a2)) for one piece. `eq` and `comp` must be sized.
template <typename S, typename Eq, typename Comp>
void assemble_nonpenetration(const ConvexPiece& piece, const Substrate& s, const Eigen::Matrix<S, 3, 1>& a1,
                             const Eigen::Matrix<S, 3, 1>& a2, const Eigen::Matrix<S, Eigen::Dynamic, 1>& l,
                             const S& l2, const Eigen::Matrix<S, 3, 1>& position,
                             const Eigen::Matrix<S, 3, 3>& rotation, Eq&& eq, Comp&& comp)
{
    const Eigen::Matrix<S, 3, 1> n = s.normal.cast<S>();
    const Eigen::Matrix<S, 3, 1> b = rotation.transpose() * (a1 - position);
    Eigen::Matrix<S, 3, 1> cone = n;
    const auto& cs = piece.constraints();
    for (std::size_t i = 0; i < cs.size(); ++i) {
        const Eigen::Index k = static_cast<Eigen::Index>(i);
        cone += l[k] * (rotation * cs[i].gradient<S>(b));
        comp[k] = -cs[i].value<S>(b);
    }
    const Eigen::Matrix<S, 3, 1> sep = a2 - a1 + l2 * n;
    for (int j = 0; j < 3; ++j) {
        eq[j] = sep[j];
        eq[3 + j] = cone[j];
    }
    comp[static_cast<Eigen::Index>(cs.size())] = -s.value<S>(a2);
}

struct ClosestPoints {
    ContactFrame frame;
    std::size_t piece = 0;
    std::vector<Real> l;
    Real l2 = 0.0;
    MncpResult solve;
};

/// ECP pair of the lowest piece found with the same semismooth Newton solver
/// as the dynamics. Throws ModelError when it does not converge.
ClosestPoints closest_points(const ShapeModel& shape, const BodyConfiguration& config, const Substrate& s,
                             const SolverConfig& cfg = {});

} // namespace tumble
