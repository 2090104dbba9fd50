#include "tumblesim/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

namespace tumble {

namespace {

constexpr Real kBox = 100.0;          // mm, bounding box for vertex enumeration
constexpr Real kFeasTol = 1e-9;
constexpr int kCircleSides = 4096;
constexpr int kCurveSamples = 2048;
constexpr int kSubdivisions = 8;

using Pt2 = Eigen::Vector2d;
using Poly = std::vector<Pt2>;

Real cross2(const Pt2& o, const Pt2& a, const Pt2& b)
{
    return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

// Andrew's monotone chain, counter-clockwise, no collinear points.
Poly convex_hull(Poly pts)
{
    std::sort(pts.begin(), pts.end(), [](const Pt2& a, const Pt2& b) {
        return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const Pt2& a, const Pt2& b) { return (a - b).norm() < 1e-12; }),
              pts.end());
    if (pts.size() < 3)
        return pts;
    Poly hull(2 * pts.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        while (k >= 2 && cross2(hull[k - 2], hull[k - 1], pts[i]) <= 1e-15)
            --k;
        hull[k++] = pts[i];
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
        while (k >= t && cross2(hull[k - 2], hull[k - 1], pts[i - 1]) <= 1e-15)
            --k;
        hull[k++] = pts[i - 1];
    }
    hull.resize(k - 1);
    return hull;
}

Real polygon_perimeter(const Poly& p)
{
    if (p.size() < 2)
        return 0.0;
    Real s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
        s += (p[(i + 1) % p.size()] - p[i]).norm();
    return s;
}

Real polygon_area(const Poly& p)
{
    Real a = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const Pt2& u = p[i];
        const Pt2& v = p[(i + 1) % p.size()];
        a += u.x() * v.y() - v.x() * u.y();
    }
    return 0.5 * a;
}

// Sutherland-Hodgman against a . q <= b.
Poly clip(const Poly& poly, const Pt2& a, Real b)
{
    Poly out;
    if (poly.empty())
        return out;
    out.reserve(poly.size() + 1);
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Pt2& p = poly[i];
        const Pt2& q = poly[(i + 1) % poly.size()];
        const Real fp = a.dot(p) - b;
        const Real fq = a.dot(q) - b;
        if (fp <= 0.0)
            out.push_back(p);
        if ((fp < 0.0 && fq > 0.0) || (fp > 0.0 && fq < 0.0)) {
            const Real t = fp / (fp - fq);
            out.push_back(p + t * (q - p));
        }
    }
    return out;
}

// Area, first and second moments of a polygon in the (y, z) plane.
struct SectionMoments {
    Real a = 0, sy = 0, sz = 0, syy = 0, szz = 0, syz = 0;
};

SectionMoments section_moments(const Poly& p)
{
    SectionMoments m;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const Real y0 = p[i].x(), z0 = p[i].y();
        const Real y1 = p[(i + 1) % p.size()].x(), z1 = p[(i + 1) % p.size()].y();
        const Real c = y0 * z1 - y1 * z0;
        m.a += c;
        m.sy += (y0 + y1) * c;
        m.sz += (z0 + z1) * c;
        m.syy += (y0 * y0 + y0 * y1 + y1 * y1) * c;
        m.szz += (z0 * z0 + z0 * z1 + z1 * z1) * c;
        m.syz += (y0 * z1 + 2 * y0 * z0 + 2 * y1 * z1 + y1 * z0) * c;
    }
    m.a /= 2;
    m.sy /= 6;
    m.sz /= 6;
    m.syy /= 12;
    m.szz /= 12;
    m.syz /= 24;
    return m;
}

} // namespace

Constraint Constraint::plane(const Vec3& outward_normal, const Vec3& point_on_plane)
{
    const Real n = outward_normal.norm();
    if (!(n > 0))
        throw ModelError("plane constraint needs a nonzero normal");
    Constraint c;
    c.kind = Kind::Planar;
    c.normal = outward_normal / n;
    c.offset = c.normal.dot(point_on_plane);
    return c;
}

Constraint Constraint::cylinder_x(Real axis_y, Real axis_z, Real radius)
{
    if (!(radius > 0))
        throw ModelError("cylinder constraint needs a positive radius");
    Constraint c;
    c.kind = Kind::Quadratic;
    c.axis_y = axis_y;
    c.axis_z = axis_z;
    c.radius = radius;
    return c;
}

ConvexPiece::ConvexPiece(std::vector<Constraint> constraints) : constraints_(std::move(constraints))
{
    analyse();
}

Real ConvexPiece::max_value(const Vec3& p) const
{
    Real m = -std::numeric_limits<Real>::infinity();
    for (const auto& c : constraints_)
        m = std::max(m, c.value<Real>(p));
    return m;
}

bool ConvexPiece::contains(const Vec3& p, Real tol) const { return max_value(p) <= tol; }

Vec3 ConvexPiece::support(const Vec3& direction) const
{
    Vec3 best = samples_.front();
    Real best_d = direction.dot(best);
    for (const auto& s : samples_) {
        const Real d = direction.dot(s);
        if (d > best_d) {
            best_d = d;
            best = s;
        }
    }
    return best;
}

ConvexPiece ConvexPiece::translated(const Vec3& shift) const
{
    auto cs = constraints_;
    for (auto& c : cs) {
        if (c.planar()) {
            c.offset += c.normal.dot(shift);
        } else {
            c.axis_y += shift.y();
            c.axis_z += shift.z();
        }
    }
    return ConvexPiece(std::move(cs));
}

void ConvexPiece::analyse()
{
    if (constraints_.empty())
        throw ModelError("convex piece needs at least one constraint");

    std::vector<Constraint> planes;
    const Constraint* quad = nullptr;
    for (const auto& c : constraints_) {
        if (c.planar()) {
            if (std::abs(c.normal.norm() - 1.0) > 1e-12)
                throw ModelError("planar constraint normal must be unit length");
            planes.push_back(c);
        } else {
            if (quad)
                throw ModelError("at most one curved constraint per piece is supported");
            if (!(c.radius > 0))
                throw ModelError("curved constraint has zero gradient");
            quad = &c;
        }
    }
    const std::size_t n_real = planes.size();
    for (int axis = 0; axis < 3; ++axis) {
        for (Real sgn : {1.0, -1.0}) {
            Vec3 n = Vec3::Zero();
            n[axis] = sgn;
            planes.push_back(Constraint::plane(n, sgn * kBox * Vec3::Unit(axis)));
        }
    }

    samples_.clear();
    auto add_sample = [&](const Vec3& p) {
        for (const auto& s : samples_)
            if ((s - p).squaredNorm() < 1e-24)
                return;
        samples_.push_back(p);
    };

    // vertices of the planar part
    for (std::size_t i = 0; i < planes.size(); ++i)
        for (std::size_t j = i + 1; j < planes.size(); ++j)
            for (std::size_t k = j + 1; k < planes.size(); ++k) {
                if (i >= n_real && j >= n_real && k >= n_real)
                    continue;
                Mat3 a;
                a.row(0) = planes[i].normal.transpose();
                a.row(1) = planes[j].normal.transpose();
                a.row(2) = planes[k].normal.transpose();
                if (std::abs(a.determinant()) < 1e-12)
                    continue;
                const Vec3 p = a.partialPivLu().solve(Vec3(planes[i].offset, planes[j].offset, planes[k].offset));
                if (max_value(p) > kFeasTol)
                    continue;
                if (p.cwiseAbs().maxCoeff() > kBox - 1e-9) {
                    if (!quad || quad->value<Real>(p) <= kFeasTol)
                        throw ModelError("convex piece is unbounded");
                    continue;
                }
                add_sample(p);
            }

    // curved surface: for each angle, the feasible segment along x
    if (quad) {
        std::vector<Real> angles;
        for (int s = 0; s < kCurveSamples; ++s)
            angles.push_back(2.0 * kPi * s / kCurveSamples);
        // exact corners where x-parallel planes cut the cylinder
        for (std::size_t i = 0; i < n_real; ++i) {
            const auto& c = planes[i];
            const Real nyz = std::hypot(c.normal.y(), c.normal.z());
            if (std::abs(c.normal.x()) > 1e-14 || nyz < 1e-14)
                continue;
            const Real d = (c.offset - c.normal.y() * quad->axis_y - c.normal.z() * quad->axis_z) /
                           (nyz * quad->radius);
            if (std::abs(d) > 1.0)
                continue;
            const Real base = std::atan2(c.normal.z(), c.normal.y());
            const Real spread = std::acos(d);
            angles.push_back(base + spread);
            angles.push_back(base - spread);
        }
        for (const Real t : angles) {
            const Real y = quad->axis_y + quad->radius * std::cos(t);
            const Real z = quad->axis_z + quad->radius * std::sin(t);
            Real lo = -kBox, hi = kBox;
            bool ok = true;
            for (std::size_t i = 0; i < n_real && ok; ++i) {
                const auto& c = planes[i];
                const Real rhs = c.offset - c.normal.y() * y - c.normal.z() * z;
                if (std::abs(c.normal.x()) < 1e-14) {
                    ok = rhs >= -kFeasTol;
                } else if (c.normal.x() > 0) {
                    hi = std::min(hi, rhs / c.normal.x());
                } else {
                    lo = std::max(lo, rhs / c.normal.x());
                }
            }
            if (!ok || lo > hi)
                continue;
            if (lo <= -kBox || hi >= kBox)
                throw ModelError("convex piece is unbounded along its curved surface");
            add_sample(Vec3(lo, y, z));
            add_sample(Vec3(hi, y, z));
        }
    }

    if (samples_.size() < 4)
        throw ModelError("convex piece is empty or degenerate");

    aabb_min_ = samples_.front();
    aabb_max_ = samples_.front();
    for (const auto& s : samples_) {
        aabb_min_ = aabb_min_.cwiseMin(s);
        aabb_max_ = aabb_max_.cwiseMax(s);
    }

    // face areas from the boundary samples lying on each plane
    const Real scale = (aabb_max_ - aabb_min_).maxCoeff();
    for (auto& c : constraints_) {
        c.face_area = 0.0;
        if (!c.planar())
            continue;
        Vec3 u = c.normal.unitOrthogonal();
        Vec3 w = c.normal.cross(u);
        Poly pts;
        for (const auto& s : samples_)
            if (std::abs(c.value<Real>(s)) < 1e-9 * std::max(1.0, scale))
                pts.emplace_back(u.dot(s), w.dot(s));
        if (pts.size() >= 3)
            c.face_area = std::abs(polygon_area(convex_hull(pts)));
    }

    // mass properties by slicing along x
    std::vector<Real> breaks{aabb_min_.x(), aabb_max_.x()};
    for (const auto& s : samples_)
        if (!quad)
            breaks.push_back(s.x());
    if (quad) {
        for (std::size_t i = 0; i < n_real; ++i)
            if (std::abs(planes[i].normal.x()) > 1e-14)
                for (const auto& s : samples_)
                    if (std::abs(planes[i].value<Real>(s)) < 1e-9)
                        breaks.push_back(s.x());
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end(), [](Real a, Real b) { return std::abs(a - b) < 1e-12; }),
                 breaks.end());

    Poly start;
    if (quad) {
        for (int k = 0; k < kCircleSides; ++k) {
            const Real t = 2.0 * kPi * k / kCircleSides;
            start.emplace_back(quad->axis_y + quad->radius * std::cos(t), quad->axis_z + quad->radius * std::sin(t));
        }
    } else {
        start = {Pt2(-2 * kBox, -2 * kBox), Pt2(2 * kBox, -2 * kBox), Pt2(2 * kBox, 2 * kBox), Pt2(-2 * kBox, 2 * kBox)};
    }

    auto section = [&](Real x) {
        Poly p = start;
        for (std::size_t i = 0; i < n_real && !p.empty(); ++i) {
            const auto& c = planes[i];
            const Pt2 a(c.normal.y(), c.normal.z());
            const Real b = c.offset - c.normal.x() * x;
            if (a.norm() < 1e-14) {
                if (b < 0)
                    p.clear();
                continue;
            }
            p = clip(p, a, b);
        }
        return section_moments(p);
    };

    static const std::array<Real, 3> gl_x{-0.7745966692414834, 0.0, 0.7745966692414834};
    static const std::array<Real, 3> gl_w{5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

    Real v = 0, mx = 0, my = 0, mz = 0, xx = 0, yy = 0, zz = 0, xy = 0, xz = 0, yz = 0;
    for (std::size_t b = 0; b + 1 < breaks.size(); ++b) {
        const Real step = (breaks[b + 1] - breaks[b]) / kSubdivisions;
        for (int sub = 0; sub < kSubdivisions; ++sub) {
            const Real x0 = breaks[b] + sub * step;
            const Real mid = x0 + 0.5 * step;
            for (int g = 0; g < 3; ++g) {
                const Real x = mid + 0.5 * step * gl_x[g];
                const Real w = 0.5 * step * gl_w[g];
                const auto m = section(x);
                v += w * m.a;
                mx += w * x * m.a;
                my += w * m.sy;
                mz += w * m.sz;
                xx += w * x * x * m.a;
                yy += w * m.syy;
                zz += w * m.szz;
                xy += w * x * m.sy;
                xz += w * x * m.sz;
                yz += w * m.syz;
            }
        }
    }
    if (!(v > 0))
        throw ModelError("convex piece has zero volume");
    mass_.volume = v;
    mass_.centroid = Vec3(mx, my, mz) / v;
    mass_.second_moment << xx, xy, xz, xy, yy, yz, xz, yz, zz;
}

std::string to_string(ShapeKind kind)
{
    switch (kind) {
    case ShapeKind::Cuboid: return "cuboid";
    case ShapeKind::Spiked: return "ss";
    case ShapeKind::SpikedEnds: return "ses";
    case ShapeKind::Curved: return "curved";
    }
    return "unknown";
}

ShapeKind shape_kind_from_string(const std::string& name)
{
    if (name == "cuboid") return ShapeKind::Cuboid;
    if (name == "ss" || name == "spiked") return ShapeKind::Spiked;
    if (name == "ses" || name == "spiked_ends") return ShapeKind::SpikedEnds;
    if (name == "curved") return ShapeKind::Curved;
    throw ModelError("unknown shape kind '" + name + "' (expected cuboid, ss, ses or curved)");
}

ShapeModel::ShapeModel(ShapeKind kind, ShapeDims dims, std::vector<ConvexPiece> pieces)
    : kind_(kind), dims_(dims)
{
    if (pieces.empty())
        throw ModelError("shape needs at least one piece");
    Vec3 first = Vec3::Zero();
    Mat3 second = Mat3::Zero();
    Real vol = 0.0;
    for (const auto& p : pieces) {
        const auto& m = p.mass_properties();
        vol += m.volume;
        first += m.volume * m.centroid;
        second += m.second_moment;
    }
    const Vec3 cm = first / vol;
    for (auto& p : pieces)
        pieces_.push_back(p.translated(-cm));
    volume_ = vol;
    const Mat3 s = second - vol * cm * cm.transpose();
    unit_inertia_ = s.trace() * Mat3::Identity() - s;
    unit_inertia_ = 0.5 * (unit_inertia_ + unit_inertia_.transpose()).eval();

    Real zmin = std::numeric_limits<Real>::infinity();
    for (const auto& p : pieces_)
        for (const auto& q : p.boundary_samples())
            zmin = std::min(zmin, q.z());
    rest_height_ = -zmin;
}

bool ShapeModel::contains(const Vec3& p) const
{
    for (const auto& piece : pieces_)
        if (piece.contains(p))
            return true;
    return false;
}

Real ShapeModel::tumbling_perimeter_yz() const
{
    Poly pts;
    for (const auto& p : pieces_)
        for (const auto& q : p.boundary_samples())
            pts.emplace_back(q.y(), q.z());
    return polygon_perimeter(convex_hull(pts));
}

Real ShapeModel::tumbling_perimeter_xy() const
{
    Poly pts;
    for (const auto& p : pieces_)
        for (const auto& q : p.boundary_samples())
            pts.emplace_back(q.x(), q.y());
    return polygon_perimeter(convex_hull(pts));
}

InertiaModel InertiaModel::from_shape(const ShapeModel& shape, Real mass_g)
{
    if (!(mass_g > 0))
        throw ModelError("mass must be positive");
    InertiaModel m;
    m.mass = mass_g;
    m.inertia = shape.unit_density_inertia() * (mass_g / shape.volume());
    return m;
}

Mat6 InertiaModel::generalized_mass(const Mat3& rotation) const
{
    Mat6 out = Mat6::Zero();
    out.topLeftCorner<3, 3>() = mass * Mat3::Identity();
    out.bottomRightCorner<3, 3>() = rotation * inertia * rotation.transpose();
    return out;
}

namespace {

std::vector<Constraint> box_constraints(Real x0, Real x1, Real y0, Real y1, Real z0, Real z1)
{
    return {Constraint::plane(Vec3::UnitX(), Vec3(x1, 0, 0)), Constraint::plane(-Vec3::UnitX(), Vec3(x0, 0, 0)),
            Constraint::plane(Vec3::UnitY(), Vec3(0, y1, 0)), Constraint::plane(-Vec3::UnitY(), Vec3(0, y0, 0)),
            Constraint::plane(Vec3::UnitZ(), Vec3(0, 0, z1)), Constraint::plane(-Vec3::UnitZ(), Vec3(0, 0, z0))};
}

void check_dims(const ShapeDims& d)
{
    if (!(d.length > 0) || !(d.width > 0) || !(d.height > 0))
        throw ModelError("shape dimensions must be positive");
}

// Triangular prism across the full width with its base on z = base_z and
// apex at (apex_y, base_z + sign * height).
ConvexPiece spike_piece(Real half_w, Real base_z, Real sign, Real apex_y, Real height, Real base_width)
{
    const Vec3 apex(0, apex_y, base_z + sign * height);
    const Vec3 left(0, apex_y - 0.5 * base_width, base_z);
    const Vec3 right(0, apex_y + 0.5 * base_width, base_z);
    auto wall = [&](const Vec3& a, const Vec3& b) {
        const Vec3 e = b - a;
        Vec3 n(0, sign * e.z(), -sign * e.y());
        // outward means away from the base midpoint
        const Vec3 mid(0, apex_y, base_z + 0.5 * sign * height);
        if (n.dot(a - mid) < 0)
            n = -n;
        return Constraint::plane(n, a);
    };
    auto base = Constraint::plane(Vec3(0, 0, -sign), Vec3(0, 0, base_z));
    base.internal = true;
    return ConvexPiece({Constraint::plane(Vec3::UnitX(), Vec3(half_w, 0, 0)),
                        Constraint::plane(-Vec3::UnitX(), Vec3(-half_w, 0, 0)), base, wall(left, apex),
                        wall(apex, right)});
}

ShapeModel build_spiked(ShapeKind kind, const ShapeDims& dims, const SpikeParams& sp)
{
    check_dims(dims);
    if (!(sp.body_height > 0) || !(sp.spike_height > 0) || !(sp.base_width > 0))
        throw ModelError("spike parameters must be positive");
    const Real hl = 0.5 * dims.length, hw = 0.5 * dims.width, hb = 0.5 * sp.body_height;
    if (sp.tip_offset - 0.5 * sp.base_width < -1e-12 || sp.tip_offset + 0.5 * sp.base_width > hl + 1e-12)
        throw ModelError("spike base does not fit on the body face");

    std::vector<ConvexPiece> pieces;
    auto slab = box_constraints(-hw, hw, -hl, hl, -hb, hb);
    pieces.emplace_back(slab);
    for (Real sign : {1.0, -1.0})
        for (Real y : {-sp.tip_offset, sp.tip_offset})
            pieces.push_back(spike_piece(hw, sign * hb, sign, y, sp.spike_height, sp.base_width));

    ShapeDims d = dims;
    d.height = sp.body_height + 2.0 * sp.spike_height;
    ShapeModel shape(kind, d, std::move(pieces));
    shape.spikes = sp;

    const Real target = hb + sp.spike_height;
    if (std::abs(shape.rest_height() - target) > 0.05 * target)
        throw ModelError("spike geometry gives a rest height far from the intended one");
    return shape;
}

} // namespace

ShapeModel make_cuboid(Real length, Real width, Real height)
{
    ShapeDims d{length, width, height};
    check_dims(d);
    std::vector<ConvexPiece> pieces;
    pieces.emplace_back(box_constraints(-0.5 * width, 0.5 * width, -0.5 * length, 0.5 * length, -0.5 * height,
                                        0.5 * height));
    return ShapeModel(ShapeKind::Cuboid, d, std::move(pieces));
}

ShapeModel make_spiked(const ShapeDims& dims, const SpikeParams& params)
{
    return build_spiked(ShapeKind::Spiked, dims, params);
}

ShapeModel make_spiked_ends(const ShapeDims& dims, const SpikeParams& params)
{
    return build_spiked(ShapeKind::SpikedEnds, dims, params);
}

ShapeModel make_curved(const ShapeDims& dims, const CurveParams& params)
{
    check_dims(dims);
    const Real hl = 0.5 * dims.length, hw = 0.5 * dims.width;
    if (!(params.end_height > 0) || !(params.radius > hl))
        throw ModelError("curve radius must exceed half the length and end height must be positive");
    // top face at z = 0, ends down to -end_height, arc through the end corners
    const Real zc = -params.end_height + std::sqrt(params.radius * params.radius - hl * hl);
    std::vector<Constraint> cs{Constraint::plane(Vec3::UnitX(), Vec3(hw, 0, 0)),
                               Constraint::plane(-Vec3::UnitX(), Vec3(-hw, 0, 0)),
                               Constraint::plane(Vec3::UnitY(), Vec3(0, hl, 0)),
                               Constraint::plane(-Vec3::UnitY(), Vec3(0, -hl, 0)),
                               Constraint::plane(Vec3::UnitZ(), Vec3::Zero()),
                               Constraint::cylinder_x(0.0, zc, params.radius)};
    std::vector<ConvexPiece> pieces;
    pieces.emplace_back(std::move(cs));
    ShapeDims d = dims;
    d.height = params.end_height + params.radius - std::sqrt(params.radius * params.radius - hl * hl);
    ShapeModel shape(ShapeKind::Curved, d, std::move(pieces));
    shape.curve = params;
    return shape;
}

SpikeParams calibrate_spikes(Real length, Real body_height, Real rest_height, Real perimeter,
                             Real base_width_fraction)
{
    const Real s = rest_height - 0.5 * body_height;
    if (!(s > 0))
        throw ModelError("rest height must exceed half the body height");
    // P = 2 Hb + 2 L - 4 u + 4 sqrt(u^2 + s^2), u = L/2 - tip_offset
    const Real c = (perimeter - 2.0 * body_height - 2.0 * length) / 4.0;
    if (!(c > 0))
        throw ModelError("tumbling perimeter too small for this body");
    const Real u = (s * s - c * c) / (2.0 * c);
    const Real tip = 0.5 * length - u;
    if (!(u > 0) || !(tip > 0))
        throw ModelError("no two-spike geometry matches the requested rest height and perimeter");
    SpikeParams p;
    p.body_height = body_height;
    p.spike_height = s;
    p.tip_offset = tip;
    p.base_width = base_width_fraction * 2.0 * std::min(tip, u);
    return p;
}

CurveParams calibrate_curve(Real length, Real width, Real radius, Real rest_height)
{
    ShapeDims dims{length, width, 1.0};
    auto rest_for = [&](Real h) { return make_curved(dims, {radius, h}).rest_height(); };
    Real lo = 1e-4, hi = 4.0 * rest_height + radius;
    if (rest_for(lo) > rest_height || rest_for(hi) < rest_height)
        throw ModelError("curve radius cannot reach the requested rest height");
    for (int i = 0; i < 60; ++i) {
        const Real mid = 0.5 * (lo + hi);
        (rest_for(mid) < rest_height ? lo : hi) = mid;
    }
    return {radius, 0.5 * (lo + hi)};
}

ShapeModel preset_shape(const std::string& name)
{
    const ShapeDims full{0.8, 0.4, 0.1};
    const ShapeDims half{0.4, 0.2, 0.05};
    if (name == "cuboid")
        return make_cuboid(full.length, full.width, full.height);
    if (name == "cuboid-half")
        return make_cuboid(half.length, half.width, half.height);
    if (name == "ss")
        return make_spiked(full, calibrate_spikes(full.length, 0.1, 0.325, 2.16));
    if (name == "ses")
        return make_spiked_ends(full, calibrate_spikes(full.length, 0.1, 0.275, 2.22));
    if (name == "curved")
        return make_curved(full, calibrate_curve(full.length, full.width, 1.2, 0.22));
    if (name == "ss-half")
        return make_spiked(half, calibrate_spikes(half.length, 0.05, 0.1625, 1.093));
    if (name == "ses-half")
        return make_spiked_ends(half, calibrate_spikes(half.length, 0.05, 0.1375, 1.197));
    throw ModelError("unknown shape preset '" + name + "'");
}

ShapeModel apply_draft(const ShapeModel& shape, Real draft_deg)
{
    if (!(draft_deg >= 0.0 && draft_deg <= 20.0))
        throw ModelError("draft angle must lie in [0, 20] degrees");
    if (draft_deg == 0.0)
        return shape;
    const Real slope = std::tan(deg2rad(draft_deg));

    // edge lies on the sheet face with the smallest x across all pieces
    Real x_edge = std::numeric_limits<Real>::infinity();
    for (const auto& p : shape.pieces())
        x_edge = std::min(x_edge, p.aabb_min().x());

    std::vector<ConvexPiece> pieces;
    for (const auto& p : shape.pieces()) {
        auto cs = p.constraints();
        for (auto& c : cs) {
            if (c.internal)
                continue;
            if (!c.planar())
                throw ModelError("draft is only defined for planar profile faces");
            if (std::abs(c.normal.x()) > 1e-12)
                continue;
            // f' = (f + slope (x - x_edge)) / sqrt(1 + slope^2)
            Vec3 n = c.normal;
            n.x() = slope;
            const Real k = n.norm();
            c.normal = n / k;
            c.offset = (c.offset + slope * x_edge) / k;
        }
        pieces.emplace_back(std::move(cs));
    }
    ShapeModel out(shape.kind(), shape.dims(), std::move(pieces));
    out.spikes = shape.spikes;
    out.curve = shape.curve;
    out.draft_deg = draft_deg;
    return out;
}

std::vector<ConstraintEval> world_constraint_eval(const ShapeModel& shape, const BodyConfiguration& config,
                                                  const Vec3& point_world)
{
    const Mat3 r = config.rotation();
    const Vec3 b = r.transpose() * (point_world - config.position);
    std::vector<ConstraintEval> out;
    for (std::size_t i = 0; i < shape.pieces().size(); ++i) {
        const auto& cs = shape.pieces()[i].constraints();
        for (std::size_t j = 0; j < cs.size(); ++j)
            out.push_back({i, j, cs[j].value<Real>(b), r * cs[j].gradient<Real>(b)});
    }
    return out;
}

} // namespace tumble
