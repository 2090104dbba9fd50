#pragma once

// Robot geometry as unions of smooth convex inequality sets.
//
// Body frame convention: x across the width W, y along the length L (the
// ideal magnetization axis), z through the height. The origin of every
// ShapeModel is its centre of mass.

#include "tumblesim/body.hpp"
#include "tumblesim/types.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace tumble {

/// One smooth inequality f(x) <= 0 in body coordinates.
///
/// Planar constraints store a unit outward normal, so f is a signed distance.
/// Quadratic constraints are circular cylinders with their axis along body x:
/// f = ((y - yc)^2 + (z - zc)^2 - R^2) / (2R), which has unit gradient on the
/// surface.
struct Constraint {
    enum class Kind { Planar, Quadratic };

    Kind kind = Kind::Planar;
    Vec3 normal = Vec3::UnitZ(); // planar only
    Real offset = 0.0;           // planar only
    Real axis_y = 0.0;           // quadratic only
    Real axis_z = 0.0;
    Real radius = 1.0;
    Real face_area = 0.0;        // mm^2; zero for quadratic constraints
    bool internal = false;       // glued to another piece, never touches the ground

    static Constraint plane(const Vec3& outward_normal, const Vec3& point_on_plane);
    static Constraint cylinder_x(Real axis_y, Real axis_z, Real radius);

    template <typename S>
    S value(const Eigen::Matrix<S, 3, 1>& p) const
    {
        if (kind == Kind::Planar)
            return S(normal.x()) * p.x() + S(normal.y()) * p.y() + S(normal.z()) * p.z() - S(offset);
        const S dy = p.y() - S(axis_y);
        const S dz = p.z() - S(axis_z);
        return (dy * dy + dz * dz - S(radius * radius)) / S(2.0 * radius);
    }

    template <typename S>
    Eigen::Matrix<S, 3, 1> gradient(const Eigen::Matrix<S, 3, 1>& p) const
    {
        if (kind == Kind::Planar)
            return normal.cast<S>();
        return Eigen::Matrix<S, 3, 1>(S(0.0), (p.y() - S(axis_y)) / S(radius),
                                      (p.z() - S(axis_z)) / S(radius));
    }

    bool planar() const { return kind == Kind::Planar; }
};

struct MassProperties {
    Real volume = 0.0;           // mm^3
    Vec3 centroid = Vec3::Zero();
    Mat3 second_moment = Mat3::Zero(); // integral of p p^T dV about the origin
};

/// Intersection of constraints. Construction validates that the set is
/// nonempty and bounded and precomputes boundary samples and mass properties.
class ConvexPiece {
public:
    explicit ConvexPiece(std::vector<Constraint> constraints);

    const std::vector<Constraint>& constraints() const { return constraints_; }
    std::size_t size() const { return constraints_.size(); }

    /// Points on the boundary sufficient for support queries: the exact
    /// vertices of the planar part and a fine sampling of any curved edges.
    const std::vector<Vec3>& boundary_samples() const { return samples_; }
    const MassProperties& mass_properties() const { return mass_; }
    Vec3 aabb_min() const { return aabb_min_; }
    Vec3 aabb_max() const { return aabb_max_; }

    bool contains(const Vec3& p, Real tol = 0.0) const;
    Real max_value(const Vec3& p) const;

    /// Boundary sample that is furthest along `direction`.
    Vec3 support(const Vec3& direction) const;

    ConvexPiece translated(const Vec3& shift) const;

private:
    std::vector<Constraint> constraints_;
    std::vector<Vec3> samples_;
    MassProperties mass_;
    Vec3 aabb_min_ = Vec3::Zero();
    Vec3 aabb_max_ = Vec3::Zero();

    void analyse();
};

enum class ShapeKind { Cuboid, Spiked, SpikedEnds, Curved };

std::string to_string(ShapeKind kind);
ShapeKind shape_kind_from_string(const std::string& name);

/// Triangular-prism spikes on the top and bottom faces of a slab. Two spikes
/// per face, centred at y = +-tip_offset, extruded across the full width.
struct SpikeParams {
    Real body_height = 0.1;  // slab thickness, mm
    Real spike_height = 0.2; // apex height above the slab face, mm
    Real tip_offset = 0.2;   // |y| of each apex, mm
    Real base_width = 0.1;   // spike base along y, mm
};

/// Flat top, vertical end faces and a circular-cylinder underside.
struct CurveParams {
    Real radius = 1.2;     // underside radius, mm
    Real end_height = 0.3; // height of the flat end faces, mm
};

struct ShapeDims {
    Real length = 0.8; // L along y, mm
    Real width = 0.4;  // W along x, mm
    Real height = 0.1; // overall slab height for cuboids, mm
};

class ShapeModel {
public:
    ShapeModel(ShapeKind kind, ShapeDims dims, std::vector<ConvexPiece> pieces);

    ShapeKind kind() const { return kind_; }
    const ShapeDims& dims() const { return dims_; }
    const std::vector<ConvexPiece>& pieces() const { return pieces_; }

    Real volume() const { return volume_; }
    /// Height of the centre of mass above the ground when resting unrotated.
    Real rest_height() const { return rest_height_; }
    /// Second moment of the union about the centre of mass, unit density.
    const Mat3& unit_density_inertia() const { return unit_inertia_; }

    /// Perimeter of the convex hull of the silhouette in the y-z plane, i.e.
    /// the distance rolled per revolution about x without slip.
    Real tumbling_perimeter_yz() const;
    /// Same for the x-y silhouette (tumbling on the side faces after a flip).
    Real tumbling_perimeter_xy() const;

    bool contains(const Vec3& p) const;

    std::optional<SpikeParams> spikes;
    std::optional<CurveParams> curve;
    Real draft_deg = 0.0;

private:
    ShapeKind kind_;
    ShapeDims dims_;
    std::vector<ConvexPiece> pieces_;
    Real volume_ = 0.0;
    Real rest_height_ = 0.0;
    Mat3 unit_inertia_ = Mat3::Zero();
};

/// Mass and body-frame inertia for a uniform-density robot.
struct InertiaModel {
    Real mass = 0.0;                 // g
    Mat3 inertia = Mat3::Identity(); // g*mm^2, body frame, about the CM

    static InertiaModel from_shape(const ShapeModel& shape, Real mass_g);

    Vec3 diagonal() const { return inertia.diagonal(); }
    Mat6 generalized_mass(const Mat3& rotation) const;
};

ShapeModel make_cuboid(Real length, Real width, Real height);
ShapeModel make_spiked(const ShapeDims& dims, const SpikeParams& params);
ShapeModel make_spiked_ends(const ShapeDims& dims, const SpikeParams& params);
ShapeModel make_curved(const ShapeDims& dims, const CurveParams& params);

/// Solves for the apex offset that gives the requested rest height and
/// tumbling perimeter with two spikes per face.
SpikeParams calibrate_spikes(Real length, Real body_height, Real rest_height, Real perimeter,
                             Real base_width_fraction = 0.8);

/// Solves for the end-face height that gives the requested rest height for
/// a given underside radius.
CurveParams calibrate_curve(Real length, Real width, Real radius, Real rest_height);

/// Calibrated defaults. "full" variants are the design-study robots
/// (L = 800 um, W = 400 um); "half" variants are the laser-cut robots
/// (L = 400 um, W = 200 um).
ShapeModel preset_shape(const std::string& name);

/// Tilts every laser-cut wall (any face whose normal is not along x) inward
/// by `draft_deg` about its edge on the x = -W/2 sheet face.
ShapeModel apply_draft(const ShapeModel& shape, Real draft_deg);

struct ConstraintEval {
    std::size_t piece = 0;
    std::size_t index = 0;
    Real value = 0.0;
    Vec3 gradient = Vec3::Zero(); // world frame
};

/// Every constraint of every piece evaluated at a world point.
std::vector<ConstraintEval> world_constraint_eval(const ShapeModel& shape, const BodyConfiguration& config,
                                                  const Vec3& point_world);

} // namespace tumble
