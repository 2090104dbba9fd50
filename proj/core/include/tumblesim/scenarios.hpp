#pragma once

// Experiment harness: locomotion speed, incline climbing, the shape study and
// the manufacturing-error sweeps.

#include "tumblesim/stepper.hpp"

#include <functional>
#include <string>
#include <vector>

namespace tumble {

/// Geometry-independent robot properties, SI units. Mass and magnetic volume
/// are quoted for a reference volume and scale with the shape's volume.
struct RobotProperties {
    Real mass_kg = 3.78e-8;
    Real magnetic_volume_m3 = 2.9e-11;
    Real magnetization = 15000.0; // A/m
    Real alpha_deg = 27.0;
    Real reference_volume_mm3 = 0.032;

    void validate() const;
    Real mass_for(const ShapeModel& shape) const;
    Real magnetic_volume_for(const ShapeModel& shape) const; // mm^3
};

/// A robot, its substrate and the field.
struct Scenario {
    std::string shape_name = "cuboid";
    ShapeModel shape = make_cuboid(0.8, 0.4, 0.1);
    RobotProperties robot;
    MaterialEnvironment env;
    Real field_tesla = 0.01;
    Real frequency = 1.0;
    Real phase = 0.0; // rad
    ErrorCone cone{10.0, 0.0, 0.0};
    StepperConfig stepper;
    Real steps_per_period = 1000; // h = 1 / (steps_per_period * f) unless stepper.h is fixed
    bool fixed_step = false;
    Real drop_height = 0.05;      // mm above the resting height at t = 0

    /// Replaces the shape by a named preset, optionally drafted.
    void set_shape(const std::string& name, Real draft_deg = 0.0);
    Robot make_robot() const;
    MagneticActuation actuation() const;
    Real step_size() const;
    BodyConfiguration initial_configuration() const;
};

/// Robot on paper.
Scenario preset_paper_gen1();
/// Higher-magnetization robot on aluminum.
Scenario preset_aluminum_gen2();
/// Second-generation robot properties on the paper substrate.
Scenario preset_shape_study_paper();
/// Second-generation robot on aluminum at 20 mT and 1 Hz, starting at rest,
/// for the half-scale error sweeps ("ss-half" or "ses-half").
Scenario preset_error_sweep(const std::string& shape);

enum class TwistAxis { WorldTravel, BodyLength };

struct CycleMetrics {
    Real twist_deg = 0.0;
    Real drift = 0.0; // mm along world x
    Real speed = 0.0; // mm/s along world y
};

/// Twist is the swing-twist angle about `axis` of the rotation q1 q0^-1,
/// wrapped to (-180, 180].
Real twist_angle_deg(const Quat& q0, const Quat& q1, const Vec3& axis);

/// Metrics after one field period. Throws ModelError if the trajectory ends
/// earlier.
CycleMetrics compute_metrics(const Trajectory& traj, Real frequency, TwistAxis axis = TwistAxis::WorldTravel);

struct LocomotionResult {
    Real frequency = 0.0;
    Real speed = 0.0;       // mm/s along +y, NaN when aborted before the window
    Real ideal_speed = 0.0; // tumbling perimeter times f
    Real mean_slip = 0.0;   // mm/s, over steps in contact
    Real max_slip = 0.0;
    bool aborted = false;
    std::string message;
    Trajectory trajectory;  // kept only on request
};

struct LocomotionOptions {
    int transient_periods = 1;
    int measured_periods = 3;
    Real static_settle = 0.5;   // s discarded when f = 0
    Real static_duration = 1.0; // s measured when f = 0
    bool keep_trajectory = false;
    int threads = 1;
};

std::vector<LocomotionResult> run_locomotion(const Scenario& base, const std::vector<Real>& frequencies,
                                             const LocomotionOptions& opt = {});

struct InclineResult {
    Real angle_deg = 0.0;
    bool climbed = false;
    Real displacement = 0.0;       // mm along the slope, positive uphill
    Real final_displacement = 0.0; // over the last period
    bool aborted = false;
    std::string message;
};

struct InclineOptions {
    int periods = 5;
    int threads = 1;
};

std::vector<InclineResult> run_incline(const Scenario& base, const std::vector<Real>& angles_deg,
                                       const InclineOptions& opt = {});

struct ShapeComparisonEntry {
    std::string shape;
    LocomotionResult locomotion;
    std::vector<InclineResult> incline;
};

struct ShapeComparison {
    std::vector<ShapeComparisonEntry> entries; // cuboid, ss, ses, curved
    std::vector<std::string> speed_ranking;    // fastest first
    std::string best_overall;                  // fastest of those that climb the reference angle
};

struct ShapeComparisonOptions {
    Real field_tesla = 0.02;
    Real locomotion_frequency = 10.0;
    Real incline_frequency = 1.0;
    std::vector<Real> angles{20.0, 30.0, 45.0};
    Real reference_angle = 30.0;
    LocomotionOptions locomotion{1, 4};
    int threads = 1;
};

ShapeComparison run_shape_comparison(const Scenario& paper, const Scenario& aluminum,
                                     const ShapeComparisonOptions& opt = {});

enum class Motion { Twist, Flip };

struct ErrorSweepCell {
    Real theta1_deg = 0.0;
    Real theta2_deg = 0.0;
    Real draft_deg = 0.0;
    CycleMetrics metrics;
    Motion motion = Motion::Twist;
    bool drift_ok = false;  // |d_e| within the drift limit
    bool faster = false;    // speed above the error-free ideal
    bool aborted = false;
    std::string message;
};

struct ErrorSweepGrid {
    std::vector<Real> theta2_deg;      // with theta1 = cone aperture
    bool include_zero_error = true;    // theta1 = 0 profile first
    std::vector<Real> draft_deg;
    Real duration_periods = 1.0;
    Real drift_limit = 0.05;           // mm
    TwistAxis axis = TwistAxis::WorldTravel;
    int threads = 0;                   // 0: hardware concurrency

    static ErrorSweepGrid standard();  // 37 profiles x 16 drafts
    std::size_t profiles() const { return theta2_deg.size() + (include_zero_error ? 1 : 0); }
};

struct ErrorSweep {
    std::string shape;
    Real ideal_speed = 0.0;
    std::vector<ErrorSweepCell> cells; // draft-major, profile-minor
};

/// `base` supplies the undrafted shape, materials and field; its cone
/// aperture is used for the theta1 of each profile.
ErrorSweep run_error_sweep(const Scenario& base, const ErrorSweepGrid& grid);

/// Runs jobs 0..n-1 on `threads` workers; job i writes only slot i.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& job);

} // namespace tumble
