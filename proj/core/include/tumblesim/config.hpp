#pragma once

// Run configuration: INI text in SI units, converted to the internal
// g/mm/s system when a Scenario is built.
//
//   [run]       preset, output_dir, threads
//   [shape]     kind, draft_deg, and optional size overrides in m
//   [material]  mu, adhesion, electrostatic, gravity, incline_deg, e_t, e_o, e_r
//   [robot]     mass, magnetic_volume, magnetization, alpha_deg, reference_volume
//   [field]     strength, frequency, phase_deg, cone_aperture_deg, theta1_deg, theta2_deg
//   [solver]    tolerance, max_iters, max_halvings
//   [stepping]  h, steps_per_period, duration, drop_height
//   [locomotion] frequencies, transient_periods, measured_periods
//   [incline]   angles, periods
//   [sweep]     theta2, drafts, include_zero_error, drift_limit, twist_axis

#include "tumblesim/scenarios.hpp"

#include <optional>
#include <string>
#include <vector>

namespace tumble {

/// Thrown for malformed or invalid configuration; the message names the key.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ShapeSpec {
    std::string kind = "cuboid"; // cuboid, ss, ses, curved, ss-half, ses-half
    Real draft_deg = 0.0;
    std::optional<Real> length, width, height;                  // m
    std::optional<Real> spike_height, tip_offset, base_width;   // m, spiked kinds
    std::optional<Real> radius, end_height;                     // m, curved

    ShapeModel build() const;
};

struct RunConfig {
    std::string preset; // empty, or the preset applied before the file's keys
    std::string output_dir = "out";
    int threads = 0;    // 0: all cores for sweeps, one otherwise

    ShapeSpec shape;
    RobotProperties robot;
    MaterialEnvironment env;
    Real field_tesla = 0.01;
    Real frequency = 1.0;
    Real phase_deg = 0.0;
    ErrorCone cone{10.0, 0.0, 0.0};

    SolverConfig solver;
    int max_halvings = 4;
    std::optional<Real> h;       // s; 1 / (steps_per_period f) when empty
    Real steps_per_period = 1000;
    Real duration = 2.0;         // s, for simulate
    Real drop_height = 5e-5;     // m

    std::vector<Real> frequencies{1.0, 2.0, 5.0, 10.0};
    int transient_periods = 1;
    int measured_periods = 3;
    std::vector<Real> angles{5.0, 10.0, 15.0, 30.0, 45.0, 60.0};
    int incline_periods = 5;
    std::vector<Real> sweep_theta2;
    std::vector<Real> sweep_drafts;
    bool sweep_zero_error = true;
    Real drift_limit = 5e-5;     // m
    TwistAxis twist_axis = TwistAxis::WorldTravel;

    void validate() const;
    Scenario scenario() const;
    ErrorSweepGrid sweep_grid() const;
    /// Worker count for a job kind: sweeps fan out, single runs do not.
    int workers(bool sweep) const;
};

/// Names accepted by `preset` and by preset_config.
std::vector<std::string> preset_names();
RunConfig preset_config(const std::string& name);

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Applies "section.key" = value overrides on top of `cfg` and revalidates.
RunConfig with_overrides(const RunConfig& cfg, const std::vector<std::pair<std::string, std::string>>& overrides);

/// Canonical INI text: every key, fixed order, shortest round-trip numbers.
std::string write_config(const RunConfig& cfg);

} // namespace tumble
