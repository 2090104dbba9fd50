#pragma once

// CSV and JSON artifacts with a run manifest. Every CSV starts with a comment
// line carrying the manifest hash; numbers use the shortest text that reads
// back to the same double, so reruns are byte-identical.

#include "tumblesim/config.hpp"
#include "tumblesim/scenarios.hpp"

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace tumble {

inline constexpr const char* kVersion = "0.1.0";

std::string format_real(Real v);

/// RFC 4180 quoting: fields with commas, quotes or line breaks are quoted.
std::string csv_field(std::string_view s);

class CsvWriter {
public:
    CsvWriter(std::ostream& out, const std::string& manifest_hash);
    void row(const std::vector<std::string>& fields);

private:
    std::ostream& out_;
};

std::string sha256_hex(std::string_view data);

struct Manifest {
    std::string command;
    std::string config_text; // canonical INI
    std::string version = kVersion;
    std::string hash;        // SHA-256 of the three fields above

    std::string to_json() const;
};

Manifest make_manifest(const std::string& command, const RunConfig& cfg);

/// t, pose, velocity in SI, normal impulse p_n (N s), adhesion (N), active face.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const Manifest& m);
void write_simulation_metrics_csv(std::ostream& out, const Trajectory& traj, Real frequency, const Manifest& m);
void write_locomotion_csv(std::ostream& out, const std::vector<LocomotionResult>& rows, const Manifest& m);
void write_incline_csv(std::ostream& out, const std::vector<InclineResult>& rows, const Manifest& m);
void write_shapes_csv(std::ostream& out, const ShapeComparison& cmp, const std::vector<Real>& angles,
                      const Manifest& m);
void write_sweep_csv(std::ostream& out, const ErrorSweep& sweep, const Manifest& m);

std::string summary_json(const std::vector<LocomotionResult>& rows, const Manifest& m);
std::string summary_json(const std::vector<InclineResult>& rows, const Manifest& m);
std::string summary_json(const ShapeComparison& cmp, const Manifest& m);
std::string summary_json(const ErrorSweep& sweep, const Manifest& m);
std::string summary_json(const Trajectory& traj, Real frequency, const Manifest& m);

} // namespace tumble
