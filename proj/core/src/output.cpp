#include "tumblesim/output.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <memory>
#include <stdexcept>

namespace tumble {

namespace {

using json = nlohmann::json;

// CSV metrics are SI, with micrometre lengths for displacement and speed columns
constexpr Real kMicron = 1e3; // mm -> um

std::string yn(bool b) { return b ? "Y" : "N"; }

std::string fmt_int(long v) { return std::to_string(v); }

json number(Real v)
{
    if (std::isfinite(v))
        return v;
    return nullptr;
}

json head(const Manifest& m, const char* kind)
{
    return json{{"kind", kind}, {"manifest_hash", m.hash}, {"version", m.version}, {"command", m.command}};
}

} // namespace

std::string format_real(Real v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    if (v == 0.0)
        v = 0.0; // drop the sign of negative zero
    char buf[64];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc())
        throw std::runtime_error("number formatting failed");
    return std::string(buf, p);
}

std::string csv_field(std::string_view s)
{
    if (s.find_first_of(",\"\r\n") == std::string_view::npos)
        return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

CsvWriter::CsvWriter(std::ostream& out, const std::string& manifest_hash) : out_(out)
{
    out_ << "# tumblesim " << kVersion << " manifest " << manifest_hash << "\n";
}

void CsvWriter::row(const std::vector<std::string>& fields)
{
    for (std::size_t i = 0; i < fields.size(); ++i)
        out_ << (i ? "," : "") << csv_field(fields[i]);
    out_ << "\n";
}

std::string sha256_hex(std::string_view data)
{
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1)
        throw std::runtime_error("SHA-256 failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 15];
    }
    return out;
}

std::string Manifest::to_json() const
{
    const json j{{"command", command}, {"config", config_text}, {"version", version}, {"manifest_hash", hash}};
    return j.dump(2) + "\n";
}

Manifest make_manifest(const std::string& command, const RunConfig& cfg)
{
    Manifest m;
    m.command = command;
    m.config_text = write_config(cfg);
    m.hash = sha256_hex(m.version + "\n" + m.command + "\n" + m.config_text);
    return m;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const Manifest& m)
{
    CsvWriter w(out, m.hash);
    w.row({"t_s", "x_m", "y_m", "z_m", "qw", "qx", "qy", "qz", "vx_m_s", "vy_m_s", "vz_m_s", "wx_rad_s",
           "wy_rad_s", "wz_rad_s", "p_n_Ns", "lambda_a_N", "active_face"});
    for (const auto& s : traj.samples) {
        const auto& c = s.config;
        const Real mm = 1.0 / units::kMetre;
        w.row({format_real(s.t), format_real(c.position.x() * mm), format_real(c.position.y() * mm),
               format_real(c.position.z() * mm), format_real(c.orientation.w()), format_real(c.orientation.x()),
               format_real(c.orientation.y()), format_real(c.orientation.z()),
               format_real(c.linear_velocity.x() * mm), format_real(c.linear_velocity.y() * mm),
               format_real(c.linear_velocity.z() * mm), format_real(c.angular_velocity.x()),
               format_real(c.angular_velocity.y()), format_real(c.angular_velocity.z()),
               format_real(s.lambda_n * traj.h / units::kNewton), format_real(s.lambda_a / units::kNewton),
               fmt_int(s.active_face)});
    }
}

void write_simulation_metrics_csv(std::ostream& out, const Trajectory& traj, Real frequency, const Manifest& m)
{
    CsvWriter w(out, m.hash);
    w.row({"duration_s", "displacement_x_um", "displacement_y_um", "speed_um_s", "twist_deg", "drift_um",
           "cycle_speed_um_s", "aborted", "message"});
    const auto& a = traj.samples.front();
    const auto& b = traj.samples.back();
    CycleMetrics cm{std::nan(""), std::nan(""), std::nan("")};
    if (frequency > 0 && traj.samples.size() > static_cast<std::size_t>(std::llround(1.0 / frequency / traj.h)))
        cm = compute_metrics(traj, frequency);
    const Real dy = b.config.position.y() - a.config.position.y();
    w.row({format_real(b.t), format_real((b.config.position.x() - a.config.position.x()) * kMicron),
           format_real(dy * kMicron), format_real(b.t > 0 ? dy / b.t * kMicron : 0.0), format_real(cm.twist_deg),
           format_real(cm.drift * kMicron), format_real(cm.speed * kMicron), yn(traj.aborted), traj.message});
}

void write_locomotion_csv(std::ostream& out, const std::vector<LocomotionResult>& rows, const Manifest& m)
{
    CsvWriter w(out, m.hash);
    w.row({"frequency_hz", "speed_um_s", "ideal_speed_um_s", "mean_slip_um_s", "max_slip_um_s", "aborted",
           "message"});
    for (const auto& r : rows)
        w.row({format_real(r.frequency), format_real(r.speed * kMicron), format_real(r.ideal_speed * kMicron),
               format_real(r.mean_slip * kMicron), format_real(r.max_slip * kMicron), yn(r.aborted), r.message});
}

void write_incline_csv(std::ostream& out, const std::vector<InclineResult>& rows, const Manifest& m)
{
    CsvWriter w(out, m.hash);
    w.row({"incline_deg", "climbed", "displacement_um", "final_period_um", "aborted", "message"});
    for (const auto& r : rows)
        w.row({format_real(r.angle_deg), yn(r.climbed), format_real(r.displacement * kMicron),
               format_real(r.final_displacement * kMicron), yn(r.aborted), r.message});
}

void write_shapes_csv(std::ostream& out, const ShapeComparison& cmp, const std::vector<Real>& angles,
                      const Manifest& m)
{
    CsvWriter w(out, m.hash);
    std::vector<std::string> h{"shape", "speed_um_s", "speed_rank"};
    for (Real a : angles)
        h.push_back("climbs_" + format_real(a) + "_deg");
    h.push_back("best_overall");
    h.push_back("aborted");
    w.row(h);
    for (const auto& e : cmp.entries) {
        const auto rank = std::find(cmp.speed_ranking.begin(), cmp.speed_ranking.end(), e.shape) -
                          cmp.speed_ranking.begin() + 1;
        std::vector<std::string> r{e.shape, format_real(e.locomotion.speed * kMicron), fmt_int(rank)};
        bool aborted = e.locomotion.aborted;
        for (const auto& inc : e.incline) {
            r.push_back(yn(inc.climbed));
            aborted = aborted || inc.aborted;
        }
        r.push_back(yn(e.shape == cmp.best_overall));
        r.push_back(yn(aborted));
        w.row(r);
    }
}

void write_sweep_csv(std::ostream& out, const ErrorSweep& sweep, const Manifest& m)
{
    CsvWriter w(out, m.hash);
    w.row({"shape", "theta1_deg", "theta2_deg", "draft_deg", "twist_deg", "drift_um", "speed_um_s", "motion",
           "drift_ok", "faster_than_ideal", "aborted", "message"});
    for (const auto& c : sweep.cells)
        w.row({sweep.shape, format_real(c.theta1_deg), format_real(c.theta2_deg), format_real(c.draft_deg),
               format_real(c.metrics.twist_deg), format_real(c.metrics.drift * kMicron),
               format_real(c.metrics.speed * kMicron), c.motion == Motion::Flip ? "flip" : "twist",
               yn(c.drift_ok), yn(c.faster), yn(c.aborted), c.message});
}

std::string summary_json(const std::vector<LocomotionResult>& rows, const Manifest& m)
{
    json j = head(m, "locomotion");
    j["results"] = json::array();
    for (const auto& r : rows)
        j["results"].push_back({{"frequency_hz", r.frequency},
                                {"speed_um_s", number(r.speed * kMicron)},
                                {"ideal_speed_um_s", r.ideal_speed * kMicron},
                                {"speed_ratio", number(r.ideal_speed > 0 ? r.speed / r.ideal_speed : std::nan(""))},
                                {"mean_slip_um_s", number(r.mean_slip * kMicron)},
                                {"aborted", r.aborted}});
    return j.dump(2) + "\n";
}

std::string summary_json(const std::vector<InclineResult>& rows, const Manifest& m)
{
    json j = head(m, "incline");
    j["results"] = json::array();
    for (const auto& r : rows)
        j["results"].push_back({{"incline_deg", r.angle_deg},
                                {"climbed", r.climbed},
                                {"displacement_um", r.displacement * kMicron},
                                {"aborted", r.aborted}});
    return j.dump(2) + "\n";
}

std::string summary_json(const ShapeComparison& cmp, const Manifest& m)
{
    json j = head(m, "shapes");
    j["speed_ranking"] = cmp.speed_ranking;
    j["best_overall"] = cmp.best_overall;
    j["shapes"] = json::object();
    for (const auto& e : cmp.entries) {
        json inc = json::object();
        for (const auto& r : e.incline)
            inc[format_real(r.angle_deg)] = r.climbed;
        j["shapes"][e.shape] = {{"speed_um_s", number(e.locomotion.speed * kMicron)}, {"climbs", inc}};
    }
    return j.dump(2) + "\n";
}

std::string summary_json(const ErrorSweep& sweep, const Manifest& m)
{
    json j = head(m, "sweep");
    std::size_t flips = 0, aborted = 0, good = 0;
    for (const auto& c : sweep.cells) {
        flips += c.motion == Motion::Flip;
        aborted += c.aborted;
        good += c.motion == Motion::Twist && c.drift_ok && c.faster;
    }
    j["shape"] = sweep.shape;
    j["cells"] = sweep.cells.size();
    j["ideal_speed_um_s"] = sweep.ideal_speed * kMicron;
    j["flipped_cells"] = flips;
    j["aborted_cells"] = aborted;
    j["preferred_cells"] = good;
    return j.dump(2) + "\n";
}

std::string summary_json(const Trajectory& traj, Real frequency, const Manifest& m)
{
    json j = head(m, "simulate");
    const auto& a = traj.samples.front().config.position;
    const auto& b = traj.samples.back().config.position;
    j["rows"] = traj.samples.size();
    j["frequency_hz"] = frequency;
    j["displacement_um"] = {(b.x() - a.x()) * kMicron, (b.y() - a.y()) * kMicron, (b.z() - a.z()) * kMicron};
    j["aborted"] = traj.aborted;
    j["message"] = traj.message;
    return j.dump(2) + "\n";
}

} // namespace tumble
