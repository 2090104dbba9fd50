#include "tumblesim/config.hpp"
#include "tumblesim/output.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

namespace tumble {

namespace {

namespace pt = boost::property_tree;

struct Key {
    const char* section;
    const char* name;
    const char* unit;
    bool required; // when no preset is given
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::optional<std::string>(const RunConfig&)> get;
};

std::string where(const Key& k)
{
    return std::string("[") + k.section + "] " + k.name;
}

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

Real to_real(const std::string& raw)
{
    const std::string s = trim(raw);
    Real v = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || s.empty())
        throw std::invalid_argument("not a number");
    return v;
}

int to_int(const std::string& raw)
{
    const std::string s = trim(raw);
    int v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || s.empty())
        throw std::invalid_argument("not an integer");
    return v;
}

bool to_bool(const std::string& raw)
{
    const std::string s = trim(raw);
    if (s == "true" || s == "1" || s == "yes")
        return true;
    if (s == "false" || s == "0" || s == "no")
        return false;
    throw std::invalid_argument("not a boolean");
}

std::vector<Real> to_list(const std::string& raw)
{
    std::vector<Real> out;
    std::stringstream ss(raw);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(to_real(item));
    return out;
}

std::string from_list(const std::vector<Real>& v)
{
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i)
        s += (i ? "," : "") + format_real(v[i]);
    return s;
}

std::string from_bool(bool b) { return b ? "true" : "false"; }

// setters and getters for the common shapes of key
Key real_key(const char* sec, const char* name, const char* unit, bool req, Real RunConfig::*field, Real scale = 1.0)
{
    return {sec, name, unit, req, [=](RunConfig& c, const std::string& s) { c.*field = to_real(s) * scale; },
            [=](const RunConfig& c) { return std::optional<std::string>(format_real(c.*field / scale)); }};
}

template <typename Sub>
Key sub_real_key(const char* sec, const char* name, const char* unit, bool req, Sub RunConfig::*obj,
                 Real Sub::*field)
{
    return {sec, name, unit, req, [=](RunConfig& c, const std::string& s) { (c.*obj).*field = to_real(s); },
            [=](const RunConfig& c) { return std::optional<std::string>(format_real((c.*obj).*field)); }};
}

Key opt_shape_key(const char* name, std::optional<Real> ShapeSpec::*field)
{
    return {"shape", name, "m", false,
            [=](RunConfig& c, const std::string& s) { c.shape.*field = to_real(s); },
            [=](const RunConfig& c) -> std::optional<std::string> {
                if (!(c.shape.*field))
                    return std::nullopt;
                return format_real(*(c.shape.*field));
            }};
}

Key int_key(const char* sec, const char* name, const char* unit, int RunConfig::*field)
{
    return {sec, name, unit, false, [=](RunConfig& c, const std::string& s) { c.*field = to_int(s); },
            [=](const RunConfig& c) { return std::optional<std::string>(std::to_string(c.*field)); }};
}

Key list_key(const char* sec, const char* name, const char* unit, std::vector<Real> RunConfig::*field)
{
    return {sec, name, unit, false, [=](RunConfig& c, const std::string& s) { c.*field = to_list(s); },
            [=](const RunConfig& c) { return std::optional<std::string>(from_list(c.*field)); }};
}

const std::vector<Key>& keys()
{
    static const std::vector<Key> table = [] {
        std::vector<Key> k;
        k.push_back({"run", "preset", "name", false, [](RunConfig& c, const std::string& s) { c.preset = trim(s); },
                     [](const RunConfig& c) -> std::optional<std::string> {
                         if (c.preset.empty())
                             return std::nullopt;
                         return c.preset;
                     }});
        k.push_back({"run", "output_dir", "path", false,
                     [](RunConfig& c, const std::string& s) { c.output_dir = trim(s); },
                     [](const RunConfig& c) { return std::optional<std::string>(c.output_dir); }});
        k.push_back(int_key("run", "threads", "count, 0 = automatic", &RunConfig::threads));

        k.push_back({"shape", "kind", "cuboid|ss|ses|curved|ss-half|ses-half", true,
                     [](RunConfig& c, const std::string& s) { c.shape.kind = trim(s); },
                     [](const RunConfig& c) { return std::optional<std::string>(c.shape.kind); }});
        k.push_back({"shape", "draft_deg", "deg", false,
                     [](RunConfig& c, const std::string& s) { c.shape.draft_deg = to_real(s); },
                     [](const RunConfig& c) { return std::optional<std::string>(format_real(c.shape.draft_deg)); }});
        k.push_back(opt_shape_key("length", &ShapeSpec::length));
        k.push_back(opt_shape_key("width", &ShapeSpec::width));
        k.push_back(opt_shape_key("height", &ShapeSpec::height));
        k.push_back(opt_shape_key("spike_height", &ShapeSpec::spike_height));
        k.push_back(opt_shape_key("tip_offset", &ShapeSpec::tip_offset));
        k.push_back(opt_shape_key("base_width", &ShapeSpec::base_width));
        k.push_back(opt_shape_key("radius", &ShapeSpec::radius));
        k.push_back(opt_shape_key("end_height", &ShapeSpec::end_height));

        k.push_back(sub_real_key("material", "mu", "dimensionless", true, &RunConfig::env, &MaterialEnvironment::mu));
        k.push_back(sub_real_key("material", "adhesion", "N/m^2", true, &RunConfig::env,
                                 &MaterialEnvironment::adhesion));
        k.push_back(sub_real_key("material", "electrostatic", "N", true, &RunConfig::env,
                                 &MaterialEnvironment::electrostatic));
        k.push_back(sub_real_key("material", "gravity", "m/s^2", false, &RunConfig::env,
                                 &MaterialEnvironment::gravity));
        k.push_back(sub_real_key("material", "incline_deg", "deg", false, &RunConfig::env,
                                 &MaterialEnvironment::incline_deg));
        k.push_back(sub_real_key("material", "e_t", "dimensionless", false, &RunConfig::env,
                                 &MaterialEnvironment::e_t));
        k.push_back(sub_real_key("material", "e_o", "dimensionless", false, &RunConfig::env,
                                 &MaterialEnvironment::e_o));
        k.push_back({"material", "e_r", "m", false,
                     [](RunConfig& c, const std::string& s) { c.env.e_r = to_real(s) * units::kMetre; },
                     [](const RunConfig& c) -> std::optional<std::string> {
                         if (!c.env.e_r)
                             return std::nullopt;
                         return format_real(*c.env.e_r / units::kMetre);
                     }});

        k.push_back(sub_real_key("robot", "mass", "kg", true, &RunConfig::robot, &RobotProperties::mass_kg));
        k.push_back(sub_real_key("robot", "magnetic_volume", "m^3", true, &RunConfig::robot,
                                 &RobotProperties::magnetic_volume_m3));
        k.push_back(sub_real_key("robot", "magnetization", "A/m", true, &RunConfig::robot,
                                 &RobotProperties::magnetization));
        k.push_back(sub_real_key("robot", "alpha_deg", "deg", false, &RunConfig::robot, &RobotProperties::alpha_deg));
        k.push_back({"robot", "reference_volume", "m^3", false,
                     [](RunConfig& c, const std::string& s) {
                         c.robot.reference_volume_mm3 = to_real(s) * units::kCubicMetre;
                     },
                     [](const RunConfig& c) {
                         return std::optional<std::string>(
                             format_real(c.robot.reference_volume_mm3 / units::kCubicMetre));
                     }});

        k.push_back(real_key("field", "strength", "T", true, &RunConfig::field_tesla));
        k.push_back(real_key("field", "frequency", "Hz", true, &RunConfig::frequency));
        k.push_back(real_key("field", "phase_deg", "deg", false, &RunConfig::phase_deg));
        k.push_back(sub_real_key("field", "cone_aperture_deg", "deg", false, &RunConfig::cone,
                                 &ErrorCone::aperture_deg));
        k.push_back(sub_real_key("field", "theta1_deg", "deg", false, &RunConfig::cone, &ErrorCone::theta1_deg));
        k.push_back(sub_real_key("field", "theta2_deg", "deg", false, &RunConfig::cone, &ErrorCone::theta2_deg));

        k.push_back(sub_real_key("solver", "tolerance", "dimensionless", false, &RunConfig::solver,
                                 &SolverConfig::tolerance));
        k.push_back({"solver", "max_iters", "count", false,
                     [](RunConfig& c, const std::string& s) { c.solver.max_iters = to_int(s); },
                     [](const RunConfig& c) { return std::optional<std::string>(std::to_string(c.solver.max_iters)); }});
        k.push_back(int_key("solver", "max_halvings", "count", &RunConfig::max_halvings));

        k.push_back({"stepping", "h", "s", false, [](RunConfig& c, const std::string& s) { c.h = to_real(s); },
                     [](const RunConfig& c) -> std::optional<std::string> {
                         if (!c.h)
                             return std::nullopt;
                         return format_real(*c.h);
                     }});
        k.push_back(real_key("stepping", "steps_per_period", "count", false, &RunConfig::steps_per_period));
        k.push_back(real_key("stepping", "duration", "s", false, &RunConfig::duration));
        k.push_back(real_key("stepping", "drop_height", "m", false, &RunConfig::drop_height));

        k.push_back(list_key("locomotion", "frequencies", "Hz, comma separated", &RunConfig::frequencies));
        k.push_back(int_key("locomotion", "transient_periods", "count", &RunConfig::transient_periods));
        k.push_back(int_key("locomotion", "measured_periods", "count", &RunConfig::measured_periods));
        k.push_back(list_key("incline", "angles", "deg, comma separated", &RunConfig::angles));
        k.push_back(int_key("incline", "periods", "count", &RunConfig::incline_periods));
        k.push_back(list_key("sweep", "theta2", "deg, comma separated", &RunConfig::sweep_theta2));
        k.push_back(list_key("sweep", "drafts", "deg, comma separated", &RunConfig::sweep_drafts));
        k.push_back({"sweep", "include_zero_error", "true|false", false,
                     [](RunConfig& c, const std::string& s) { c.sweep_zero_error = to_bool(s); },
                     [](const RunConfig& c) { return std::optional<std::string>(from_bool(c.sweep_zero_error)); }});
        k.push_back(real_key("sweep", "drift_limit", "m", false, &RunConfig::drift_limit));
        k.push_back({"sweep", "twist_axis", "travel|body", false,
                     [](RunConfig& c, const std::string& s) {
                         const std::string v = trim(s);
                         if (v == "travel")
                             c.twist_axis = TwistAxis::WorldTravel;
                         else if (v == "body")
                             c.twist_axis = TwistAxis::BodyLength;
                         else
                             throw std::invalid_argument("expected travel or body");
                     },
                     [](const RunConfig& c) {
                         return std::optional<std::string>(c.twist_axis == TwistAxis::WorldTravel ? "travel"
                                                                                                  : "body");
                     }});
        return k;
    }();
    return table;
}

void require(bool ok, const std::string& key, const std::string& what)
{
    if (!ok)
        throw ConfigError(key + ": " + what);
}

void require_list(const std::vector<Real>& v, const std::string& key, Real lo, Real hi, bool hi_open,
                  const std::string& unit)
{
    for (Real x : v)
        require(x >= lo && (hi_open ? x < hi : x <= hi), key,
                "every entry must lie in [" + format_real(lo) + ", " + format_real(hi) + (hi_open ? ")" : "]") +
                    " " + unit);
}

} // namespace

ShapeModel ShapeSpec::build() const
{
    auto mm = [](const std::optional<Real>& v, Real fallback) { return v ? *v * units::kMetre : fallback; };
    ShapeModel base = preset_shape(kind);
    const ShapeDims d = base.dims();
    if (kind == "cuboid") {
        base = make_cuboid(mm(length, d.length), mm(width, d.width), mm(height, d.height));
    } else if (base.spikes) {
        if (length || width || height || spike_height || tip_offset || base_width) {
            ShapeDims nd{mm(length, d.length), mm(width, d.width), d.height};
            SpikeParams p = *base.spikes;
            p.body_height = mm(height, p.body_height);
            p.spike_height = mm(spike_height, p.spike_height);
            p.tip_offset = mm(tip_offset, p.tip_offset);
            p.base_width = mm(base_width, p.base_width);
            base = base.kind() == ShapeKind::Spiked ? make_spiked(nd, p) : make_spiked_ends(nd, p);
        }
    } else if (base.curve) {
        if (length || width || radius || end_height) {
            ShapeDims nd{mm(length, d.length), mm(width, d.width), d.height};
            CurveParams p = *base.curve;
            p.radius = mm(radius, p.radius);
            p.end_height = mm(end_height, p.end_height);
            base = make_curved(nd, p);
        }
    }
    return draft_deg > 0 ? apply_draft(base, draft_deg) : base;
}

void RunConfig::validate() const
{
    const auto names = preset_names();
    require(preset.empty() || std::find(names.begin(), names.end(), preset) != names.end(), "[run] preset",
            "unknown preset name");
    require(!output_dir.empty(), "[run] output_dir", "must not be empty (path)");
    require(threads >= 0, "[run] threads", "must be >= 0 (count)");
    const std::vector<std::string> kinds{"cuboid", "ss", "ses", "curved", "ss-half", "ses-half"};
    require(std::find(kinds.begin(), kinds.end(), shape.kind) != kinds.end(), "[shape] kind",
            "must be one of cuboid, ss, ses, curved, ss-half, ses-half");
    require(shape.draft_deg >= 0 && shape.draft_deg <= 20, "[shape] draft_deg", "must lie in [0, 20] deg");
    for (const auto& [v, name] : {std::pair{shape.length, "length"}, {shape.width, "width"}, {shape.height, "height"},
                                  {shape.spike_height, "spike_height"}, {shape.tip_offset, "tip_offset"},
                                  {shape.base_width, "base_width"}, {shape.radius, "radius"},
                                  {shape.end_height, "end_height"}})
        require(!v || *v > 0, std::string("[shape] ") + name, "must be positive (m)");

    require(env.mu > 0, "[material] mu", "must be positive (dimensionless)");
    require(env.adhesion >= 0, "[material] adhesion", "must be >= 0 (N/m^2)");
    require(env.electrostatic >= 0, "[material] electrostatic", "must be >= 0 (N)");
    require(env.gravity >= 0, "[material] gravity", "must be >= 0 (m/s^2)");
    require(env.incline_deg >= 0 && env.incline_deg < 90, "[material] incline_deg", "must lie in [0, 90) deg");
    require(env.e_t > 0, "[material] e_t", "must be positive (dimensionless)");
    require(env.e_o > 0, "[material] e_o", "must be positive (dimensionless)");
    require(!env.e_r || *env.e_r > 0, "[material] e_r", "must be positive (m)");

    require(robot.mass_kg > 0, "[robot] mass", "must be positive (kg)");
    require(robot.magnetic_volume_m3 > 0, "[robot] magnetic_volume", "must be positive (m^3)");
    require(robot.magnetization >= 0, "[robot] magnetization", "must be >= 0 (A/m)");
    require(robot.reference_volume_mm3 > 0, "[robot] reference_volume", "must be positive (m^3)");

    require(field_tesla >= 0, "[field] strength", "must be >= 0 (T)");
    require(frequency >= 0, "[field] frequency", "must be >= 0 (Hz)");
    require(cone.aperture_deg >= 0 && cone.aperture_deg <= 90, "[field] cone_aperture_deg",
            "must lie in [0, 90] deg");
    require(cone.theta1_deg >= 0 && cone.theta1_deg <= cone.aperture_deg, "[field] theta1_deg",
            "must lie in [0, cone_aperture_deg] deg");
    require(cone.theta2_deg >= 0 && cone.theta2_deg < 360, "[field] theta2_deg", "must lie in [0, 360) deg");

    require(solver.tolerance > 0, "[solver] tolerance", "must be positive (dimensionless)");
    require(solver.max_iters > 0, "[solver] max_iters", "must be positive (count)");
    require(max_halvings >= 0, "[solver] max_halvings", "must be >= 0 (count)");
    require(!h || *h > 0, "[stepping] h", "must be positive (s)");
    require(steps_per_period > 0, "[stepping] steps_per_period", "must be positive (count)");
    require(duration > 0, "[stepping] duration", "must be positive (s)");
    require(drop_height >= 0, "[stepping] drop_height", "must be >= 0 (m)");

    require(!frequencies.empty(), "[locomotion] frequencies", "needs at least one entry (Hz)");
    require_list(frequencies, "[locomotion] frequencies", 0, 1e3, false, "Hz");
    require(transient_periods >= 0, "[locomotion] transient_periods", "must be >= 0 (count)");
    require(measured_periods >= 1, "[locomotion] measured_periods", "must be >= 1 (count)");
    require(!angles.empty(), "[incline] angles", "needs at least one entry (deg)");
    require_list(angles, "[incline] angles", 0, 90, true, "deg");
    require(incline_periods >= 1, "[incline] periods", "must be >= 1 (count)");
    require_list(sweep_theta2, "[sweep] theta2", 0, 360, true, "deg");
    require_list(sweep_drafts, "[sweep] drafts", 0, 20, false, "deg");
    require(drift_limit > 0, "[sweep] drift_limit", "must be positive (m)");
}

Scenario RunConfig::scenario() const
{
    Scenario sc;
    sc.shape_name = shape.kind;
    try {
        sc.shape = shape.build();
    } catch (const ModelError& e) {
        throw ConfigError(std::string("[shape]: ") + e.what());
    }
    sc.robot = robot;
    sc.env = env;
    sc.field_tesla = field_tesla;
    sc.frequency = frequency;
    sc.cone = cone;
    sc.stepper.solver.tolerance = solver.tolerance;
    sc.stepper.solver.max_iters = solver.max_iters;
    sc.stepper.max_halvings = max_halvings;
    sc.steps_per_period = steps_per_period;
    if (h) {
        sc.fixed_step = true;
        sc.stepper.h = *h;
    }
    sc.drop_height = drop_height * units::kMetre;
    sc.phase = deg2rad(phase_deg);
    return sc;
}

ErrorSweepGrid RunConfig::sweep_grid() const
{
    ErrorSweepGrid g = ErrorSweepGrid::standard();
    if (!sweep_theta2.empty())
        g.theta2_deg = sweep_theta2;
    if (!sweep_drafts.empty())
        g.draft_deg = sweep_drafts;
    g.include_zero_error = sweep_zero_error;
    g.drift_limit = drift_limit * units::kMetre;
    g.axis = twist_axis;
    g.threads = workers(true);
    return g;
}

int RunConfig::workers(bool sweep) const
{
    if (threads > 0)
        return threads;
    return sweep ? static_cast<int>(std::max(1u, std::thread::hardware_concurrency())) : 1;
}

std::vector<std::string> preset_names()
{
    return {"paper-gen1", "aluminum-gen2", "shape-study-paper", "error-sweep-ss", "error-sweep-ses"};
}

RunConfig preset_config(const std::string& name)
{
    Scenario sc;
    RunConfig c;
    if (name == "paper-gen1") {
        sc = preset_paper_gen1();
        c.angles = {5.0, 10.0, 15.0, 30.0, 45.0, 60.0};
    } else if (name == "aluminum-gen2") {
        sc = preset_aluminum_gen2();
        c.angles = {30.0, 45.0};
    } else if (name == "shape-study-paper") {
        sc = preset_shape_study_paper();
        c.frequencies = {10.0};
        c.measured_periods = 4;
    } else if (name == "error-sweep-ss" || name == "error-sweep-ses") {
        sc = preset_error_sweep(name == "error-sweep-ss" ? "ss-half" : "ses-half");
        c.shape.kind = sc.shape_name;
        c.duration = 1.0;
    } else {
        throw ConfigError("[run] preset: unknown preset '" + name + "'");
    }
    c.preset = name;
    c.robot = sc.robot;
    c.env = sc.env;
    c.field_tesla = sc.field_tesla;
    c.frequency = sc.frequency;
    c.cone = sc.cone;
    c.drop_height = sc.drop_height / units::kMetre;
    return c;
}

RunConfig parse_config(const std::string& text)
{
    pt::ptree tree;
    try {
        std::istringstream in(text);
        pt::ini_parser::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("malformed config: ") + e.message() + " at line " + std::to_string(e.line()));
    }

    const auto& table = keys();
    auto find = [&](const std::string& sec, const std::string& name) -> const Key* {
        for (const auto& k : table)
            if (sec == k.section && name == k.name)
                return &k;
        return nullptr;
    };
    for (const auto& [sec, body] : tree) {
        if (body.empty() && !body.data().empty())
            throw ConfigError("key '" + sec + "' must be inside a section");
        for (const auto& [name, value] : body)
            if (!find(sec, name))
                throw ConfigError("unknown key [" + sec + "] " + name);
    }

    auto value = [&](const Key& k) -> std::optional<std::string> {
        const auto sec = tree.get_child_optional(k.section);
        if (!sec)
            return std::nullopt;
        const auto v = sec->get_optional<std::string>(pt::ptree::path_type(k.name, '\0'));
        if (!v)
            return std::nullopt;
        return *v;
    };

    RunConfig cfg;
    const auto preset = value(table.front());
    if (preset && !trim(*preset).empty()) {
        cfg = preset_config(trim(*preset));
    } else {
        std::string missing;
        for (const auto& k : table)
            if (k.required && !value(k))
                missing += "\n  " + where(k) + " (" + k.unit + ")";
        if (!missing.empty())
            throw ConfigError("missing required keys (or set [run] preset):" + missing);
    }

    for (const auto& k : table) {
        const auto v = value(k);
        if (!v)
            continue;
        try {
            k.set(cfg, *v);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(where(k) + ": " + e.what() + ", expected " + k.unit);
        }
    }
    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

RunConfig with_overrides(const RunConfig& cfg, const std::vector<std::pair<std::string, std::string>>& overrides)
{
    pt::ptree tree;
    std::istringstream in(write_config(cfg));
    pt::ini_parser::read_ini(in, tree);
    for (const auto& [path, value] : overrides) {
        const auto dot = path.find('.');
        if (dot == std::string::npos || dot == 0 || dot + 1 == path.size())
            throw ConfigError("override '" + path + "' must look like section.key");
        const std::string sec = path.substr(0, dot);
        const std::string name = path.substr(dot + 1);
        auto child = tree.get_child_optional(sec);
        if (!child)
            child = tree.add_child(sec, pt::ptree());
        child->put(pt::ptree::path_type(name, '\0'), value);
    }
    std::ostringstream out;
    pt::ini_parser::write_ini(out, tree);
    return parse_config(out.str());
}

std::string write_config(const RunConfig& cfg)
{
    std::string out;
    std::string section;
    for (const auto& k : keys()) {
        const auto v = k.get(cfg);
        if (!v)
            continue;
        if (section != k.section) {
            section = k.section;
            out += (out.empty() ? "[" : "\n[") + section + "]\n";
        }
        out += std::string(k.name) + " = " + *v + "\n";
    }
    return out;
}

} // namespace tumble
