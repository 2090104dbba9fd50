#include "tumblesim/config.hpp"
#include "tumblesim/output.hpp"
#include "tumblesim/scenarios.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

using namespace tumble;
namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kSolverFailure = 3;

struct Options {
    std::string config_path;
    std::string preset;
    std::string output;
    std::vector<std::string> overrides;
    int threads = -1;
    std::string sweep_shape;
};

class Artifacts {
public:
    explicit Artifacts(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

    std::ofstream open(const std::string& name) const
    {
        std::ofstream out(dir_ / name, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error("cannot write " + (dir_ / name).string());
        return out;
    }

    void text(const std::string& name, const std::string& body) const { open(name) << body; }

    const fs::path& dir() const { return dir_; }

private:
    fs::path dir_;
};

RunConfig resolve(const Options& opt, const std::string& default_preset)
{
    RunConfig cfg;
    if (!opt.config_path.empty())
        cfg = load_config(opt.config_path);
    else
        cfg = preset_config(opt.preset.empty() ? default_preset : opt.preset);

    std::vector<std::pair<std::string, std::string>> kv;
    for (const auto& o : opt.overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos)
            throw ConfigError("--set expects section.key=value, got '" + o + "'");
        kv.emplace_back(o.substr(0, eq), o.substr(eq + 1));
    }
    if (opt.threads >= 0)
        kv.emplace_back("run.threads", std::to_string(opt.threads));
    return kv.empty() ? cfg : with_overrides(cfg, kv);
}

fs::path output_dir(const Options& opt, const RunConfig& cfg)
{
    if (!opt.output.empty())
        return opt.output;
    if (const char* env = std::getenv("TUMBLESIM_OUTPUT_DIR"); env && *env)
        return env;
    return cfg.output_dir;
}

void write_manifest(const Artifacts& out, const Manifest& m)
{
    out.text("manifest.json", m.to_json());
}

int report(bool aborted, const fs::path& dir)
{
    std::cout << "artifacts in " << dir.string() << "\n";
    if (aborted) {
        std::cerr << "one or more simulations aborted; partial artifacts kept\n";
        return kSolverFailure;
    }
    return kOk;
}

int cmd_simulate(const Options& opt)
{
    const RunConfig cfg = resolve(opt, "paper-gen1");
    const Scenario sc = cfg.scenario();
    const Manifest m = make_manifest("simulate", cfg);
    const Artifacts out(output_dir(opt, cfg));

    StepperConfig step = sc.stepper;
    step.h = sc.step_size();
    const Trajectory traj =
        simulate(sc.initial_configuration(), cfg.duration, sc.make_robot(), sc.env, sc.actuation(), step);

    write_manifest(out, m);
    auto f = out.open("trajectory.csv");
    write_trajectory_csv(f, traj, m);
    auto g = out.open("metrics.csv");
    write_simulation_metrics_csv(g, traj, sc.frequency, m);
    out.text("summary.json", summary_json(traj, sc.frequency, m));
    if (traj.aborted)
        std::cerr << traj.message << "\n";
    std::cout << traj.samples.size() << " trajectory rows\n";
    return report(traj.aborted, out.dir());
}

int cmd_locomotion(const Options& opt)
{
    const RunConfig cfg = resolve(opt, "paper-gen1");
    const Manifest m = make_manifest("locomotion", cfg);
    const Artifacts out(output_dir(opt, cfg));

    LocomotionOptions lo;
    lo.transient_periods = cfg.transient_periods;
    lo.measured_periods = cfg.measured_periods;
    lo.threads = cfg.workers(false);
    const auto rows = run_locomotion(cfg.scenario(), cfg.frequencies, lo);

    write_manifest(out, m);
    auto f = out.open("metrics.csv");
    write_locomotion_csv(f, rows, m);
    out.text("summary.json", summary_json(rows, m));
    bool aborted = false;
    for (const auto& r : rows) {
        std::cout << r.frequency << " Hz: " << r.speed * 1e3 << " um/s (ideal " << r.ideal_speed * 1e3 << ")\n";
        aborted = aborted || r.aborted;
    }
    return report(aborted, out.dir());
}

int cmd_incline(const Options& opt)
{
    const RunConfig cfg = resolve(opt, "paper-gen1");
    const Manifest m = make_manifest("incline", cfg);
    const Artifacts out(output_dir(opt, cfg));

    InclineOptions io;
    io.periods = cfg.incline_periods;
    io.threads = cfg.workers(false);
    const auto rows = run_incline(cfg.scenario(), cfg.angles, io);

    write_manifest(out, m);
    auto f = out.open("metrics.csv");
    write_incline_csv(f, rows, m);
    out.text("summary.json", summary_json(rows, m));
    bool aborted = false;
    for (const auto& r : rows) {
        std::cout << r.angle_deg << " deg: " << (r.climbed ? "Y" : "N") << "\n";
        aborted = aborted || r.aborted;
    }
    return report(aborted, out.dir());
}

int cmd_shapes(const Options& opt)
{
    const RunConfig cfg = resolve(opt, "shape-study-paper");
    const Manifest m = make_manifest("shapes", cfg);
    const Artifacts out(output_dir(opt, cfg));

    Scenario aluminum = preset_aluminum_gen2();
    const Scenario paper = cfg.scenario();
    aluminum.stepper = paper.stepper;
    aluminum.steps_per_period = paper.steps_per_period;

    ShapeComparisonOptions so;
    so.field_tesla = cfg.field_tesla;
    so.locomotion_frequency = cfg.frequency;
    so.locomotion.transient_periods = cfg.transient_periods;
    so.locomotion.measured_periods = cfg.measured_periods;
    so.threads = cfg.workers(true);
    const auto cmp = run_shape_comparison(paper, aluminum, so);

    write_manifest(out, m);
    auto f = out.open("metrics.csv");
    write_shapes_csv(f, cmp, so.angles, m);
    out.text("summary.json", summary_json(cmp, m));
    bool aborted = false;
    for (const auto& e : cmp.entries) {
        std::cout << e.shape << ": " << e.locomotion.speed * 1e3 << " um/s\n";
        aborted = aborted || e.locomotion.aborted;
        for (const auto& r : e.incline)
            aborted = aborted || r.aborted;
    }
    std::cout << "best overall: " << (cmp.best_overall.empty() ? "none" : cmp.best_overall) << "\n";
    return report(aborted, out.dir());
}

int cmd_sweep(const Options& opt)
{
    Options o = opt;
    std::string shape = opt.sweep_shape;
    if (!shape.empty() && shape.find("-half") == std::string::npos)
        shape += "-half";
    if (o.config_path.empty() && o.preset.empty())
        o.preset = shape == "ss-half" ? "error-sweep-ss" : "error-sweep-ses";
    else if (!shape.empty())
        o.overrides.push_back("shape.kind=" + shape);

    const RunConfig cfg = resolve(o, "error-sweep-ses");
    const Manifest m = make_manifest("sweep", cfg);
    const Artifacts out(output_dir(o, cfg));

    const auto sweep = run_error_sweep(cfg.scenario(), cfg.sweep_grid());

    write_manifest(out, m);
    auto f = out.open("metrics.csv");
    write_sweep_csv(f, sweep, m);
    out.text("summary.json", summary_json(sweep, m));
    bool aborted = false;
    for (const auto& c : sweep.cells)
        aborted = aborted || c.aborted;
    std::cout << sweep.cells.size() << " cells\n";
    return report(aborted, out.dir());
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Tumbling microrobot contact dynamics simulator"};
    app.require_subcommand(1);
    Options opt;

    auto common = [&](CLI::App* sub) {
        sub->add_option("-c,--config", opt.config_path, "INI run configuration")->check(CLI::ExistingFile);
        sub->add_option("-p,--preset", opt.preset, "named preset used when no config file is given");
        sub->add_option("-o,--output", opt.output, "output directory (overrides TUMBLESIM_OUTPUT_DIR)");
        sub->add_option("-s,--set", opt.overrides, "override a key, section.key=value");
        sub->add_option("-j,--threads", opt.threads, "worker threads, 0 for all cores");
    };

    auto* sim = app.add_subcommand("simulate", "single trajectory");
    auto* loc = app.add_subcommand("locomotion", "average speed against field frequency");
    auto* inc = app.add_subcommand("incline", "incline climbing table");
    auto* shp = app.add_subcommand("shapes", "speed and climbing of the four shapes");
    auto* swp = app.add_subcommand("sweep", "magnetization and draft error sweep");
    for (auto* s : {sim, loc, inc, shp, swp})
        common(s);
    swp->add_option("--shape", opt.sweep_shape, "ss or ses")
        ->check(CLI::IsMember({"ss", "ses", "ss-half", "ses-half"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kConfigError;
    }

    try {
        if (*sim)
            return cmd_simulate(opt);
        if (*loc)
            return cmd_locomotion(opt);
        if (*inc)
            return cmd_incline(opt);
        if (*shp)
            return cmd_shapes(opt);
        return cmd_sweep(opt);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const ModelError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
