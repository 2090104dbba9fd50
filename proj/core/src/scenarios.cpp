#include "tumblesim/scenarios.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

namespace tumble {

namespace {

constexpr Real kNaN = std::numeric_limits<Real>::quiet_NaN();

std::size_t index_at(const Trajectory& traj, Real t)
{
    return static_cast<std::size_t>(std::llround(t / traj.h));
}

Trajectory run(const Scenario& sc, Real duration)
{
    StepperConfig cfg = sc.stepper;
    cfg.h = sc.step_size();
    const Robot robot = sc.make_robot();
    return simulate(sc.initial_configuration(), duration, robot, sc.env, sc.actuation(), cfg);
}

} // namespace

void RobotProperties::validate() const
{
    if (!(mass_kg > 0))
        throw ModelError("mass must be positive (kg)");
    if (!(magnetic_volume_m3 > 0))
        throw ModelError("magnetic volume must be positive (m^3)");
    if (!(magnetization >= 0))
        throw ModelError("magnetization must be nonnegative (A/m)");
    if (!(reference_volume_mm3 > 0))
        throw ModelError("reference volume must be positive (mm^3)");
}

Real RobotProperties::mass_for(const ShapeModel& shape) const
{
    return mass_kg * shape.volume() / reference_volume_mm3;
}

Real RobotProperties::magnetic_volume_for(const ShapeModel& shape) const
{
    return magnetic_volume_m3 * units::kCubicMetre * shape.volume() / reference_volume_mm3;
}

void Scenario::set_shape(const std::string& name, Real draft_deg)
{
    shape = draft_deg > 0 ? apply_draft(preset_shape(name), draft_deg) : preset_shape(name);
    shape_name = name;
}

Robot Scenario::make_robot() const
{
    robot.validate();
    return Robot(shape, robot.mass_for(shape));
}

MagneticActuation Scenario::actuation() const
{
    MagneticActuation act;
    act.field_tesla = field_tesla;
    act.frequency = frequency;
    act.phase = phase;
    act.tilt = deg2rad(env.incline_deg);
    act.magnetic_volume = robot.magnetic_volume_for(shape);
    act.magnetization = robot.magnetization;
    act.alpha_deg = robot.alpha_deg;
    act.cone = cone;
    return act;
}

Real Scenario::step_size() const
{
    if (fixed_step)
        return stepper.h;
    if (!(steps_per_period > 0))
        throw ModelError("steps per period must be positive");
    return frequency > 0 ? 1.0 / (steps_per_period * frequency) : 1.0 / steps_per_period;
}

BodyConfiguration Scenario::initial_configuration() const
{
    BodyConfiguration c;
    c.position = Vec3(0, 0, shape.rest_height() + drop_height);
    return c;
}

Scenario preset_paper_gen1()
{
    Scenario sc;
    sc.robot = {3.78e-8, 2.9e-11, 15000.0, 27.0, 0.032};
    sc.env.mu = 0.3;
    sc.env.adhesion = 1.19;
    sc.env.electrostatic = 6.54e-7;
    sc.field_tesla = 0.01;
    sc.frequency = 1.0;
    return sc;
}

Scenario preset_aluminum_gen2()
{
    Scenario sc;
    sc.robot = {4.44e-8, 3.2e-11, 51835.0, 0.0, 0.032};
    sc.env.mu = 0.54;
    sc.env.adhesion = 26.18;
    sc.env.electrostatic = 0.0;
    sc.field_tesla = 0.02;
    sc.frequency = 1.0;
    return sc;
}

Scenario preset_shape_study_paper()
{
    Scenario sc = preset_paper_gen1();
    sc.robot = preset_aluminum_gen2().robot;
    sc.field_tesla = 0.02;
    sc.frequency = 10.0;
    return sc;
}

Scenario preset_error_sweep(const std::string& shape)
{
    Scenario sc = preset_aluminum_gen2();
    sc.set_shape(shape);
    sc.drop_height = 0.0;
    return sc;
}

Real twist_angle_deg(const Quat& q0, const Quat& q1, const Vec3& axis)
{
    const Quat r = q1 * q0.conjugate();
    const Real p = r.vec().dot(axis.normalized());
    Real a = std::remainder(2.0 * std::atan2(p, r.w()), 2.0 * kPi);
    if (a <= -kPi)
        a += 2.0 * kPi;
    return rad2deg(a);
}

CycleMetrics compute_metrics(const Trajectory& traj, Real frequency, TwistAxis axis)
{
    if (!(frequency > 0) || !(traj.h > 0))
        throw ModelError("metrics need a positive field frequency and step");
    const std::size_t k = index_at(traj, 1.0 / frequency);
    if (traj.samples.size() <= k)
        throw ModelError("trajectory is shorter than one field period");
    const auto& a = traj.samples.front().config;
    const auto& b = traj.samples[k].config;
    const Vec3 ax = axis == TwistAxis::WorldTravel ? Vec3::UnitY() : Vec3(b.orientation * Vec3::UnitY());
    CycleMetrics m;
    m.twist_deg = twist_angle_deg(a.orientation, b.orientation, ax);
    m.drift = b.position.x() - a.position.x();
    m.speed = (b.position.y() - a.position.y()) * frequency;
    return m;
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& job)
{
    if (threads <= 0)
        threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    const auto workers = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            job(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(n);
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) {
                    try {
                        job(i);
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            });
    }
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

std::vector<LocomotionResult> run_locomotion(const Scenario& base, const std::vector<Real>& frequencies,
                                             const LocomotionOptions& opt)
{
    if (opt.transient_periods < 0 || opt.measured_periods < 1)
        throw ModelError("locomotion needs a nonnegative transient and at least one measured period");
    std::vector<LocomotionResult> out(frequencies.size());
    parallel_for(frequencies.size(), opt.threads, [&](std::size_t i) {
        Scenario sc = base;
        sc.frequency = frequencies[i];
        if (sc.frequency < 0)
            throw ModelError("field frequency must be nonnegative (Hz)");
        const bool rotating = sc.frequency > 0;
        const Real period = rotating ? 1.0 / sc.frequency : 0.0;
        const Real t0 = rotating ? opt.transient_periods * period : opt.static_settle;
        const Real duration = t0 + (rotating ? opt.measured_periods * period : opt.static_duration);

        Trajectory traj = run(sc, duration);
        LocomotionResult& r = out[i];
        r.frequency = sc.frequency;
        r.ideal_speed = sc.shape.tumbling_perimeter_yz() * sc.frequency;
        r.aborted = traj.aborted;
        r.message = traj.message;

        const std::size_t i0 = index_at(traj, t0);
        const std::size_t i1 = traj.samples.size() - 1;
        if (i1 <= i0) {
            r.speed = r.mean_slip = r.max_slip = kNaN;
        } else {
            const auto& a = traj.samples[i0];
            const auto& b = traj.samples[i1];
            r.speed = (b.config.position.y() - a.config.position.y()) / (b.t - a.t);
            Real sum = 0.0;
            int n = 0;
            for (std::size_t k = i0 + 1; k <= i1; ++k) {
                const auto& s = traj.samples[k];
                if (s.lambda_n <= 0)
                    continue;
                sum += s.slip_speed;
                r.max_slip = std::max(r.max_slip, s.slip_speed);
                ++n;
            }
            r.mean_slip = n ? sum / n : 0.0;
        }
        if (opt.keep_trajectory)
            r.trajectory = std::move(traj);
    });
    return out;
}

std::vector<InclineResult> run_incline(const Scenario& base, const std::vector<Real>& angles_deg,
                                       const InclineOptions& opt)
{
    if (!(base.frequency > 0) || opt.periods < 1)
        throw ModelError("incline tests need a rotating field and at least one period");
    std::vector<InclineResult> out(angles_deg.size());
    parallel_for(angles_deg.size(), opt.threads, [&](std::size_t i) {
        Scenario sc = base;
        sc.env.incline_deg = angles_deg[i];
        sc.env.validate();
        const Real period = 1.0 / sc.frequency;
        const Trajectory traj = run(sc, opt.periods * period);

        InclineResult& r = out[i];
        r.angle_deg = angles_deg[i];
        r.aborted = traj.aborted;
        r.message = traj.message;
        const auto& last = traj.samples.back();
        const Real y0 = traj.samples.front().config.position.y();
        r.displacement = last.config.position.y() - y0;
        const Real t_prev = std::max(0.0, last.t - period);
        r.final_displacement = last.config.position.y() - traj.samples[index_at(traj, t_prev)].config.position.y();
        r.climbed = !r.aborted && r.displacement >= sc.shape.dims().length && r.final_displacement >= 0.0;
    });
    return out;
}

ShapeComparison run_shape_comparison(const Scenario& paper, const Scenario& aluminum,
                                     const ShapeComparisonOptions& opt)
{
    const std::vector<std::string> names{"cuboid", "ss", "ses", "curved"};
    const std::size_t na = opt.angles.size();
    ShapeComparison cmp;
    cmp.entries.resize(names.size());
    for (std::size_t s = 0; s < names.size(); ++s) {
        cmp.entries[s].shape = names[s];
        cmp.entries[s].incline.resize(na);
    }

    // one job per shape for locomotion and one per shape and angle
    parallel_for(names.size() * (1 + na), opt.threads, [&](std::size_t job) {
        const std::size_t s = job / (1 + na);
        const std::size_t k = job % (1 + na);
        auto& e = cmp.entries[s];
        if (k == 0) {
            Scenario sc = paper;
            sc.set_shape(names[s]);
            sc.field_tesla = opt.field_tesla;
            LocomotionOptions lo = opt.locomotion;
            lo.threads = 1;
            e.locomotion = run_locomotion(sc, {opt.locomotion_frequency}, lo).front();
        } else {
            Scenario sc = aluminum;
            sc.set_shape(names[s]);
            sc.field_tesla = opt.field_tesla;
            sc.frequency = opt.incline_frequency;
            e.incline[k - 1] = run_incline(sc, {opt.angles[k - 1]}).front();
        }
    });

    std::vector<const ShapeComparisonEntry*> order;
    for (const auto& e : cmp.entries)
        order.push_back(&e);
    auto speed = [](const ShapeComparisonEntry* e) {
        const Real v = e->locomotion.speed;
        return std::isnan(v) ? -std::numeric_limits<Real>::infinity() : v;
    };
    std::stable_sort(order.begin(), order.end(), [&](auto* a, auto* b) { return speed(a) > speed(b); });
    for (const auto* e : order)
        cmp.speed_ranking.push_back(e->shape);
    for (const auto* e : order) {
        const auto it = std::find(opt.angles.begin(), opt.angles.end(), opt.reference_angle);
        if (it != opt.angles.end() && e->incline[static_cast<std::size_t>(it - opt.angles.begin())].climbed) {
            cmp.best_overall = e->shape;
            break;
        }
    }
    return cmp;
}

ErrorSweepGrid ErrorSweepGrid::standard()
{
    ErrorSweepGrid g;
    for (int t = 0; t < 360; t += 10)
        g.theta2_deg.push_back(t);
    for (int p = 0; p <= 15; ++p)
        g.draft_deg.push_back(p);
    return g;
}

ErrorSweep run_error_sweep(const Scenario& base, const ErrorSweepGrid& grid)
{
    if (!(base.frequency > 0))
        throw ModelError("error sweeps need a rotating field");
    if (!(grid.duration_periods >= 1.0))
        throw ModelError("error sweeps need at least one field period");

    std::vector<ErrorCone> profiles;
    if (grid.include_zero_error)
        profiles.push_back({base.cone.aperture_deg, 0.0, 0.0});
    for (Real t2 : grid.theta2_deg)
        profiles.push_back({base.cone.aperture_deg, base.cone.aperture_deg, t2});

    ErrorSweep sweep;
    sweep.shape = base.shape_name;
    sweep.ideal_speed = base.shape.tumbling_perimeter_yz() * base.frequency;
    const std::size_t np = profiles.size();
    sweep.cells.resize(np * grid.draft_deg.size());

    // drafted shapes are shared read-only by the cells of a row
    std::vector<ShapeModel> shapes;
    for (Real phi : grid.draft_deg)
        shapes.push_back(phi > 0 ? apply_draft(base.shape, phi) : base.shape);

    parallel_for(sweep.cells.size(), grid.threads, [&](std::size_t i) {
        const std::size_t row = i / np;
        Scenario sc = base;
        sc.shape = shapes[row];
        sc.cone = profiles[i % np];

        ErrorSweepCell& c = sweep.cells[i];
        c.theta1_deg = sc.cone.theta1_deg;
        c.theta2_deg = sc.cone.theta2_deg;
        c.draft_deg = grid.draft_deg[row];

        const Trajectory traj = run(sc, grid.duration_periods / sc.frequency);
        c.aborted = traj.aborted;
        c.message = traj.message;
        if (traj.samples.size() <= index_at(traj, 1.0 / sc.frequency)) {
            c.metrics = {kNaN, kNaN, kNaN};
            return;
        }
        c.metrics = compute_metrics(traj, sc.frequency, grid.axis);
        c.motion = std::abs(c.metrics.twist_deg) >= 45.0 ? Motion::Flip : Motion::Twist;
        c.drift_ok = std::abs(c.metrics.drift) <= grid.drift_limit;
        c.faster = c.metrics.speed > sweep.ideal_speed;
    });
    return sweep;
}

} // namespace tumble
