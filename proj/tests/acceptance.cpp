// Acceptance run: one PASS/FAIL line per criterion. Pass criterion numbers as
// arguments to run a subset. Exit status is nonzero if any criterion fails.

#include "tumblesim/config.hpp"
#include "tumblesim/output.hpp"
#include "tumblesim/scenarios.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace tumble;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = true;
    std::vector<std::string> notes;

    void check(bool ok, const std::string& what)
    {
        pass = pass && ok;
        notes.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
    }
};

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

Real seconds_since(Clock::time_point t0) { return std::chrono::duration<Real>(Clock::now() - t0).count(); }

Trajectory run_scenario(const Scenario& sc, Real duration)
{
    StepperConfig cfg = sc.stepper;
    cfg.h = sc.step_size();
    return simulate(sc.initial_configuration(), duration, sc.make_robot(), sc.env, sc.actuation(), cfg);
}

// 1. speed law on paper
Outcome no_slip_law()
{
    Outcome o;
    const Scenario sc = preset_paper_gen1();
    for (Real f : {1.0, 2.0, 5.0, 10.0}) {
        const auto t0 = Clock::now();
        const auto r = run_locomotion(sc, {f}).front();
        const Real dt = seconds_since(t0);
        const Real ideal = 2.0 * (0.8 + 0.1) * f;
        const Real err = std::abs(r.speed - ideal) / ideal;
        const Real slip = r.mean_slip / ideal;
        o.check(!r.aborted && err <= 0.05,
                fmt("%4.0f Hz speed %.4f mm/s, ideal %.4f, error %.2f%% (limit 5%%)", f, r.speed, ideal, 100 * err));
        o.check(!r.aborted && slip < 0.01,
                fmt("%4.0f Hz mean contact slip %.3g mm/s = %.3f%% of surface speed (limit 1%%), max %.3g", f,
                    r.mean_slip, 100 * slip, r.max_slip));
        // 1 transient + 3 measured periods, reported per simulated period
        o.notes.push_back(fmt("     %4.0f Hz runtime %.2f s for 4 periods (target < 30 s)", f, dt));
    }
    return o;
}

// 2. adhesion trace on a 45 degree paper incline
Outcome adhesion_trace()
{
    Outcome o;
    Scenario sc = preset_paper_gen1();
    sc.field_tesla = 0.02;
    sc.env.incline_deg = 45.0;
    const int periods = 5;
    const auto traj = run_scenario(sc, periods / sc.frequency);
    o.check(!traj.aborted, "simulation completes " + traj.message);

    const Real flat = 3.8e-7, side = 4.7e-8, line = 1e-9;
    const long per = std::lround(1.0 / (sc.frequency * traj.h));
    int cycles_with_all = 0, stray = 0, contact_steps = 0;
    Real flat_lo = 1e9, flat_hi = 0, side_lo = 1e9, side_hi = 0;
    for (int c = 1; c < periods; ++c) {
        bool seen_flat = false, seen_side = false, seen_line = false;
        for (long k = c * per + 1; k <= (c + 1) * per && k < static_cast<long>(traj.samples.size()); ++k) {
            const auto& s = traj.samples[static_cast<std::size_t>(k)];
            if (s.lambda_n <= 0)
                continue;
            ++contact_steps;
            const Real a = s.lambda_a / units::kNewton;
            if (std::abs(a - flat) <= 0.05 * flat) {
                seen_flat = true;
                flat_lo = std::min(flat_lo, a);
                flat_hi = std::max(flat_hi, a);
            } else if (std::abs(a - side) <= 0.10 * side) {
                seen_side = true;
                side_lo = std::min(side_lo, a);
                side_hi = std::max(side_hi, a);
            } else if (a < line) {
                seen_line = true;
            } else {
                ++stray;
            }
        }
        cycles_with_all += seen_flat && seen_side && seen_line;
    }
    o.check(cycles_with_all == periods - 1,
            fmt("%d of %d cycles after the first show flat, side and line phases", cycles_with_all, periods - 1));
    o.check(stray == 0, fmt("%d of %d contact steps outside the three bands", stray, contact_steps));
    o.notes.push_back(fmt("     flat-face adhesion %.4g..%.4g N, side-face %.4g..%.4g N", flat_lo, flat_hi, side_lo,
                          side_hi));
    return o;
}

// 3. incline tables
Outcome incline_tables()
{
    Outcome o;
    Scenario paper = preset_paper_gen1();
    paper.field_tesla = 0.02;
    const std::vector<Real> pa{5, 10, 15, 30, 45, 60};
    const std::vector<bool> pw{true, true, true, true, true, false};
    const auto pr = run_incline(paper, pa);
    for (std::size_t i = 0; i < pa.size(); ++i)
        o.check(pr[i].climbed == pw[i], fmt("paper %2.0f deg: %s (expected %s), displacement %.3f mm", pa[i],
                                            pr[i].climbed ? "Y" : "N", pw[i] ? "Y" : "N", pr[i].displacement));
    const auto ar = run_incline(preset_aluminum_gen2(), {30, 45});
    o.check(ar[0].climbed, fmt("aluminum 30 deg: %s (expected Y)", ar[0].climbed ? "Y" : "N"));
    o.check(!ar[1].climbed, fmt("aluminum 45 deg: %s (expected N)", ar[1].climbed ? "Y" : "N"));
    return o;
}

// 4. shape study
Outcome shape_study()
{
    Outcome o;
    const auto cmp = run_shape_comparison(preset_shape_study_paper(), preset_aluminum_gen2());
    std::map<std::string, const ShapeComparisonEntry*> by;
    for (const auto& e : cmp.entries)
        by[e.shape] = &e;
    std::string speeds;
    for (const auto& e : cmp.entries)
        speeds += fmt(" %s %.3f", e.shape.c_str(), e.locomotion.speed);
    const std::vector<std::string> order{"curved", "ses", "ss", "cuboid"};
    o.check(cmp.speed_ranking == order, "speed order curved > ses > ss > cuboid; mm/s:" + speeds);
    const std::map<std::string, std::vector<bool>> want{
        {"cuboid", {true, false}}, {"ss", {true, false}}, {"ses", {true, false}}, {"curved", {false, false}}};
    // angles are 20, 30, 45; the criterion covers 30 and 45
    for (const auto& [name, w] : want) {
        const auto& inc = by.at(name)->incline;
        o.check(inc[1].climbed == w[0] && inc[2].climbed == w[1],
                fmt("aluminum %-6s 20/30/45 deg: %s/%s/%s (expected ?/%s/%s)", name.c_str(),
                    inc[0].climbed ? "Y" : "N", inc[1].climbed ? "Y" : "N", inc[2].climbed ? "Y" : "N",
                    w[0] ? "Y" : "N", w[1] ? "Y" : "N"));
    }
    o.notes.push_back("     best overall (fastest climber of 30 deg): " +
                      (cmp.best_overall.empty() ? std::string("none") : cmp.best_overall));
    return o;
}

struct Sweeps {
    ErrorSweep ss, ses;
};

const ErrorSweepCell* cell(const ErrorSweep& s, Real theta1, Real theta2, Real draft)
{
    for (const auto& c : s.cells)
        if (c.theta1_deg == theta1 && c.theta2_deg == theta2 && c.draft_deg == draft)
            return &c;
    return nullptr;
}

Sweeps& sweeps()
{
    static std::optional<Sweeps> s;
    if (!s) {
        const auto grid = ErrorSweepGrid::standard();
        s = Sweeps{run_error_sweep(preset_error_sweep("ss-half"), grid),
                   run_error_sweep(preset_error_sweep("ses-half"), grid)};
    }
    return *s;
}

Real median(std::vector<Real> v)
{
    if (v.empty())
        return std::nan("");
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// 5. error sweep trends
Outcome error_sweep()
{
    Outcome o;
    const auto t0 = Clock::now();
    const auto& s = sweeps();
    std::size_t aborted = 0;
    for (const auto* sw : {&s.ss, &s.ses})
        for (const auto& c : sw->cells)
            aborted += c.aborted;
    o.notes.push_back(fmt("     %zu + %zu cells in %.0f s, %zu aborted", s.ss.cells.size(), s.ses.cells.size(),
                          seconds_since(t0), aborted));

    const Real v_ss = cell(s.ss, 0, 0, 0)->metrics.speed * 1e3;
    const Real v_ses = cell(s.ses, 0, 0, 0)->metrics.speed * 1e3;
    o.check(std::abs(v_ss - 1093) <= 0.05 * 1093, fmt("zero-error SS speed %.1f um/s (1093 +-5%%)", v_ss));
    o.check(std::abs(v_ses - 1197) <= 0.05 * 1197, fmt("zero-error SES speed %.1f um/s (1197 +-5%%)", v_ses));

    std::vector<Real> flipped;
    for (const auto& c : s.ses.cells)
        if (c.motion == Motion::Flip && !c.aborted)
            flipped.push_back(c.metrics.speed * 1e3);
    const Real plateau = median(flipped);
    o.check(!flipped.empty() && std::abs(plateau - 1200) <= 0.05 * 1200,
            fmt("SES flipped-cell speed plateau (median of %zu cells) %.1f um/s (1200 +-5%%)", flipped.size(),
                plateau));

    // largest draft up to which every geometric-only SS cell stays within 50 um of drift
    Real boundary = -1;
    std::string drifts;
    for (int phi = 0; phi <= 15; ++phi) {
        const auto* c = cell(s.ss, 0, 0, phi);
        if (phi <= 4)
            drifts += fmt(" %d:%.1f", phi, c->metrics.drift * 1e3);
        if (std::abs(c->metrics.drift) > 0.05)
            break;
        boundary = phi;
    }
    o.check(boundary >= 0 && std::abs(boundary - 2) <= 2,
            fmt("SS drift stays within 50 um up to phi = %.0f deg (2 +-2); drift um by phi:%s", boundary,
                drifts.c_str()));

    Real onset = -1;
    for (int phi = 0; phi <= 15 && onset < 0; ++phi)
        if (cell(s.ses, 0, 0, phi)->motion == Motion::Flip)
            onset = phi;
    const auto* at = onset >= 0 ? cell(s.ses, 0, 0, onset) : nullptr;
    o.check(onset >= 10 && onset <= 14,
            fmt("SES geometric-only flip onset phi = %.0f deg, twist %.1f deg ([10, 14])", onset,
                at ? at->metrics.twist_deg : std::nan("")));

    for (const auto* sw : {&s.ss, &s.ses}) {
        Real worst = 0;
        for (int t2 = 10; t2 < 180; t2 += 10) {
            const Real a = cell(*sw, 10, t2, 0)->metrics.speed;
            const Real b = cell(*sw, 10, 360 - t2, 0)->metrics.speed;
            worst = std::max(worst, std::abs(a - b) / (0.5 * (a + b)));
        }
        o.check(worst <= 0.05,
                fmt("%s v(theta2) symmetry about 180 deg at zero draft: worst %.2f%% (limit 5%%)",
                    sw->shape.c_str(), 100 * worst));
    }
    return o;
}

// Jacobian of the step residual against central differences
Real worst_jacobian_error(std::mt19937_64& rng)
{
    std::uniform_real_distribution<Real> u(-1.0, 1.0);
    Real worst = 0.0;
    for (const char* name : {"cuboid", "ss", "ses", "curved"}) {
        const auto shape = preset_shape(name);
        const Robot robot(shape, 3.78e-8);
        MagneticActuation act;
        act.field_tesla = 0.02;
        for (int trial = 0; trial < 5; ++trial) {
            SimulationState st;
            st.config.position = Vec3(0.1 * u(rng), 0.1 * u(rng), shape.rest_height() + 0.01 * u(rng));
            st.config.orientation = quat_exp(Vec3(u(rng), u(rng), u(rng)));
            st.config.linear_velocity = Vec3(u(rng), u(rng), u(rng));
            st.config.angular_velocity = 3.0 * Vec3(u(rng), u(rng), u(rng));
            st.adhesion.lambda_a = 0.3;
            st.adhesion.friction_radius = 0.05;
            const auto piece = select_piece(shape, st.config.position, st.config.rotation(), Substrate{});
            const StepSystem sys(st, robot, MaterialEnvironment{}, act, 1e-3, piece);
            VecX z = sys.initial_guess();
            for (int i = 0; i < z.size(); ++i)
                z[i] += 0.05 * u(rng) * (1.0 + std::abs(z[i]));
            z[sys.idx_sigma()] = std::abs(z[sys.idx_sigma()]) + 0.1;
            VecX r;
            MatX ja;
            sys.residual_and_jacobian(z, r, ja);
            const MatX jf = fd_jacobian(sys.problem(true), z, 1e-6);
            for (Eigen::Index i = 0; i < ja.rows(); ++i) {
                const Real scale = std::max(1.0, jf.row(i).cwiseAbs().maxCoeff());
                worst = std::max(worst, (ja.row(i) - jf.row(i)).cwiseAbs().maxCoeff() / scale);
            }
        }
    }
    return worst;
}

// dissipation of the closed form against a dense search over the ellipsoid
Real worst_friction_error(std::mt19937_64& rng)
{
    std::uniform_real_distribution<Real> u(-1.0, 1.0);
    FrictionParams fp;
    fp.creep = 0.0;
    fp.e_o = 0.8;
    fp.e_r = 0.05;
    const Real ln = 1.7, rho = fp.mu * ln;
    Real worst = 0.0;
    for (int k = 0; k < 20; ++k) {
        const Vec3 v(u(rng), u(rng), 10.0 * u(rng));
        const Real p = -v.dot(sliding_friction(v, fp, ln).lambda);
        Real best = -1e300;
        const int n = 400;
        for (int i = 0; i <= n; ++i)
            for (int j = 0; j < 2 * n; ++j) {
                const Real th = kPi * i / n, ph = kPi * j / n;
                const Vec3 lam(rho * fp.e_t * std::sin(th) * std::cos(ph),
                               rho * fp.e_o * std::sin(th) * std::sin(ph), rho * fp.e_r * std::cos(th));
                best = std::max(best, -v.dot(lam));
            }
        worst = std::max(worst, std::abs(p - best) / best);
    }
    return worst;
}

// 6. property suite
Outcome properties()
{
    Outcome o;
    struct Case {
        std::string name;
        Scenario sc;
        Real duration;
    };
    std::vector<Case> cases;
    cases.push_back({"paper cuboid 1 Hz", preset_paper_gen1(), 10.0});
    {
        Scenario sc = preset_paper_gen1();
        sc.frequency = 10.0;
        cases.push_back({"paper cuboid 10 Hz", sc, 0.4});
    }
    for (const char* name : {"ss", "ses", "curved"}) {
        Scenario sc = preset_shape_study_paper();
        sc.set_shape(name);
        cases.push_back({std::string("paper ") + name + " 10 Hz", sc, 0.3});
    }
    {
        Scenario sc = preset_aluminum_gen2();
        sc.env.incline_deg = 30.0;
        cases.push_back({"aluminum cuboid 30 deg", sc, 3.0});
    }
    {
        Scenario sc = preset_error_sweep("ses-half");
        sc.set_shape("ses-half", 12.0);
        sc.cone = {10.0, 10.0, 90.0};
        cases.push_back({"drafted ses-half with error", sc, 1.0});
    }

    Real gap = 0, pn = 0, xi = 0, comp = 0, qn = 0;
    std::size_t steps = 0;
    bool aborted = false;
    for (const auto& c : cases) {
        const auto traj = run_scenario(c.sc, c.duration);
        const Real weight = c.sc.make_robot().inertia.mass * c.sc.env.gravity * units::kMetre;
        aborted = aborted || traj.aborted;
        if (traj.aborted)
            o.notes.push_back("     " + c.name + " aborted: " + traj.message);
        for (std::size_t k = 1; k < traj.samples.size(); ++k) {
            const auto& s = traj.samples[k];
            gap = std::min(gap, s.gap);
            pn = std::min(pn, s.lambda_n * traj.h);
            // ellipsoid norm of the friction force minus mu lambda_n, over the weight
            const Real a = c.sc.env.mu * s.lambda_n;
            const Real b = std::sqrt(std::max(0.0, a * a - s.xi));
            xi = std::max(xi, (b - a) / weight);
            comp = std::max(comp, s.complementarity);
            qn = std::max(qn, std::abs(s.config.orientation.norm() - 1.0));
            ++steps;
        }
    }
    o.check(!aborted, fmt("%zu cases, %zu accepted steps, none aborted", cases.size(), steps));
    o.check(gap >= -1e-6, fmt("non-penetration: lowest gap %.3g mm (>= -1e-6)", gap));
    o.check(pn >= 0, fmt("normal impulse: lowest p_n %.3g (>= 0)", pn));
    o.check(xi <= 1e-9, fmt("friction ellipsoid: worst excess over mu lambda_n %.3g of the weight (<= 1e-9)", xi));
    o.check(comp <= 1e-9, fmt("complementarity: worst pair residual %.3g (<= 1e-9)", comp));
    o.check(qn < 1e-9, fmt("quaternion norm drift %.3g (< 1e-9, 1e4 steps in the first case)", qn));

    {
        const Robot robot(make_cuboid(0.8, 0.4, 0.1), 3.78e-8);
        SimulationState st;
        st.config.position = Vec3(0, 0, robot.shape.rest_height());
        st.adhesion.friction_radius = friction_radius(st.adhesion, robot.shape);
        MagneticActuation act;
        act.field_tesla = 0.0;
        StepRecord rec;
        for (int k = 0; k < 5; ++k)
            step(st, robot, MaterialEnvironment{}, act, StepperConfig{}, &rec);
        const Real want = 3.78e-8 * 9.81 + 6.54e-7 + 1.19 * 0.8e-3 * 0.4e-3;
        const Real got = rec.lambda_n / units::kNewton;
        o.check(std::abs(got - want) <= 1e-3 * want && std::abs(want - 1.406e-6) <= 1e-3 * 1.406e-6,
                fmt("static normal force %.5g N, force balance %.5g N", got, want));
    }

    std::mt19937_64 rng(2024);
    const Real fr = worst_friction_error(rng);
    o.check(fr <= 0.01, fmt("friction vs grid-search dissipation maximizer: worst %.3g%% (<= 1%%)", 100 * fr));
    const Real je = worst_jacobian_error(rng);
    o.check(je <= 1e-4, fmt("step Jacobian vs finite differences: worst relative %.3g (<= 1e-4)", je));
    return o;
}

// 7. byte-identical reruns
Outcome determinism()
{
    Outcome o;
    auto once = [] {
        std::ostringstream all;
        RunConfig cfg = preset_config("paper-gen1");
        cfg.frequencies = {1.0, 5.0};
        const Manifest m = make_manifest("locomotion", cfg);
        LocomotionOptions lo;
        lo.threads = 2;
        write_locomotion_csv(all, run_locomotion(cfg.scenario(), cfg.frequencies, lo), m);

        const Scenario sc = cfg.scenario();
        write_trajectory_csv(all, run_scenario(sc, 1.0), m);

        RunConfig sw = preset_config("error-sweep-ses");
        sw.sweep_theta2 = {0, 90, 180, 270};
        sw.sweep_drafts = {0, 6, 12};
        sw.threads = 3;
        write_sweep_csv(all, run_error_sweep(sw.scenario(), sw.sweep_grid()), make_manifest("sweep", sw));
        return all.str();
    };
    const auto a = once();
    const auto b = once();
    o.check(a == b, fmt("locomotion, trajectory and sweep CSVs rerun: %zu bytes, %s", a.size(),
                        a == b ? "identical" : "different"));
    o.check(sha256_hex(a) == sha256_hex(b), "SHA-256 " + sha256_hex(a).substr(0, 16));
    return o;
}

} // namespace

int main(int argc, char** argv)
{
    const std::vector<std::pair<const char*, Outcome (*)()>> criteria{
        {"no-slip velocity law", no_slip_law},  {"adhesion trace", adhesion_trace},
        {"incline tables", incline_tables},     {"shape study", shape_study},
        {"error-sweep trends", error_sweep},    {"property suite", properties},
        {"determinism", determinism}};

    std::set<int> only;
    for (int i = 1; i < argc; ++i)
        only.insert(std::atoi(argv[i]));

    int failed = 0;
    std::vector<std::string> lines;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!only.empty() && !only.count(id))
            continue;
        const auto t0 = Clock::now();
        const Outcome o = criteria[i].second();
        for (const auto& n : o.notes)
            std::printf("  [%d] %s\n", id, n.c_str());
        const std::string line =
            fmt("criterion %d %-22s %s (%.0f s)", id, criteria[i].first, o.pass ? "PASS" : "FAIL", seconds_since(t0));
        std::printf("%s\n", line.c_str());
        std::fflush(stdout);
        lines.push_back(line);
        failed += !o.pass;
    }
    std::printf("\nsummary\n");
    for (const auto& l : lines)
        std::printf("%s\n", l.c_str());
    return failed ? 1 : 0;
}
