#include "tumblesim/stepper.hpp"

#include <limits>

#include <unsupported/Eigen/AutoDiff>

#include <algorithm>
#include <cmath>

namespace tumble {

namespace {

using Deriv = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 32, 1>;
using AD = Eigen::AutoDiffScalar<Deriv>;

// smoothing of the ellipsoid row normalization, g*mm/s^2
constexpr Real kEllipsoidScale = 1e-9;

} // namespace

void MaterialEnvironment::validate() const
{
    if (!(mu > 0))
        throw ModelError("friction coefficient mu must be positive");
    if (!(adhesion >= 0))
        throw ModelError("adhesion coefficient C must be nonnegative (N/m^2)");
    if (!(electrostatic >= 0))
        throw ModelError("electrostatic force must be nonnegative (N)");
    if (!(e_t > 0) || !(e_o > 0) || (e_r && !(*e_r > 0)))
        throw ModelError("friction ellipsoid constants must be positive");
    if (!(gravity >= 0))
        throw ModelError("gravity must be nonnegative (m/s^2)");
    if (!(incline_deg >= 0 && incline_deg < 90))
        throw ModelError("incline must lie in [0, 90) degrees");
}

Vec3 MaterialEnvironment::gravity_vector() const
{
    return rot_x(-deg2rad(incline_deg)) * Vec3(0, 0, -gravity * units::kMetre);
}

Robot::Robot(ShapeModel s, Real mass_kg)
    : shape(std::move(s)), inertia(InertiaModel::from_shape(shape, mass_kg * units::kKilogram))
{
}

StepSystem::StepSystem(const SimulationState& state, const Robot& robot, const MaterialEnvironment& env,
                       const MagneticActuation& act, Real h, std::size_t piece, const Substrate& substrate)
    : piece_ptr_(&robot.shape.pieces().at(piece)), piece_(piece), m_(static_cast<int>(piece_ptr_->size())),
      substrate_(substrate), frame_(make_frame(substrate)), act_(act), h_(h)
{
    if (18 + m_ > 32)
        throw ModelError("piece has too many constraints for the step Jacobian");
    const auto& c = state.config;
    x_ = c.position;
    v_ = c.linear_velocity;
    w_ = c.angular_velocity;
    r_ = c.rotation();
    mass_ = robot.inertia.mass;
    inertia_world_ = r_ * robot.inertia.inertia * r_.transpose();
    gyro_ = w_.cross(inertia_world_ * w_);
    force_ext_ = mass_ * env.gravity_vector() - env.electrostatic_internal() * frame_.n;
    field_ = field_at(state.t + h, act);
    lambda_a_ = state.adhesion.lambda_a;
    fp_.mu = env.mu;
    fp_.e_t = env.e_t;
    fp_.e_o = env.e_o;
    fp_.e_r = env.e_r ? *env.e_r
                      : (state.adhesion.friction_radius > 0 ? state.adhesion.friction_radius
                                                            : friction_radius(state.adhesion, robot.shape));
}

template <typename S>
void StepSystem::residual(const Eigen::Matrix<S, Eigen::Dynamic, 1>& z, Eigen::Matrix<S, Eigen::Dynamic, 1>& r) const
{
    using V3 = Eigen::Matrix<S, 3, 1>;
    using V6 = Eigen::Matrix<S, 6, 1>;
    using M3 = Eigen::Matrix<S, 3, 3>;
    const int m = m_;
    r.resize(size());

    const V3 vp = z.template segment<3>(0);
    const V3 wp = z.template segment<3>(3);
    const V3 a1 = z.template segment<3>(6);
    const V3 a2 = z.template segment<3>(9);
    const S lt = z[12], lo = z[13], lr = z[14];
    const Eigen::Matrix<S, Eigen::Dynamic, 1> l = z.segment(15, m);
    const S l2 = z[15 + m];
    const S sigma = z[16 + m];
    const S ln = z[17 + m];

    const V3 xp = x_.cast<S>() + S(h_) * vp;
    const V3 hw = S(h_) * wp;
    const M3 rp = so3_exp<S>(hw) * r_.cast<S>();

    const auto w = wrench_maps<S>(frame_, a1, xp);
    const V3 torque = magnetic_torque<S>(act_, rp, field_);

    V6 lhs;
    lhs.template head<3>() = S(mass_ / h_) * (vp - v_.cast<S>());
    lhs.template tail<3>() = (inertia_world_ / h_).cast<S>() * (wp - w_.cast<S>());
    V6 ext;
    ext.template head<3>() = force_ext_.cast<S>();
    ext.template tail<3>() = torque - gyro_.cast<S>();
    const V6 mom = lhs - w.n * (ln - S(lambda_a_)) - w.t * lt - w.o * lo - w.r * lr - ext;
    for (int i = 0; i < 6; ++i)
        r[i] = mom[i];

    auto eq = r.segment(6, 6);
    auto comp = r.segment(15, m + 1);
    assemble_nonpenetration<S>(*piece_ptr_, substrate_, a1, a2, l, l2, xp, rp, eq, comp);

    V6 vel6;
    vel6 << vp, wp;
    const V3 cv(w.t.dot(vel6), w.o.dot(vel6), w.r.dot(vel6));
    const auto fr = friction_residuals<S>(V3(lt, lo, lr), sigma, cv, fp_, ln);
    // same roots, rows stay O(lambda) at large slip speed
    using std::sqrt;
    const S scale = S(1.0) / sqrt(S(1.0) + sigma * sigma);
    r[12] = fr.eq[0] * scale;
    r[13] = fr.eq[1] * scale;
    r[14] = fr.eq[2] * scale;
    // xi = a^2 - b^2 divided by about a + b: same sign and roots, in force units
    const S c2 = S(kEllipsoidScale * kEllipsoidScale);
    const S a = S(fp_.mu) * ln;
    const S b2 = lt * lt / S(fp_.e_t * fp_.e_t) + lo * lo / S(fp_.e_o * fp_.e_o) + lr * lr / S(fp_.e_r * fp_.e_r);
    r[16 + m] = fr.xi / (sqrt(a * a + c2) + sqrt(b2 + c2));
    r[17 + m] = substrate_.value<S>(a1);
}

template void StepSystem::residual<double>(const VecX&, VecX&) const;

void StepSystem::residual_and_jacobian(const VecX& z, VecX& r, MatX& jac) const
{
    const int n = size();
    Eigen::Matrix<AD, Eigen::Dynamic, 1> za(n);
    for (int i = 0; i < n; ++i)
        za[i] = AD(z[i], n, i);
    Eigen::Matrix<AD, Eigen::Dynamic, 1> ra;
    residual<AD>(za, ra);
    r.resize(n);
    jac.resize(n, n);
    for (int i = 0; i < n; ++i) {
        r[i] = ra[i].value();
        if (ra[i].derivatives().size() == n)
            jac.row(i) = ra[i].derivatives().transpose();
        else
            jac.row(i).setZero();
    }
}

MncpProblem StepSystem::problem(bool finite_difference) const
{
    MncpProblem p;
    p.n_eq = 15;
    p.n_comp = m_ + 3;
    p.residual = [this](const VecX& z, VecX& r) { residual<double>(z, r); };
    if (!finite_difference)
        p.jacobian = [this](const VecX& z, VecX& r, MatX& j) { residual_and_jacobian(z, r, j); };
    return p;
}

VecX StepSystem::initial_guess() const
{
    VecX z = VecX::Zero(size());
    const Vec3 g_acc = force_ext_ / mass_;
    Vec3 vp = v_ + h_ * g_acc;
    const Mat3 rp = so3_exp<Real>(Vec3(h_ * w_)) * r_;
    const Vec3 nb = rp.transpose() * frame_.n;
    const Vec3 low = piece_ptr_->support(-nb);
    const Real gap = substrate_.value<Real>(Vec3(x_ + h_ * vp + rp * low));
    Real impact = 0.0;
    if (gap < 0.0) {
        // push the predicted pose back onto the plane
        vp -= (gap / h_) * frame_.n;
        impact = -mass_ * gap / (h_ * h_);
    }
    z.segment<3>(0) = vp;
    z.segment<3>(3) = w_;
    const Vec3 a1 = x_ + h_ * vp + rp * low;
    const Real gap1 = substrate_.value<Real>(a1);
    z.segment<3>(6) = a1;
    z.segment<3>(9) = a1 - gap1 * frame_.n;
    z[idx_l2()] = std::max(gap1, 0.0);

    // split -nb over the constraints active at the support point, l >= 0
    std::vector<int> act;
    for (int i = 0; i < m_; ++i)
        if (std::abs(piece_ptr_->constraints()[static_cast<std::size_t>(i)].value<Real>(low)) <= 1e-9)
            act.push_back(i);
    Real best_res = std::numeric_limits<Real>::infinity();
    VecX best_l;
    std::vector<int> best_set;
    const int na = static_cast<int>(act.size());
    for (int mask = 1; mask < (1 << std::min(na, 6)); ++mask) {
        std::vector<int> set;
        for (int k = 0; k < std::min(na, 6); ++k)
            if (mask & (1 << k))
                set.push_back(act[static_cast<std::size_t>(k)]);
        if (set.size() > 3)
            continue;
        MatX g(3, static_cast<Eigen::Index>(set.size()));
        for (std::size_t k = 0; k < set.size(); ++k)
            g.col(static_cast<Eigen::Index>(k)) =
                piece_ptr_->constraints()[static_cast<std::size_t>(set[k])].gradient<Real>(low);
        const VecX l = g.colPivHouseholderQr().solve(-nb);
        if (l.minCoeff() < 0.0)
            continue;
        const Real r = (g * l + nb).norm() + 1e-12 * static_cast<Real>(set.size());
        if (r < best_res) {
            best_res = r;
            best_l = l;
            best_set = set;
        }
    }
    for (std::size_t k = 0; k < best_set.size(); ++k)
        z[idx_l(best_set[k])] = best_l[static_cast<Eigen::Index>(k)];
    if (gap1 <= 1e-6)
        z[idx_lambda_n()] = std::max(0.0, -force_ext_.dot(frame_.n)) + lambda_a_ + impact;
    return z;
}

namespace {

// other pieces within this distance of the nearest one are tried when it fails, mm
constexpr Real kTouchingGap = 1e-2;

struct SubResult {
    VecX z;
    MncpResult solve;
    std::size_t piece = 0;
    int m = 0;
    Real lambda_a = 0.0;
    Real complementarity = 0.0;
    FrictionParams fp;
    ContactFrame frame;
};

// natural residual max |min(v, F)| over the pairs
Real pair_violation(const MncpProblem& p, const VecX& z)
{
    VecX raw(p.size());
    p.residual(z, raw);
    Real worst = 0.0;
    for (int i = 0; i < p.n_comp; ++i)
        worst = std::max(worst, std::abs(std::min(z[p.n_eq + i], raw[p.n_eq + i])));
    return worst;
}

bool solve_piece(const SimulationState& state, const Robot& robot, const MaterialEnvironment& env,
                 const MagneticActuation& act, const StepperConfig& cfg, Real h, std::size_t piece,
                 const Substrate& substrate, std::optional<StepSystem>& sys, MncpResult& res)
{
    sys.emplace(state, robot, env, act, h, piece, substrate);
    const auto prob = sys->problem(cfg.finite_difference_jacobian);

    const bool warm = state.warm_piece && *state.warm_piece == piece && state.warm.size() == sys->size();
    res = solve(prob, warm ? state.warm : sys->initial_guess(), cfg.solver);
    if (!res.converged() && warm) {
        auto cold = solve(prob, sys->initial_guess(), cfg.solver);
        if (cold.converged() || cold.residual < res.residual)
            res = std::move(cold);
    }
    return res.converged();
}

bool single_step(SimulationState& state, const Robot& robot, const MaterialEnvironment& env,
                 const MagneticActuation& act, const StepperConfig& cfg, Real h, SubResult& out)
{
    const Substrate substrate;
    const auto& c = state.config;
    const Vec3 xp = c.position + h * c.linear_velocity;
    const Mat3 rp = so3_exp<Real>(Vec3(h * c.angular_velocity)) * c.rotation();

    // nearest piece first, then any other piece that is nearly touching
    std::vector<std::pair<Real, std::size_t>> order;
    for (std::size_t i = 0; i < robot.shape.pieces().size(); ++i)
        order.emplace_back(piece_gap(robot.shape.pieces()[i], xp, rp, substrate), i);
    std::stable_sort(order.begin(), order.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first - 1e-12; });

    std::optional<StepSystem> sys;
    MncpResult res;
    std::size_t piece = order.front().second;
    bool ok = solve_piece(state, robot, env, act, cfg, h, piece, substrate, sys, res);
    for (std::size_t k = 1; !ok && k < order.size() && order[k].first < order.front().first + kTouchingGap; ++k) {
        std::optional<StepSystem> alt_sys;
        MncpResult alt;
        if (solve_piece(state, robot, env, act, cfg, h, order[k].second, substrate, alt_sys, alt)) {
            ok = true;
            piece = order[k].second;
            sys = std::move(alt_sys);
            res = std::move(alt);
        }
    }
    if (!ok) {
        out.solve = res;
        return false;
    }
    const auto prob = sys->problem(cfg.finite_difference_jacobian);

    // multipliers within tolerance of zero become exactly nonnegative
    for (Eigen::Index i = sys->n_eq(); i < res.z.size(); ++i)
        res.z[i] = std::max(res.z[i], 0.0);
    {
        const auto& fp = sys->friction();
        const Real a = fp.mu * res.z[sys->idx_lambda_n()];
        const Real b = std::sqrt(std::pow(res.z[12] / fp.e_t, 2) + std::pow(res.z[13] / fp.e_o, 2) +
                                 std::pow(res.z[14] / fp.e_r, 2));
        if (b > a)
            res.z.segment<3>(12) *= a / b;
    }
    const VecX& z = res.z;
    const int m = sys->constraint_count();
    state.config.linear_velocity = z.segment<3>(0);
    state.config.angular_velocity = z.segment<3>(3);
    integrate_pose(state.config, h);
    state.t += h;

    ContactMultipliers mult;
    mult.piece = piece;
    mult.robot.assign(z.data() + 15, z.data() + 15 + m);
    mult.substrate = z[15 + m];
    const Real lambda_n = z[17 + m];
    state.adhesion = identify_contact_area(mult, lambda_n, robot.shape, env.adhesion * units::kPascal, cfg.area);
    state.warm = z;
    state.warm_piece = piece;

    out.complementarity = pair_violation(prob, z);
    out.z = z;
    out.solve = std::move(res);
    out.piece = piece;
    out.m = m;
    out.lambda_a = sys->lambda_a();
    out.fp = sys->friction();
    out.frame = sys->frame();
    return true;
}

bool advance(SimulationState& state, const Robot& robot, const MaterialEnvironment& env,
             const MagneticActuation& act, const StepperConfig& cfg, Real h, int depth, SubResult& last,
             int& halvings, int& iterations, std::string& error)
{
    SimulationState trial = state;
    SubResult sub;
    if (single_step(trial, robot, env, act, cfg, h, sub)) {
        iterations += sub.solve.iterations;
        state = std::move(trial);
        last = std::move(sub);
        return true;
    }
    if (depth >= cfg.max_halvings) {
        error = "step at t=" + std::to_string(state.t) + " failed: " + to_string(sub.solve.status) +
                " after " + std::to_string(sub.solve.iterations) + " iterations, residual " +
                std::to_string(sub.solve.residual);
        return false;
    }
    halvings = std::max(halvings, depth + 1);
    SimulationState half = state;
    if (!advance(half, robot, env, act, cfg, 0.5 * h, depth + 1, last, halvings, iterations, error))
        return false;
    if (!advance(half, robot, env, act, cfg, 0.5 * h, depth + 1, last, halvings, iterations, error))
        return false;
    state = std::move(half);
    return true;
}

} // namespace

bool step(SimulationState& state, const Robot& robot, const MaterialEnvironment& env, const MagneticActuation& act,
          const StepperConfig& cfg, StepRecord* record, std::string* error)
{
    SubResult last;
    int halvings = 0, iterations = 0;
    std::string err;
    const Real t_end = state.t + cfg.h;
    SimulationState next = state;
    if (!advance(next, robot, env, act, cfg, cfg.h, 0, last, halvings, iterations, err)) {
        if (error)
            *error = err;
        return false;
    }
    next.t = t_end; // keep the sample grid exact after halving
    state = std::move(next);

    if (record) {
        const VecX& z = last.z;
        const int m = last.m;
        StepRecord& rec = *record;
        rec = StepRecord{};
        rec.t = state.t;
        rec.config = state.config;
        rec.lambda_t = z[12];
        rec.lambda_o = z[13];
        rec.lambda_r = z[14];
        rec.sigma = z[16 + m];
        rec.lambda_n = z[17 + m];
        rec.lambda_a = last.lambda_a;
        rec.area = state.adhesion.area;
        rec.active_face = state.adhesion.active_face ? static_cast<int>(*state.adhesion.active_face) : -1;
        rec.piece = static_cast<int>(last.piece);
        rec.a1 = z.segment<3>(6);
        rec.gap = Substrate{}.value<Real>(rec.a1);
        const Vec3 arm = rec.a1 - state.config.position;
        const Vec3 vc = state.config.linear_velocity + state.config.angular_velocity.cross(arm);
        if (rec.lambda_n > cfg.area.normal_tol)
            rec.slip_speed = std::hypot(last.frame.t.dot(vc), last.frame.o.dot(vc));
        const auto& fp = last.fp;
        rec.xi = std::pow(fp.mu * rec.lambda_n, 2) - std::pow(rec.lambda_t / fp.e_t, 2) -
                 std::pow(rec.lambda_o / fp.e_o, 2) - std::pow(rec.lambda_r / fp.e_r, 2);
        rec.complementarity = last.complementarity;
        rec.iterations = iterations;
        rec.halvings = halvings;
        rec.merit = last.solve.residual;
    }
    return true;
}

Trajectory simulate(const BodyConfiguration& initial, Real duration, const Robot& robot,
                    const MaterialEnvironment& env, const MagneticActuation& act, const StepperConfig& cfg)
{
    if (!(duration > 0))
        throw ModelError("simulation duration must be positive");
    if (!(cfg.h > 0))
        throw ModelError("time step must be positive");
    env.validate();
    act.validate();
    cfg.solver.validate();

    Trajectory traj;
    traj.h = cfg.h;
    SimulationState state;
    state.config = initial;
    state.config.orientation.normalize();
    state.adhesion.friction_radius = friction_radius(state.adhesion, robot.shape);

    StepRecord first;
    first.config = state.config;
    traj.samples.push_back(first);

    const auto steps = static_cast<long>(std::llround(duration / cfg.h));
    traj.samples.reserve(static_cast<std::size_t>(steps) + 1);
    for (long k = 0; k < steps; ++k) {
        StepRecord rec;
        std::string err;
        if (!step(state, robot, env, act, cfg, &rec, &err)) {
            traj.aborted = true;
            traj.message = err;
            break;
        }
        rec.t = static_cast<Real>(k + 1) * cfg.h;
        state.t = rec.t;
        traj.samples.push_back(rec);
    }
    return traj;
}

} // namespace tumble
