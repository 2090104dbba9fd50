#include "tumblesim/scenarios.hpp"

#include <benchmark/benchmark.h>

using namespace tumble;

namespace {

const char* kShapes[] = {"cuboid", "ss", "ses", "curved"};

void BM_ClosestPoints(benchmark::State& state)
{
    const auto shape = preset_shape(kShapes[state.range(0)]);
    BodyConfiguration c;
    c.orientation = quat_exp(Vec3(0.4, 0.1, 0.0));
    c.position = Vec3(0.0, 0.0, shape.rest_height() + 0.2);
    for (auto _ : state)
        benchmark::DoNotOptimize(closest_points(shape, c, Substrate{}));
    state.SetLabel(kShapes[state.range(0)]);
}
BENCHMARK(BM_ClosestPoints)->DenseRange(0, 3);

void BM_StepJacobian(benchmark::State& state)
{
    const auto shape = preset_shape(kShapes[state.range(0)]);
    const Robot robot(shape, 3.78e-8);
    SimulationState st;
    st.config.position = Vec3(0.0, 0.0, shape.rest_height());
    st.config.angular_velocity = Vec3(3.0, 0.0, 0.0);
    const StepSystem sys(st, robot, MaterialEnvironment{}, MagneticActuation{}, 1e-3, 0);
    const VecX z = sys.initial_guess();
    VecX r;
    MatX j;
    for (auto _ : state) {
        sys.residual_and_jacobian(z, r, j);
        benchmark::DoNotOptimize(j.data());
    }
    state.SetLabel(kShapes[state.range(0)]);
}
BENCHMARK(BM_StepJacobian)->DenseRange(0, 3);

// one field period of tumbling, 1000 steps
void BM_TumblePeriod(benchmark::State& state)
{
    Scenario sc = preset_shape_study_paper();
    sc.set_shape(kShapes[state.range(0)]);
    sc.frequency = 1.0;
    StepperConfig cfg = sc.stepper;
    cfg.h = sc.step_size();
    const Robot robot = sc.make_robot();
    const auto act = sc.actuation();
    for (auto _ : state) {
        const auto traj = simulate(sc.initial_configuration(), 1.0, robot, sc.env, act, cfg);
        if (traj.aborted)
            state.SkipWithError(traj.message.c_str());
        benchmark::DoNotOptimize(traj.samples.back());
    }
    state.SetItemsProcessed(state.iterations() * 1000);
    state.SetLabel(kShapes[state.range(0)]);
}
BENCHMARK(BM_TumblePeriod)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);

void BM_SweepCells(benchmark::State& state)
{
    const Scenario base = preset_error_sweep("ses-half");
    ErrorSweepGrid g;
    g.theta2_deg = {0, 90, 180, 270};
    g.draft_deg = {0, 8};
    g.threads = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(run_error_sweep(base, g));
    state.SetItemsProcessed(state.iterations() * static_cast<long>(g.profiles() * g.draft_deg.size()));
}
BENCHMARK(BM_SweepCells)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
