#include <benchmark/benchmark.h>

#include "stucco/presets.hpp"
#include "stucco/retrieval.hpp"
#include "stucco/sdf.hpp"
#include "stucco/sim.hpp"
#include "stucco/tracker.hpp"

namespace {

const stucco::SdfGrid& gripper_grid() {
    static stucco::SdfGrid grid(stucco::Shape::box(0.04, 0.04), 0.001, 0.02);
    return grid;
}

void BM_SdfLookup(benchmark::State& state) {
    const auto& grid = gripper_grid();
    stucco::Rng rng(7);
    std::vector<stucco::Point2> queries(1024);
    for (auto& q : queries) q = {rng.uniform(-0.05, 0.05), rng.uniform(-0.05, 0.05)};
    const stucco::Pose2 pose{{0.01, -0.02}, 0.3};
    size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(stucco::penetration_cx(pose, queries[i++ & 1023], grid));
    }
}
BENCHMARK(BM_SdfLookup);

void BM_TrackerStepContact(benchmark::State& state) {
    const auto& grid = gripper_grid();
    stucco::TrackerParams params;
    params.n_particles = static_cast<int>(state.range(0));
    for (auto _ : state) {
        state.PauseTiming();
        stucco::Belief belief(params, &grid, 42);
        // Prime with a burst of contacts so the pairwise sums have work to do.
        for (int k = 0; k < 20; ++k) {
            stucco::ContactObservation obs;
            obs.p = {0.01 * k, 0.02};
            obs.x = {{0.01 * k, 0.0}, 0.0};
            obs.dx = {{0.005, 0.0}, 0.0};
            belief.step_contact({&obs, 1});
        }
        stucco::ContactObservation obs;
        obs.p = {0.1, 0.02};
        obs.x = {{0.1, 0.0}, 0.0};
        obs.dx = {{0.005, 0.0}, 0.0};
        state.ResumeTiming();
        belief.step_contact({&obs, 1});
    }
}
BENCHMARK(BM_TrackerStepContact)->Arg(100);

void BM_SimStep(benchmark::State& state) {
    const auto scenario = stucco::make_scenario("TC", 0);
    for (auto _ : state) {
        state.PauseTiming();
        stucco::Simulator sim(scenario.env, stucco::SimParams{}, 3);
        state.ResumeTiming();
        benchmark::DoNotOptimize(sim.step({0.0, -0.02}));
    }
}
BENCHMARK(BM_SimStep);

void BM_Icp(benchmark::State& state) {
    const auto model = stucco::make_model_points(stucco::Shape::box(0.12, 0.06), 0.005);
    stucco::Rng rng(5);
    std::vector<stucco::Point2> source;
    const stucco::Pose2 truth{{0.03, -0.02}, 0.4};
    for (int i = 0; i < 25; ++i)
        source.push_back(truth.apply(model.points[rng.below(model.points.size())]));
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            stucco::icp(source, model, {{0.02, -0.01}, 0.3}, 50));
    }
}
BENCHMARK(BM_Icp);

}  // namespace

BENCHMARK_MAIN();
