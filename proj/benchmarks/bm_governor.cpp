#include <vector>

#include <benchmark/benchmark.h>

#include "refgov/backend.hpp"
#include "refgov/governor.hpp"
#include "refgov/harness.hpp"

namespace {

using namespace refgov;

const DisturbanceModel& surrogate_disturbance() {
    static const DisturbanceModel model({{-0.002, 0.002}, {-0.002, 0.002}, {-0.002, 0.002}});
    return model;
}

void BM_SurrogateRk4Step(benchmark::State& state) {
    const SurrogateFuelCellPlant plant;
    StateVec x{0.1, 0.2, 0.05};
    StateVec next(3);
    for (auto _ : state) {
        plant.step_into(x, 1.0, next);
        std::swap(x, next);
        benchmark::DoNotOptimize(x.data());
    }
}
BENCHMARK(BM_SurrogateRk4Step);

void BM_SampleScenarios(benchmark::State& state) {
    const auto n_sim = static_cast<std::size_t>(state.range(0));
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(sample_scenarios(surrogate_disturbance(), n_sim, 257, ++seed));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n_sim * 257 * 3));
}
BENCHMARK(BM_SampleScenarios)->RangeMultiplier(4)->Range(16, 1024)->Unit(benchmark::kMicrosecond);

// One governor call from rest towards r = 2.5, the transient where most rows
// need the full horizon.
template <class Backend>
void BM_GovernorCall(benchmark::State& state) {
    const auto n_sim = static_cast<std::size_t>(state.range(0));
    const SurrogateFuelCellPlant plant;
    const StateVec x{0.0, 0.0, 0.0};
    const auto set = ConstraintSet::at_most(0.9, 0.0);
    GovernorConfig config;
    config.n_sim = n_sim;
    const auto scenarios = sample_scenarios(surrogate_disturbance(), n_sim, config.j_star + 1, 42);
    const Backend backend;
    for (auto _ : state) {
        GovernorState governor_state{0.0};
        benchmark::DoNotOptimize(robust_rg_parallel(plant, x, governor_state, 2.5, set, scenarios, config, backend));
    }
    state.counters["cells"] = benchmark::Counter(static_cast<double>(n_sim * config.m_grid),
                                                benchmark::Counter::kIsIterationInvariantRate);
}
BENCHMARK_TEMPLATE(BM_GovernorCall, SerialBackend)->RangeMultiplier(4)->Range(1, 1024)->Unit(benchmark::kMillisecond);
BENCHMARK_TEMPLATE(BM_GovernorCall, MulticoreBackend)->RangeMultiplier(4)->Range(1, 1024)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
