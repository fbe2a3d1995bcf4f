// Serial reference vs OpenMP kernels on random instances.

#include "rcmdp/operators.hpp"
#include "rcmdp/random.hpp"

#include <benchmark/benchmark.h>

using namespace rcmdp;

namespace {

const ObjectiveSpec kR3C = preset_objective(Preset::R3C);

struct Fixture {
    RCMDPInstance inst;
    Policy policy;
    ValuePair values;
};

Fixture make_fixture(std::size_t n_states) {
    Rng rng(42);
    auto inst = random_instance(rng, {n_states, 4, 3, 0.9, 0.8});
    auto policy = random_policy(rng, n_states, 4);
    ValuePair values{random_vector(rng, n_states, 1.0), random_vector(rng, n_states, 1.0)};
    return {std::move(inst), std::move(policy), std::move(values)};
}

void r3c_apply_bench(benchmark::State& state, Exec exec) {
    const auto f = make_fixture(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        auto out = r3c_apply(f.inst, f.policy, f.values, kR3C, exec);
        benchmark::DoNotOptimize(out);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void evaluation_bench(benchmark::State& state, Exec exec) {
    const auto f = make_fixture(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        auto out = policy_evaluation(f.inst, f.policy, kR3C, {1e-9, 100000, exec});
        benchmark::DoNotOptimize(out);
    }
}

}  // namespace

BENCHMARK_CAPTURE(r3c_apply_bench, serial, Exec::serial)->Arg(100)->Arg(500);
BENCHMARK_CAPTURE(r3c_apply_bench, parallel, Exec::parallel)->Arg(100)->Arg(500);
BENCHMARK_CAPTURE(evaluation_bench, serial, Exec::serial)->Arg(500)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(evaluation_bench, parallel, Exec::parallel)->Arg(500)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
