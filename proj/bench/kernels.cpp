// Parallel kernels against their serial references on the fig2 instances.
// Arg(n) is the OpenMP thread count for the parallel variant.

#include <benchmark/benchmark.h>

#include "invctl/dp.hpp"
#include "invctl/evaluate.hpp"
#include "invctl/instances.hpp"
#include "invctl/policies.hpp"
#include "invctl/sim.hpp"

using namespace invctl;

namespace {

const Problem& sector() {
    static const Problem p = build("sector_sim");
    return p;
}

const Policy& pi_square() {
    static const Policy pi = make_pi_square(sector(), 2.0);
    return pi;
}

void BM_dp_parallel(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(solve_joint_dp(sector(), static_cast<int>(state.range(0))));
}

void BM_dp_reference(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(reference::solve_joint_dp(sector()));
}

void BM_evaluate_forward(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(evaluate_policy_exact(sector(), pi_square(), static_cast<int>(state.range(0))));
}

void BM_evaluate_backward(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(reference::evaluate_policy_backward(sector(), pi_square()));
}

SimConfig sim_config(int threads) {
    SimConfig cfg;
    cfg.runs = 2000;
    cfg.seed = 1;
    cfg.threads = threads;
    return cfg;
}

void BM_estimate_parallel(benchmark::State& state) {
    const auto cfg = sim_config(static_cast<int>(state.range(0)));
    const std::vector<double> x0{0.0, 0.0};
    for (auto _ : state)
        benchmark::DoNotOptimize(estimate_cost(sector(), pi_square(), x0, 0, cfg));
}

void BM_estimate_reference(benchmark::State& state) {
    const auto cfg = sim_config(1);
    const std::vector<double> x0{0.0, 0.0};
    for (auto _ : state)
        benchmark::DoNotOptimize(reference::estimate_cost(sector(), pi_square(), x0, 0, cfg));
}

} // namespace

BENCHMARK(BM_dp_parallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_dp_reference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_evaluate_forward)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_evaluate_backward)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_estimate_parallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_estimate_reference)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
