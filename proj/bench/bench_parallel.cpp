// Serial reference vs OpenMP kernels. Arg 0 selects the policy.

#include <benchmark/benchmark.h>

#include "hadfix/verify.hpp"

using namespace hadfix;

namespace {

ExecPolicy policy_of(const benchmark::State& state) {
    return state.range(0) == 0 ? ExecPolicy::Serial : ExecPolicy::Parallel;
}

void label(benchmark::State& state) { state.SetLabel(state.range(0) == 0 ? "serial" : "parallel"); }

void BM_Cat0Hyperboloid(benchmark::State& state) {
    const Space h3 = Space::hyperboloid(3);
    for (auto _ : state) benchmark::DoNotOptimize(cat0_triangle_check(h3, 2000, 10, 1, policy_of(state)));
    label(state);
}

void BM_ProxOracleSpider(benchmark::State& state) {
    const Space s5 = Space::spider(5);
    for (auto _ : state)
        benchmark::DoNotOptimize(prox_oracle_check(s5, FormKind::SqDistanceToSet, 200, 2, policy_of(state)));
    label(state);
}

void BM_ProxOracleHyperboloid(benchmark::State& state) {
    const Space h2 = Space::hyperboloid(2);
    for (auto _ : state) benchmark::DoNotOptimize(prox_oracle_check(h2, FormKind::Distance, 200, 3, policy_of(state)));
    label(state);
}

void BM_PicardBatch(benchmark::State& state) {
    const Space h2 = Space::hyperboloid(2);
    const OperatorChain chain = reference_chains(h2).front();
    Rng rng(4);
    std::vector<Point> starts;
    for (int i = 0; i < 256; ++i) starts.push_back(random_point(h2, rng, 5.0));
    IterationConfig cfg;
    cfg.max_iter = 2000;
    for (auto _ : state) benchmark::DoNotOptimize(picard_batch(chain, starts, cfg, policy_of(state)));
    label(state);
}

}  // namespace

BENCHMARK(BM_Cat0Hyperboloid)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ProxOracleSpider)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ProxOracleHyperboloid)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_PicardBatch)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
