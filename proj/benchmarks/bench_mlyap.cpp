#include <benchmark/benchmark.h>

#include "mlyap/exponents.hpp"
#include "mlyap/lemmas.hpp"
#include "mlyap/scheme.hpp"
#include "mlyap/stochastics.hpp"

using namespace mlyap;

static void BM_Philox(benchmark::State& state)
{
    PhiloxCounter ctr{0, 0, 0, 0};
    for (auto _ : state) {
        ctr = philox4x32(ctr, {42, 0});
        benchmark::DoNotOptimize(ctr);
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Philox);

static void BM_StandardNormal(benchmark::State& state)
{
    RngStream s(42, 0);
    for (auto _ : state)
        benchmark::DoNotOptimize(standard_normal(s));
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_StandardNormal);

static void BM_SimulatePath(benchmark::State& state)
{
    SchemeConfig cfg;
    cfg.n_steps = static_cast<std::size_t>(state.range(0));
    std::uint64_t i = 0;
    for (auto _ : state) {
        RngStream s(42, i++);
        benchmark::DoNotOptimize(simulate_path({8, 2, 4}, cfg, s));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulatePath)->Arg(1'000)->Arg(10'000);

static void BM_SimulatePaths(benchmark::State& state)
{
    SchemeConfig cfg;
    cfg.seed = 42;
    for (auto _ : state)
        benchmark::DoNotOptimize(simulate_paths({8, 2, 4}, cfg, 50, static_cast<unsigned>(state.range(0))));
    state.SetItemsProcessed(state.iterations() * 50 * 10'000);
}
BENCHMARK(BM_SimulatePaths)->Arg(1)->Arg(4)->UseRealTime();

// The rule cache is keyed by size, so only the first call per size builds it.
static void BM_GaussHermiteFirstBuild(benchmark::State& state)
{
    int n = 600;
    for (auto _ : state) {
        if (n > kMaxHermiteNodes) {
            state.SkipWithError("ran out of uncached sizes");
            break;
        }
        benchmark::DoNotOptimize(gauss_hermite_rule(n++));
    }
}
BENCHMARK(BM_GaussHermiteFirstBuild)->Iterations(50);

static void BM_AsQuadrature(benchmark::State& state)
{
    const int nodes = static_cast<int>(state.range(0));
    (void)as_exponent_quadrature({8, 2, 4}, 1e-3, nodes);
    for (auto _ : state)
        benchmark::DoNotOptimize(as_exponent_quadrature({8, 2, 4}, 1e-3, nodes));
}
BENCHMARK(BM_AsQuadrature)->Arg(101)->Arg(201);

static void BM_AsMonteCarlo(benchmark::State& state)
{
    for (auto _ : state)
        benchmark::DoNotOptimize(as_exponent_mc({8, 2, 4}, 1e-3, 1'000'000, 7, static_cast<unsigned>(state.range(0))));
    state.SetItemsProcessed(state.iterations() * 1'000'000);
}
BENCHMARK(BM_AsMonteCarlo)->Arg(1)->Arg(4)->UseRealTime();

static void BM_XiExpectation(benchmark::State& state)
{
    for (auto _ : state)
        benchmark::DoNotOptimize(xi_expectation({8, 2, 4}, 1e-3));
}
BENCHMARK(BM_XiExpectation);

static void BM_SandwichCheck(benchmark::State& state)
{
    const LogBoundDomain d{1.0, LogBoundKind::Lower};
    const auto xs = sandwich_grid(d, {});
    for (auto _ : state)
        benchmark::DoNotOptimize(check_log_bound(d, xs, -1e-12, 1));
    state.SetItemsProcessed(state.iterations() * static_cast<long>(xs.size()));
}
BENCHMARK(BM_SandwichCheck);
BENCHMARK_MAIN();
