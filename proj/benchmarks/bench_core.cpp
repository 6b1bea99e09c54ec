#include <benchmark/benchmark.h>

#include "cfmm/arbitrage.hpp"
#include "cfmm/gbm_risk.hpp"
#include "cfmm/pool.hpp"
#include "cfmm/rng.hpp"
#include "cfmm/sim.hpp"
#include "cfmm/zones.hpp"

using namespace cfmm;

namespace {

PoolState reference_pool() { return uniswap_pool(997348, 3751882, FeeSchedule{0.003, 0.0}); }
const GbmParams kRefGbm{0.0, 0.0027, 1.0};

void BM_SwapXForY(benchmark::State& state) {
    const PoolState s = reference_pool();
    for (auto _ : state) benchmark::DoNotOptimize(swap_x_for_y(s, 1000.0));
}
BENCHMARK(BM_SwapXForY);

void BM_SwapWeighted(benchmark::State& state) {
    const PoolState s = balancer_pool(1e5, 4e5, 0.2, 0.8, FeeSchedule{0.003, 0.0});
    for (auto _ : state) benchmark::DoNotOptimize(swap_x_for_y(s, 100.0));
}
BENCHMARK(BM_SwapWeighted);

void BM_OptimalArbTrade(benchmark::State& state) {
    const PoolState s = reference_pool();
    const ExternalQuote q{1.005 * marginal_price(s)};
    for (auto _ : state) benchmark::DoNotOptimize(optimal_arb_trade(s, q));
}
BENCHMARK(BM_OptimalArbTrade);

void BM_BruteForceTrade(benchmark::State& state) {
    const PoolState s = reference_pool();
    const ExternalQuote q{1.005 * marginal_price(s)};
    for (auto _ : state) benchmark::DoNotOptimize(brute_force_optimal_trade(s, q, 200));
}
BENCHMARK(BM_BruteForceTrade);

void BM_IgZoneNumeric(benchmark::State& state) {
    const PoolState s = balancer_pool(1e5, 4e5, 0.2, 0.8, FeeSchedule{0.003, 0.0});
    for (auto _ : state) benchmark::DoNotOptimize(ig_zone_numeric(s));
}
BENCHMARK(BM_IgZoneNumeric);

void BM_PilOneBlock(benchmark::State& state) {
    const ZoneBoundaries b = ig_zone_uniswap(FeeSchedule{0.003, 0.0});
    for (auto _ : state) benchmark::DoNotOptimize(pil_one_block(kRefGbm, b, b.no_arb.upper));
}
BENCHMARK(BM_PilOneBlock);

void BM_NormalStreamDraw(benchmark::State& state) {
    NormalStream stream(42);
    for (auto _ : state) benchmark::DoNotOptimize(stream.normal());
}
BENCHMARK(BM_NormalStreamDraw);

void BM_Trajectory(benchmark::State& state) {
    SimConfig cfg{reference_pool(), kRefGbm, state.range(0), 1, 7};
    for (auto _ : state) benchmark::DoNotOptimize(run_trajectory(cfg, mix_seed(7, 0)));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Trajectory)->Arg(1000)->Arg(10000);

void BM_MinFeeAnalytic(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(min_fee_for_target(kRefGbm, 0.01, FeeSide::InputOnly));
}
BENCHMARK(BM_MinFeeAnalytic);

}  // namespace

BENCHMARK_MAIN();
