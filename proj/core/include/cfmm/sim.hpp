// Seeded Monte Carlo engine: GBM price paths, per-block arbitrage execution
// against a simulated pool, LP/arbitrageur accounting, first-IL-block
// distributions, and fee-pool vs zero-fee-pool comparisons.
#pragma once

#include <cstdint>
#include <vector>

#include "cfmm/arbitrage.hpp"
#include "cfmm/gbm_risk.hpp"
#include "cfmm/pool.hpp"
#include "cfmm/zones.hpp"

namespace cfmm {

struct SimConfig {
    PoolState pool;               // initial state
    GbmParams gbm;
    long n_blocks = 1;
    long n_trajectories = 1;
    std::uint64_t master_seed = 0;
    double start_ratio = 1.0;     // initial p_cex / p_dex
};

struct BlockLedgerEntry {
    long block_index = 0;         // 1-based
    double price_ratio = 1.0;     // pre-arbitrage p_cex / p_dex
    ZoneLabel zone = ZoneLabel::NoArbitrage;
    ArbTrade trade;
    double trade_lp_profit = 0.0; // this block's LP profit at the post-trade pool price
    double lp_profit_cum = 0.0;   // pool value minus hold value at current p_cex
    double arb_profit_cum = 0.0;
    double total_profit_cum = 0.0;
};

struct FirstIlReport {
    std::vector<long> first_il_block;  // per trajectory; -1 = censored
    long censored = 0;
    long horizon = 0;
    std::vector<double> empirical_cdf; // index n-1 holds P(first IL <= n)
    double estimated_p_il = 0.0;       // per-block IL frequency (censoring-aware MLE)
};

struct PoolRunSummary {
    long trade_count = 0;
    double arb_profit = 0.0;   // cumulative, token Y at each block's p_cex
    double lp_profit = 0.0;    // final pool value minus hold value at final p_cex
    double total = 0.0;
};

struct PairedComparison {
    PoolRunSummary fee_pool;
    PoolRunSummary zero_fee_pool;
};

struct McEstimate {
    double p = 0.0;
    double std_error = 0.0;
};

// Price path p_0..p_n with p_{k+1} = p_k * exp((mu - sigma^2/2)dt + sigma*sqrt(dt)*Z).
// Deterministic given stream_seed; sigma = 0 yields a constant-drift path.
std::vector<double> gbm_path(const GbmParams& g, long n_blocks, std::uint64_t stream_seed,
                             double p0 = 1.0);

// One trajectory: per block, advance p_cex, classify the pre-trade ratio,
// and execute the optimal arbitrage trade when it lies outside the band
// (mutating the pool through the swap operations). Zone intervals depend
// only on fees and weights; the reserve-dependent thresholds are refreshed
// from the current reserves every block.
std::vector<BlockLedgerEntry> run_trajectory(const SimConfig& config, std::uint64_t stream_seed);

// n_trajectories independent runs on streams mix_seed(master_seed, i),
// recording the first block whose pre-trade zone is ImpermanentLoss.
// n_threads <= 0 uses the hardware concurrency. Results do not depend on
// the thread count.
FirstIlReport first_il_distribution(const SimConfig& config, int n_threads = 0);

// Censoring horizon heuristic: 10x the expected blocks to IL at the
// worst-case rate, capped at 1e6.
long default_first_il_horizon(const GbmParams& g, const FeeSchedule& fees);

// Two pools (fee_pool_fees vs zero fees) driven by the identical price path.
PairedComparison compare_fee_vs_zero(const SimConfig& config, const FeeSchedule& fee_pool_fees,
                                     std::uint64_t stream_seed);

// One-step lognormal exit frequency from [ig.lower, ig.upper] with binomial
// standard error. Validation oracle for the analytic exit probability.
McEstimate estimate_pil_mc(const ZoneBoundaries& b, const GbmParams& g, double start_ratio,
                           long n_draws, std::uint64_t seed);

// Monte Carlo counterpart of min_fee_for_target: the zone comes from the
// closed form for equal-weight pools and from ig_zone_numeric otherwise, and
// the band-edge exit probability is estimated with n_draws lognormal samples
// (common random numbers across candidate fees). Throws InfeasibleTarget.
double min_fee_for_target_mc(const GbmParams& g, double xi, FeeSide side,
                             const PoolState& reference_pool, long n_draws, std::uint64_t seed);

}  // namespace cfmm
