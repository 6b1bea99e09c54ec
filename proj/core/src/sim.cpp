#include "cfmm/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "cfmm/rng.hpp"

namespace cfmm {

namespace {

void check_config(const SimConfig& c) {
    check_tradeable(c.pool);
    check_gbm(c.gbm);
    if (c.n_blocks < 1) throw std::invalid_argument("n_blocks must be at least 1");
    if (c.n_trajectories < 1) throw std::invalid_argument("n_trajectories must be at least 1");
    if (!std::isfinite(c.start_ratio) || c.start_ratio <= 0.0)
        throw std::invalid_argument("start ratio must be positive and finite");
}

// Zone intervals depend only on fees and weights; compute them once per run.
ZoneBoundaries base_boundaries(const PoolState& pool) {
    return pool.equal_weights() ? ig_zone_uniswap(pool.fees) : ig_zone_numeric(pool);
}

// Reserve-dependent thresholds, refreshed each block.
void refresh_thresholds(ZoneBoundaries& b, const PoolState& pool) {
    if (pool.equal_weights() && pool.fees.gamma_out() > 0.5) {
        const auto [dx, dy] = lp_threshold_uniswap(pool);
        b.lp_threshold_x = dx;
        b.lp_threshold_y = dy;
    } else {
        const double total_fee = pool.fees.phi_in + pool.fees.phi_out;
        b.lp_threshold_x = 2.0 * total_fee * pool.weight_y * pool.reserve_x;
        b.lp_threshold_y = 2.0 * total_fee * pool.weight_x * pool.reserve_y;
    }
}

int resolve_threads(int n_threads) {
    if (n_threads > 0) return n_threads;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace

std::vector<double> gbm_path(const GbmParams& g, long n_blocks, std::uint64_t stream_seed,
                             double p0) {
    check_gbm(g);
    if (n_blocks < 0) throw std::invalid_argument("n_blocks must be nonnegative");
    if (!std::isfinite(p0) || p0 <= 0.0)
        throw std::invalid_argument("start price must be positive and finite");

    NormalStream stream(stream_seed);
    const double drift = (g.mu - 0.5 * g.sigma * g.sigma) * g.dt;
    const double vol = g.sigma * std::sqrt(g.dt);

    std::vector<double> prices(static_cast<std::size_t>(n_blocks) + 1);
    prices[0] = p0;
    for (long k = 0; k < n_blocks; ++k)
        prices[k + 1] = prices[k] * std::exp(drift + vol * stream.normal());
    return prices;
}

std::vector<BlockLedgerEntry> run_trajectory(const SimConfig& config, std::uint64_t stream_seed) {
    check_config(config);

    PoolState pool = config.pool;
    const PoolState initial = pool;
    ZoneBoundaries bounds = base_boundaries(pool);

    NormalStream stream(stream_seed);
    const double drift = (config.gbm.mu - 0.5 * config.gbm.sigma * config.gbm.sigma) * config.gbm.dt;
    const double vol = config.gbm.sigma * std::sqrt(config.gbm.dt);

    double p_cex = config.start_ratio * marginal_price(pool);
    double arb_cum = 0.0;

    std::vector<BlockLedgerEntry> ledger;
    ledger.reserve(static_cast<std::size_t>(config.n_blocks));

    for (long block = 1; block <= config.n_blocks; ++block) {
        p_cex *= std::exp(drift + vol * stream.normal());

        BlockLedgerEntry e;
        e.block_index = block;
        e.price_ratio = p_cex / marginal_price(pool);
        refresh_thresholds(bounds, pool);
        e.zone = classify_ratio(bounds, e.price_ratio);

        e.trade = optimal_arb_trade(pool, ExternalQuote{p_cex});
        if (e.trade.direction != TradeDirection::NoTrade) {
            const PoolState before = pool;
            pool = apply_trade(pool, e.trade);
            e.trade_lp_profit = lp_profit(before, pool, marginal_price(pool));
            arb_cum += e.trade.profit;
        }

        e.lp_profit_cum = lp_profit(initial, pool, p_cex);
        e.arb_profit_cum = arb_cum;
        e.total_profit_cum = e.lp_profit_cum + e.arb_profit_cum;
        ledger.push_back(e);
    }
    return ledger;
}

FirstIlReport first_il_distribution(const SimConfig& config, int n_threads) {
    check_config(config);

    const ZoneBoundaries bounds = base_boundaries(config.pool);
    const double drift = (config.gbm.mu - 0.5 * config.gbm.sigma * config.gbm.sigma) * config.gbm.dt;
    const double vol = config.gbm.sigma * std::sqrt(config.gbm.dt);

    FirstIlReport report;
    report.horizon = config.n_blocks;
    report.first_il_block.assign(static_cast<std::size_t>(config.n_trajectories), -1);

    // Trajectory i always consumes stream mix_seed(master_seed, i), so the
    // result is independent of how indices are spread over threads.
    std::atomic<long> next{0};
    auto worker = [&]() {
        for (;;) {
            const long i = next.fetch_add(1);
            if (i >= config.n_trajectories) return;

            PoolState pool = config.pool;
            NormalStream stream(mix_seed(config.master_seed, static_cast<std::uint64_t>(i)));
            double p_cex = config.start_ratio * marginal_price(pool);

            for (long block = 1; block <= config.n_blocks; ++block) {
                p_cex *= std::exp(drift + vol * stream.normal());
                const double ratio = p_cex / marginal_price(pool);
                if (classify_ratio(bounds, ratio) == ZoneLabel::ImpermanentLoss) {
                    report.first_il_block[static_cast<std::size_t>(i)] = block;
                    break;
                }
                const ArbTrade trade = optimal_arb_trade(pool, ExternalQuote{p_cex});
                if (trade.direction != TradeDirection::NoTrade) pool = apply_trade(pool, trade);
            }
        }
    };

    const int threads = resolve_threads(n_threads);
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> crew;
        crew.reserve(static_cast<std::size_t>(threads));
        for (int t = 0; t < threads; ++t) crew.emplace_back(worker);
        for (auto& th : crew) th.join();
    }

    // Empirical CDF and the censoring-aware per-block rate (exits / exposed blocks).
    std::vector<long> exits_at(static_cast<std::size_t>(config.n_blocks) + 1, 0);
    long exits = 0;
    double exposed_blocks = 0.0;
    for (const long first : report.first_il_block) {
        if (first > 0) {
            ++exits;
            ++exits_at[static_cast<std::size_t>(first)];
            exposed_blocks += static_cast<double>(first);
        } else {
            ++report.censored;
            exposed_blocks += static_cast<double>(config.n_blocks);
        }
    }
    report.estimated_p_il = exposed_blocks > 0.0 ? static_cast<double>(exits) / exposed_blocks : 0.0;

    report.empirical_cdf.resize(static_cast<std::size_t>(config.n_blocks));
    long cum = 0;
    for (long n = 1; n <= config.n_blocks; ++n) {
        cum += exits_at[static_cast<std::size_t>(n)];
        report.empirical_cdf[static_cast<std::size_t>(n - 1)] =
            static_cast<double>(cum) / static_cast<double>(config.n_trajectories);
    }
    return report;
}

long default_first_il_horizon(const GbmParams& g, const FeeSchedule& fees) {
    const double expected = expected_blocks_to_il(pil_upper_bound(g, fees));
    if (!std::isfinite(expected)) return 1000000;
    const double horizon = std::ceil(10.0 * expected);
    return static_cast<long>(std::min(horizon, 1e6));
}

PairedComparison compare_fee_vs_zero(const SimConfig& config, const FeeSchedule& fee_pool_fees,
                                     std::uint64_t stream_seed) {
    check_config(config);
    check_fees(fee_pool_fees);

    PoolState pools[2] = {config.pool, config.pool};
    pools[0].fees = fee_pool_fees;
    pools[1].fees = FeeSchedule{};
    const PoolState initial[2] = {pools[0], pools[1]};
    PoolRunSummary sums[2];

    NormalStream stream(stream_seed);
    const double drift = (config.gbm.mu - 0.5 * config.gbm.sigma * config.gbm.sigma) * config.gbm.dt;
    const double vol = config.gbm.sigma * std::sqrt(config.gbm.dt);
    double p_cex = config.start_ratio * marginal_price(config.pool);

    for (long block = 1; block <= config.n_blocks; ++block) {
        p_cex *= std::exp(drift + vol * stream.normal());
        for (int i = 0; i < 2; ++i) {
            const ArbTrade trade = optimal_arb_trade(pools[i], ExternalQuote{p_cex});
            if (trade.direction == TradeDirection::NoTrade) continue;
            pools[i] = apply_trade(pools[i], trade);
            ++sums[i].trade_count;
            sums[i].arb_profit += trade.profit;
        }
    }
    for (int i = 0; i < 2; ++i) {
        sums[i].lp_profit = lp_profit(initial[i], pools[i], p_cex);
        sums[i].total = sums[i].lp_profit + sums[i].arb_profit;
    }
    return {sums[0], sums[1]};
}

McEstimate estimate_pil_mc(const ZoneBoundaries& b, const GbmParams& g, double start_ratio,
                           long n_draws, std::uint64_t seed) {
    check_gbm(g);
    if (n_draws < 10000) throw std::invalid_argument("estimate_pil_mc needs at least 1e4 draws");
    if (!std::isfinite(start_ratio) || start_ratio <= 0.0)
        throw std::invalid_argument("start ratio must be positive and finite");

    NormalStream stream(seed);
    const double drift = (g.mu - 0.5 * g.sigma * g.sigma) * g.dt;
    const double vol = g.sigma * std::sqrt(g.dt);
    const double log_start = std::log(start_ratio);
    const double log_lower = std::log(b.ig_zone.lower);
    const double log_upper = std::log(b.ig_zone.upper);

    long exits = 0;
    for (long i = 0; i < n_draws; ++i) {
        const double next = log_start + drift + vol * stream.normal();
        if (!(next >= log_lower && next <= log_upper)) ++exits;
    }
    McEstimate est;
    est.p = static_cast<double>(exits) / static_cast<double>(n_draws);
    est.std_error = std::sqrt(est.p * (1.0 - est.p) / static_cast<double>(n_draws));
    return est;
}

double min_fee_for_target_mc(const GbmParams& g, double xi, FeeSide side,
                             const PoolState& reference_pool, long n_draws, std::uint64_t seed) {
    check_gbm(g);
    check_tradeable(reference_pool);
    if (!(xi > 0.0 && xi < 1.0)) throw std::domain_error("target probability must lie in (0, 1)");

    constexpr double kFeeCap = 0.49;
    constexpr double kTol = 1e-7;

    auto exit_freq = [&](double phi) {
        PoolState pool = reference_pool;
        pool.fees = fee_schedule_for_side(side, phi);
        const ZoneBoundaries b =
            pool.equal_weights() ? ig_zone_uniswap(pool.fees) : ig_zone_numeric(pool);
        if (!(b.ig_zone.upper > b.ig_zone.lower)) return 1.0;
        const double lo = estimate_pil_mc(b, g, b.no_arb.lower, n_draws, seed).p;
        const double hi = estimate_pil_mc(b, g, b.no_arb.upper, n_draws, seed).p;
        return std::max(lo, hi);
    };

    const double cap_freq = exit_freq(kFeeCap);
    if (cap_freq > xi)
        throw InfeasibleTarget("no fee up to 49% meets the target exit probability", cap_freq);

    double lo = 0.0;
    double hi = kFeeCap;
    for (int it = 0; it < 60 && hi - lo > kTol; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (exit_freq(mid) <= xi)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

}  // namespace cfmm
