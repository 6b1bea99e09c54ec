// cfmmrisk — command-line frontend for the CFMM profitability-zone and
// impermanent-loss risk toolkit.
//
// Subcommands: zones, profit-curve, pil, first-il, min-fee, simulate,
// estimate-vol. Every CSV starts with a manifest comment that reproduces the
// file byte-for-byte when re-run.
#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cfmm/arbitrage.hpp"
#include "cfmm/gbm_risk.hpp"
#include "cfmm/pool.hpp"
#include "cfmm/rng.hpp"
#include "cfmm/sim.hpp"
#include "cfmm/version.hpp"
#include "cfmm/zones.hpp"

using namespace cfmm;

namespace {

// ---------------------------- formatting helpers -----------------------------

std::string fmt(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string fmt(long v) { return std::to_string(v); }
std::string fmt(std::uint64_t v) { return std::to_string(v); }

// Resolved parameters of one invocation, echoed into the manifest line in a
// fixed order so reruns are byte-identical.
class Manifest {
public:
    explicit Manifest(std::string subcommand) : sub_(std::move(subcommand)) {}

    template <typename T>
    void add(const std::string& flag, const T& value) {
        parts_.push_back("--" + flag + " " + fmt(value));
    }
    void add_str(const std::string& flag, const std::string& value) {
        parts_.push_back("--" + flag + " " + value);
    }
    void add_flag(const std::string& flag) { parts_.push_back("--" + flag); }

    std::string line() const {
        std::string s = "# cfmmrisk " + sub_;
        for (const auto& p : parts_) s += " " + p;
        return s;
    }
    std::string version_line() const { return std::string("# version ") + kVersion; }

private:
    std::string sub_;
    std::vector<std::string> parts_;
};

// Output sink: file when --out is given, stdout otherwise.
class Sink {
public:
    explicit Sink(const std::string& path) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary);
            if (!file_) throw std::runtime_error("cannot open output file: " + path);
        }
    }
    std::ostream& os() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

// ------------------------------ shared options -------------------------------

struct PoolOptions {
    std::string kind = "uniswap";
    double gamma1 = 0.997;
    double gamma2 = 1.0;
    double fee1 = -1.0;  // aliases; phi = 1 - gamma when given
    double fee2 = -1.0;
    double x = 997348.0;
    double y = 3751882.0;
    double wx = 0.2;
    double wy = 0.8;

    FeeSchedule fees() const {
        const double phi1 = fee1 >= 0.0 ? fee1 : 1.0 - gamma1;
        const double phi2 = fee2 >= 0.0 ? fee2 : 1.0 - gamma2;
        return FeeSchedule{phi1, phi2};
    }
    bool balancer() const { return kind == "balancer"; }
    PoolState state() const {
        return balancer() ? balancer_pool(x, y, wx, wy, fees()) : uniswap_pool(x, y, fees());
    }
    void echo(Manifest& m) const {
        m.add_str("pool", kind);
        m.add("gamma1", 1.0 - fees().phi_in);
        m.add("gamma2", 1.0 - fees().phi_out);
        m.add("x", x);
        m.add("y", y);
        if (balancer()) {
            m.add("wx", wx);
            m.add("wy", wy);
        }
    }
};

struct GbmOptions {
    double sigma = 0.0027;
    double mu = 0.0;
    bool per_second = false;
    double block_seconds = 12.0;

    // normalize to per-block units; dt = 1 block internally
    GbmParams params() const {
        if (per_second)
            return GbmParams{mu * block_seconds, sigma * std::sqrt(block_seconds), 1.0};
        return GbmParams{mu, sigma, 1.0};
    }
    void echo(Manifest& m) const {
        m.add("sigma", sigma);
        m.add("mu", mu);
        if (per_second) {
            m.add_flag("per-second");
            m.add("block-seconds", block_seconds);
        }
    }
};

void attach_pool(CLI::App* cmd, PoolOptions& p) {
    cmd->add_option("--pool", p.kind, "Pool type: uniswap or balancer")
        ->check(CLI::IsMember({"uniswap", "balancer"}));
    cmd->add_option("--gamma1", p.gamma1, "Retained fraction after the input-side fee");
    cmd->add_option("--gamma2", p.gamma2, "Retained fraction after the output-side fee");
    cmd->add_option("--fee1", p.fee1, "Input fee rate (alias for 1-gamma1)");
    cmd->add_option("--fee2", p.fee2, "Output fee rate (alias for 1-gamma2)");
    cmd->add_option("--x", p.x, "Reserve of token X");
    cmd->add_option("--y", p.y, "Reserve of token Y");
    cmd->add_option("--wx", p.wx, "Weight of token X (balancer)");
    cmd->add_option("--wy", p.wy, "Weight of token Y (balancer)");
}

void attach_gbm(CLI::App* cmd, GbmOptions& g) {
    cmd->add_option("--sigma", g.sigma, "Volatility per sqrt(block), or per sqrt(second) with --per-second");
    cmd->add_option("--mu", g.mu, "Drift per block, or per second with --per-second");
    cmd->add_flag("--per-second", g.per_second, "Interpret sigma/mu per second");
    cmd->add_option("--block-seconds", g.block_seconds, "Seconds per block for --per-second");
}

std::vector<double> parse_grid(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stod(item));
    }
    if (out.empty()) throw CLI::ValidationError("--sigma-grid", "empty grid");
    return out;
}

// ------------------------------- subcommands ---------------------------------

int cmd_zones(const PoolOptions& pool) {
    const PoolState s = pool.state();
    const bool numeric = pool.balancer() && !s.equal_weights();

    Manifest m("zones");
    pool.echo(m);
    std::cout << m.line() << "\n" << m.version_line() << "\n";

    ZoneBoundaries b;
    try {
        b = numeric ? ig_zone_numeric(s) : ig_zone_uniswap(s);
    } catch (const ZoneSearchError& e) {
        // distinguished outcome, not a failure: the zone is unbounded
        std::cout << "no-arb band:   [" << fmt(no_arb_band(s.fees).lower) << ", "
                  << fmt(no_arb_band(s.fees).upper) << "]\n";
        std::cout << "ig zone:       unbounded (" << e.what() << ")\n";
        return 0;
    }

    std::cout << "method:        " << (numeric ? "numeric" : "closed-form") << "\n";
    std::cout << "no-arb band:   [" << fmt(b.no_arb.lower) << ", " << fmt(b.no_arb.upper) << "]\n";
    std::cout << "ig zone:       [" << fmt(b.ig_zone.lower) << ", " << fmt(b.ig_zone.upper)
              << "]\n";
    std::cout << "tau:           " << fmt(b.tau) << "\n";
    std::cout << "lp threshold:  dx = " << fmt(b.lp_threshold_x) << ", dy = "
              << fmt(b.lp_threshold_y) << (s.equal_weights() ? "" : "  (small-fee approximation)")
              << "\n";
    return 0;
}

int cmd_profit_curve(const PoolOptions& pool, double lo, double hi, long steps,
                     const std::string& out) {
    if (!(lo < 1.0 && 1.0 < hi)) throw std::domain_error("ratio range must straddle 1");
    if (steps < 2) throw std::domain_error("need at least 2 steps");
    const PoolState s = pool.state();

    Manifest m("profit-curve");
    pool.echo(m);
    m.add("ratio-min", lo);
    m.add("ratio-max", hi);
    m.add("steps", steps);
    m.add_str("out", out.empty() ? "-" : out);

    Sink sink(out);
    sink.os() << m.line() << "\n" << m.version_line() << "\n";
    sink.os() << "price,lp_profit,arb_profit\n";
    for (long i = 0; i < steps; ++i) {
        const double r = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps - 1);
        const ArbTrade t = optimal_arb_trade(s, ExternalQuote{r * marginal_price(s)});
        const double lp = lp_profit_after_realign(s, r);
        sink.os() << fmt(r) << "," << fmt(lp) << "," << fmt(t.profit) << "\n";
    }
    return 0;
}

int cmd_pil(const PoolOptions& pool, const GbmOptions& gbm, double start, long verify_draws,
            std::uint64_t seed) {
    const FeeSchedule fees = pool.fees();
    const GbmParams g = gbm.params();
    const ZoneBoundaries b = ig_zone_uniswap(fees);
    const double start_ratio = start > 0.0 ? start : b.no_arb.upper;

    Manifest m("pil");
    pool.echo(m);
    gbm.echo(m);
    m.add("start", start_ratio);
    if (verify_draws > 0) {
        m.add("verify", verify_draws);
        m.add("seed", seed);
    }
    std::cout << m.line() << "\n" << m.version_line() << "\n";

    const double p_start = pil_one_block(g, b, start_ratio);
    const double p_up = pil_upper_bound(g, fees);
    std::cout << "exit probability (start " << fmt(start_ratio) << "): " << fmt(p_start) << "\n";
    std::cout << "worst-case bound:                  " << fmt(p_up) << "\n";
    std::cout << "expected blocks to IL (bound):     " << fmt(expected_blocks_to_il(p_up)) << "\n";
    std::cout << "expected blocks to IL (start):     " << fmt(expected_blocks_to_il(p_start))
              << "\n";
    if (verify_draws > 0) {
        const McEstimate mc = estimate_pil_mc(b, g, start_ratio, verify_draws, seed);
        std::cout << "monte carlo (" << verify_draws << " draws, seed " << seed
                  << "): " << fmt(mc.p) << " +- " << fmt(mc.std_error) << "\n";
    }
    return 0;
}

int cmd_first_il(const PoolOptions& pool, const GbmOptions& gbm, long trajectories, long blocks,
                 std::uint64_t seed, int threads, const std::string& out) {
    SimConfig cfg;
    cfg.pool = pool.state();
    cfg.gbm = gbm.params();
    cfg.n_trajectories = trajectories;
    cfg.n_blocks = blocks > 0 ? blocks : default_first_il_horizon(cfg.gbm, cfg.pool.fees);
    cfg.master_seed = seed;

    Manifest m("first-il");
    pool.echo(m);
    gbm.echo(m);
    m.add("trajectories", trajectories);
    m.add("blocks", cfg.n_blocks);
    m.add("seed", seed);
    m.add_str("out", out.empty() ? "-" : out);

    const FirstIlReport rep = first_il_distribution(cfg, threads);
    const double p_up = pil_upper_bound(cfg.gbm, cfg.pool.fees);

    Sink sink(out);
    sink.os() << m.line() << "\n" << m.version_line() << "\n";
    sink.os() << "# estimated_p_il " << fmt(rep.estimated_p_il) << " censored " << rep.censored
              << "\n";
    sink.os() << "x,theory,exp_prob,sim\n";
    for (long n = 1; n <= cfg.n_blocks; ++n) {
        sink.os() << n << "," << fmt(geometric_cdf(p_up, n)) << ","
                  << fmt(geometric_cdf(rep.estimated_p_il, n)) << ","
                  << fmt(rep.empirical_cdf[static_cast<std::size_t>(n - 1)]) << "\n";
    }
    return 0;
}

int cmd_min_fee(const PoolOptions& pool, const GbmOptions& gbm, double xi,
                const std::string& sigma_grid, const std::string& side_name, long draws,
                std::uint64_t seed, const std::string& out) {
    const std::vector<double> grid = parse_grid(sigma_grid);
    FeeSide side = FeeSide::InputOnly;
    if (side_name == "output") side = FeeSide::OutputOnly;
    if (side_name == "symmetric") side = FeeSide::Symmetric;

    Manifest m("min-fee");
    gbm.echo(m);
    m.add("xi", xi);
    m.add_str("sigma-grid", sigma_grid);
    m.add_str("side", side_name);
    m.add("draws", draws);
    m.add("seed", seed);
    m.add_str("out", out.empty() ? "-" : out);
    m.add("wx", pool.wx);
    m.add("wy", pool.wy);

    const PoolState uni = uniswap_pool(pool.x, pool.y);
    const PoolState bal = balancer_pool(pool.x, pool.y, pool.wx, pool.wy);

    Sink sink(out);
    sink.os() << m.line() << "\n" << m.version_line() << "\n";
    sink.os() << "std,fees_uniswap,fees_balancer,fees_th\n";
    for (double sigma : grid) {
        GbmOptions point = gbm;
        point.sigma = sigma;
        const GbmParams g = point.params();
        auto solve = [&](auto&& fn) -> std::string {
            try {
                return fmt(fn());
            } catch (const InfeasibleTarget& e) {
                return "infeasible(" + fmt(e.achieved) + ")";
            }
        };
        const std::string f_uni =
            solve([&] { return min_fee_for_target_mc(g, xi, side, uni, draws, seed); });
        const std::string f_bal =
            solve([&] { return min_fee_for_target_mc(g, xi, side, bal, draws, seed); });
        const std::string f_th = solve([&] { return min_fee_for_target(g, xi, side); });
        sink.os() << fmt(sigma) << "," << f_uni << "," << f_bal << "," << f_th << "\n";
    }
    return 0;
}

int cmd_simulate(const PoolOptions& pool, const GbmOptions& gbm, long blocks, std::uint64_t seed,
                 bool compare_zero, const std::string& out) {
    if (out.empty()) throw std::runtime_error("simulate requires --out");

    SimConfig cfg;
    cfg.pool = pool.state();
    cfg.gbm = gbm.params();
    cfg.n_blocks = blocks;
    cfg.master_seed = seed;

    Manifest m("simulate");
    pool.echo(m);
    gbm.echo(m);
    m.add("blocks", blocks);
    m.add("seed", seed);
    if (compare_zero) m.add_flag("compare-zero-fee");
    m.add_str("out", out);

    const std::string stem =
        out.size() > 4 && out.substr(out.size() - 4) == ".csv" ? out.substr(0, out.size() - 4) : out;

    auto write_ledger = [&](const std::string& path, const std::vector<BlockLedgerEntry>& ledger) {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open output file: " + path);
        f << m.line() << "\n" << m.version_line() << "\n";
        f << "block_no,total_profit,IL,arb_profit\n";
        for (const auto& e : ledger)
            f << e.block_index << "," << fmt(e.total_profit_cum) << "," << fmt(e.lp_profit_cum)
              << "," << fmt(e.arb_profit_cum) << "\n";
    };

    const auto ledger = run_trajectory(cfg, mix_seed(cfg.master_seed, 0));
    write_ledger(out, ledger);

    if (compare_zero) {
        SimConfig zero = cfg;
        zero.pool.fees = FeeSchedule{};
        const auto twin = run_trajectory(zero, mix_seed(cfg.master_seed, 0));
        write_ledger(stem + "_zero.csv", twin);
    }

    // zone histogram (low/high split around the band)
    long il_low = 0, ig_low = 0, no_arb = 0, ig_high = 0, il_high = 0;
    for (const auto& e : ledger) {
        const bool high = e.price_ratio > 1.0;
        switch (e.zone) {
            case ZoneLabel::NoArbitrage: ++no_arb; break;
            case ZoneLabel::ImpermanentGain: (high ? ig_high : ig_low)++; break;
            case ZoneLabel::ImpermanentLoss: (high ? il_high : il_low)++; break;
        }
    }
    std::ofstream hist(stem + "_zones.csv", std::ios::binary);
    if (!hist) throw std::runtime_error("cannot open output file: " + stem + "_zones.csv");
    hist << m.line() << "\n" << m.version_line() << "\n";
    hist << "bucket,count\n";
    hist << "il_low," << il_low << "\n";
    hist << "ig_low," << ig_low << "\n";
    hist << "no_arb," << no_arb << "\n";
    hist << "ig_high," << ig_high << "\n";
    hist << "il_high," << il_high << "\n";
    return 0;
}

int cmd_estimate_vol(const std::string& path, double block_seconds) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open price file: " + path);

    std::string line;
    long line_no = 0;
    std::vector<double> ts, px;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        if (ts.empty() && px.empty() && line.rfind("timestamp", 0) == 0) continue;  // header
        std::stringstream ss(line);
        std::string a, b;
        if (!std::getline(ss, a, ',') || !std::getline(ss, b, ','))
            throw std::runtime_error("malformed row " + std::to_string(line_no) + ": " + line);
        double t, p;
        try {
            t = std::stod(a);
            p = std::stod(b);
        } catch (...) {
            throw std::runtime_error("malformed row " + std::to_string(line_no) + ": " + line);
        }
        if (!(p > 0.0))
            throw std::runtime_error("non-positive price at row " + std::to_string(line_no));
        if (!ts.empty() && !(t > ts.back()))
            throw std::runtime_error("timestamp not strictly increasing at row " +
                                     std::to_string(line_no));
        ts.push_back(t);
        px.push_back(p);
    }
    if (ts.size() < 30)
        throw std::runtime_error("need at least 30 rows, got " + std::to_string(ts.size()));

    // median sample spacing, then rescale log returns to the block interval
    std::vector<double> gaps;
    gaps.reserve(ts.size() - 1);
    for (std::size_t i = 1; i < ts.size(); ++i) gaps.push_back(ts[i] - ts[i - 1]);
    std::nth_element(gaps.begin(), gaps.begin() + gaps.size() / 2, gaps.end());
    const double dt_sample = gaps[gaps.size() / 2];

    double sum = 0.0, sumsq = 0.0;
    const std::size_t n = ts.size() - 1;
    for (std::size_t i = 1; i < ts.size(); ++i) {
        const double r = std::log(px[i] / px[i - 1]);
        sum += r;
        sumsq += r * r;
    }
    const double mean = sum / static_cast<double>(n);
    const double var = sumsq / static_cast<double>(n) - mean * mean;
    const double scale = block_seconds / dt_sample;
    const double sigma_block = std::sqrt(std::max(var, 0.0) * scale);
    const double mu_block = mean * scale;

    Manifest m("estimate-vol");
    m.add_str("prices", path);
    m.add("block-seconds", block_seconds);
    std::cout << m.line() << "\n" << m.version_line() << "\n";
    std::cout << "samples:          " << ts.size() << "\n";
    std::cout << "sample spacing:   " << fmt(dt_sample) << " s (median)\n";
    std::cout << "sigma per block:  " << fmt(sigma_block) << "\n";
    std::cout << "mu per block:     " << fmt(mu_block) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Profitability zones and impermanent-loss risk for constant-function market makers"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "Read defaults from a key=value file");
    app.set_version_flag("--version", std::string("cfmmrisk ") + kVersion);

    std::string out;
    std::uint64_t seed = 42;
    app.add_option("--out", out, "Output file (stdout when omitted)")->capture_default_str();
    app.add_option("--seed", seed, "Master seed")->capture_default_str();

    PoolOptions pool;
    GbmOptions gbm;

    auto* zones = app.add_subcommand("zones", "No-arbitrage band, IG zone, LP thresholds");
    attach_pool(zones, pool);

    auto* curve = app.add_subcommand("profit-curve", "LP and arbitrageur profit over a ratio grid");
    attach_pool(curve, pool);
    double ratio_min = 0.99, ratio_max = 1.01;
    long steps = 401;
    curve->add_option("--ratio-min", ratio_min, "Grid start")->capture_default_str();
    curve->add_option("--ratio-max", ratio_max, "Grid end")->capture_default_str();
    curve->add_option("--steps", steps, "Grid points")->capture_default_str();

    auto* pil = app.add_subcommand("pil", "One-block IL probability and worst-case bound");
    attach_pool(pil, pool);
    attach_gbm(pil, gbm);
    double start = -1.0;
    long verify = 0;
    pil->add_option("--start", start, "Start ratio (default: upper band edge)");
    pil->add_option("--verify", verify, "Cross-check with this many Monte Carlo draws");

    auto* fil = app.add_subcommand("first-il", "CDF of the first impermanent-loss block");
    attach_pool(fil, pool);
    attach_gbm(fil, gbm);
    long trajectories = 10000, blocks = 0;
    int threads = 0;
    fil->add_option("--trajectories", trajectories, "Trajectory count")->capture_default_str();
    fil->add_option("--blocks", blocks, "Censoring horizon (default: 10x expected blocks)");
    fil->add_option("--threads", threads, "Worker threads (default: hardware)");

    auto* mf = app.add_subcommand("min-fee", "Minimum fee meeting a target IL probability");
    attach_pool(mf, pool);
    attach_gbm(mf, gbm);
    double xi = 0.01;
    std::string sigma_grid = "0.0005,0.001,0.002,0.004,0.008";
    std::string side = "input";
    long draws = 100000;
    mf->add_option("--xi", xi, "Target one-block IL probability")->capture_default_str();
    mf->add_option("--sigma-grid", sigma_grid, "Comma-separated volatility grid")
        ->capture_default_str();
    mf->add_option("--side", side, "Fee side: input, output or symmetric")
        ->check(CLI::IsMember({"input", "output", "symmetric"}))
        ->capture_default_str();
    mf->add_option("--draws", draws, "Monte Carlo draws per bisection step")
        ->capture_default_str();

    auto* sim = app.add_subcommand("simulate", "Per-block ledger and zone histogram");
    attach_pool(sim, pool);
    attach_gbm(sim, gbm);
    long sim_blocks = 10000;
    bool compare_zero = false;
    sim->add_option("--blocks", sim_blocks, "Blocks to simulate")->capture_default_str();
    sim->add_flag("--compare-zero-fee", compare_zero, "Run a zero-fee twin on the same path");

    auto* ev = app.add_subcommand("estimate-vol", "GBM parameters from a timestamp,price CSV");
    std::string prices;
    double block_seconds = 12.0;
    ev->add_option("--prices", prices, "CSV with header timestamp,price")->required();
    ev->add_option("--block-seconds", block_seconds, "Block interval in seconds")
        ->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*zones) return cmd_zones(pool);
        if (*curve) return cmd_profit_curve(pool, ratio_min, ratio_max, steps, out);
        if (*pil) return cmd_pil(pool, gbm, start, verify, seed);
        if (*fil) return cmd_first_il(pool, gbm, trajectories, blocks, seed, threads, out);
        if (*mf) return cmd_min_fee(pool, gbm, xi, sigma_grid, side, draws, seed, out);
        if (*sim) return cmd_simulate(pool, gbm, sim_blocks, seed, compare_zero, out);
        if (*ev) return cmd_estimate_vol(prices, block_seconds);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
