#include "cfmm/arbitrage.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace cfmm {

namespace {

void check_quote(const ExternalQuote& q) {
    if (!std::isfinite(q.p_cex) || q.p_cex <= 0.0)
        throw std::invalid_argument("external quote must be positive and finite");
}

// Golden-section maximization of a unimodal f on [a, c].
template <typename Real, typename F>
Real golden_section_max(F&& f, Real a, Real c, Real rel_tol) {
    constexpr Real invphi = static_cast<Real>(0.6180339887498948482L);
    Real x1 = c - invphi * (c - a);
    Real x2 = a + invphi * (c - a);
    Real f1 = f(x1);
    Real f2 = f(x2);
    for (int it = 0; it < 300; ++it) {
        const Real scale = std::max({static_cast<Real>(1e-300), std::abs(x1), std::abs(x2)});
        if (c - a <= rel_tol * scale) break;
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (c - a);
            f2 = f(x2);
        } else {
            c = x2;
            x2 = x1;
            f2 = f1;
            x1 = c - invphi * (c - a);
            f1 = f(x1);
        }
    }
    return f1 > f2 ? x1 : x2;
}

}  // namespace

Interval no_arb_band(const FeeSchedule& fees) {
    check_fees(fees);
    const double gg = fees.gamma_product();
    if (!(gg > 0.0)) throw std::domain_error("gamma product must be positive");
    return {gg, 1.0 / gg};
}

double arb_profit(const PoolState& s, const ExternalQuote& q, TradeDirection direction,
                  double input_amount) {
    check_quote(q);
    if (!std::isfinite(input_amount) || input_amount < 0.0)
        throw std::invalid_argument("arbitrage input must be nonnegative and finite");
    if (input_amount == 0.0) return 0.0;
    switch (direction) {
        case TradeDirection::BuyXOnDex: {
            const SwapResult r = swap_y_for_x(s, input_amount);
            return q.p_cex * r.amount_out - input_amount;
        }
        case TradeDirection::BuyYOnDex: {
            const SwapResult r = swap_x_for_y(s, input_amount);
            return r.amount_out - q.p_cex * input_amount;
        }
        case TradeDirection::NoTrade:
            throw std::invalid_argument("NoTrade direction admits only a zero input");
    }
    throw std::invalid_argument("unknown trade direction");
}

ArbTrade optimal_arb_trade(const PoolState& s, const ExternalQuote& q) {
    check_quote(q);
    const double ratio = q.p_cex / marginal_price(s);
    const Interval band = no_arb_band(s.fees);
    const double g1 = s.fees.gamma_in();
    const double gg = s.fees.gamma_product();

    ArbTrade t;
    if (ratio > band.upper) {
        // X is undervalued on the pool: pay Y in, take X out, sell X at p_cex.
        t.direction = TradeDirection::BuyXOnDex;
        t.input_amount = (s.reserve_y / g1) * std::expm1(s.weight_x * std::log(gg * ratio));
    } else if (ratio < band.lower) {
        t.direction = TradeDirection::BuyYOnDex;
        t.input_amount = (s.reserve_x / g1) * std::expm1(s.weight_y * std::log(gg / ratio));
    } else {
        return t;  // inside the band, edges included
    }

    if (!(t.input_amount > 0.0)) return ArbTrade{};  // ratio numerically on the edge

    const SwapResult r = (t.direction == TradeDirection::BuyXOnDex)
                             ? swap_y_for_x(s, t.input_amount)
                             : swap_x_for_y(s, t.input_amount);
    t.output_amount = r.amount_out;
    t.profit = (t.direction == TradeDirection::BuyXOnDex)
                   ? q.p_cex * r.amount_out - t.input_amount
                   : r.amount_out - q.p_cex * t.input_amount;
    return t;
}

ArbTrade brute_force_optimal_trade(const PoolState& s, const ExternalQuote& q, int grid_points) {
    check_quote(q);
    check_tradeable(s);
    if (grid_points < 100) throw std::invalid_argument("brute force needs grid_points >= 100");

    // The profit curve is evaluated in extended precision: golden-section can
    // only localize a maximum to about sqrt(ulp) of the bracket, and double
    // round-off alone would not resolve the optimum to the 1e-6 relative
    // agreement this oracle is meant to certify.
    const long double p_cex = q.p_cex;
    const long double g1 = s.fees.gamma_in();
    const long double g2 = s.fees.gamma_out();

    ArbTrade best;  // NoTrade, profit 0
    for (const TradeDirection dir : {TradeDirection::BuyXOnDex, TradeDirection::BuyYOnDex}) {
        const double reserve =
            (dir == TradeDirection::BuyXOnDex) ? s.reserve_y : s.reserve_x;
        const long double r_in = (dir == TradeDirection::BuyXOnDex) ? s.reserve_y : s.reserve_x;
        const long double r_out = (dir == TradeDirection::BuyXOnDex) ? s.reserve_x : s.reserve_y;
        const long double w_in = (dir == TradeDirection::BuyXOnDex) ? s.weight_y : s.weight_x;
        const long double w_out = (dir == TradeDirection::BuyXOnDex) ? s.weight_x : s.weight_y;
        auto profit_at = [&](long double in) -> long double {
            if (!(in > 0.0L)) return 0.0L;
            const long double u = g1 * in / (r_in + g1 * in);
            const long double out = -g2 * r_out * std::expm1((w_in / w_out) * std::log1p(-u));
            return (dir == TradeDirection::BuyXOnDex) ? p_cex * out - in : out - p_cex * in;
        };

        // Log-spaced coarse scan (the optimum can sit many decades below the
        // reserve near a band edge), then refine around the best grid node.
        const long double log_lo = std::log(reserve * 1e-12);
        const long double log_hi = std::log(reserve);
        int best_k = -1;
        long double best_f = 0.0L;
        std::vector<long double> nodes(static_cast<std::size_t>(grid_points));
        for (int k = 0; k < grid_points; ++k) {
            const long double t = static_cast<long double>(k) / (grid_points - 1);
            nodes[k] = std::exp(log_lo + t * (log_hi - log_lo));
            const long double f = profit_at(nodes[k]);
            if (f > best_f) {
                best_f = f;
                best_k = k;
            }
        }
        if (best_k < 0) continue;  // nothing profitable in this direction

        const long double lo = (best_k == 0) ? 0.0L : nodes[best_k - 1];
        const long double hi = (best_k == grid_points - 1) ? static_cast<long double>(reserve)
                                                           : nodes[best_k + 1];
        const double in_star = static_cast<double>(golden_section_max(profit_at, lo, hi, 1e-12L));
        const double f_star = in_star > 0.0 ? arb_profit(s, q, dir, in_star) : 0.0;
        if (f_star > best.profit) {
            best.direction = dir;
            best.input_amount = in_star;
            best.profit = f_star;
            const SwapResult r = (dir == TradeDirection::BuyXOnDex)
                                     ? swap_y_for_x(s, in_star)
                                     : swap_x_for_y(s, in_star);
            best.output_amount = r.amount_out;
        }
    }
    return best;
}

PoolState apply_trade(const PoolState& s, const ArbTrade& trade) {
    switch (trade.direction) {
        case TradeDirection::NoTrade:
            return s;
        case TradeDirection::BuyXOnDex:
            return swap_y_for_x(s, trade.input_amount).new_state;
        case TradeDirection::BuyYOnDex:
            return swap_x_for_y(s, trade.input_amount).new_state;
    }
    throw std::invalid_argument("unknown trade direction");
}

}  // namespace cfmm
