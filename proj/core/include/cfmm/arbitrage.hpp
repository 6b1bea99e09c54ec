// Optimal arbitrage against an infinitely liquid external market, plus a
// brute-force oracle used for verification.
#pragma once

#include "cfmm/interval.hpp"
#include "cfmm/pool.hpp"

namespace cfmm {

// External reference price, token Y per token X.
struct ExternalQuote {
    double p_cex = 0.0;
};

// BuyXOnDex: the arbitrageur pays token Y into the pool and takes token X
// out (fires when p_cex/p_dex is above the no-arbitrage band). BuyYOnDex is
// the mirror trade below the band.
enum class TradeDirection { BuyXOnDex, BuyYOnDex, NoTrade };

struct ArbTrade {
    TradeDirection direction = TradeDirection::NoTrade;
    double input_amount = 0.0;   // token Y for BuyXOnDex, token X for BuyYOnDex
    double output_amount = 0.0;  // token received from the pool, net of fees
    double profit = 0.0;         // token Y, valued at p_cex
};

// Ratio interval [g1*g2, 1/(g1*g2)]; ratios strictly inside admit no
// profitable trade. Ratios exactly on an edge are treated as NoTrade.
Interval no_arb_band(const FeeSchedule& fees);

// Arbitrageur profit for a hypothetical trade of `input_amount`, in token Y
// valued at the external price: received value minus paid value, with X legs
// converted at p_cex. input_amount == 0 returns 0.
double arb_profit(const PoolState& s, const ExternalQuote& q, TradeDirection direction,
                  double input_amount);

// Closed-form profit-maximizing trade. Above the band the input is token Y
// with size (y/g1)*((g1*g2*r)^wx - 1); below the band it is token X with size
// (x/g1)*((g1*g2/r)^wy - 1), where r = p_cex/p_dex. Equal weights reduce the
// exponents to square roots. The profit field equals arb_profit at that size.
ArbTrade optimal_arb_trade(const PoolState& s, const ExternalQuote& q);

// Verification oracle: coarse grid over input in [0, input-side reserve],
// refined by golden-section search, both directions. grid_points >= 100.
ArbTrade brute_force_optimal_trade(const PoolState& s, const ExternalQuote& q, int grid_points);

// Pool state after executing the trade (identity for NoTrade).
PoolState apply_trade(const PoolState& s, const ArbTrade& trade);

}  // namespace cfmm
