// Fee-aware constant-function pool mechanics: weighted invariant, marginal
// price, swap execution, and LP portfolio valuation.
//
// Prices are quoted as token Y per token X throughout; profits are
// denominated in token Y. All arithmetic is 64-bit floating point (idealized
// pools, no token-decimal rounding).
#pragma once

#include <stdexcept>

namespace cfmm {

// Fee rates on the input and output token of a swap. gamma = 1 - phi is the
// fraction that reaches the curve (input side) or the trader (output side).
struct FeeSchedule {
    double phi_in = 0.0;
    double phi_out = 0.0;

    double gamma_in() const { return 1.0 - phi_in; }
    double gamma_out() const { return 1.0 - phi_out; }
    double gamma_product() const { return gamma_in() * gamma_out(); }
};

// Weighted constant-product pool: x^wx * y^wy is preserved by the curve;
// swap fees stay in the reserves, so the constant grows over time.
// Uniswap V2 is the special case wx = wy = 0.5.
struct PoolState {
    double reserve_x = 0.0;
    double reserve_y = 0.0;
    double weight_x = 0.5;
    double weight_y = 0.5;
    FeeSchedule fees;

    bool equal_weights() const;
};

PoolState uniswap_pool(double x, double y, FeeSchedule fees = {});
PoolState balancer_pool(double x, double y, double wx, double wy, FeeSchedule fees = {});

// Throw std::domain_error if the schedule / state cannot accept trades.
// Weights outside [0.01, 0.99] are rejected to avoid exponent blow-up.
void check_fees(const FeeSchedule& f);
void check_tradeable(const PoolState& s);

// K = x^wx * y^wy; strictly positive, non-decreasing across fee-charging swaps.
double invariant_constant(const PoolState& s);

// Pool exchange rate in token Y per token X: (wx/wy) * (y/x).
double marginal_price(const PoolState& s);

// d(marginal price)/d(reserve_x) along the invariant curve: -p / (wy * x).
// Always negative for a tradeable pool.
double price_sensitivity(const PoolState& s);

struct SwapResult {
    double amount_in = 0.0;        // gross, paid by the trader
    double amount_out = 0.0;       // net, received by the trader
    double fee_retained_x = 0.0;   // stays in the pool
    double fee_retained_y = 0.0;
    PoolState new_state;
};

// Trade token X into the pool for token Y. The curve sees gamma_in * dx; the
// trader receives gamma_out * dy of the curve output. Both fee slices remain
// in the reserves, so the invariant constant grows whenever a fee is positive.
SwapResult swap_x_for_y(const PoolState& s, double amount_in);

// Mirror direction; the input fee applies to the Y side, the output fee to X.
SwapResult swap_y_for_x(const PoolState& s, double amount_in);

// Pool value minus hold value of the `before` reserves, both valued at
// `valuation_price` (token Y per token X). Positive = net impermanent gain.
double lp_profit(const PoolState& before, const PoolState& after, double valuation_price);

}  // namespace cfmm
