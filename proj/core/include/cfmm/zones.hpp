// LP gain thresholds and the three-zone decomposition of price-ratio space:
// no-arbitrage, impermanent gain, impermanent loss. Closed form for
// equal-weight pools, zero-crossing bisection for general weights.
#pragma once

#include <stdexcept>
#include <utility>

#include "cfmm/arbitrage.hpp"
#include "cfmm/interval.hpp"
#include "cfmm/pool.hpp"

namespace cfmm {

enum class ZoneLabel { NoArbitrage, ImpermanentGain, ImpermanentLoss };

struct ZoneBoundaries {
    Interval no_arb;           // [g1*g2, 1/(g1*g2)]
    Interval ig_zone;          // [1/tau, tau]; contains no_arb
    double tau = 1.0;          // upper IG boundary; 1 when fees are zero
    double lp_threshold_x = 0.0;  // largest X-side trade that still leaves the LP ahead
    double lp_threshold_y = 0.0;
};

// Thrown when the LP-profit zero crossing is not found below the search cap
// (band edge * e^10): the LP gains for all reachable ratios at these fees.
struct ZoneSearchError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Exact equal-weight thresholds {dx, dy} = reserve * (1-g1*g2)/(g1*(2*g2-1)).
// Requires gamma_out > 0.5; the derivation breaks down past that point.
std::pair<double, double> lp_threshold_uniswap(const PoolState& s);

// Small-fee approximation 2*(phi1+phi2)*p/|dp/dx|, any weights. Simplifies to
// (phi1+phi2)*x for equal weights.
double lp_threshold_general(const PoolState& s);

// tau = g2*(2-g1)^2 / (g1*(2*g2-1)^2).
double ig_tau_uniswap(const FeeSchedule& fees);

// Closed-form boundaries. The FeeSchedule overload reports thresholds per
// unit reserve (they scale linearly with the reserves).
ZoneBoundaries ig_zone_uniswap(const FeeSchedule& fees);
ZoneBoundaries ig_zone_uniswap(const PoolState& s);

// Boundaries for any valid weights: bisection on log-ratio for the zero of
// the post-trade LP profit, outward from each band edge, tolerance 1e-12.
// The crossing ratios depend only on fees and weights, not on reserve scale.
ZoneBoundaries ig_zone_numeric(const PoolState& s);

ZoneLabel classify_ratio(const ZoneBoundaries& b, double ratio);

// LP profit when the optimal arbitrage trade for `ratio` executes against
// `s`, valued at the post-trade pool marginal price. Zero inside the band.
double lp_profit_after_realign(const PoolState& s, double ratio);

}  // namespace cfmm
