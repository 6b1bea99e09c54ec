#include "cfmm/zones.hpp"

#include <cmath>

namespace cfmm {

namespace {

constexpr double kLogTol = 1e-12;     // bisection tolerance on log ratio
constexpr double kSearchSpan = 10.0;  // search cap: band edge * e^10

double threshold_factor(const FeeSchedule& fees) {
    const double g1 = fees.gamma_in();
    const double g2 = fees.gamma_out();
    if (!(g2 > 0.5))
        throw std::domain_error("LP threshold requires an output fee below 50%");
    return (1.0 - g1 * g2) / (g1 * (2.0 * g2 - 1.0));
}

// Sign-change bisection for the LP-profit zero crossing, searching outward
// from the band edge. `direction` is +1 above the band, -1 below.
double crossing_ratio(const PoolState& s, double band_edge, int direction) {
    const double log_edge = std::log(band_edge);
    double a = log_edge;  // profit is 0 at the edge and positive just past it
    double b = log_edge + direction * kSearchSpan;
    if (lp_profit_after_realign(s, std::exp(b)) >= 0.0)
        throw ZoneSearchError(
            "LP profit does not turn negative within e^10 of the band edge; "
            "the pool gains for all reachable ratios at these fees");
    while (std::abs(b - a) > kLogTol) {
        const double mid = 0.5 * (a + b);
        if (lp_profit_after_realign(s, std::exp(mid)) >= 0.0)
            a = mid;
        else
            b = mid;
    }
    return std::exp(0.5 * (a + b));
}

}  // namespace

std::pair<double, double> lp_threshold_uniswap(const PoolState& s) {
    check_tradeable(s);
    if (!s.equal_weights())
        throw std::domain_error("closed-form LP threshold requires equal weights");
    const double f = threshold_factor(s.fees);
    return {s.reserve_x * f, s.reserve_y * f};
}

double lp_threshold_general(const PoolState& s) {
    const double total_fee = s.fees.phi_in + s.fees.phi_out;
    return 2.0 * total_fee * marginal_price(s) / std::abs(price_sensitivity(s));
}

double ig_tau_uniswap(const FeeSchedule& fees) {
    check_fees(fees);
    const double g1 = fees.gamma_in();
    const double g2 = fees.gamma_out();
    if (!(g2 > 0.5))
        throw std::domain_error("IG zone closed form requires an output fee below 50%");
    const double a = 2.0 - g1;
    const double b = 2.0 * g2 - 1.0;
    return g2 * a * a / (g1 * b * b);
}

ZoneBoundaries ig_zone_uniswap(const FeeSchedule& fees) {
    const double tau = ig_tau_uniswap(fees);
    ZoneBoundaries b;
    b.no_arb = no_arb_band(fees);
    b.ig_zone = {1.0 / tau, tau};
    b.tau = tau;
    const double f = threshold_factor(fees);  // per unit reserve
    b.lp_threshold_x = f;
    b.lp_threshold_y = f;
    return b;
}

ZoneBoundaries ig_zone_uniswap(const PoolState& s) {
    check_tradeable(s);
    if (!s.equal_weights())
        throw std::domain_error("closed-form IG zone requires equal weights");
    ZoneBoundaries b = ig_zone_uniswap(s.fees);
    b.lp_threshold_x *= s.reserve_x;
    b.lp_threshold_y *= s.reserve_y;
    return b;
}

ZoneBoundaries ig_zone_numeric(const PoolState& s) {
    check_tradeable(s);
    ZoneBoundaries b;
    b.no_arb = no_arb_band(s.fees);

    if (s.fees.gamma_product() >= 1.0) {
        // Zero fees: the crossing sits at the band edge itself.
        b.ig_zone = {1.0, 1.0};
        b.tau = 1.0;
        return b;
    }

    b.ig_zone.upper = crossing_ratio(s, b.no_arb.upper, +1);
    b.ig_zone.lower = crossing_ratio(s, b.no_arb.lower, -1);
    b.tau = b.ig_zone.upper;

    if (s.equal_weights()) {
        const auto [dx, dy] = lp_threshold_uniswap(s);
        b.lp_threshold_x = dx;
        b.lp_threshold_y = dy;
    } else {
        // No closed form for general weights; report the small-fee bound.
        const double total_fee = s.fees.phi_in + s.fees.phi_out;
        b.lp_threshold_x = 2.0 * total_fee * s.weight_y * s.reserve_x;
        b.lp_threshold_y = 2.0 * total_fee * s.weight_x * s.reserve_y;
    }
    return b;
}

ZoneLabel classify_ratio(const ZoneBoundaries& b, double ratio) {
    if (!std::isfinite(ratio) || ratio <= 0.0)
        throw std::invalid_argument("price ratio must be positive and finite");
    if (b.no_arb.contains(ratio)) return ZoneLabel::NoArbitrage;
    if (b.ig_zone.contains(ratio)) return ZoneLabel::ImpermanentGain;
    return ZoneLabel::ImpermanentLoss;
}

double lp_profit_after_realign(const PoolState& s, double ratio) {
    const ExternalQuote q{ratio * marginal_price(s)};
    const ArbTrade trade = optimal_arb_trade(s, q);
    if (trade.direction == TradeDirection::NoTrade) return 0.0;
    const PoolState after = apply_trade(s, trade);
    return lp_profit(s, after, marginal_price(after));
}

}  // namespace cfmm
