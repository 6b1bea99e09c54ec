#include "cfmm/pool.hpp"

#include <cmath>

namespace cfmm {

namespace {

constexpr double kWeightMin = 0.01;
constexpr double kWeightMax = 0.99;
constexpr double kWeightTol = 1e-12;

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

// Curve output when `effective_in` reaches the input side:
// out = R_out * (1 - (R_in / (R_in + eff))^{w_in/w_out}).
// log1p/expm1 keep full relative precision for infinitesimal trades.
double curve_output(double reserve_in, double reserve_out, double w_in, double w_out,
                    double effective_in) {
    const double u = effective_in / (reserve_in + effective_in);
    if (std::abs(w_in - w_out) <= kWeightTol) return reserve_out * u;
    return -reserve_out * std::expm1((w_in / w_out) * std::log1p(-u));
}

}  // namespace

bool PoolState::equal_weights() const {
    return std::abs(weight_x - 0.5) <= kWeightTol && std::abs(weight_y - 0.5) <= kWeightTol;
}

void check_fees(const FeeSchedule& f) {
    if (!(f.phi_in >= 0.0 && f.phi_in < 1.0) || !(f.phi_out >= 0.0 && f.phi_out < 1.0))
        throw std::domain_error("fee rates must lie in [0, 1)");
}

void check_tradeable(const PoolState& s) {
    if (!finite_positive(s.reserve_x) || !finite_positive(s.reserve_y))
        throw std::domain_error("pool reserves must be positive");
    if (!(s.weight_x >= kWeightMin && s.weight_x <= kWeightMax) ||
        !(s.weight_y >= kWeightMin && s.weight_y <= kWeightMax))
        throw std::domain_error("pool weights must lie in [0.01, 0.99]");
    if (std::abs(s.weight_x + s.weight_y - 1.0) > kWeightTol)
        throw std::domain_error("pool weights must sum to 1");
    check_fees(s.fees);
}

PoolState uniswap_pool(double x, double y, FeeSchedule fees) {
    PoolState s{x, y, 0.5, 0.5, fees};
    check_tradeable(s);
    return s;
}

PoolState balancer_pool(double x, double y, double wx, double wy, FeeSchedule fees) {
    PoolState s{x, y, wx, wy, fees};
    check_tradeable(s);
    return s;
}

double invariant_constant(const PoolState& s) {
    check_tradeable(s);
    return std::pow(s.reserve_x, s.weight_x) * std::pow(s.reserve_y, s.weight_y);
}

double marginal_price(const PoolState& s) {
    check_tradeable(s);
    return (s.weight_x / s.weight_y) * (s.reserve_y / s.reserve_x);
}

double price_sensitivity(const PoolState& s) {
    return -marginal_price(s) / (s.weight_y * s.reserve_x);
}

SwapResult swap_x_for_y(const PoolState& s, double amount_in) {
    check_tradeable(s);
    if (!std::isfinite(amount_in) || amount_in <= 0.0)
        throw std::invalid_argument("swap amount must be positive and finite");

    const double g1 = s.fees.gamma_in();
    const double g2 = s.fees.gamma_out();
    const double dy = curve_output(s.reserve_x, s.reserve_y, s.weight_x, s.weight_y,
                                   g1 * amount_in);

    SwapResult r;
    r.amount_in = amount_in;
    r.amount_out = g2 * dy;
    r.fee_retained_x = (1.0 - g1) * amount_in;
    r.fee_retained_y = (1.0 - g2) * dy;
    r.new_state = s;
    r.new_state.reserve_x = s.reserve_x + amount_in;
    r.new_state.reserve_y = s.reserve_y - r.amount_out;
    return r;
}

SwapResult swap_y_for_x(const PoolState& s, double amount_in) {
    check_tradeable(s);
    if (!std::isfinite(amount_in) || amount_in <= 0.0)
        throw std::invalid_argument("swap amount must be positive and finite");

    const double g1 = s.fees.gamma_in();
    const double g2 = s.fees.gamma_out();
    const double dx = curve_output(s.reserve_y, s.reserve_x, s.weight_y, s.weight_x,
                                   g1 * amount_in);

    SwapResult r;
    r.amount_in = amount_in;
    r.amount_out = g2 * dx;
    r.fee_retained_y = (1.0 - g1) * amount_in;
    r.fee_retained_x = (1.0 - g2) * dx;
    r.new_state = s;
    r.new_state.reserve_y = s.reserve_y + amount_in;
    r.new_state.reserve_x = s.reserve_x - r.amount_out;
    return r;
}

double lp_profit(const PoolState& before, const PoolState& after, double valuation_price) {
    if (!finite_positive(valuation_price))
        throw std::invalid_argument("valuation price must be positive and finite");
    return valuation_price * (after.reserve_x - before.reserve_x) +
           (after.reserve_y - before.reserve_y);
}

}  // namespace cfmm
