#include "cfmm/gbm_risk.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace cfmm {

void check_gbm(const GbmParams& g) {
    if (!std::isfinite(g.mu) || !std::isfinite(g.sigma) || !std::isfinite(g.dt))
        throw std::domain_error("GBM parameters must be finite");
    if (g.sigma < 0.0) throw std::domain_error("volatility must be nonnegative");
    if (!(g.dt > 0.0)) throw std::domain_error("block interval must be positive");
}

double normal_cdf(double z) {
    if (!std::isfinite(z)) {
        if (std::isnan(z)) throw std::domain_error("normal_cdf: NaN argument");
        return z > 0.0 ? 1.0 : 0.0;
    }
    return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

double inverse_normal_cdf(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("inverse_normal_cdf requires p in (0, 1)");

    // Acklam's rational approximation, then one Halley step against erfc.
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }

    // The residual Phi(x) - p is formed on the nearer tail so it keeps full
    // relative precision far from the median.
    const double e = (p < 0.5) ? 0.5 * std::erfc(-x / std::numbers::sqrt2) - p
                               : (1.0 - p) - 0.5 * std::erfc(x / std::numbers::sqrt2);
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    return x - u / (1.0 + 0.5 * x * u);
}

double pil_one_block(const GbmParams& g, const ZoneBoundaries& b, double start_ratio) {
    check_gbm(g);
    if (!(g.sigma > 0.0)) throw std::domain_error("exit probability requires sigma > 0");
    if (!std::isfinite(start_ratio) || start_ratio <= 0.0)
        throw std::invalid_argument("start ratio must be positive and finite");
    if (!b.ig_zone.contains(start_ratio))
        throw std::domain_error("start ratio lies outside the IG zone");
    if (!(b.ig_zone.upper > b.ig_zone.lower)) return 1.0;  // degenerate zone

    const double m = std::log(start_ratio) + (g.mu - 0.5 * g.sigma * g.sigma) * g.dt;
    const double s = g.sigma * std::sqrt(g.dt);
    const double z_low = (std::log(b.ig_zone.lower) - m) / s;
    const double z_high = (std::log(b.ig_zone.upper) - m) / s;
    return normal_cdf(z_low) + (1.0 - normal_cdf(z_high));
}

double pil_upper_bound(const GbmParams& g, const FeeSchedule& fees) {
    check_gbm(g);
    if (g.mu != 0.0)
        throw std::domain_error("the worst-case bound is derived for zero drift");
    const ZoneBoundaries b = ig_zone_uniswap(fees);
    if (!(b.ig_zone.upper > b.ig_zone.lower)) return 1.0;
    const double at_lower = pil_one_block(g, b, b.no_arb.lower);
    const double at_upper = pil_one_block(g, b, b.no_arb.upper);
    return std::max(at_lower, at_upper);
}

double expected_blocks_to_il(double p_il) {
    if (!(p_il >= 0.0 && p_il <= 1.0)) throw std::domain_error("probability must lie in [0, 1]");
    if (p_il == 0.0) return std::numeric_limits<double>::infinity();
    return 1.0 / p_il;
}

double geometric_cdf(double p_il, long n) {
    if (!(p_il >= 0.0 && p_il <= 1.0)) throw std::domain_error("probability must lie in [0, 1]");
    if (n < 1) throw std::invalid_argument("block count must be at least 1");
    return -std::expm1(static_cast<double>(n) * std::log1p(-p_il));
}

FeeSchedule fee_schedule_for_side(FeeSide side, double phi) {
    switch (side) {
        case FeeSide::InputOnly: return {phi, 0.0};
        case FeeSide::OutputOnly: return {0.0, phi};
        case FeeSide::Symmetric: return {phi, phi};
    }
    throw std::invalid_argument("unknown fee side");
}

double min_fee_for_target(const GbmParams& g, double xi, FeeSide side) {
    check_gbm(g);
    if (!(xi > 0.0 && xi < 1.0)) throw std::domain_error("target probability must lie in (0, 1)");

    constexpr double kFeeCap = 0.49;
    constexpr double kTol = 1e-7;

    auto bound_at = [&](double phi) { return pil_upper_bound(g, fee_schedule_for_side(side, phi)); };

    const double cap_bound = bound_at(kFeeCap);
    if (cap_bound > xi)
        throw InfeasibleTarget("no fee up to 49% meets the target exit probability", cap_bound);

    double lo = 0.0;   // bound(lo) > xi (bound(0) = 1)
    double hi = kFeeCap;  // bound(hi) <= xi
    for (int it = 0; it < 60 && hi - lo > kTol; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (bound_at(mid) <= xi)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

}  // namespace cfmm
