// Analytic impermanent-loss risk under geometric Brownian price dynamics:
// one-block exit probability from the IG zone, its worst-case bound over the
// post-arbitrage starting set, blocks-to-IL, and the minimum-fee solver.
#pragma once

#include <stdexcept>

#include "cfmm/pool.hpp"
#include "cfmm/zones.hpp"

namespace cfmm {

// External price process: dp = mu*p*dt + sigma*p*dW, sampled every dt.
struct GbmParams {
    double mu = 0.0;
    double sigma = 0.0;  // per sqrt(unit time)
    double dt = 1.0;     // block interval in the same time unit
};

void check_gbm(const GbmParams& g);  // sigma >= 0, dt > 0, finite

// Standard normal CDF via the complementary error function; |error| < 1e-12.
double normal_cdf(double z);

// Inverse of normal_cdf on (0,1); rational approximation plus one Halley
// refinement, |Phi(result) - p| near machine precision.
double inverse_normal_cdf(double p);

// Probability that the next-block ratio leaves [ig.lower, ig.upper] starting
// from start_ratio inside the zone. Degenerate zone (tau = 1) gives 1.
double pil_one_block(const GbmParams& g, const ZoneBoundaries& b, double start_ratio);

// Worst case over the post-arbitrage starting set: arbitrage re-aligns the
// ratio to a no-arbitrage band edge each block and the one-block exit
// probability is maximized at the edges, so this is the larger of the two
// edge evaluations. Requires mu = 0 and equal-weight (closed-form) zones.
double pil_upper_bound(const GbmParams& g, const FeeSchedule& fees);

// Mean of the geometric distribution on {1,2,...}: 1/p. p = 0 maps to +inf.
double expected_blocks_to_il(double p_il);

// 1 - (1-p)^n.
double geometric_cdf(double p_il, long n);

enum class FeeSide { InputOnly, OutputOnly, Symmetric };

FeeSchedule fee_schedule_for_side(FeeSide side, double phi);

struct InfeasibleTarget : std::runtime_error {
    double achieved;  // exit probability at the fee cap
    InfeasibleTarget(const std::string& msg, double p) : std::runtime_error(msg), achieved(p) {}
};

// Smallest phi in [0, 0.49] with pil_upper_bound <= xi; plain bisection to
// absolute tolerance 1e-7 (the objective is monotone in phi). Throws
// InfeasibleTarget when even the cap misses xi.
double min_fee_for_target(const GbmParams& g, double xi, FeeSide side);

}  // namespace cfmm
