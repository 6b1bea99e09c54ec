#pragma once

namespace cfmm {

// Closed interval on the positive price-ratio axis.
struct Interval {
    double lower = 0.0;
    double upper = 0.0;

    bool contains(double v) const { return v >= lower && v <= upper; }
    double width() const { return upper - lower; }
};

}  // namespace cfmm
