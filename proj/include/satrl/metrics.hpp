#pragma once

// Pointing-quality metrics over an evaluation horizon.
//
// A trace holds the true pointing error in degrees sampled at the control
// cadence, one sample per control period at the period's START (left-rectangle
// nodes), so a horizon of T seconds at 0.1 s cadence is exactly T/0.1 samples
// and the time integrals of the metric definitions discretize to plain means.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace satrl {

struct AngleTrace {
    std::vector<double> theta_deg;
    double dt = 0.1;  // s between samples

    double duration() const { return static_cast<double>(theta_deg.size()) * dt; }
};

// Fraction of the horizon spent within the half-beamwidth threshold.
inline double duty_cycle(const AngleTrace& trace, double threshold_deg = 10.0) {
    if (trace.theta_deg.empty()) throw std::invalid_argument("duty_cycle: empty trace");
    size_t in = 0;
    for (double th : trace.theta_deg)
        if (th <= threshold_deg) ++in;
    return static_cast<double>(in) / static_cast<double>(trace.theta_deg.size());
}

inline double rms_error(const AngleTrace& trace) {
    if (trace.theta_deg.empty()) throw std::invalid_argument("rms_error: empty trace");
    // scale by the peak first: constant traces come out exactly, and the
    // squares cannot overflow
    double peak = 0.0;
    for (double th : trace.theta_deg) peak = std::max(peak, std::abs(th));
    if (peak == 0.0) return 0.0;
    double acc = 0.0;
    for (double th : trace.theta_deg) {
        const double r = th / peak;
        acc += r * r;
    }
    return peak * std::sqrt(acc / static_cast<double>(trace.theta_deg.size()));
}

// (max, min) over the sampled horizon.
inline std::pair<double, double> extreme_errors(const AngleTrace& trace) {
    if (trace.theta_deg.empty()) throw std::invalid_argument("extreme_errors: empty trace");
    const auto [lo, hi] = std::minmax_element(trace.theta_deg.begin(), trace.theta_deg.end());
    return {*hi, *lo};
}

}  // namespace satrl
