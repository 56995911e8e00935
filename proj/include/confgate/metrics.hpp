#pragma once

// Gain computation over a confidence curve: tail-line extrapolation to full
// coverage, trapezoidal integration of (accuracy - acc_b) over
// [coverage_floor, 1], and normalization by the maximum attainable area.

#include "confgate/types.hpp"

namespace confgate {

struct IntegrationConfig {
    // Curves behave erratically at small coverage, so the area is taken
    // over [coverage_floor, 1] only.
    double coverage_floor = 0.1;
    // Number of highest-coverage points used for the least-squares tail
    // line. Curves with fewer points use all of them.
    int extrapolation_points = 20;
};

// Appends the fitted tail-line value at coverage 1 (clamped to [0, 1]) when
// the curve stops short; curves already reaching coverage 1 come back
// unchanged. Requires at least 2 points.
ConfidenceCurve extrapolate_to_full_coverage(const ConfidenceCurve& curve,
                                             const IntegrationConfig& cfg = {});

// Trapezoidal area between the curve and the horizontal line at acc_b over
// [coverage_floor, 1]. The curve must reach coverage 1 (extrapolate first).
// The value at the floor is interpolated; a curve whose minimum coverage
// lies above the floor is extended left with the fitted tail line and the
// report is flagged. Gain is not clamped: curves below acc_b produce
// negative gain so bad configurations still rank. normalized gain is
// defined as 0 when acc_b == 1 (no headroom).
GainReport confidence_gain(const ConfidenceCurve& curve, const IntegrationConfig& cfg = {});

}  // namespace confgate
