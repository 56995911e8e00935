#include "confgate/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace confgate {

namespace {

struct Line {
    double slope = 0.0;
    double intercept = 0.0;

    double at(double x) const { return slope * x + intercept; }
};

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

// Least-squares line through the `count` highest-coverage points. A window
// of constant accuracy short-circuits to an exact horizontal line so flat
// curves integrate to exactly zero.
Line fit_tail_line(const std::vector<CurvePoint>& pts, int count) {
    const std::size_t use = std::min(pts.size(), static_cast<std::size_t>(count));
    const std::size_t start = pts.size() - use;

    bool constant = true;
    for (std::size_t i = start + 1; i < pts.size(); ++i) {
        if (pts[i].accuracy != pts[start].accuracy) {
            constant = false;
            break;
        }
    }
    if (constant) {
        return {0.0, pts[start].accuracy};
    }

    double mx = 0.0, my = 0.0;
    for (std::size_t i = start; i < pts.size(); ++i) {
        mx += pts[i].coverage;
        my += pts[i].accuracy;
    }
    mx /= static_cast<double>(use);
    my /= static_cast<double>(use);

    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = start; i < pts.size(); ++i) {
        const double dx = pts[i].coverage - mx;
        sxx += dx * dx;
        sxy += dx * (pts[i].accuracy - my);
    }
    if (sxx == 0.0) {
        return {0.0, my};
    }
    const double slope = sxy / sxx;
    return {slope, my - slope * mx};
}

void check_config(const IntegrationConfig& cfg) {
    if (!(cfg.coverage_floor > 0.0 && cfg.coverage_floor < 1.0)) {
        throw ValidationError("coverage floor must lie in (0, 1), got " +
                              std::to_string(cfg.coverage_floor));
    }
    if (cfg.extrapolation_points < 1) {
        throw ValidationError("extrapolation point count must be positive");
    }
}

void check_sorted(const ConfidenceCurve& curve) {
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        if (!(curve.points[i].coverage > curve.points[i - 1].coverage)) {
            throw ValidationError("curve coverages must be strictly increasing");
        }
    }
}

}  // namespace

ConfidenceCurve extrapolate_to_full_coverage(const ConfidenceCurve& curve,
                                             const IntegrationConfig& cfg) {
    check_config(cfg);
    if (curve.points.size() < 2) {
        throw ValidationError("extrapolation needs at least 2 curve points");
    }
    check_sorted(curve);
    if (curve.points.back().coverage >= 1.0) {
        return curve;
    }
    ConfidenceCurve out = curve;
    const Line line = fit_tail_line(curve.points, cfg.extrapolation_points);
    out.points.push_back({1.0, clamp01(line.at(1.0))});
    return out;
}

GainReport confidence_gain(const ConfidenceCurve& curve, const IntegrationConfig& cfg) {
    check_config(cfg);
    if (curve.acc_b < 0.0 || curve.acc_b > 1.0) {
        throw ValidationError("acc_b must lie in [0, 1], got " + std::to_string(curve.acc_b));
    }
    if (curve.points.empty()) {
        throw ValidationError("curve has no points");
    }
    check_sorted(curve);
    if (curve.points.back().coverage < 1.0 - 1e-12) {
        throw ValidationError("curve does not reach coverage 1; extrapolate first");
    }

    GainReport report;
    report.acc_b = curve.acc_b;

    const double floor = cfg.coverage_floor;
    const auto& src = curve.points;

    // Working polyline over [floor, 1].
    std::vector<CurvePoint> pts;
    pts.reserve(src.size() + 1);
    if (src.front().coverage > floor) {
        const Line line = fit_tail_line(src, cfg.extrapolation_points);
        pts.push_back({floor, clamp01(line.at(floor))});
        report.extended_below_floor = true;
        pts.insert(pts.end(), src.begin(), src.end());
    } else {
        std::size_t j = 0;
        while (src[j].coverage < floor) ++j;
        if (src[j].coverage == floor) {
            pts.push_back(src[j]);
        } else {
            const auto& lo = src[j - 1];
            const auto& hi = src[j];
            const double t = (floor - lo.coverage) / (hi.coverage - lo.coverage);
            pts.push_back({floor, lo.accuracy + t * (hi.accuracy - lo.accuracy)});
        }
        pts.insert(pts.end(), src.begin() + static_cast<std::ptrdiff_t>(j) +
                                  (src[j].coverage == floor ? 1 : 0),
                   src.end());
    }

    double gain = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        const double dx = pts[i].coverage - pts[i - 1].coverage;
        gain += 0.5 * (pts[i - 1].accuracy + pts[i].accuracy - 2.0 * curve.acc_b) * dx;
    }

    report.confidence_gain = gain;
    report.max_confidence_gain = (1.0 - floor) * (1.0 - curve.acc_b);
    report.normalized_confidence_gain =
        report.max_confidence_gain > 0.0 ? gain / report.max_confidence_gain : 0.0;
    return report;
}

}  // namespace confgate
