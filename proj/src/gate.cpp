#include "confgate/gate.hpp"

#include <algorithm>
#include <string_view>
#include <unordered_map>

namespace confgate {

namespace {

double nth_of_entry(const NeighborCacheEntry& entry, std::uint32_t n) {
    if (n == 0 || n > entry.neighbors.size()) {
        throw ValidationError("n=" + std::to_string(n) + " exceeds the cached depth " +
                              std::to_string(entry.neighbors.size()) + " for sample " +
                              entry.sample_id);
    }
    return entry.neighbors[n - 1].distance;
}

}  // namespace

std::size_t GateDecisionSet::accepted_count() const {
    std::size_t count = 0;
    for (const auto& d : decisions) {
        if (d.accepted) ++count;
    }
    return count;
}

double GateDecisionSet::coverage() const {
    if (decisions.empty()) return 0.0;
    return static_cast<double>(accepted_count()) / static_cast<double>(decisions.size());
}

double nth_neighbor_distance(const NeighborCache& cache, const std::string& sample_id,
                             std::uint32_t n) {
    const auto* entry = cache.find(sample_id);
    if (entry == nullptr) {
        throw ValidationError("unknown sample " + sample_id);
    }
    return nth_of_entry(*entry, n);
}

GateDecisionSet decide(const NeighborCache& cache, const GateParams& params) {
    GateDecisionSet out;
    out.params = params;
    out.decisions.reserve(cache.entries.size());
    for (const auto& entry : cache.entries) {
        const double d = nth_of_entry(entry, params.n);
        out.decisions.push_back({entry.sample_id, d <= params.l_threshold, d});
    }
    return out;
}

ConfidenceCurve confidence_curve(const NeighborCache& cache, const PredictionSet& preds,
                                 std::uint32_t n) {
    if (preds.records.empty()) {
        throw ValidationError("prediction set is empty");
    }
    if (cache.entries.size() != preds.records.size()) {
        throw ValidationError("cache covers " + std::to_string(cache.entries.size()) +
                              " samples but predictions cover " +
                              std::to_string(preds.records.size()));
    }

    std::unordered_map<std::string_view, bool> correct;
    correct.reserve(preds.records.size());
    for (const auto& r : preds.records) {
        if (!correct.emplace(r.sample_id, r.correct()).second) {
            throw ValidationError("duplicate sample id " + r.sample_id + " in predictions");
        }
    }

    struct Row {
        double d;
        std::string_view id;
        bool correct;
    };
    std::vector<Row> rows;
    rows.reserve(cache.entries.size());
    std::size_t total_correct = 0;
    for (const auto& entry : cache.entries) {
        auto it = correct.find(entry.sample_id);
        if (it == correct.end()) {
            throw ValidationError("sample " + entry.sample_id + " is cached but has no prediction");
        }
        rows.push_back({nth_of_entry(entry, n), entry.sample_id, it->second});
        if (it->second) ++total_correct;
    }

    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        if (a.d != b.d) return a.d < b.d;
        return a.id < b.id;
    });

    const auto total = static_cast<double>(rows.size());
    ConfidenceCurve curve;
    curve.n = n;
    curve.acc_b = static_cast<double>(total_correct) / total;

    std::size_t cum_samples = 0;
    std::size_t cum_correct = 0;
    for (std::size_t i = 0; i < rows.size();) {
        const double threshold = rows[i].d;
        // All samples tied at this distance enter together.
        for (; i < rows.size() && rows[i].d == threshold; ++i) {
            ++cum_samples;
            if (rows[i].correct) ++cum_correct;
        }
        curve.points.push_back({static_cast<double>(cum_samples) / total,
                                static_cast<double>(cum_correct) / static_cast<double>(cum_samples)});
    }
    return curve;
}

}  // namespace confgate
