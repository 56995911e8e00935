#include "confgate/types.hpp"

#include <unordered_set>

namespace confgate {

std::vector<std::string> validate_embedding_set(const EmbeddingSet& set) {
    std::vector<std::string> violations;
    if (set.dim == 0) {
        violations.push_back("dim must be positive");
    }
    std::unordered_set<std::string> seen;
    std::unordered_set<std::string> reported_dupes;
    for (const auto& item : set.items) {
        if (!seen.insert(item.id).second && reported_dupes.insert(item.id).second) {
            violations.push_back("duplicate id " + item.id);
        }
        if (item.values.size() != set.dim) {
            violations.push_back("wrong dimension at " + item.id + ": got " +
                                 std::to_string(item.values.size()) + ", want " +
                                 std::to_string(set.dim));
            continue;
        }
        double norm_sq = 0.0;
        for (double v : item.values) norm_sq += v * v;
        if (norm_sq == 0.0) {
            violations.push_back("zero-norm vector at " + item.id);
        }
    }
    return violations;
}

double PredictionSet::benchmark_accuracy() const {
    if (records.empty()) {
        throw ValidationError("prediction set is empty");
    }
    std::size_t correct_count = 0;
    for (const auto& r : records) {
        if (r.correct()) ++correct_count;
    }
    return static_cast<double>(correct_count) / static_cast<double>(records.size());
}

const NeighborCacheEntry* NeighborCache::find(const std::string& sample_id) const {
    for (const auto& e : entries) {
        if (e.sample_id == sample_id) return &e;
    }
    return nullptr;
}

}  // namespace confgate
