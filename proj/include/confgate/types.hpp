#pragma once

// Shared domain types: embedding sets, classifier predictions, neighbor
// caches, gate parameters, confidence curves and gain reports. Everything
// here is immutable after construction and safe to share across threads.

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace confgate {

// Input failed structural or semantic validation (malformed file content,
// bad parameters). The CLI maps this to exit code 1.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The operating system refused a read or write. The CLI maps this to exit
// code 2.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct EmbeddingItem {
    std::string id;
    std::vector<double> values;
};

// Id-addressed list of equal-length vectors; `items` keeps insertion order.
struct EmbeddingSet {
    std::string name;
    std::size_t dim = 0;
    std::vector<EmbeddingItem> items;
};

// Returns every invariant violation (bad dim, duplicate id, wrong per-item
// length, zero-norm vector). Empty result means the set is well formed.
std::vector<std::string> validate_embedding_set(const EmbeddingSet& set);

struct PredictionRecord {
    std::string sample_id;
    std::string predicted_label;
    std::string true_label;

    bool correct() const { return predicted_label == true_label; }
};

struct PredictionSet {
    std::string classifier_name;
    std::vector<PredictionRecord> records;

    // Accuracy over all records, i.e. the accuracy at coverage 1.
    double benchmark_accuracy() const;
};

struct Neighbor {
    std::string id;
    double distance = 0.0;  // cosine distance, 1 - cos
};

struct NeighborCacheEntry {
    std::string sample_id;
    std::vector<Neighbor> neighbors;  // ascending by distance
};

// Per-query k nearest base embeddings. `k` is the effective depth (the
// requested depth clamped to the base size), so every entry holds exactly
// k neighbors. Entries keep query order.
struct NeighborCache {
    std::string base_set_name;
    std::string embedder_name;
    std::uint32_t k = 0;
    std::vector<NeighborCacheEntry> entries;

    // Linear scan; bulk operations iterate `entries` directly instead.
    const NeighborCacheEntry* find(const std::string& sample_id) const;
};

struct GateParams {
    std::uint32_t n = 1;       // neighbors required inside the radius
    double l_threshold = 0.0;  // cosine-distance radius
};

struct CurvePoint {
    double coverage = 0.0;
    double accuracy = 0.0;
};

// Accuracy over the accepted subset as a function of coverage, for a fixed
// n. Coverages are strictly increasing; a full sweep ends at (1, acc_b).
struct ConfidenceCurve {
    std::uint32_t n = 0;
    std::vector<CurvePoint> points;
    double acc_b = 0.0;
};

struct GainReport {
    double acc_b = 0.0;
    double confidence_gain = 0.0;
    double max_confidence_gain = 0.0;         // (1 - floor) * (1 - acc_b)
    double normalized_confidence_gain = 0.0;  // gain / max, 0 when acc_b == 1
    // Set when the curve started above the coverage floor and had to be
    // extended left with the fitted tail line before integrating.
    bool extended_below_floor = false;
};

}  // namespace confgate
