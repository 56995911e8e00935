#pragma once

// Exact cosine-distance nearest-neighbor search over a base embedding set.
// Brute force over unit-normalized rows: the metric definitions downstream
// need exact neighbor counts, and the expected base sizes are feasible
// without an approximate index.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "confgate/types.hpp"

namespace confgate {

// 1 - cos(a, b), clamped so the result is always inside [0, 2].
double cosine_distance(std::span<const double> a, std::span<const double> b);

// Unit-normalized copy of a base set, row-major. Immutable after build;
// concurrent knn() calls over a shared index are safe.
class VectorIndex {
public:
    const std::string& base_set_name() const { return base_set_name_; }
    std::size_t dim() const { return dim_; }
    std::size_t rows() const { return row_ids_.size(); }
    const std::vector<std::string>& row_ids() const { return row_ids_; }
    std::span<const double> row(std::size_t i) const {
        return {matrix_.data() + i * dim_, dim_};
    }

    // min(k, rows) nearest rows, ascending by distance, ties broken by row
    // insertion order. The query is normalized internally.
    std::vector<Neighbor> knn(std::span<const double> query, std::size_t k) const;

private:
    friend VectorIndex build_index(const EmbeddingSet& base);

    std::string base_set_name_;
    std::size_t dim_ = 0;
    std::vector<double> matrix_;  // rows * dim, every row unit length
    std::vector<std::string> row_ids_;
};

// Normalizes and stores all base vectors, preserving insertion order.
// Throws if the base set fails validation (zero-norm vectors are named).
VectorIndex build_index(const EmbeddingSet& base);

// One knn() pass per query; entries come out in query order regardless of
// scheduling. Distances are rounded to f32 precision so an in-memory cache
// matches its on-disk form exactly. `embedder_name` defaults to the base
// set name; `threads` 0 means all hardware threads.
NeighborCache build_neighbor_cache(const VectorIndex& index, const EmbeddingSet& queries,
                                   std::size_t k, const std::string& embedder_name = "",
                                   int threads = 0);

}  // namespace confgate
