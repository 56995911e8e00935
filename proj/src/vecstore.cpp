#include "confgate/vecstore.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

namespace confgate {

namespace {

double dot(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
#pragma omp simd reduction(+ : acc)
    for (std::size_t i = 0; i < n; ++i) {
        acc += a[i] * b[i];
    }
    return acc;
}

double l2_norm(std::span<const double> v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return std::sqrt(acc);
}

double clamped_cos_to_distance(double cos_sim) {
    return 1.0 - std::clamp(cos_sim, -1.0, 1.0);
}

}  // namespace

double cosine_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw ValidationError("dimension mismatch: " + std::to_string(a.size()) + " vs " +
                              std::to_string(b.size()));
    }
    const double na = l2_norm(a);
    const double nb = l2_norm(b);
    if (na == 0.0 || nb == 0.0) {
        throw ValidationError("cosine distance undefined for zero-norm vector");
    }
    return clamped_cos_to_distance(dot(a.data(), b.data(), a.size()) / (na * nb));
}

VectorIndex build_index(const EmbeddingSet& base) {
    auto violations = validate_embedding_set(base);
    if (!violations.empty()) {
        std::string msg = "base set " + base.name + " is invalid:";
        for (const auto& v : violations) msg += "\n  " + v;
        throw ValidationError(msg);
    }

    VectorIndex index;
    index.base_set_name_ = base.name;
    index.dim_ = base.dim;
    index.matrix_.resize(base.items.size() * base.dim);
    index.row_ids_.reserve(base.items.size());

    double* out = index.matrix_.data();
    for (const auto& item : base.items) {
        const double inv = 1.0 / l2_norm(item.values);
        for (std::size_t j = 0; j < base.dim; ++j) {
            out[j] = item.values[j] * inv;
        }
        out += base.dim;
        index.row_ids_.push_back(item.id);
    }
    return index;
}

std::vector<Neighbor> VectorIndex::knn(std::span<const double> query, std::size_t k) const {
    if (query.size() != dim_) {
        throw ValidationError("query dimension " + std::to_string(query.size()) +
                              " does not match index dimension " + std::to_string(dim_));
    }
    if (k == 0) {
        throw ValidationError("k must be at least 1");
    }
    const double norm = l2_norm(query);
    if (norm == 0.0) {
        throw ValidationError("zero-norm query");
    }

    std::vector<double> unit(query.begin(), query.end());
    const double inv = 1.0 / norm;
    for (double& x : unit) x *= inv;

    const std::size_t n = rows();
    std::vector<double> dist(n);
    for (std::size_t r = 0; r < n; ++r) {
        dist[r] = clamped_cos_to_distance(dot(unit.data(), matrix_.data() + r * dim_, dim_));
    }

    const std::size_t take = std::min(k, n);
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::partial_sort(order.begin(), order.begin() + take, order.end(),
                      [&](std::uint32_t a, std::uint32_t b) {
                          if (dist[a] != dist[b]) return dist[a] < dist[b];
                          return a < b;  // ties resolve to earlier insertion
                      });

    std::vector<Neighbor> result;
    result.reserve(take);
    for (std::size_t i = 0; i < take; ++i) {
        result.push_back({row_ids_[order[i]], dist[order[i]]});
    }
    return result;
}

NeighborCache build_neighbor_cache(const VectorIndex& index, const EmbeddingSet& queries,
                                   std::size_t k, const std::string& embedder_name,
                                   int threads) {
    if (index.rows() == 0) {
        throw ValidationError("cannot build a neighbor cache over an empty base set");
    }
    if (k == 0) {
        throw ValidationError("k must be at least 1");
    }
    auto violations = validate_embedding_set(queries);
    if (!violations.empty()) {
        std::string msg = "query set " + queries.name + " is invalid:";
        for (const auto& v : violations) msg += "\n  " + v;
        throw ValidationError(msg);
    }
    if (!queries.items.empty() && queries.dim != index.dim()) {
        throw ValidationError("query dimension " + std::to_string(queries.dim) +
                              " does not match index dimension " + std::to_string(index.dim()));
    }

    NeighborCache cache;
    cache.base_set_name = index.base_set_name();
    cache.embedder_name = embedder_name.empty() ? index.base_set_name() : embedder_name;
    cache.k = static_cast<std::uint32_t>(std::min(k, index.rows()));
    cache.entries.resize(queries.items.size());

    const int use_threads = threads > 0 ? threads : omp_get_max_threads();
    const auto count = static_cast<std::int64_t>(queries.items.size());
#pragma omp parallel for schedule(dynamic, 8) num_threads(use_threads)
    for (std::int64_t i = 0; i < count; ++i) {
        const auto& item = queries.items[static_cast<std::size_t>(i)];
        auto neighbors = index.knn(item.values, cache.k);
        // Distances are persisted as f32; rounding here keeps the in-memory
        // cache identical to what a write/read round trip produces.
        for (auto& nb : neighbors) {
            nb.distance = static_cast<double>(static_cast<float>(nb.distance));
        }
        auto& entry = cache.entries[static_cast<std::size_t>(i)];
        entry.sample_id = item.id;
        entry.neighbors = std::move(neighbors);
    }
    return cache;
}

}  // namespace confgate
