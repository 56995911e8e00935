#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "confgate/types.hpp"

namespace fixtures {

// Scratch directory removed on destruction.
struct TempDir {
    std::filesystem::path path;

    explicit TempDir(const std::string& tag) {
        static std::atomic<unsigned> counter{0};
        path = std::filesystem::temp_directory_path() /
               (tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string file(const std::string& name) const { return (path / name).string(); }
};

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return lo + u * (hi - lo);
}

// Values are rounded to f32 so sets survive file round trips unchanged.
inline confgate::EmbeddingSet random_embedding_set(std::mt19937_64& rng, std::size_t count,
                                                   std::size_t dim, const std::string& name) {
    confgate::EmbeddingSet set;
    set.name = name;
    set.dim = dim;
    for (std::size_t i = 0; i < count; ++i) {
        confgate::EmbeddingItem item;
        item.id = "v" + std::to_string(i);
        item.values.reserve(dim);
        for (std::size_t j = 0; j < dim; ++j) {
            item.values.push_back(
                static_cast<double>(static_cast<float>(uniform(rng, -1.0, 1.0))));
        }
        set.items.push_back(std::move(item));
    }
    return set;
}

// Entry whose neighbor list is the sorted f32-rounded copy of `distances`.
inline confgate::NeighborCacheEntry make_entry(const std::string& sample_id,
                                               std::vector<double> distances) {
    std::sort(distances.begin(), distances.end());
    confgate::NeighborCacheEntry entry;
    entry.sample_id = sample_id;
    for (std::size_t i = 0; i < distances.size(); ++i) {
        entry.neighbors.push_back(
            {"b" + std::to_string(i), static_cast<double>(static_cast<float>(distances[i]))});
    }
    return entry;
}

// Cache with uniformly random ascending distance lists, k per entry.
inline confgate::NeighborCache random_cache(std::mt19937_64& rng, std::size_t samples,
                                            std::uint32_t k) {
    confgate::NeighborCache cache;
    cache.base_set_name = "base";
    cache.embedder_name = "emb";
    cache.k = k;
    for (std::size_t i = 0; i < samples; ++i) {
        std::vector<double> d(k);
        for (auto& x : d) x = uniform(rng, 0.0, 2.0);
        cache.entries.push_back(make_entry("s" + std::to_string(i), std::move(d)));
    }
    return cache;
}

inline confgate::PredictionSet random_predictions(std::mt19937_64& rng,
                                                  const confgate::NeighborCache& cache,
                                                  double accuracy) {
    confgate::PredictionSet preds;
    preds.classifier_name = "clf";
    for (const auto& e : cache.entries) {
        const bool correct = uniform(rng, 0.0, 1.0) < accuracy;
        preds.records.push_back({e.sample_id, correct ? "y" : "n", "y"});
    }
    return preds;
}

// Dataset where exactly n=4 separates the groups: every in-distribution
// query has a private quartet of near-duplicate base vectors, every
// out-of-distribution query has only a decoy triple. Query directions are
// orthogonal basis vectors, so below n=4 both groups see tiny distances,
// at n=4 only the quartet holders do, and above it nobody does.
struct N4Fixture {
    confgate::EmbeddingSet base;
    confgate::EmbeddingSet queries;
    confgate::PredictionSet preds;
};

inline N4Fixture make_n4_dominant(std::mt19937_64& rng, std::size_t id_count = 60,
                                  std::size_t ood_count = 40) {
    const std::size_t dim = id_count + ood_count;
    N4Fixture fx;
    fx.base.name = "n4base";
    fx.base.dim = dim;
    fx.queries.name = "n4queries";
    fx.queries.dim = dim;
    fx.preds.classifier_name = "n4clf";

    auto axis_point = [&](std::size_t axis, double jitter) {
        std::vector<double> v(dim, 0.0);
        v[axis] = 1.0;
        for (auto& x : v) x += uniform(rng, -jitter, jitter);
        for (auto& x : v) x = static_cast<double>(static_cast<float>(x));
        return v;
    };

    for (std::size_t i = 0; i < id_count + ood_count; ++i) {
        const bool ood = i >= id_count;
        const std::string qid = (ood ? "ood" : "id") + std::to_string(i);
        fx.queries.items.push_back({qid, axis_point(i, 0.0)});
        const std::size_t copies = ood ? 3 : 4;
        for (std::size_t c = 0; c < copies; ++c) {
            fx.base.items.push_back({qid + "_n" + std::to_string(c), axis_point(i, 0.01)});
        }
        fx.preds.records.push_back({qid, ood ? "wrong" : "right", "right"});
    }
    return fx;
}

}  // namespace fixtures
