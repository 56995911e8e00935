#include "confgate/synth.hpp"

#include <cmath>
#include <random>
#include <unordered_set>

namespace confgate {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// splitmix64 finalizer; decorrelates the label and geometry streams.
std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// (0, 1]; never zero so log() below is safe.
double uniform01(std::mt19937_64& rng) {
    return static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;
}

// Box-Muller. The standard library distributions are implementation
// defined, and generated datasets must be reproducible from the seed alone.
class Gaussian {
public:
    double next(std::mt19937_64& rng) {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform01(rng);
        const double u2 = uniform01(rng);
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(kTwoPi * u2);
        has_spare_ = true;
        return r * std::cos(kTwoPi * u2);
    }

private:
    double spare_ = 0.0;
    bool has_spare_ = false;
};

std::vector<double> random_unit(std::mt19937_64& rng, Gaussian& gauss, std::size_t dim) {
    std::vector<double> v(dim);
    double norm_sq = 0.0;
    do {
        norm_sq = 0.0;
        for (auto& x : v) {
            x = gauss.next(rng);
            norm_sq += x * x;
        }
    } while (norm_sq == 0.0);
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (auto& x : v) x *= inv;
    return v;
}

double cos_sim_unit(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

void round_to_f32(std::vector<double>& v) {
    for (auto& x : v) x = static_cast<double>(static_cast<float>(x));
}

std::size_t far_count(const SynthCluster& cluster) {
    return static_cast<std::size_t>(
        std::llround(cluster.ood_fraction * static_cast<double>(cluster.query_count)));
}

std::string wrong_label(const SynthConfig& cfg, std::size_t cluster_idx) {
    if (cfg.clusters.size() == 1) {
        return cfg.clusters[0].label + "_wrong";
    }
    return cfg.clusters[(cluster_idx + 1) % cfg.clusters.size()].label;
}

std::vector<SynthSpace> effective_spaces(const SynthConfig& cfg) {
    if (!cfg.spaces.empty()) return cfg.spaces;
    return {{cfg.name, cfg.seed}};
}

void check_config(const SynthConfig& cfg) {
    if (cfg.dim == 0) throw ValidationError("synth config: dim must be positive");
    if (cfg.name.empty()) throw ValidationError("synth config: name must not be empty");
    if (cfg.clusters.empty()) throw ValidationError("synth config: at least one cluster required");
    std::unordered_set<std::string> labels;
    for (const auto& c : cfg.clusters) {
        if (c.label.empty()) throw ValidationError("synth config: cluster label must not be empty");
        if (!labels.insert(c.label).second) {
            throw ValidationError("synth config: duplicate cluster label " + c.label);
        }
        if (c.base_count == 0) {
            throw ValidationError("synth config: cluster " + c.label + " needs base_count >= 1");
        }
        if (!(c.ood_fraction >= 0.0 && c.ood_fraction <= 1.0)) {
            throw ValidationError("synth config: ood_fraction out of [0, 1] for " + c.label);
        }
        if (c.stddev < 0.0) {
            throw ValidationError("synth config: negative stddev for " + c.label);
        }
        if (!(c.accuracy_near >= 0.0 && c.accuracy_near <= 1.0) ||
            !(c.accuracy_far >= 0.0 && c.accuracy_far <= 1.0)) {
            throw ValidationError("synth config: accuracy out of [0, 1] for " + c.label);
        }
    }
    std::unordered_set<std::string> space_names;
    for (const auto& s : effective_spaces(cfg)) {
        if (s.name.empty()) throw ValidationError("synth config: space name must not be empty");
        if (!space_names.insert(s.name).second) {
            throw ValidationError("synth config: duplicate space name " + s.name);
        }
    }
}

}  // namespace

SynthConfig parse_synth_config(const nlohmann::json& j) {
    if (!j.is_object()) {
        throw ValidationError("synth config must be a JSON object");
    }
    SynthConfig cfg;
    cfg.name = j.value("name", cfg.name);
    cfg.classifier_name = j.value("classifier", cfg.classifier_name);
    cfg.dim = j.value("dim", cfg.dim);
    cfg.seed = j.value("seed", cfg.seed);
    if (!j.contains("clusters") || !j.at("clusters").is_array()) {
        throw ValidationError("synth config: 'clusters' array required");
    }
    for (const auto& c : j.at("clusters")) {
        SynthCluster cluster;
        cluster.label = c.value("label", "");
        cluster.base_count = c.value("base_count", std::size_t{0});
        cluster.query_count = c.value("query_count", std::size_t{0});
        cluster.ood_fraction = c.value("ood_fraction", 0.0);
        cluster.stddev = c.value("stddev", 0.1);
        cluster.accuracy_near = c.value("accuracy_near", 1.0);
        cluster.accuracy_far = c.value("accuracy_far", 0.0);
        cfg.clusters.push_back(std::move(cluster));
    }
    if (j.contains("spaces")) {
        for (const auto& s : j.at("spaces")) {
            cfg.spaces.push_back({s.value("name", ""), s.value("seed", std::uint64_t{0})});
        }
    }
    check_config(cfg);
    return cfg;
}

std::vector<SynthSpace> synth_spaces(const SynthConfig& cfg) {
    check_config(cfg);
    return effective_spaces(cfg);
}

PredictionSet synth_predictions(const SynthConfig& cfg) {
    check_config(cfg);
    std::mt19937_64 rng(mix64(cfg.seed ^ 0x1abe15ull));

    PredictionSet preds;
    preds.classifier_name = cfg.classifier_name;
    for (std::size_t ci = 0; ci < cfg.clusters.size(); ++ci) {
        const auto& cluster = cfg.clusters[ci];
        const std::size_t n_far = far_count(cluster);
        const std::size_t n_near = cluster.query_count - n_far;
        const std::string wrong = wrong_label(cfg, ci);
        for (std::size_t i = 0; i < cluster.query_count; ++i) {
            const bool far = i >= n_near;
            const double p = far ? cluster.accuracy_far : cluster.accuracy_near;
            const bool correct = uniform01(rng) <= p;
            preds.records.push_back({cluster.label + "_q" + std::to_string(i),
                                     correct ? cluster.label : wrong, cluster.label});
        }
    }
    return preds;
}

std::pair<EmbeddingSet, EmbeddingSet> synth_space(const SynthConfig& cfg,
                                                  const SynthSpace& space) {
    check_config(cfg);
    std::mt19937_64 rng(mix64(cfg.seed) ^ mix64(space.seed ^ 0x6e0aull));
    Gaussian gauss;

    std::vector<std::vector<double>> centers;
    centers.reserve(cfg.clusters.size());
    for (std::size_t ci = 0; ci < cfg.clusters.size(); ++ci) {
        centers.push_back(random_unit(rng, gauss, cfg.dim));
    }

    auto near_point = [&](const SynthCluster& cluster, const std::vector<double>& center) {
        std::vector<double> v = center;
        for (auto& x : v) x += cluster.stddev * gauss.next(rng);
        round_to_f32(v);
        return v;
    };
    // Direction far from every cluster center: cosine similarity below 0.5
    // to all of them, i.e. cosine distance above 0.5.
    auto far_point = [&]() {
        for (int attempt = 0; attempt < 10000; ++attempt) {
            auto v = random_unit(rng, gauss, cfg.dim);
            bool ok = true;
            for (const auto& center : centers) {
                if (cos_sim_unit(v, center) >= 0.5) {
                    ok = false;
                    break;
                }
            }
            if (ok) {
                round_to_f32(v);
                return v;
            }
        }
        throw ValidationError("synth config: could not draw a far direction; dim " +
                              std::to_string(cfg.dim) + " is too crowded");
    };

    EmbeddingSet base;
    base.name = space.name;
    base.dim = cfg.dim;
    for (std::size_t ci = 0; ci < cfg.clusters.size(); ++ci) {
        const auto& cluster = cfg.clusters[ci];
        for (std::size_t i = 0; i < cluster.base_count; ++i) {
            base.items.push_back({cluster.label + "_b" + std::to_string(i),
                                  near_point(cluster, centers[ci])});
        }
    }

    EmbeddingSet queries;
    queries.name = space.name + "_queries";
    queries.dim = cfg.dim;
    for (std::size_t ci = 0; ci < cfg.clusters.size(); ++ci) {
        const auto& cluster = cfg.clusters[ci];
        const std::size_t n_far = far_count(cluster);
        const std::size_t n_near = cluster.query_count - n_far;
        for (std::size_t i = 0; i < cluster.query_count; ++i) {
            auto v = i < n_near ? near_point(cluster, centers[ci]) : far_point();
            queries.items.push_back({cluster.label + "_q" + std::to_string(i), std::move(v)});
        }
    }
    return {std::move(base), std::move(queries)};
}

SynthOutput generate_synthetic(const SynthConfig& cfg) {
    const auto spaces = effective_spaces(cfg);
    auto [base, queries] = synth_space(cfg, spaces.front());
    return {std::move(base), std::move(queries), synth_predictions(cfg)};
}

}  // namespace confgate
