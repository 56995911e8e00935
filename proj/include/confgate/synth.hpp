#pragma once

// Seeded synthetic datasets: Gaussian clusters around random unit centers
// for the base set, queries drawn either near a center (in-distribution)
// or in a direction far from every center (out-of-distribution), and
// prediction correctness sampled at per-cluster near/far accuracies.
//
// Sample identities and prediction outcomes depend only on `seed`, while
// vector positions also depend on a space seed, so several embedding
// spaces can share one prediction set.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "confgate/types.hpp"

namespace confgate {

struct SynthCluster {
    std::string label;
    std::size_t base_count = 0;
    std::size_t query_count = 0;
    double ood_fraction = 0.0;  // fraction of queries drawn far from every center
    double stddev = 0.1;
    double accuracy_near = 1.0;
    double accuracy_far = 0.0;
};

struct SynthSpace {
    std::string name;
    std::uint64_t seed = 0;
};

struct SynthConfig {
    std::string name = "synthetic";
    std::string classifier_name = "synthetic-classifier";
    std::size_t dim = 64;
    std::uint64_t seed = 0;
    std::vector<SynthCluster> clusters;
    std::vector<SynthSpace> spaces;  // defaults to one space named after the config
};

SynthConfig parse_synth_config(const nlohmann::json& j);

// Configured spaces, or the single default space named after the config.
std::vector<SynthSpace> synth_spaces(const SynthConfig& cfg);

// Prediction outcomes for every query sample; independent of any space.
PredictionSet synth_predictions(const SynthConfig& cfg);

// Base and query embeddings for one space. Coordinates are rounded to f32
// so generated sets survive a file round trip unchanged.
std::pair<EmbeddingSet, EmbeddingSet> synth_space(const SynthConfig& cfg, const SynthSpace& space);

struct SynthOutput {
    EmbeddingSet base;
    EmbeddingSet queries;
    PredictionSet predictions;
};

// Single-space convenience wrapper using the first configured space.
SynthOutput generate_synthetic(const SynthConfig& cfg);

}  // namespace confgate
