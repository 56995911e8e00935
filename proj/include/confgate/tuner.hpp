#pragma once

// Selection of the neighbor count n that maximizes the normalized
// confidence gain on a train split, and the greedy combination of several
// embedding spaces at a fixed per-model coverage.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "confgate/gate.hpp"
#include "confgate/metrics.hpp"

namespace confgate {

struct TuneResult {
    std::string classifier_name;
    std::string embedder_name;
    std::vector<std::uint32_t> grid;
    std::map<std::uint32_t, GainReport> per_n;
    std::uint32_t best_n = 0;  // maximizes normalized gain, ties go to the smaller n

    const GainReport& best() const { return per_n.at(best_n); }
};

// Builds the curve and gain report for every n in the grid. All n must be
// within the cache depth.
TuneResult tune_n(const NeighborCache& cache, const PredictionSet& preds,
                  const std::vector<std::uint32_t>& grid, const IntegrationConfig& cfg = {});

// Parses grid specs like "1..100,150,200" into a sorted unique list.
std::vector<std::uint32_t> parse_n_grid(const std::string& spec);

struct RankedModel {
    std::string embedder_name;
    std::uint32_t best_n = 0;
    double train_ncg = 0.0;
};

struct CombinationPlan {
    double per_model_coverage = 0.0;
    std::vector<RankedModel> ordered_models;  // descending train gain, ties by name
};

struct CombinedDecision {
    std::string sample_id;
    std::optional<std::string> accepted_by;
    double total_coverage = 0.0;
};

struct CombineInput {
    std::string embedder_name;
    const NeighborCache* cache = nullptr;
    std::uint32_t best_n = 0;
};

struct CombineResult {
    CombinationPlan plan;
    std::vector<CombinedDecision> decisions;  // prediction order
    double accuracy = 0.0;                    // over the union of accepted samples
    double total_coverage = 0.0;
};

// Greedy union: each model's threshold is the per_model_coverage quantile
// of its n-th neighbor distances over ALL samples, so every model alone
// accepts ceil(coverage * samples) of them (ties included together). A
// sample is attributed to the first model in plan order that accepts it;
// the accepted SET is order-independent. `training_gains` maps embedder
// name to the train-split normalized gain and defines the plan order.
CombineResult combine(const std::vector<CombineInput>& models, const PredictionSet& preds,
                      double per_model_coverage,
                      const std::map<std::string, double>& training_gains);

}  // namespace confgate
