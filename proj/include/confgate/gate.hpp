#pragma once

// The acceptance rule: a prediction is confident when at least n base
// embeddings sit within the l_threshold radius of the query, which is
// equivalent to the n-th neighbor distance being <= l_threshold. Sweeping
// the threshold over the observed n-th distances traces the confidence
// curve. All functions here are pure over immutable inputs.

#include <cstdint>
#include <string>
#include <vector>

#include "confgate/types.hpp"

namespace confgate {

struct GateDecision {
    std::string sample_id;
    bool accepted = false;
    double nth_distance = 0.0;
};

struct GateDecisionSet {
    GateParams params;
    std::vector<GateDecision> decisions;  // cache entry order

    std::size_t accepted_count() const;
    double coverage() const;
};

// n-th smallest cached distance for the sample (1-indexed).
double nth_neighbor_distance(const NeighborCache& cache, const std::string& sample_id,
                             std::uint32_t n);

// Applies the rule to every cached sample.
GateDecisionSet decide(const NeighborCache& cache, const GateParams& params);

// Full threshold sweep for a fixed n: samples sort by their n-th neighbor
// distance and one point is emitted per distinct distance value, covering
// every achievable (coverage, accuracy) pair exactly once. Samples tied at
// a distance enter the acceptance set together. The cache and prediction
// set must cover the same sample ids.
ConfidenceCurve confidence_curve(const NeighborCache& cache, const PredictionSet& preds,
                                 std::uint32_t n);

}  // namespace confgate
