#include "confgate/tuner.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string_view>
#include <unordered_map>

namespace confgate {

TuneResult tune_n(const NeighborCache& cache, const PredictionSet& preds,
                  const std::vector<std::uint32_t>& grid, const IntegrationConfig& cfg) {
    if (grid.empty()) {
        throw ValidationError("n grid is empty");
    }
    for (auto n : grid) {
        if (n == 0 || n > cache.k) {
            throw ValidationError("grid value n=" + std::to_string(n) +
                                  " exceeds the cache depth " + std::to_string(cache.k));
        }
    }

    TuneResult result;
    result.classifier_name = preds.classifier_name;
    result.embedder_name = cache.embedder_name;
    result.grid = grid;

    for (auto n : grid) {
        if (result.per_n.count(n)) continue;
        const auto curve = extrapolate_to_full_coverage(confidence_curve(cache, preds, n), cfg);
        result.per_n.emplace(n, confidence_gain(curve, cfg));
    }

    // per_n iterates in ascending n, so strict > keeps the smallest n on ties.
    double best_gain = 0.0;
    bool first = true;
    for (const auto& [n, report] : result.per_n) {
        if (first || report.normalized_confidence_gain > best_gain) {
            best_gain = report.normalized_confidence_gain;
            result.best_n = n;
            first = false;
        }
    }
    return result;
}

std::vector<std::uint32_t> parse_n_grid(const std::string& spec) {
    std::vector<std::uint32_t> grid;
    std::string_view rest = spec;

    auto parse_int = [&](std::string_view tok) -> std::uint32_t {
        std::uint32_t value = 0;
        const auto* end = tok.data() + tok.size();
        auto [ptr, ec] = std::from_chars(tok.data(), end, value);
        if (ec != std::errc() || ptr != end || value == 0) {
            throw ValidationError("bad n grid token '" + std::string(tok) + "' in '" + spec + "'");
        }
        return value;
    };

    while (!rest.empty()) {
        const auto comma = rest.find(',');
        std::string_view tok = rest.substr(0, comma);
        rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        if (tok.empty()) {
            throw ValidationError("empty token in n grid '" + spec + "'");
        }
        const auto dots = tok.find("..");
        if (dots == std::string_view::npos) {
            grid.push_back(parse_int(tok));
        } else {
            const auto lo = parse_int(tok.substr(0, dots));
            const auto hi = parse_int(tok.substr(dots + 2));
            if (lo > hi) {
                throw ValidationError("descending range '" + std::string(tok) + "' in n grid");
            }
            for (std::uint32_t n = lo; n <= hi; ++n) grid.push_back(n);
        }
    }
    if (grid.empty()) {
        throw ValidationError("n grid '" + spec + "' is empty");
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

CombineResult combine(const std::vector<CombineInput>& models, const PredictionSet& preds,
                      double per_model_coverage,
                      const std::map<std::string, double>& training_gains) {
    if (models.empty()) {
        throw ValidationError("combination needs at least one model");
    }
    if (!(per_model_coverage > 0.0 && per_model_coverage < 1.0)) {
        throw ValidationError("per-model coverage must lie in (0, 1), got " +
                              std::to_string(per_model_coverage));
    }
    if (preds.records.empty()) {
        throw ValidationError("prediction set is empty");
    }

    const std::size_t sample_count = preds.records.size();

    // Per model, n-th neighbor distances aligned with the prediction order.
    struct ModelData {
        const CombineInput* input = nullptr;
        std::vector<double> nth;
        double threshold = 0.0;
    };
    std::unordered_map<std::string, ModelData> by_name;
    for (const auto& model : models) {
        if (model.cache == nullptr) {
            throw ValidationError("null cache for model " + model.embedder_name);
        }
        if (by_name.count(model.embedder_name)) {
            throw ValidationError("duplicate model " + model.embedder_name);
        }
        if (!training_gains.count(model.embedder_name)) {
            throw ValidationError("no training gain recorded for model " + model.embedder_name);
        }

        std::unordered_map<std::string_view, const NeighborCacheEntry*> index;
        index.reserve(model.cache->entries.size());
        for (const auto& e : model.cache->entries) index.emplace(e.sample_id, &e);

        ModelData data;
        data.input = &model;
        data.nth.reserve(sample_count);
        for (const auto& r : preds.records) {
            auto it = index.find(r.sample_id);
            if (it == index.end()) {
                throw ValidationError("sample " + r.sample_id + " missing from cache of model " +
                                      model.embedder_name);
            }
            if (model.best_n == 0 || model.best_n > it->second->neighbors.size()) {
                throw ValidationError("n=" + std::to_string(model.best_n) +
                                      " exceeds the cache depth for model " + model.embedder_name);
            }
            data.nth.push_back(it->second->neighbors[model.best_n - 1].distance);
        }

        // Quantile over all samples; ties at the threshold are accepted too.
        std::vector<double> sorted = data.nth;
        std::sort(sorted.begin(), sorted.end());
        auto want = static_cast<std::size_t>(
            std::ceil(per_model_coverage * static_cast<double>(sample_count) - 1e-9));
        want = std::clamp<std::size_t>(want, 1, sample_count);
        data.threshold = sorted[want - 1];

        by_name.emplace(model.embedder_name, std::move(data));
    }

    CombineResult result;
    result.plan.per_model_coverage = per_model_coverage;
    for (const auto& model : models) {
        result.plan.ordered_models.push_back({model.embedder_name, model.best_n,
                                              training_gains.at(model.embedder_name)});
    }
    std::sort(result.plan.ordered_models.begin(), result.plan.ordered_models.end(),
              [](const RankedModel& a, const RankedModel& b) {
                  if (a.train_ncg != b.train_ncg) return a.train_ncg > b.train_ncg;
                  return a.embedder_name < b.embedder_name;
              });

    std::size_t accepted = 0;
    std::size_t accepted_correct = 0;
    result.decisions.reserve(sample_count);
    for (std::size_t i = 0; i < sample_count; ++i) {
        CombinedDecision decision;
        decision.sample_id = preds.records[i].sample_id;
        for (const auto& ranked : result.plan.ordered_models) {
            const auto& data = by_name.at(ranked.embedder_name);
            if (data.nth[i] <= data.threshold) {
                decision.accepted_by = ranked.embedder_name;
                break;
            }
        }
        if (decision.accepted_by) {
            ++accepted;
            if (preds.records[i].correct()) ++accepted_correct;
        }
        result.decisions.push_back(std::move(decision));
    }

    result.total_coverage = static_cast<double>(accepted) / static_cast<double>(sample_count);
    result.accuracy =
        accepted == 0 ? 0.0 : static_cast<double>(accepted_correct) / static_cast<double>(accepted);
    for (auto& d : result.decisions) d.total_coverage = result.total_coverage;
    return result;
}

}  // namespace confgate
