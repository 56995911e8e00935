#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "confgate/gate.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace confgate;

namespace {

NeighborCache tiny_cache() {
    NeighborCache cache;
    cache.base_set_name = "base";
    cache.embedder_name = "emb";
    cache.k = 3;
    cache.entries.push_back(fixtures::make_entry("q", {0.1, 0.2, 0.3}));
    return cache;
}

PredictionSet preds_for(const NeighborCache& cache, const std::vector<bool>& correct) {
    PredictionSet preds;
    preds.classifier_name = "clf";
    for (std::size_t i = 0; i < cache.entries.size(); ++i) {
        preds.records.push_back({cache.entries[i].sample_id, correct[i] ? "y" : "n", "y"});
    }
    return preds;
}

std::set<std::string> accepted_ids(const GateDecisionSet& decisions) {
    std::set<std::string> ids;
    for (const auto& d : decisions.decisions) {
        if (d.accepted) ids.insert(d.sample_id);
    }
    return ids;
}

}  // namespace

TEST_CASE("nth neighbor distance indexes the sorted entry") {
    const auto cache = tiny_cache();
    CHECK(nth_neighbor_distance(cache, "q", 1) == doctest::Approx(0.1));
    CHECK(nth_neighbor_distance(cache, "q", 3) == doctest::Approx(0.3));
    CHECK_THROWS_AS(nth_neighbor_distance(cache, "q", 4), ValidationError);
    CHECK_THROWS_AS(nth_neighbor_distance(cache, "q", 0), ValidationError);
    CHECK_THROWS_AS(nth_neighbor_distance(cache, "nope", 1), ValidationError);
}

TEST_CASE("nth neighbor distance equals the sort oracle on random entries") {
    std::mt19937_64 rng(31);
    const auto cache = fixtures::random_cache(rng, 20, 15);
    for (const auto& entry : cache.entries) {
        std::vector<double> sorted;
        for (const auto& nb : entry.neighbors) sorted.push_back(nb.distance);
        std::sort(sorted.begin(), sorted.end());
        for (std::uint32_t n = 1; n <= 15; ++n) {
            CHECK(nth_neighbor_distance(cache, entry.sample_id, n) == sorted[n - 1]);
        }
    }
}

TEST_CASE("maximal threshold accepts everything, sub-minimal accepts nothing") {
    std::mt19937_64 rng(32);
    const auto cache = fixtures::random_cache(rng, 25, 10);

    const auto all = decide(cache, {3, 2.0});
    CHECK(all.accepted_count() == 25);
    CHECK(all.coverage() == 1.0);

    double min_nth = 2.0;
    for (const auto& e : cache.entries) min_nth = std::min(min_nth, e.neighbors[2].distance);
    const auto none = decide(cache, {3, min_nth - 1e-6});
    CHECK(none.accepted_count() == 0);
}

TEST_CASE("decide agrees with the counting oracle") {
    std::mt19937_64 rng(33);
    for (int trial = 0; trial < 50; ++trial) {
        const auto cache = fixtures::random_cache(rng, 30, 8);
        const GateParams params{static_cast<std::uint32_t>(1 + rng() % 8),
                                fixtures::uniform(rng, 0.0, 2.0)};
        const auto decisions = decide(cache, params);
        REQUIRE(decisions.decisions.size() == cache.entries.size());
        for (std::size_t i = 0; i < cache.entries.size(); ++i) {
            CHECK(decisions.decisions[i].accepted ==
                  oracles::counting_accept(cache.entries[i], params.l_threshold, params.n));
        }
    }
}

TEST_CASE("curve matches the hand-enumerated sweep") {
    NeighborCache cache;
    cache.base_set_name = "base";
    cache.embedder_name = "emb";
    cache.k = 1;
    cache.entries.push_back(fixtures::make_entry("a", {0.1}));
    cache.entries.push_back(fixtures::make_entry("b", {0.2}));
    cache.entries.push_back(fixtures::make_entry("c", {0.3}));
    cache.entries.push_back(fixtures::make_entry("d", {0.4}));
    const auto preds = preds_for(cache, {true, true, false, true});

    const auto curve = confidence_curve(cache, preds, 1);
    REQUIRE(curve.points.size() == 4);
    CHECK(curve.points[0].coverage == doctest::Approx(0.25));
    CHECK(curve.points[0].accuracy == doctest::Approx(1.0));
    CHECK(curve.points[1].coverage == doctest::Approx(0.5));
    CHECK(curve.points[1].accuracy == doctest::Approx(1.0));
    CHECK(curve.points[2].coverage == doctest::Approx(0.75));
    CHECK(curve.points[2].accuracy == doctest::Approx(2.0 / 3.0));
    CHECK(curve.points[3].coverage == 1.0);
    CHECK(curve.points[3].accuracy == doctest::Approx(0.75));
    CHECK(curve.acc_b == doctest::Approx(0.75));
}

TEST_CASE("all-correct predictions give a constant-1 curve") {
    std::mt19937_64 rng(34);
    const auto cache = fixtures::random_cache(rng, 40, 6);
    const auto preds = preds_for(cache, std::vector<bool>(40, true));
    const auto curve = confidence_curve(cache, preds, 2);
    for (const auto& p : curve.points) CHECK(p.accuracy == 1.0);
}

TEST_CASE("all-equal nth distances collapse to the single full-coverage point") {
    NeighborCache cache;
    cache.base_set_name = "base";
    cache.embedder_name = "emb";
    cache.k = 2;
    for (int i = 0; i < 5; ++i) {
        cache.entries.push_back(fixtures::make_entry("s" + std::to_string(i), {0.05, 0.5}));
    }
    const auto preds = preds_for(cache, {true, false, true, false, true});
    const auto curve = confidence_curve(cache, preds, 2);
    REQUIRE(curve.points.size() == 1);
    CHECK(curve.points[0].coverage == 1.0);
    CHECK(curve.points[0].accuracy == doctest::Approx(0.6));
}

TEST_CASE("id mismatches are hard errors") {
    std::mt19937_64 rng(35);
    const auto cache = fixtures::random_cache(rng, 10, 4);
    auto preds = preds_for(cache, std::vector<bool>(10, true));

    SUBCASE("empty predictions") {
        PredictionSet empty;
        CHECK_THROWS_AS(confidence_curve(cache, empty, 1), ValidationError);
    }
    SUBCASE("renamed prediction id") {
        preds.records[3].sample_id = "stranger";
        CHECK_THROWS_AS(confidence_curve(cache, preds, 1), ValidationError);
    }
    SUBCASE("missing prediction") {
        preds.records.pop_back();
        CHECK_THROWS_AS(confidence_curve(cache, preds, 1), ValidationError);
    }
}

TEST_CASE("acceptance sets nest in L and anti-nest in N") {
    std::mt19937_64 rng(36);
    for (int trial = 0; trial < 200; ++trial) {
        const auto cache = fixtures::random_cache(rng, 30, 8);
        const double l1 = fixtures::uniform(rng, 0.0, 2.0);
        const double l2 = fixtures::uniform(rng, l1, 2.0);
        const auto n1 = static_cast<std::uint32_t>(1 + rng() % 8);
        const auto n2 = static_cast<std::uint32_t>(n1 + rng() % (9 - n1));

        const auto a1 = accepted_ids(decide(cache, {n1, l1}));
        const auto a2 = accepted_ids(decide(cache, {n1, l2}));
        CHECK(std::includes(a2.begin(), a2.end(), a1.begin(), a1.end()));

        const auto b1 = accepted_ids(decide(cache, {n1, l1}));
        const auto b2 = accepted_ids(decide(cache, {n2, l1}));
        CHECK(std::includes(b1.begin(), b1.end(), b2.begin(), b2.end()));
    }
}

TEST_CASE("curve coverages increase strictly and end at (1, acc_b)") {
    std::mt19937_64 rng(37);
    for (int trial = 0; trial < 100; ++trial) {
        const auto cache = fixtures::random_cache(rng, 25, 5);
        const auto preds = fixtures::random_predictions(rng, cache, 0.7);
        const auto curve = confidence_curve(cache, preds, static_cast<std::uint32_t>(1 + rng() % 5));
        for (std::size_t i = 1; i < curve.points.size(); ++i) {
            CHECK(curve.points[i].coverage > curve.points[i - 1].coverage);
        }
        CHECK(curve.points.back().coverage == 1.0);
        CHECK(curve.points.back().accuracy == curve.acc_b);
        CHECK(curve.acc_b == preds.benchmark_accuracy());
    }
}

TEST_CASE("curve sweep covers every brute-force threshold point") {
    std::mt19937_64 rng(38);
    const auto cache = fixtures::random_cache(rng, 20, 6);
    const auto preds = fixtures::random_predictions(rng, cache, 0.6);
    const std::uint32_t n = 3;
    const auto curve = confidence_curve(cache, preds, n);

    std::set<std::pair<double, double>> curve_points;
    for (const auto& p : curve.points) curve_points.emplace(p.coverage, p.accuracy);

    // Sweep 1000 evenly spaced thresholds; every nonempty acceptance set
    // must already be a curve point.
    for (int i = 0; i <= 1000; ++i) {
        const double threshold = 2.0 * i / 1000.0;
        std::size_t taken = 0, correct = 0;
        for (std::size_t s = 0; s < cache.entries.size(); ++s) {
            if (cache.entries[s].neighbors[n - 1].distance <= threshold) {
                ++taken;
                if (preds.records[s].correct()) ++correct;
            }
        }
        if (taken == 0) continue;
        const double coverage = static_cast<double>(taken) / 20.0;
        const double accuracy = static_cast<double>(correct) / static_cast<double>(taken);
        CHECK(curve_points.count({coverage, accuracy}) == 1);
    }
}
