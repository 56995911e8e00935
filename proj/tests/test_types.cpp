#include <doctest.h>

#include "confgate/types.hpp"

using namespace confgate;

namespace {

EmbeddingSet two_item_set() {
    EmbeddingSet set;
    set.name = "tiny";
    set.dim = 3;
    set.items.push_back({"a", {1.0, 0.0, 0.0}});
    set.items.push_back({"b", {0.0, 1.0, 0.0}});
    return set;
}

}  // namespace

TEST_CASE("well-formed set validates clean") {
    CHECK(validate_embedding_set(two_item_set()).empty());
}

TEST_CASE("zero-norm vector is reported with its id") {
    auto set = two_item_set();
    set.items.push_back({"z", {0.0, 0.0, 0.0}});
    const auto violations = validate_embedding_set(set);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0] == "zero-norm vector at z");
}

TEST_CASE("duplicate ids are reported") {
    auto set = two_item_set();
    set.items.push_back({"a", {0.0, 0.0, 1.0}});
    const auto violations = validate_embedding_set(set);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0] == "duplicate id a");
}

TEST_CASE("every violation is reported, not just the first") {
    EmbeddingSet set;
    set.name = "broken";
    set.dim = 2;
    set.items.push_back({"a", {1.0, 0.0}});
    set.items.push_back({"a", {0.0, 0.0}});             // duplicate AND zero norm
    set.items.push_back({"c", {1.0, 2.0, 3.0}});        // wrong dimension
    const auto violations = validate_embedding_set(set);
    CHECK(violations.size() == 3);
}

TEST_CASE("dim zero is invalid") {
    EmbeddingSet set;
    set.name = "empty";
    set.dim = 0;
    CHECK(validate_embedding_set(set).size() == 1);
}

TEST_CASE("benchmark accuracy counts exact label matches") {
    PredictionSet preds;
    preds.classifier_name = "clf";
    preds.records.push_back({"a", "cat", "cat"});
    preds.records.push_back({"b", "dog", "cat"});
    preds.records.push_back({"c", "cat", "cat"});
    preds.records.push_back({"d", "Cat", "cat"});  // case matters
    CHECK(preds.benchmark_accuracy() == doctest::Approx(0.5));
}

TEST_CASE("benchmark accuracy of an empty set throws") {
    PredictionSet preds;
    CHECK_THROWS_AS(preds.benchmark_accuracy(), ValidationError);
}

TEST_CASE("cache lookup by sample id") {
    NeighborCache cache;
    cache.k = 1;
    cache.entries.push_back({"q1", {{"b", 0.5}}});
    REQUIRE(cache.find("q1") != nullptr);
    CHECK(cache.find("q1")->neighbors[0].distance == 0.5);
    CHECK(cache.find("missing") == nullptr);
}
