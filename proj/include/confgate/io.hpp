#pragma once

// File formats and split generation. Two binary formats (embeddings and
// neighbor caches, magic "CGEB"/"CGNC"), predictions as RFC-4180 CSV,
// splits as JSON, plus CSV/JSON serialization for curves and reports.
//
// Binary layout conventions: all multi-byte integers little-endian, all
// strings u32-length-prefixed UTF-8, vector payloads f32. Readers validate
// every header field and report failures with byte offsets. Writers use
// create-new semantics: an existing output path is an error.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "confgate/types.hpp"

namespace confgate {

inline constexpr std::uint16_t kFormatVersion = 1;

// --- embeddings ---------------------------------------------------------

void write_embedding_file(const std::string& path, const EmbeddingSet& set);

// Accepts the binary format or, as an ingest fallback, CSV rows of
// `sample_id,v0,v1,...` (header row optional). CSV values are rounded to
// f32 like the binary format stores them; the set name is the file stem.
EmbeddingSet read_embedding_set(const std::string& path);

// --- predictions --------------------------------------------------------

// CSV with the exact header `sample_id,predicted_label,true_label`. The
// classifier name is the file stem (the format carries no name field).
void write_prediction_file(const std::string& path, const PredictionSet& preds);
PredictionSet read_prediction_file(const std::string& path);

// --- neighbor caches ----------------------------------------------------

void write_neighbor_cache_file(const std::string& path, const NeighborCache& cache);
NeighborCache read_neighbor_cache_file(const std::string& path);

// --- splits -------------------------------------------------------------

// Split name -> sample ids. Reserved names: "train", "internal_test_1..3",
// "external_test_1..3".
using Split = std::map<std::string, std::vector<std::string>>;

void write_split_file(const std::string& path, const Split& split);
Split read_split_file(const std::string& path);

// Seeded train/test split by sample, test labels partitioned round-robin
// (after a seeded label shuffle) into `subsets` groups so all samples of a
// label land in one group. |train| == round(train_fraction * n). Subsets
// are named "internal_test_1".."internal_test_<subsets>".
Split make_split(const PredictionSet& preds, double train_fraction, std::size_t subsets,
                 std::uint64_t seed);

// Violations: ids shared between splits, ids unknown to the predictions,
// labels spanning more than one non-train split.
std::vector<std::string> check_split(const Split& split, const PredictionSet& preds);

// Restriction of predictions / caches to a split's sample ids. Order is
// inherited from the original container; every id must be present.
PredictionSet filter_predictions(const PredictionSet& preds, const std::vector<std::string>& ids);
NeighborCache filter_cache(const NeighborCache& cache, const std::vector<std::string>& ids);

// --- curves and reports -------------------------------------------------

// CSV with header `coverage,accuracy`; doubles are written round-trip
// exact. Reading requires the final point to reach coverage 1 and sets
// acc_b from it (the sweep's full-coverage accuracy).
void write_curve_csv(const std::string& path, const ConfidenceCurve& curve);
ConfidenceCurve read_curve_csv(const std::string& path);

nlohmann::json gain_report_to_json(const GainReport& report);
GainReport gain_report_from_json(const nlohmann::json& j);

struct TuneResult;  // defined in tuner.hpp
nlohmann::json tune_result_to_json(const TuneResult& result);
TuneResult tune_result_from_json(const nlohmann::json& j);

void write_json_file(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json_file(const std::string& path);

// --- low-level helpers --------------------------------------------------

std::vector<unsigned char> read_file_bytes(const std::string& path);
// Fails if the path already exists (IoError) so concurrent writers cannot
// clobber each other.
void write_file_exclusive(const std::string& path, const void* data, std::size_t size);

}  // namespace confgate
