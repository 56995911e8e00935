// confgate — confidence gating for classifier predictions by base-embedding
// neighbor density, with confidence-curve and gain evaluation.
//
// Subcommands wire the pipeline end to end:
//   synth -> index -> neighbors -> curve/gain/tune -> combine -> report
//
// Progress goes to stderr; machine-readable results go to files only. Every
// command writes a run manifest next to its outputs. Exit codes: 0 success,
// 1 validation failure, 2 I/O failure.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "confgate/gate.hpp"
#include "confgate/hash.hpp"
#include "confgate/io.hpp"
#include "confgate/manifest.hpp"
#include "confgate/metrics.hpp"
#include "confgate/synth.hpp"
#include "confgate/tuner.hpp"
#include "confgate/types.hpp"
#include "confgate/vecstore.hpp"
#include "confgate/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void ensure_parent_dir(const std::string& path) {
    const auto parent = fs::path(path).parent_path();
    if (!parent.empty()) {
        std::error_code ec;
        fs::create_directories(parent, ec);
        if (ec) {
            throw confgate::IoError("cannot create directory " + parent.string() + ": " +
                                    ec.message());
        }
    }
}

class ManifestRecorder {
public:
    explicit ManifestRecorder(std::string command) : start_(std::chrono::steady_clock::now()) {
        manifest_.command = std::move(command);
    }

    void input(const std::string& path) { manifest_.input_hashes[path] = confgate::sha256_file(path); }
    void config(const std::string& key, json value) { manifest_.config[key] = std::move(value); }

    void finish_file(const std::string& out_path) {
        finish(confgate::manifest_path_for_file(out_path));
    }
    void finish_dir(const std::string& out_dir) {
        finish(confgate::manifest_path_for_dir(out_dir));
    }

private:
    void finish(const std::string& manifest_path) {
        manifest_.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        confgate::write_run_manifest(manifest_path, manifest_);
    }

    confgate::RunManifest manifest_;
    std::chrono::steady_clock::time_point start_;
};

struct SplitSelection {
    std::string split_path;
    std::string subset;

    bool active() const { return !split_path.empty(); }

    void add_options(CLI::App* cmd) {
        cmd->add_option("--split", split_path, "split file restricting the evaluated samples");
        cmd->add_option("--subset", subset, "split name to evaluate (requires --split)");
    }

    void apply(confgate::NeighborCache& cache, confgate::PredictionSet& preds,
               ManifestRecorder& rec) const {
        if (!active()) {
            if (!subset.empty()) {
                throw confgate::ValidationError("--subset requires --split");
            }
            return;
        }
        if (subset.empty()) {
            throw confgate::ValidationError("--split requires --subset");
        }
        const auto split = confgate::read_split_file(split_path);
        rec.input(split_path);
        auto it = split.find(subset);
        if (it == split.end()) {
            throw confgate::ValidationError(split_path + ": no split named '" + subset + "'");
        }
        preds = confgate::filter_predictions(preds, it->second);
        cache = confgate::filter_cache(cache, it->second);
    }
};

std::string format_count(std::size_t n) { return std::to_string(n); }

// ---------------------------------------------------------------- index --

struct IndexOpts {
    std::string base_path;
    std::string out_path;
};

void run_index(const IndexOpts& opts) {
    ManifestRecorder rec("index");
    const auto base = confgate::read_embedding_set(opts.base_path);
    rec.input(opts.base_path);
    rec.config("base", opts.base_path);
    rec.config("out", opts.out_path);

    const auto index = confgate::build_index(base);

    confgate::EmbeddingSet normalized;
    normalized.name = index.base_set_name();
    normalized.dim = index.dim();
    normalized.items.reserve(index.rows());
    for (std::size_t i = 0; i < index.rows(); ++i) {
        const auto row = index.row(i);
        normalized.items.push_back(
            {index.row_ids()[i], std::vector<double>(row.begin(), row.end())});
    }
    ensure_parent_dir(opts.out_path);
    confgate::write_embedding_file(opts.out_path, normalized);
    rec.finish_file(opts.out_path);
    std::cerr << "indexed " << format_count(index.rows()) << " vectors (dim " << index.dim()
              << ") -> " << opts.out_path << "\n";
}

// ------------------------------------------------------------ neighbors --

struct NeighborsOpts {
    std::string index_path;
    std::string queries_path;
    std::string embedder;
    std::size_t k = 1000;
    int threads = 0;
    std::string out_path;
};

void run_neighbors(const NeighborsOpts& opts) {
    ManifestRecorder rec("neighbors");
    const auto base = confgate::read_embedding_set(opts.index_path);
    const auto queries = confgate::read_embedding_set(opts.queries_path);
    rec.input(opts.index_path);
    rec.input(opts.queries_path);
    rec.config("index", opts.index_path);
    rec.config("queries", opts.queries_path);
    rec.config("k", opts.k);
    rec.config("threads", opts.threads);
    rec.config("out", opts.out_path);
    if (!opts.embedder.empty()) rec.config("embedder", opts.embedder);

    const auto index = confgate::build_index(base);
    const auto cache =
        confgate::build_neighbor_cache(index, queries, opts.k, opts.embedder, opts.threads);
    ensure_parent_dir(opts.out_path);
    confgate::write_neighbor_cache_file(opts.out_path, cache);
    rec.finish_file(opts.out_path);
    std::cerr << "cached " << cache.k << " neighbors for " << format_count(cache.entries.size())
              << " queries -> " << opts.out_path << "\n";
}

// ---------------------------------------------------------------- curve --

struct CurveOpts {
    std::string cache_path;
    std::string preds_path;
    std::uint32_t n = 1;
    SplitSelection split;
    std::string out_path;
};

void run_curve(const CurveOpts& opts) {
    ManifestRecorder rec("curve");
    auto cache = confgate::read_neighbor_cache_file(opts.cache_path);
    auto preds = confgate::read_prediction_file(opts.preds_path);
    rec.input(opts.cache_path);
    rec.input(opts.preds_path);
    rec.config("cache", opts.cache_path);
    rec.config("preds", opts.preds_path);
    rec.config("n", opts.n);
    rec.config("out", opts.out_path);
    opts.split.apply(cache, preds, rec);

    const auto curve = confgate::confidence_curve(cache, preds, opts.n);
    ensure_parent_dir(opts.out_path);
    confgate::write_curve_csv(opts.out_path, curve);
    rec.finish_file(opts.out_path);
    std::cerr << "curve with " << format_count(curve.points.size()) << " points (acc_b "
              << curve.acc_b << ") -> " << opts.out_path << "\n";
}

// ----------------------------------------------------------------- gain --

struct GainOpts {
    std::string cache_path;
    std::string preds_path;
    std::string from_curve;
    std::uint32_t n = 1;
    bool n_given = false;
    confgate::IntegrationConfig cfg;
    SplitSelection split;
    std::string out_path;
};

void run_gain(const GainOpts& opts) {
    ManifestRecorder rec("gain");
    rec.config("coverage_floor", opts.cfg.coverage_floor);
    rec.config("extrap_points", opts.cfg.extrapolation_points);
    rec.config("out", opts.out_path);

    confgate::ConfidenceCurve curve;
    json context = json::object();
    if (!opts.from_curve.empty()) {
        if (!opts.cache_path.empty() || !opts.preds_path.empty() || opts.n_given) {
            throw confgate::ValidationError("--from-curve excludes --cache/--preds/--n");
        }
        curve = confgate::read_curve_csv(opts.from_curve);
        rec.input(opts.from_curve);
        rec.config("from_curve", opts.from_curve);
        context["source"] = opts.from_curve;
    } else {
        if (opts.cache_path.empty() || opts.preds_path.empty()) {
            throw confgate::ValidationError("gain needs --cache and --preds (or --from-curve)");
        }
        auto cache = confgate::read_neighbor_cache_file(opts.cache_path);
        auto preds = confgate::read_prediction_file(opts.preds_path);
        rec.input(opts.cache_path);
        rec.input(opts.preds_path);
        rec.config("cache", opts.cache_path);
        rec.config("preds", opts.preds_path);
        rec.config("n", opts.n);
        opts.split.apply(cache, preds, rec);
        curve = confgate::confidence_curve(cache, preds, opts.n);
        context["classifier"] = preds.classifier_name;
        context["embedder"] = cache.embedder_name;
        context["n"] = opts.n;
    }

    curve = confgate::extrapolate_to_full_coverage(curve, opts.cfg);
    const auto report = confgate::confidence_gain(curve, opts.cfg);

    json out = confgate::gain_report_to_json(report);
    for (const auto& [key, value] : context.items()) out[key] = value;
    ensure_parent_dir(opts.out_path);
    confgate::write_json_file(opts.out_path, out);
    rec.finish_file(opts.out_path);
    std::cerr << "normalized confidence gain " << report.normalized_confidence_gain << " -> "
              << opts.out_path << "\n";
}

// ----------------------------------------------------------------- tune --

struct TuneOpts {
    std::string cache_path;
    std::string preds_path;
    std::string grid_spec;
    confgate::IntegrationConfig cfg;
    SplitSelection split;
    std::string out_path;
};

void run_tune(const TuneOpts& opts) {
    ManifestRecorder rec("tune");
    auto cache = confgate::read_neighbor_cache_file(opts.cache_path);
    auto preds = confgate::read_prediction_file(opts.preds_path);
    rec.input(opts.cache_path);
    rec.input(opts.preds_path);
    rec.config("cache", opts.cache_path);
    rec.config("preds", opts.preds_path);
    rec.config("coverage_floor", opts.cfg.coverage_floor);
    rec.config("extrap_points", opts.cfg.extrapolation_points);
    rec.config("out", opts.out_path);
    opts.split.apply(cache, preds, rec);

    std::vector<std::uint32_t> grid;
    if (!opts.grid_spec.empty()) {
        grid = confgate::parse_n_grid(opts.grid_spec);  // values beyond depth are an error
        rec.config("n_grid", opts.grid_spec);
    } else {
        // Default grid, clamped to the cache depth.
        for (std::uint32_t n = 1; n <= std::min<std::uint32_t>(100, cache.k); ++n) {
            grid.push_back(n);
        }
        for (std::uint32_t n : {150u, 200u}) {
            if (n <= cache.k) grid.push_back(n);
        }
        rec.config("n_grid", "default");
    }

    const auto result = confgate::tune_n(cache, preds, grid, opts.cfg);
    ensure_parent_dir(opts.out_path);
    confgate::write_json_file(opts.out_path, confgate::tune_result_to_json(result));
    rec.finish_file(opts.out_path);
    std::cerr << "best n " << result.best_n << " (normalized gain "
              << result.best().normalized_confidence_gain << ") -> " << opts.out_path << "\n";
}

// -------------------------------------------------------------- combine --

struct CombineOpts {
    std::string plan_path;
    std::string preds_path;
    double coverage = 0.0;
    bool coverage_given = false;
    std::string coverage_grid;
    SplitSelection split;
    std::string out_path;
};

std::vector<double> parse_coverage_grid(const std::string& spec) {
    std::vector<double> grid;
    std::size_t start = 0;
    while (start <= spec.size()) {
        const auto comma = spec.find(',', start);
        const auto tok = spec.substr(start, comma == std::string::npos ? std::string::npos
                                                                       : comma - start);
        if (tok.empty()) {
            throw confgate::ValidationError("empty token in coverage grid '" + spec + "'");
        }
        try {
            std::size_t used = 0;
            const double v = std::stod(tok, &used);
            if (used != tok.size()) throw std::invalid_argument(tok);
            grid.push_back(v);
        } catch (const std::exception&) {
            throw confgate::ValidationError("bad coverage '" + tok + "' in grid '" + spec + "'");
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return grid;
}

void run_combine(const CombineOpts& opts) {
    ManifestRecorder rec("combine");
    const auto plan = confgate::read_json_file(opts.plan_path);
    rec.input(opts.plan_path);
    rec.config("plan", opts.plan_path);
    rec.config("preds", opts.preds_path);
    rec.config("out", opts.out_path);

    if (!plan.is_object() || !plan.contains("models") || !plan.at("models").is_array() ||
        plan.at("models").empty()) {
        throw confgate::ValidationError(opts.plan_path +
                                        ": plan needs a non-empty 'models' array");
    }

    auto preds = confgate::read_prediction_file(opts.preds_path);
    rec.input(opts.preds_path);

    std::vector<std::unique_ptr<confgate::NeighborCache>> caches;
    std::vector<confgate::CombineInput> inputs;
    std::map<std::string, double> gains;
    for (const auto& model : plan.at("models")) {
        const auto embedder = model.value("embedder", "");
        const auto cache_path = model.value("cache", "");
        if (embedder.empty() || cache_path.empty() || !model.contains("best_n") ||
            !model.contains("train_ncg")) {
            throw confgate::ValidationError(
                opts.plan_path + ": every model needs embedder, cache, best_n and train_ncg");
        }
        caches.push_back(std::make_unique<confgate::NeighborCache>(
            confgate::read_neighbor_cache_file(cache_path)));
        rec.input(cache_path);
        if (!opts.split.split_path.empty()) {
            // Quantiles must range over the evaluated samples only.
            *caches.back() = confgate::filter_cache(
                *caches.back(),
                confgate::read_split_file(opts.split.split_path).at(opts.split.subset));
        }
        inputs.push_back({embedder, caches.back().get(), model.at("best_n").get<std::uint32_t>()});
        gains[embedder] = model.at("train_ncg").get<double>();
    }

    if (!opts.split.split_path.empty()) {
        if (opts.split.subset.empty()) {
            throw confgate::ValidationError("--split requires --subset");
        }
        const auto split = confgate::read_split_file(opts.split.split_path);
        rec.input(opts.split.split_path);
        auto it = split.find(opts.split.subset);
        if (it == split.end()) {
            throw confgate::ValidationError(opts.split.split_path + ": no split named '" +
                                            opts.split.subset + "'");
        }
        preds = confgate::filter_predictions(preds, it->second);
    }

    std::vector<double> coverages;
    if (opts.coverage_given && !opts.coverage_grid.empty()) {
        throw confgate::ValidationError("--coverage and --coverage-grid are mutually exclusive");
    }
    if (opts.coverage_given) {
        coverages.push_back(opts.coverage);
        rec.config("coverage", opts.coverage);
    } else if (!opts.coverage_grid.empty()) {
        coverages = parse_coverage_grid(opts.coverage_grid);
        rec.config("coverage_grid", opts.coverage_grid);
    } else {
        throw confgate::ValidationError("combine needs --coverage or --coverage-grid");
    }

    std::string csv = "per_model_coverage,total_coverage,accuracy\n";
    char buf[128];
    for (double c : coverages) {
        const auto result = confgate::combine(inputs, preds, c, gains);
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", c, result.total_coverage,
                      result.accuracy);
        csv += buf;
    }
    ensure_parent_dir(opts.out_path);
    confgate::write_file_exclusive(opts.out_path, csv.data(), csv.size());
    rec.finish_file(opts.out_path);
    std::cerr << "combined " << inputs.size() << " models over " << coverages.size()
              << " coverage values -> " << opts.out_path << "\n";
}

// ---------------------------------------------------------------- synth --

struct SynthOpts {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_given = false;
};

void run_synth(const SynthOpts& opts) {
    ManifestRecorder rec("synth");
    auto cfg = confgate::parse_synth_config(confgate::read_json_file(opts.config_path));
    rec.input(opts.config_path);
    rec.config("config", opts.config_path);
    rec.config("out_dir", opts.out_dir);
    if (opts.seed_given) {
        cfg.seed = opts.seed;
        rec.config("seed", opts.seed);
    }

    std::error_code ec;
    fs::create_directories(opts.out_dir, ec);
    if (ec) {
        throw confgate::IoError("cannot create directory " + opts.out_dir + ": " + ec.message());
    }
    const fs::path dir(opts.out_dir);

    // The prediction format carries no classifier field; readers recover the
    // name from the file stem, so the file is named after the classifier.
    const auto preds = confgate::synth_predictions(cfg);
    confgate::write_prediction_file((dir / (cfg.classifier_name + ".csv")).string(), preds);

    for (const auto& space : confgate::synth_spaces(cfg)) {
        const auto [base, queries] = confgate::synth_space(cfg, space);
        confgate::write_embedding_file((dir / ("base_" + space.name + ".ceb")).string(), base);
        confgate::write_embedding_file((dir / ("queries_" + space.name + ".ceb")).string(),
                                       queries);
        std::cerr << "space " << space.name << ": " << format_count(base.items.size())
                  << " base + " << format_count(queries.items.size()) << " query vectors\n";
    }
    rec.finish_dir(opts.out_dir);
    std::cerr << "synthetic dataset (" << format_count(preds.records.size())
              << " predictions) -> " << opts.out_dir << "\n";
}

// ---------------------------------------------------------------- split --

struct SplitOpts {
    std::string preds_path;
    double train_fraction = 0.75;
    std::size_t subsets = 3;
    std::uint64_t seed = 0;
    std::string out_path;
};

void run_split(const SplitOpts& opts) {
    ManifestRecorder rec("split");
    const auto preds = confgate::read_prediction_file(opts.preds_path);
    rec.input(opts.preds_path);
    rec.config("preds", opts.preds_path);
    rec.config("train_fraction", opts.train_fraction);
    rec.config("subsets", opts.subsets);
    rec.config("seed", opts.seed);
    rec.config("out", opts.out_path);

    const auto split = confgate::make_split(preds, opts.train_fraction, opts.subsets, opts.seed);
    ensure_parent_dir(opts.out_path);
    confgate::write_split_file(opts.out_path, split);
    rec.finish_file(opts.out_path);
    std::cerr << "split " << format_count(split.at("train").size()) << " train / "
              << format_count(preds.records.size() - split.at("train").size()) << " test over "
              << opts.subsets << " subsets -> " << opts.out_path << "\n";
}

// --------------------------------------------------------------- report --

struct ReportOpts {
    std::string run_dir;
    std::string out_dir;
};

void run_report(const ReportOpts& opts) {
    ManifestRecorder rec("report");
    rec.config("run_dir", opts.run_dir);
    rec.config("out_dir", opts.out_dir);

    if (!fs::is_directory(opts.run_dir)) {
        throw confgate::IoError(opts.run_dir + " is not a directory");
    }

    std::vector<std::string> json_paths;
    for (const auto& entry : fs::directory_iterator(opts.run_dir)) {
        if (!entry.is_regular_file()) continue;
        const auto path = entry.path().string();
        if (!path.ends_with(".json") || path.ends_with(".manifest.json")) continue;
        json_paths.push_back(path);
    }
    std::sort(json_paths.begin(), json_paths.end());

    std::vector<confgate::TuneResult> tunes;
    // classifier, embedder, n, report
    std::vector<std::tuple<std::string, std::string, std::uint32_t, confgate::GainReport>> gains;
    for (const auto& path : json_paths) {
        const auto j = confgate::read_json_file(path);
        const auto type = j.value("type", "");
        if (type == "tune_result") {
            tunes.push_back(confgate::tune_result_from_json(j));
            rec.input(path);
        } else if (type == "gain_report") {
            gains.emplace_back(j.value("classifier", ""), j.value("embedder", ""),
                               j.value("n", 0u), confgate::gain_report_from_json(j));
            rec.input(path);
        }
    }

    std::error_code ec;
    fs::create_directories(opts.out_dir, ec);
    if (ec) {
        throw confgate::IoError("cannot create directory " + opts.out_dir + ": " + ec.message());
    }
    const fs::path dir(opts.out_dir);

    // best-n table: rows are classifiers, columns embedders, cells "n / ncg".
    std::map<std::string, std::map<std::string, const confgate::TuneResult*>> table;
    std::map<std::string, bool> embedders;
    for (const auto& t : tunes) {
        table[t.classifier_name][t.embedder_name] = &t;
        embedders[t.embedder_name] = true;
    }
    std::string table_csv = "classifier";
    for (const auto& [name, _] : embedders) table_csv += "," + name;
    table_csv += "\n";
    char buf[128];
    for (const auto& [classifier, row] : table) {
        table_csv += classifier;
        for (const auto& [embedder, _] : embedders) {
            table_csv.push_back(',');
            auto it = row.find(embedder);
            if (it != row.end()) {
                std::snprintf(buf, sizeof(buf), "%u / %.3f", it->second->best_n,
                              it->second->best().normalized_confidence_gain);
                table_csv += buf;
            }
        }
        table_csv += "\n";
    }
    confgate::write_file_exclusive((dir / "ncg_table.csv").string(), table_csv.data(),
                                   table_csv.size());

    // flat listing: tuned bests plus standalone gain reports.
    std::string gains_csv =
        "classifier,embedder,n,acc_b,confidence_gain,max_confidence_gain,"
        "normalized_confidence_gain\n";
    auto add_gain_row = [&](const std::string& classifier, const std::string& embedder,
                            std::uint32_t n, const confgate::GainReport& r) {
        std::snprintf(buf, sizeof(buf), ",%u,%.17g,%.17g,%.17g,%.17g\n", n, r.acc_b,
                      r.confidence_gain, r.max_confidence_gain, r.normalized_confidence_gain);
        gains_csv += classifier + "," + embedder + buf;
    };
    for (const auto& t : tunes) {
        add_gain_row(t.classifier_name, t.embedder_name, t.best_n, t.best());
    }
    for (const auto& [classifier, embedder, n, report] : gains) {
        add_gain_row(classifier, embedder, n, report);
    }
    confgate::write_file_exclusive((dir / "gains.csv").string(), gains_csv.data(),
                                   gains_csv.size());

    rec.finish_dir(opts.out_dir);
    std::cerr << "report over " << tunes.size() << " tune results and " << gains.size()
              << " gain reports -> " << opts.out_dir << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"confidence gating via embedding-space neighbor density"};
    app.set_version_flag("--version", confgate::kToolVersion);
    app.require_subcommand(1);

    IndexOpts index_opts;
    auto* cmd_index = app.add_subcommand("index", "normalize base embeddings into an index file");
    cmd_index->add_option("--base", index_opts.base_path, "base embedding file")->required();
    cmd_index->add_option("--out", index_opts.out_path, "output index file")->required();
    cmd_index->callback([&] { run_index(index_opts); });

    NeighborsOpts nb_opts;
    auto* cmd_neighbors =
        app.add_subcommand("neighbors", "build the k-nearest-neighbor cache for a query set");
    cmd_neighbors->add_option("--index", nb_opts.index_path, "index file")->required();
    cmd_neighbors->add_option("--queries", nb_opts.queries_path, "query embedding file")
        ->required();
    cmd_neighbors->add_option("--k", nb_opts.k, "neighbors to cache per query")
        ->default_val(std::size_t{1000});
    cmd_neighbors->add_option("--embedder", nb_opts.embedder,
                              "embedder name recorded in the cache (default: base set name)");
    cmd_neighbors->add_option("--threads", nb_opts.threads,
                              "worker threads (0 = hardware concurrency)");
    cmd_neighbors->add_option("--out", nb_opts.out_path, "output cache file")->required();
    cmd_neighbors->callback([&] { run_neighbors(nb_opts); });

    CurveOpts curve_opts;
    auto* cmd_curve = app.add_subcommand("curve", "trace the confidence curve for a fixed n");
    cmd_curve->add_option("--cache", curve_opts.cache_path, "neighbor cache file")->required();
    cmd_curve->add_option("--preds", curve_opts.preds_path, "prediction CSV")->required();
    cmd_curve->add_option("--n", curve_opts.n, "required neighbor count")->required();
    curve_opts.split.add_options(cmd_curve);
    cmd_curve->add_option("--out", curve_opts.out_path, "output curve CSV")->required();
    cmd_curve->callback([&] { run_curve(curve_opts); });

    GainOpts gain_opts;
    auto* cmd_gain = app.add_subcommand("gain", "compute the normalized confidence gain");
    cmd_gain->add_option("--cache", gain_opts.cache_path, "neighbor cache file");
    cmd_gain->add_option("--preds", gain_opts.preds_path, "prediction CSV");
    cmd_gain->add_option("--n", gain_opts.n, "required neighbor count")
        ->each([&](const std::string&) { gain_opts.n_given = true; });
    cmd_gain->add_option("--from-curve", gain_opts.from_curve,
                         "integrate an existing curve CSV instead of cache + predictions");
    cmd_gain->add_option("--coverage-floor", gain_opts.cfg.coverage_floor,
                         "lower integration bound")
        ->default_val(0.1);
    cmd_gain->add_option("--extrap-points", gain_opts.cfg.extrapolation_points,
                         "tail points for the extrapolation line")
        ->default_val(20);
    gain_opts.split.add_options(cmd_gain);
    cmd_gain->add_option("--out", gain_opts.out_path, "output report JSON")->required();
    cmd_gain->callback([&] { run_gain(gain_opts); });

    TuneOpts tune_opts;
    auto* cmd_tune = app.add_subcommand("tune", "pick the n maximizing the normalized gain");
    cmd_tune->add_option("--cache", tune_opts.cache_path, "neighbor cache file")->required();
    cmd_tune->add_option("--preds", tune_opts.preds_path, "prediction CSV")->required();
    cmd_tune->add_option("--n-grid", tune_opts.grid_spec,
                         "candidate n values, e.g. 1..100,150,200 (default, clamped to depth)");
    cmd_tune->add_option("--coverage-floor", tune_opts.cfg.coverage_floor,
                         "lower integration bound")
        ->default_val(0.1);
    cmd_tune->add_option("--extrap-points", tune_opts.cfg.extrapolation_points,
                         "tail points for the extrapolation line")
        ->default_val(20);
    tune_opts.split.add_options(cmd_tune);
    cmd_tune->add_option("--out", tune_opts.out_path, "output tune result JSON")->required();
    cmd_tune->callback([&] { run_tune(tune_opts); });

    CombineOpts combine_opts;
    auto* cmd_combine =
        app.add_subcommand("combine", "greedy union of several embedding spaces' acceptances");
    cmd_combine->add_option("--plan", combine_opts.plan_path,
                            "JSON plan: models with embedder, cache, best_n, train_ncg")
        ->required();
    cmd_combine->add_option("--preds", combine_opts.preds_path, "prediction CSV")->required();
    cmd_combine->add_option("--coverage", combine_opts.coverage, "per-model coverage")
        ->each([&](const std::string&) { combine_opts.coverage_given = true; });
    cmd_combine->add_option("--coverage-grid", combine_opts.coverage_grid,
                            "comma-separated per-model coverages");
    combine_opts.split.add_options(cmd_combine);
    cmd_combine->add_option("--out", combine_opts.out_path, "output CSV")->required();
    cmd_combine->callback([&] { run_combine(combine_opts); });

    SynthOpts synth_opts;
    auto* cmd_synth = app.add_subcommand("synth", "generate a seeded synthetic dataset");
    cmd_synth->add_option("--config", synth_opts.config_path, "synth config JSON")->required();
    cmd_synth->add_option("--out-dir", synth_opts.out_dir, "output directory")->required();
    cmd_synth->add_option("--seed", synth_opts.seed, "override the config seed")
        ->each([&](const std::string&) { synth_opts.seed_given = true; });
    cmd_synth->callback([&] { run_synth(synth_opts); });

    SplitOpts split_opts;
    auto* cmd_split = app.add_subcommand("split", "materialize a seeded train/test split");
    cmd_split->add_option("--preds", split_opts.preds_path, "prediction CSV")->required();
    cmd_split->add_option("--train-fraction", split_opts.train_fraction, "train share")
        ->default_val(0.75);
    cmd_split->add_option("--subsets", split_opts.subsets, "label-disjoint test subsets")
        ->default_val(std::size_t{3});
    cmd_split->add_option("--seed", split_opts.seed, "shuffle seed")->default_val(std::uint64_t{0});
    cmd_split->add_option("--out", split_opts.out_path, "output split JSON")->required();
    cmd_split->callback([&] { run_split(split_opts); });

    ReportOpts report_opts;
    auto* cmd_report =
        app.add_subcommand("report", "collate tune/gain JSON outputs into plot-ready CSV");
    cmd_report->add_option("--run-dir", report_opts.run_dir, "directory with command outputs")
        ->required();
    cmd_report->add_option("--out-dir", report_opts.out_dir, "output directory")->required();
    cmd_report->callback([&] { run_report(report_opts); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const confgate::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const confgate::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
