#pragma once

// Every CLI command records what it ran with: argv-level config, content
// hashes of the declared inputs, tool version and wall time. Manifests are
// metadata and may be overwritten, unlike data outputs.

#include <map>
#include <string>

#include <json.hpp>

namespace confgate {

struct RunManifest {
    std::string command;
    nlohmann::json config = nlohmann::json::object();
    std::map<std::string, std::string> input_hashes;  // path -> sha256
    double wall_seconds = 0.0;
};

nlohmann::json manifest_to_json(const RunManifest& manifest);

// `<out>.manifest.json` next to a file output, `manifest.json` inside a
// directory output.
std::string manifest_path_for_file(const std::string& out_path);
std::string manifest_path_for_dir(const std::string& out_dir);

void write_run_manifest(const std::string& path, const RunManifest& manifest);

}  // namespace confgate
