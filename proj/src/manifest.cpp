#include "confgate/manifest.hpp"

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <filesystem>

#include "confgate/types.hpp"
#include "confgate/version.hpp"

namespace confgate {

nlohmann::json manifest_to_json(const RunManifest& manifest) {
    nlohmann::json hashes = nlohmann::json::object();
    for (const auto& [path, digest] : manifest.input_hashes) {
        hashes[path] = digest;
    }
    return {
        {"command", manifest.command},
        {"tool_version", kToolVersion},
        {"config", manifest.config},
        {"input_hashes", hashes},
        {"wall_seconds", manifest.wall_seconds},
    };
}

std::string manifest_path_for_file(const std::string& out_path) {
    return out_path + ".manifest.json";
}

std::string manifest_path_for_dir(const std::string& out_dir) {
    return (std::filesystem::path(out_dir) / "manifest.json").string();
}

void write_run_manifest(const std::string& path, const RunManifest& manifest) {
    const std::string text = manifest_to_json(manifest).dump(2) + "\n";
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (f == nullptr) {
        throw IoError("cannot create " + path + ": " + std::strerror(errno));
    }
    const bool ok = std::fwrite(text.data(), 1, text.size(), f) == text.size() &&
                    std::fclose(f) == 0;
    if (!ok) {
        throw IoError("write failed for " + path);
    }
}

}  // namespace confgate
