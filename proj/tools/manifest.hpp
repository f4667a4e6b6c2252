#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace helpann::tool {

inline constexpr const char* kToolVersion = "helpann 0.1.0";

/// CRC-32 of a file's bytes.
std::uint32_t file_crc32(const std::filesystem::path& path);

/// One reproducibility record. Appended as a single JSON line.
class RunManifest {
public:
    RunManifest(std::string command, int argc, char** argv);

    nlohmann::json& config() { return record_["config"]; }
    nlohmann::json& seeds() { return record_["seeds"]; }
    nlohmann::json& info() { return record_["info"]; }
    /// Records path and CRC-32 of an input file.
    void add_input(const std::string& role, const std::filesystem::path& path);
    /// Records path and CRC-32 of a written artifact.
    void add_output(const std::string& role, const std::filesystem::path& path);
    void add_timing(const std::string& phase, double seconds);

    /// Appends to `path`; never rewrites earlier lines.
    void append_to(const std::filesystem::path& path);

private:
    nlohmann::json record_;
    std::chrono::steady_clock::time_point start_;
};

/// Manifest location for an artifact: `manifest.jsonl` beside it.
std::filesystem::path manifest_beside(const std::filesystem::path& artifact);

}  // namespace helpann::tool
