#include "manifest.hpp"

#include <array>
#include <ctime>
#include <fstream>

#include <boost/crc.hpp>

#include "helpann/error.hpp"

namespace helpann::tool {

std::uint32_t file_crc32(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read '" + path.string() + "' for checksum");
    boost::crc_32_type crc;
    std::array<char, 1 << 16> buf{};
    while (in) {
        in.read(buf.data(), buf.size());
        crc.process_bytes(buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    return crc.checksum();
}

RunManifest::RunManifest(std::string command, int argc, char** argv) : start_(std::chrono::steady_clock::now()) {
    record_["tool"] = kToolVersion;
    record_["command"] = std::move(command);
    std::vector<std::string> args(argv, argv + argc);
    record_["argv"] = args;
    const std::time_t now = std::time(nullptr);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    record_["started_utc"] = stamp;
    record_["config"] = nlohmann::json::object();
    record_["seeds"] = nlohmann::json::object();
    record_["info"] = nlohmann::json::object();
    record_["inputs"] = nlohmann::json::array();
    record_["outputs"] = nlohmann::json::array();
    record_["timing_s"] = nlohmann::json::object();
}

void RunManifest::add_input(const std::string& role, const std::filesystem::path& path) {
    record_["inputs"].push_back({{"role", role}, {"path", path.string()}, {"crc32", file_crc32(path)}});
}

void RunManifest::add_output(const std::string& role, const std::filesystem::path& path) {
    record_["outputs"].push_back({{"role", role}, {"path", path.string()}, {"crc32", file_crc32(path)}});
}

void RunManifest::add_timing(const std::string& phase, double seconds) { record_["timing_s"][phase] = seconds; }

void RunManifest::append_to(const std::filesystem::path& path) {
    record_["timing_s"]["total"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    std::ofstream out(path, std::ios::app);
    if (!out) throw Error("cannot append manifest '" + path.string() + "'");
    out << record_.dump() << '\n';
    if (!out) throw Error("failed writing manifest '" + path.string() + "'");
}

std::filesystem::path manifest_beside(const std::filesystem::path& artifact) {
    const auto dir = artifact.parent_path();
    return (dir.empty() ? std::filesystem::path(".") : dir) / "manifest.jsonl";
}

}  // namespace helpann::tool
