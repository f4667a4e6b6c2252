#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "helpann/dataset_io.hpp"
#include "helpann/help_index.hpp"
#include "helpann/metric.hpp"

namespace fixture {

inline helpann::Dataset synthetic(std::size_t n, std::size_t m, std::size_t l, std::size_t pool,
                                  std::uint64_t seed) {
    helpann::Dataset d;
    d.features = helpann::generate_synthetic(n, m, helpann::Distribution::Gaussian, seed);
    auto [schema, attrs] = helpann::generate_attributes(n, l, pool, seed + 1000);
    d.schema = std::move(schema);
    d.attributes = std::move(attrs);
    return d;
}

inline helpann::MetricConfig calibrated(const helpann::Dataset& d, std::uint64_t seed = 3) {
    const auto stats =
        helpann::sample_statistics(d.features, d.attributes, std::min<std::size_t>(1000, d.size()), seed);
    return helpann::compute_alpha(stats, d.size(), static_cast<std::uint32_t>(d.attribute_dims()));
}

inline helpann::HelpIndex index(helpann::Dataset d, const helpann::BuildParams& params,
                                helpann::BuildReport* report = nullptr) {
    const auto metric = calibrated(d);
    auto graph = helpann::build(d, params, metric, report);
    return helpann::HelpIndex{std::move(d), std::move(graph)};
}

inline helpann::BuildParams params(std::uint32_t gamma, std::uint32_t gamma_new, std::uint64_t seed = 1) {
    helpann::BuildParams p;
    p.gamma = gamma;
    p.gamma_new = gamma_new;
    p.seed = seed;
    return p;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("helpann_" + tag + "_" + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const noexcept { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

}  // namespace fixture
