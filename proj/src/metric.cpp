#include "helpann/metric.hpp"

#include <limits>

namespace helpann {

AttributeSchema::AttributeSchema(std::vector<std::vector<std::string>> dictionaries)
    : dictionaries_(std::move(dictionaries)) {
    positions_.resize(dictionaries_.size());
    for (std::size_t d = 0; d < dictionaries_.size(); ++d) {
        if (dictionaries_[d].empty())
            throw ArgumentError("attribute dimension " + std::to_string(d) + " has an empty dictionary");
        for (std::size_t i = 0; i < dictionaries_[d].size(); ++i) {
            auto [it, inserted] =
                positions_[d].emplace(dictionaries_[d][i], static_cast<AttributeValue>(i + 1));
            if (!inserted)
                throw ArgumentError("duplicate label '" + dictionaries_[d][i] + "' in dimension " +
                                    std::to_string(d));
        }
    }
}

std::size_t AttributeSchema::max_cardinality() const noexcept {
    std::size_t best = 0;
    for (const auto& dict : dictionaries_) best = std::max(best, dict.size());
    return best;
}

std::uint64_t AttributeSchema::theta() const {
    std::uint64_t product = 1;
    for (const auto& dict : dictionaries_) {
        const std::uint64_t u = dict.size();
        if (product > std::numeric_limits<std::uint64_t>::max() / u)
            throw ArgumentError("attribute cardinality product overflows 64 bits");
        product *= u;
    }
    return product;
}

const std::string& AttributeSchema::label(std::size_t dim, AttributeValue value) const {
    const auto& dict = dictionaries_.at(dim);
    if (value < 1 || value > dict.size())
        throw ArgumentError("attribute value " + std::to_string(value) + " out of range for dimension " +
                            std::to_string(dim));
    return dict[value - 1];
}

std::optional<AttributeValue> AttributeSchema::find(std::size_t dim, const std::string& label) const {
    const auto& pos = positions_.at(dim);
    if (auto it = pos.find(label); it != pos.end()) return it->second;
    return std::nullopt;
}

AttributeValue AttributeSchema::map(std::size_t dim, const std::string& label) const {
    if (dim >= dims()) throw MappingError("attribute dimension " + std::to_string(dim) + " not in schema");
    if (auto v = find(dim, label)) return *v;
    throw MappingError("unknown label '" + label + "' in attribute dimension " + std::to_string(dim));
}

AttributeMatrix map_attributes(const RawLabelMatrix& raw, const AttributeSchema& schema) {
    const auto l = schema.dims();
    AttributeMatrix mapped(static_cast<Eigen::Index>(raw.size()), static_cast<Eigen::Index>(l));
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (raw[i].size() != l)
            throw ArgumentError("record " + std::to_string(i) + " has " + std::to_string(raw[i].size()) +
                                " labels, schema has " + std::to_string(l));
        for (std::size_t d = 0; d < l; ++d)
            mapped(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) = schema.map(d, raw[i][d]);
    }
    return mapped;
}

double norm_scale(double x) {
    if (!std::isfinite(x) || x < 0.0) throw ArgumentError("norm_scale: input must be finite and >= 0");
    if (x == 0.0) throw ArgumentError("norm_scale: zero never reaches (0.1, 1]");
    while (x > 1.0) x /= 10.0;
    while (x <= 0.1) x *= 10.0;
    return x;
}

MetricConfig compute_alpha(const SampleStats& stats, std::uint64_t n_total, std::uint32_t l_dims) {
    if (n_total < 1) throw ArgumentError("compute_alpha: n_total must be >= 1");
    if (l_dims < 1) throw ArgumentError("compute_alpha: l_dims must be >= 1");
    if (stats.avg_feature_distance < 0.0 || stats.avg_attribute_distance < 0.0)
        throw ArgumentError("compute_alpha: negative average distance");
    if (stats.avg_feature_distance == 0.0)
        throw CalibrationError("compute_alpha: average feature distance is zero (degenerate feature space)");

    MetricConfig config;
    config.source = AlphaSource::Calibrated;
    config.stats = stats;
    config.n_total = n_total;
    config.l_dims = l_dims;
    config.feature_term = norm_scale(static_cast<double>(n_total) / stats.avg_feature_distance);
    if (stats.avg_attribute_distance == 0.0) {
        config.attribute_term = 0.0;
        config.warning = "sampled attribute distance is zero; attribute term of alpha set to 0";
    } else {
        config.attribute_term = norm_scale(stats.avg_attribute_distance / l_dims);
    }
    config.alpha = config.feature_term + config.attribute_term;
    return config;
}

MetricConfig manual_alpha(double alpha, const SampleStats& stats, std::uint64_t n_total,
                          std::uint32_t l_dims) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ArgumentError("alpha must be a positive finite value");
    MetricConfig config;
    config.alpha = alpha;
    config.source = AlphaSource::Manual;
    config.stats = stats;
    config.n_total = n_total;
    config.l_dims = l_dims;
    return config;
}

SelectionMargin selection_margin(double s_a, const MetricConfig& config) {
    if (s_a < 0.0) throw ArgumentError("selection_margin: s_a must be >= 0");
    SelectionMargin margin;
    margin.lambda = s_a / config.alpha;
    margin.threshold_ratio = 1.0 / (1.0 + margin.lambda);
    return margin;
}

}  // namespace helpann
