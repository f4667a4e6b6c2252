#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include <Eigen/Core>

#include "helpann/error.hpp"
#include "helpann/types.hpp"

namespace helpann {

/// Maps raw labels to 1-based dictionary positions, dimension by dimension.
/// Throws MappingError for unknown labels and ArgumentError for rows whose
/// width differs from the schema.
AttributeMatrix map_attributes(const RawLabelMatrix& raw, const AttributeSchema& schema);

/// Manhattan attribute distance: sum over dimensions of |a_l - b_l|.
template <typename DerivedA, typename DerivedB>
double attribute_distance(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
    if (a.size() != b.size()) throw ArgumentError("attribute_distance: length mismatch");
    return static_cast<double>(
        (a.template cast<std::int64_t>() - b.template cast<std::int64_t>()).cwiseAbs().sum());
}

/// Manhattan distance restricted to dimensions whose mask bit is 1.
template <typename DerivedA, typename DerivedB, typename DerivedM>
double attribute_distance_masked(const Eigen::MatrixBase<DerivedA>& a,
                                 const Eigen::MatrixBase<DerivedB>& b,
                                 const Eigen::MatrixBase<DerivedM>& mask) {
    if (a.size() != b.size() || a.size() != mask.size())
        throw ArgumentError("attribute_distance_masked: length mismatch");
    return static_cast<double>(
        (a.template cast<std::int64_t>() - b.template cast<std::int64_t>())
            .cwiseAbs()
            .cwiseProduct(mask.template cast<std::int64_t>())
            .sum());
}

/// Euclidean feature distance; 32-bit inputs accumulated in 64-bit.
template <typename DerivedA, typename DerivedB>
double feature_distance(const Eigen::MatrixBase<DerivedA>& u, const Eigen::MatrixBase<DerivedB>& v) {
    if (u.size() != v.size()) throw ArgumentError("feature_distance: length mismatch");
    return std::sqrt((u.template cast<double>() - v.template cast<double>()).squaredNorm());
}

/// Decade-shifts a positive value into (0.1, 1]: divides by 10 while x > 1,
/// multiplies by 10 while x <= 0.1. Throws ArgumentError for x <= 0 or
/// non-finite x.
double norm_scale(double x);

enum class AlphaSource : std::uint8_t { Calibrated = 0, Manual = 1 };

/// Trade-off parameter for the fused distance and the statistics it came from.
struct MetricConfig {
    double alpha = 1.0;
    AlphaSource source = AlphaSource::Manual;
    SampleStats stats{};
    std::uint64_t n_total = 0;
    std::uint32_t l_dims = 0;
    /// norm_scale(n_total / avg_feature_distance); 0 for manual configs.
    double feature_term = 0.0;
    /// norm_scale(avg_attribute_distance / l_dims), or 0 when the sampled
    /// attribute spread is zero.
    double attribute_term = 0.0;
    /// Non-empty when calibration had to fall back (zero attribute spread).
    std::string warning;
};

/// alpha = norm_scale(n_total / S_V) + norm_scale(S_A / l_dims).
/// Throws CalibrationError when S_V is zero; S_A == 0 drops the attribute
/// term and records a warning.
MetricConfig compute_alpha(const SampleStats& stats, std::uint64_t n_total, std::uint32_t l_dims);

/// Pinned alpha (sensitivity sweeps); stats are kept for provenance only.
MetricConfig manual_alpha(double alpha, const SampleStats& stats, std::uint64_t n_total,
                          std::uint32_t l_dims);

/// Fused distance from the two component distances: s_v * (1 + s_a / alpha).
inline double fuse(double feature_dist, double attribute_dist, double alpha) noexcept {
    return feature_dist * (1.0 + attribute_dist / alpha);
}

/// Fused distance between a stored node and a query. Uses the masked
/// attribute distance when the query carries a mask.
template <typename DerivedV, typename DerivedA>
double auto_distance(const Eigen::MatrixBase<DerivedV>& node_feature,
                     const Eigen::MatrixBase<DerivedA>& node_attributes, const Query& query,
                     const MetricConfig& config) {
    if (!(config.alpha > 0.0)) throw ArgumentError("auto_distance: alpha must be positive");
    const double s_v = feature_distance(node_feature, query.feature);
    const double s_a = query.mask ? attribute_distance_masked(node_attributes, query.attributes, *query.mask)
                                  : attribute_distance(node_attributes, query.attributes);
    return fuse(s_v, s_a, config.alpha);
}

/// Relative margin a mismatched node needs to outrank an exact match.
struct SelectionMargin {
    double lambda = 0.0;
    double threshold_ratio = 1.0;

    /// True iff a node with attribute distance s_a and feature distance
    /// `mismatched_feature` ranks ahead of an exact match at `matched_feature`.
    bool mismatched_outranks(double mismatched_feature, double matched_feature) const noexcept {
        return mismatched_feature < matched_feature * threshold_ratio;
    }
};

SelectionMargin selection_margin(double s_a, const MetricConfig& config);

/// Fused distance bound to one dataset. Node-to-node distances use the full
/// attribute vector; the index itself is mask-agnostic.
class AutoMetric {
public:
    AutoMetric(const Dataset& data, const MetricConfig& config) : data_(&data), config_(config) {}

    double between(NodeId a, NodeId b) const {
        const auto& f = data_->features;
        const auto& attr = data_->attributes;
        const double s_v = std::sqrt(
            (f.row(a).template cast<double>() - f.row(b).template cast<double>()).squaredNorm());
        const double s_a = static_cast<double>(
            (attr.row(a).template cast<std::int64_t>() - attr.row(b).template cast<std::int64_t>())
                .cwiseAbs()
                .sum());
        return fuse(s_v, s_a, config_.alpha);
    }

    double to_query(NodeId node, const Query& query) const {
        return auto_distance(data_->features.row(node), data_->attributes.row(node), query, config_);
    }

    const MetricConfig& config() const noexcept { return config_; }
    const Dataset& data() const noexcept { return *data_; }

private:
    const Dataset* data_;
    MetricConfig config_;
};

}  // namespace helpann
