#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

namespace helpann {

template <typename Scalar>
using DenseRowMajor = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
using DenseRow = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

/// n x m feature vectors, one per row.
using FeatureMatrix = DenseRowMajor<float>;
using FeatureRow = DenseRow<float>;

/// n x l mapped attribute values, each in [1, U_l].
using AttributeValue = std::uint32_t;
using AttributeMatrix = DenseRowMajor<AttributeValue>;
using AttributeRow = DenseRow<AttributeValue>;

/// Per-query wildcard masks: 1 = dimension is constrained, 0 = wildcard.
using MaskMatrix = DenseRowMajor<std::uint8_t>;
using MaskRow = DenseRow<std::uint8_t>;

using NodeId = std::uint32_t;

/// Per-dimension ordered label dictionaries. A label maps to its 1-based
/// position in the dictionary of its dimension.
class AttributeSchema {
public:
    AttributeSchema() = default;
    explicit AttributeSchema(std::vector<std::vector<std::string>> dictionaries);

    std::size_t dims() const noexcept { return dictionaries_.size(); }
    std::size_t cardinality(std::size_t dim) const { return dictionaries_.at(dim).size(); }
    std::size_t max_cardinality() const noexcept;
    /// Product of all cardinalities. Throws ArgumentError on 64-bit overflow.
    std::uint64_t theta() const;

    const std::vector<std::vector<std::string>>& dictionaries() const noexcept {
        return dictionaries_;
    }
    const std::string& label(std::size_t dim, AttributeValue value) const;
    /// Throws MappingError naming the dimension and label when unknown.
    AttributeValue map(std::size_t dim, const std::string& label) const;
    std::optional<AttributeValue> find(std::size_t dim, const std::string& label) const;

    friend bool operator==(const AttributeSchema& a, const AttributeSchema& b) {
        return a.dictionaries_ == b.dictionaries_;
    }

private:
    std::vector<std::vector<std::string>> dictionaries_;
    std::vector<std::unordered_map<std::string, AttributeValue>> positions_;
};

/// Raw attribute labels, one row per record.
using RawLabelMatrix = std::vector<std::vector<std::string>>;

/// Base records: features and mapped attributes share the row index.
struct Dataset {
    FeatureMatrix features;
    AttributeMatrix attributes;
    AttributeSchema schema;

    std::size_t size() const noexcept { return static_cast<std::size_t>(features.rows()); }
    std::size_t feature_dims() const noexcept { return static_cast<std::size_t>(features.cols()); }
    std::size_t attribute_dims() const noexcept {
        return static_cast<std::size_t>(attributes.cols());
    }
};

/// One hybrid query. Without a mask every attribute dimension is active.
struct Query {
    FeatureRow feature;
    AttributeRow attributes;
    std::optional<MaskRow> mask;
};

struct QuerySet {
    FeatureMatrix features;
    AttributeMatrix attributes;
    std::optional<MaskMatrix> masks;

    std::size_t size() const noexcept { return static_cast<std::size_t>(features.rows()); }
    Query at(std::size_t i) const;
};

/// Sampled averages feeding alpha calibration.
struct SampleStats {
    double avg_feature_distance = 0.0;
    double avg_attribute_distance = 0.0;
    std::uint32_t sample_size = 0;
    std::uint64_t rng_seed = 0;
};

}  // namespace helpann
