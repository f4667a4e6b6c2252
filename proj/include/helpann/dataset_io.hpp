#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <utility>
#include <vector>

#include "helpann/types.hpp"

namespace helpann {

/// Element encoding of a vecs-family file (fvecs / ivecs / bvecs).
enum class ElementKind { Float32, Int32, UInt8 };

/// Picks the element kind from the file extension (.fvecs, .ivecs, .bvecs).
ElementKind element_kind_for(const std::filesystem::path& path);

/// Reads every record of a vecs file. Each record is a little-endian int32
/// dimension followed by that many elements; all records must share the
/// dimension. Integer kinds are widened to float.
FeatureMatrix read_vecs_file(const std::filesystem::path& path, ElementKind kind);

/// Writes the same layout read_vecs_file accepts. Int32 and UInt8 require
/// integral values in range.
void write_vecs_file(const std::filesystem::path& path, const FeatureMatrix& data, ElementKind kind);

/// Ragged ivecs I/O for neighbor lists; records may differ in length
/// (including zero-length records).
std::vector<std::vector<NodeId>> read_ivecs_lists(const std::filesystem::path& path);
void write_ivecs_lists(const std::filesystem::path& path, const std::vector<std::vector<NodeId>>& lists);

/// Text attribute file: `#schema v1 L=<l>` header, optional `#dict <d> a,b,c`
/// lines fixing dictionary order, then one comma-separated record per line.
struct AttributeFile {
    std::size_t l = 0;
    std::optional<AttributeSchema> schema;
    RawLabelMatrix records;
};

AttributeFile read_attribute_file(const std::filesystem::path& path);
void write_attribute_file(const std::filesystem::path& path, const RawLabelMatrix& records,
                          const AttributeSchema* schema = nullptr);

/// Schema for a label file: its `#dict` lines when present, otherwise labels
/// in order of first appearance per dimension.
AttributeSchema schema_from_labels(const AttributeFile& file);

/// Inverse of map_attributes.
RawLabelMatrix unmap_attributes(const AttributeMatrix& mapped, const AttributeSchema& schema);

MaskMatrix read_mask_file(const std::filesystem::path& path);
void write_mask_file(const std::filesystem::path& path, const MaskMatrix& masks);

enum class Distribution { Uniform01, Gaussian };

/// Seeded synthetic feature vectors. Throws ArgumentError for n == 0 or m == 0.
FeatureMatrix generate_synthetic(std::size_t n, std::size_t m, Distribution distribution, std::uint64_t seed);

/// Independent uniform attribute values over a pool of `pool_size` labels
/// ("v1" ... "vV") per dimension.
std::pair<AttributeSchema, AttributeMatrix> generate_attributes(std::size_t n, std::size_t l,
                                                                std::size_t pool_size, std::uint64_t seed);

/// Mean pairwise distances over a seeded sample of distinct records.
SampleStats sample_statistics(const FeatureMatrix& features, const AttributeMatrix& attributes,
                              std::size_t sample_size, std::uint64_t seed);

struct QueryGenOptions {
    std::size_t count = 100;
    std::size_t active_filters = 0;
    std::size_t min_matches = 1;
    std::uint64_t seed = 1;
    /// Norm of the feature perturbation relative to the sampled mean feature distance.
    double noise_fraction = 0.05;
    std::size_t max_attempts = 1000;
    std::size_t stats_sample = 1000;
};

/// Queries whose attribute pattern is copied from a base record whose masked
/// pattern has at least `min_matches` supporting records. Throws
/// ConstraintError when no such record is found within `max_attempts` draws.
QuerySet generate_queries(const Dataset& base, const QueryGenOptions& options);

/// Number of base records matching `query` on every active dimension.
std::size_t count_matches(const AttributeMatrix& base, const Query& query);

}  // namespace helpann
