#include "helpann/dataset_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "helpann/error.hpp"
#include "helpann/metric.hpp"

namespace helpann {

static_assert(std::endian::native == std::endian::little, "vecs I/O assumes a little-endian host");

namespace {

std::vector<char> slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path.string() + "' for reading");
    in.seekg(0, std::ios::end);
    const auto size = static_cast<std::size_t>(in.tellg());
    in.seekg(0, std::ios::beg);
    std::vector<char> bytes(size);
    if (size > 0 && !in.read(bytes.data(), static_cast<std::streamsize>(size)))
        throw Error("failed reading '" + path.string() + "'");
    return bytes;
}

std::ofstream open_for_write(const std::filesystem::path& path, bool binary) {
    std::ofstream out(path, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    return out;
}

std::size_t element_size(ElementKind kind) { return kind == ElementKind::UInt8 ? 1 : 4; }

template <typename T>
T load(const char* p) {
    T value;
    std::memcpy(&value, p, sizeof(T));
    return value;
}

std::vector<std::string> split_commas(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream stream(line);
    while (std::getline(stream, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

std::vector<std::string> text_lines(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path.string() + "' for reading");
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(std::move(line));
    }
    return lines;
}

}  // namespace

ElementKind element_kind_for(const std::filesystem::path& path) {
    const auto ext = path.extension().string();
    if (ext == ".fvecs") return ElementKind::Float32;
    if (ext == ".ivecs") return ElementKind::Int32;
    if (ext == ".bvecs") return ElementKind::UInt8;
    throw ArgumentError("cannot infer vecs element kind from extension '" + ext + "'");
}

FeatureMatrix read_vecs_file(const std::filesystem::path& path, ElementKind kind) {
    const auto bytes = slurp(path);
    if (bytes.empty()) throw FormatError("'" + path.string() + "': no records", 0);

    const std::size_t esize = element_size(kind);
    const auto first_dim = static_cast<std::int64_t>(bytes.size() >= 4 ? load<std::int32_t>(bytes.data()) : 0);
    if (bytes.size() < 4) throw FormatError("'" + path.string() + "': truncated dimension header", 0);
    if (first_dim <= 0) throw FormatError("'" + path.string() + "': non-positive dimension", 0);

    const std::size_t dim = static_cast<std::size_t>(first_dim);
    const std::size_t record_bytes = 4 + dim * esize;
    const std::size_t n = bytes.size() / record_bytes;
    FeatureMatrix out(static_cast<Eigen::Index>(std::max<std::size_t>(n, 1)), static_cast<Eigen::Index>(dim));

    std::size_t offset = 0;
    std::size_t record = 0;
    while (offset < bytes.size()) {
        if (bytes.size() - offset < 4)
            throw FormatError("'" + path.string() + "': truncated dimension header", offset);
        const auto d = load<std::int32_t>(bytes.data() + offset);
        if (d != first_dim)
            throw FormatError("'" + path.string() + "': record " + std::to_string(record) + " has dimension " +
                                  std::to_string(d) + ", expected " + std::to_string(first_dim),
                              offset);
        if (bytes.size() - offset < record_bytes)
            throw FormatError("'" + path.string() + "': truncated record " + std::to_string(record), offset);
        const char* p = bytes.data() + offset + 4;
        auto row = out.row(static_cast<Eigen::Index>(record));
        for (std::size_t j = 0; j < dim; ++j) {
            float v = 0.0f;
            switch (kind) {
                case ElementKind::Float32: v = load<float>(p + 4 * j); break;
                case ElementKind::Int32: v = static_cast<float>(load<std::int32_t>(p + 4 * j)); break;
                case ElementKind::UInt8: v = static_cast<float>(static_cast<std::uint8_t>(p[j])); break;
            }
            if (!std::isfinite(v))
                throw FormatError("'" + path.string() + "': non-finite value in record " + std::to_string(record),
                                  offset + 4 + j * esize);
            row(static_cast<Eigen::Index>(j)) = v;
        }
        offset += record_bytes;
        ++record;
    }
    return out;
}

void write_vecs_file(const std::filesystem::path& path, const FeatureMatrix& data, ElementKind kind) {
    if (data.rows() < 1 || data.cols() < 1) throw ArgumentError("write_vecs_file: empty matrix");
    auto out = open_for_write(path, true);
    const auto dim = static_cast<std::int32_t>(data.cols());
    std::vector<char> record(4 + static_cast<std::size_t>(dim) * element_size(kind));
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
        std::memcpy(record.data(), &dim, 4);
        char* p = record.data() + 4;
        for (Eigen::Index j = 0; j < data.cols(); ++j) {
            const float v = data(i, j);
            switch (kind) {
                case ElementKind::Float32: std::memcpy(p + 4 * j, &v, 4); break;
                case ElementKind::Int32: {
                    if (v != std::floor(v) || std::abs(v) > 2147483647.0f)
                        throw ArgumentError("write_vecs_file: value not representable as int32");
                    const auto iv = static_cast<std::int32_t>(v);
                    std::memcpy(p + 4 * j, &iv, 4);
                    break;
                }
                case ElementKind::UInt8:
                    if (v != std::floor(v) || v < 0.0f || v > 255.0f)
                        throw ArgumentError("write_vecs_file: value not representable as uint8");
                    p[j] = static_cast<char>(static_cast<std::uint8_t>(v));
                    break;
            }
        }
        out.write(record.data(), static_cast<std::streamsize>(record.size()));
    }
    if (!out) throw Error("failed writing '" + path.string() + "'");
}

std::vector<std::vector<NodeId>> read_ivecs_lists(const std::filesystem::path& path) {
    const auto bytes = slurp(path);
    std::vector<std::vector<NodeId>> lists;
    std::size_t offset = 0;
    while (offset < bytes.size()) {
        if (bytes.size() - offset < 4) throw FormatError("'" + path.string() + "': truncated header", offset);
        const auto d = load<std::int32_t>(bytes.data() + offset);
        if (d < 0) throw FormatError("'" + path.string() + "': negative record length", offset);
        if (bytes.size() - offset - 4 < static_cast<std::size_t>(d) * 4)
            throw FormatError("'" + path.string() + "': truncated record " + std::to_string(lists.size()), offset);
        std::vector<NodeId> ids(static_cast<std::size_t>(d));
        for (std::size_t j = 0; j < ids.size(); ++j) {
            const auto v = load<std::int32_t>(bytes.data() + offset + 4 + 4 * j);
            if (v < 0) throw FormatError("'" + path.string() + "': negative id", offset + 4 + 4 * j);
            ids[j] = static_cast<NodeId>(v);
        }
        lists.push_back(std::move(ids));
        offset += 4 + static_cast<std::size_t>(d) * 4;
    }
    return lists;
}

void write_ivecs_lists(const std::filesystem::path& path, const std::vector<std::vector<NodeId>>& lists) {
    auto out = open_for_write(path, true);
    for (const auto& ids : lists) {
        const auto d = static_cast<std::int32_t>(ids.size());
        out.write(reinterpret_cast<const char*>(&d), 4);
        for (NodeId id : ids) {
            const auto v = static_cast<std::int32_t>(id);
            out.write(reinterpret_cast<const char*>(&v), 4);
        }
    }
    if (!out) throw Error("failed writing '" + path.string() + "'");
}

AttributeFile read_attribute_file(const std::filesystem::path& path) {
    const auto lines = text_lines(path);
    if (lines.empty()) throw FormatError("'" + path.string() + "': missing '#schema v1 L=<l>' header", 1);

    AttributeFile file;
    const std::string prefix = "#schema v1 L=";
    if (lines[0].rfind(prefix, 0) != 0)
        throw FormatError("'" + path.string() + "': missing '#schema v1 L=<l>' header", 1);
    try {
        std::size_t used = 0;
        file.l = std::stoul(lines[0].substr(prefix.size()), &used);
        if (used != lines[0].size() - prefix.size() || file.l == 0) throw std::invalid_argument("L");
    } catch (const std::exception&) {
        throw FormatError("'" + path.string() + "': bad L in schema header", 1);
    }

    std::vector<std::vector<std::string>> dicts(file.l);
    std::size_t dict_lines = 0;
    for (std::size_t ln = 1; ln < lines.size(); ++ln) {
        const auto& line = lines[ln];
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream directive(line);
            std::string tag;
            std::size_t dim = 0;
            std::string rest;
            if (!(directive >> tag >> dim) || tag != "#dict" || dim >= file.l || !dicts[dim].empty())
                throw FormatError("'" + path.string() + "': bad directive '" + line + "'", ln + 1);
            std::getline(directive >> std::ws, rest);
            dicts[dim] = split_commas(rest);
            ++dict_lines;
            continue;
        }
        auto fields = split_commas(line);
        if (fields.size() != file.l)
            throw FormatError("'" + path.string() + "': expected " + std::to_string(file.l) + " labels, got " +
                                  std::to_string(fields.size()),
                              ln + 1);
        file.records.push_back(std::move(fields));
    }
    if (dict_lines == file.l) file.schema = AttributeSchema(std::move(dicts));
    else if (dict_lines != 0)
        throw FormatError("'" + path.string() + "': '#dict' lines must cover every dimension", 1);
    return file;
}

void write_attribute_file(const std::filesystem::path& path, const RawLabelMatrix& records,
                          const AttributeSchema* schema) {
    if (records.empty() && schema == nullptr) throw ArgumentError("write_attribute_file: nothing to write");
    const std::size_t l = schema ? schema->dims() : records.front().size();
    auto out = open_for_write(path, false);
    out << "#schema v1 L=" << l << '\n';
    if (schema) {
        for (std::size_t d = 0; d < l; ++d) {
            out << "#dict " << d << ' ';
            const auto& dict = schema->dictionaries()[d];
            for (std::size_t i = 0; i < dict.size(); ++i) out << (i ? "," : "") << dict[i];
            out << '\n';
        }
    }
    for (const auto& rec : records) {
        if (rec.size() != l) throw ArgumentError("write_attribute_file: ragged record");
        for (std::size_t d = 0; d < l; ++d) out << (d ? "," : "") << rec[d];
        out << '\n';
    }
    if (!out) throw Error("failed writing '" + path.string() + "'");
}

AttributeSchema schema_from_labels(const AttributeFile& file) {
    if (file.schema) return *file.schema;
    std::vector<std::vector<std::string>> dicts(file.l);
    std::vector<std::unordered_map<std::string, bool>> seen(file.l);
    for (const auto& rec : file.records)
        for (std::size_t d = 0; d < file.l; ++d)
            if (seen[d].emplace(rec[d], true).second) dicts[d].push_back(rec[d]);
    return AttributeSchema(std::move(dicts));
}

RawLabelMatrix unmap_attributes(const AttributeMatrix& mapped, const AttributeSchema& schema) {
    RawLabelMatrix raw(static_cast<std::size_t>(mapped.rows()));
    for (Eigen::Index i = 0; i < mapped.rows(); ++i) {
        raw[static_cast<std::size_t>(i)].reserve(static_cast<std::size_t>(mapped.cols()));
        for (Eigen::Index d = 0; d < mapped.cols(); ++d)
            raw[static_cast<std::size_t>(i)].push_back(schema.label(static_cast<std::size_t>(d), mapped(i, d)));
    }
    return raw;
}

MaskMatrix read_mask_file(const std::filesystem::path& path) {
    const auto lines = text_lines(path);
    std::vector<std::vector<std::uint8_t>> rows;
    for (std::size_t ln = 0; ln < lines.size(); ++ln) {
        if (lines[ln].empty()) continue;
        std::vector<std::uint8_t> bits;
        for (const auto& f : split_commas(lines[ln])) {
            if (f != "0" && f != "1")
                throw FormatError("'" + path.string() + "': mask values must be 0 or 1", ln + 1);
            bits.push_back(f == "1" ? 1 : 0);
        }
        if (!rows.empty() && bits.size() != rows.front().size())
            throw FormatError("'" + path.string() + "': inconsistent mask width", ln + 1);
        rows.push_back(std::move(bits));
    }
    MaskMatrix masks(static_cast<Eigen::Index>(rows.size()),
                     static_cast<Eigen::Index>(rows.empty() ? 0 : rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t d = 0; d < rows[i].size(); ++d)
            masks(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) = rows[i][d];
    return masks;
}

void write_mask_file(const std::filesystem::path& path, const MaskMatrix& masks) {
    auto out = open_for_write(path, false);
    for (Eigen::Index i = 0; i < masks.rows(); ++i) {
        for (Eigen::Index d = 0; d < masks.cols(); ++d) out << (d ? "," : "") << (masks(i, d) ? '1' : '0');
        out << '\n';
    }
    if (!out) throw Error("failed writing '" + path.string() + "'");
}

FeatureMatrix generate_synthetic(std::size_t n, std::size_t m, Distribution distribution, std::uint64_t seed) {
    if (n == 0 || m == 0) throw ArgumentError("generate_synthetic: n and m must be >= 1");
    std::mt19937_64 rng(seed);
    FeatureMatrix out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
    if (distribution == Distribution::Uniform01) {
        std::uniform_real_distribution<float> dist(0.0f, 1.0f);
        for (Eigen::Index i = 0; i < out.size(); ++i) out.data()[i] = dist(rng);
    } else {
        std::normal_distribution<float> dist(0.0f, 1.0f);
        for (Eigen::Index i = 0; i < out.size(); ++i) out.data()[i] = dist(rng);
    }
    return out;
}

std::pair<AttributeSchema, AttributeMatrix> generate_attributes(std::size_t n, std::size_t l,
                                                                std::size_t pool_size, std::uint64_t seed) {
    if (l == 0 || pool_size == 0) throw ArgumentError("generate_attributes: l and pool_size must be >= 1");
    std::vector<std::string> labels;
    for (std::size_t v = 1; v <= pool_size; ++v) labels.push_back("v" + std::to_string(v));
    AttributeSchema schema(std::vector<std::vector<std::string>>(l, labels));

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<AttributeValue> dist(1, static_cast<AttributeValue>(pool_size));
    AttributeMatrix values(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(l));
    for (Eigen::Index i = 0; i < values.size(); ++i) values.data()[i] = dist(rng);
    return {std::move(schema), std::move(values)};
}

SampleStats sample_statistics(const FeatureMatrix& features, const AttributeMatrix& attributes,
                              std::size_t sample_size, std::uint64_t seed) {
    const auto n = static_cast<std::size_t>(features.rows());
    if (static_cast<std::size_t>(attributes.rows()) != n)
        throw ArgumentError("sample_statistics: feature and attribute row counts differ");
    if (sample_size < 2) throw ArgumentError("sample_statistics: sample_size must be >= 2");
    if (sample_size > n) throw ArgumentError("sample_statistics: sample_size exceeds record count");

    std::vector<Eigen::Index> all(n);
    std::iota(all.begin(), all.end(), Eigen::Index{0});
    std::vector<Eigen::Index> picked;
    picked.reserve(sample_size);
    std::mt19937_64 rng(seed);
    std::sample(all.begin(), all.end(), std::back_inserter(picked), sample_size, rng);

    long double sum_v = 0.0L;
    long double sum_a = 0.0L;
    for (std::size_t a = 0; a < picked.size(); ++a) {
        for (std::size_t b = a + 1; b < picked.size(); ++b) {
            sum_v += feature_distance(features.row(picked[a]), features.row(picked[b]));
            sum_a += attribute_distance(attributes.row(picked[a]), attributes.row(picked[b]));
        }
    }
    const long double pairs = static_cast<long double>(sample_size) * (sample_size - 1) / 2.0L;
    SampleStats stats;
    stats.avg_feature_distance = static_cast<double>(sum_v / pairs);
    stats.avg_attribute_distance = static_cast<double>(sum_a / pairs);
    stats.sample_size = static_cast<std::uint32_t>(sample_size);
    stats.rng_seed = seed;
    return stats;
}

std::size_t count_matches(const AttributeMatrix& base, const Query& query) {
    std::size_t matches = 0;
    for (Eigen::Index i = 0; i < base.rows(); ++i) {
        const double d = query.mask ? attribute_distance_masked(base.row(i), query.attributes, *query.mask)
                                    : attribute_distance(base.row(i), query.attributes);
        if (d == 0.0) ++matches;
    }
    return matches;
}

QuerySet generate_queries(const Dataset& base, const QueryGenOptions& options) {
    const std::size_t n = base.size();
    const std::size_t l = base.attribute_dims();
    const std::size_t m = base.feature_dims();
    if (n == 0) throw ArgumentError("generate_queries: empty base");
    if (static_cast<std::size_t>(base.attributes.rows()) != n)
        throw ArgumentError("generate_queries: feature and attribute row counts differ");
    if (options.active_filters > l) throw ArgumentError("generate_queries: active_filters exceeds L");

    double noise_sd = 0.0;
    if (n >= 2 && options.noise_fraction > 0.0) {
        const auto stats = sample_statistics(base.features, base.attributes, std::min(n, options.stats_sample),
                                             options.seed ^ 0x9e3779b97f4a7c15ULL);
        noise_sd = options.noise_fraction * stats.avg_feature_distance / std::sqrt(static_cast<double>(m));
    }

    QuerySet queries;
    const auto q = static_cast<Eigen::Index>(options.count);
    queries.features.resize(q, static_cast<Eigen::Index>(m));
    queries.attributes.resize(q, static_cast<Eigen::Index>(l));
    queries.masks = MaskMatrix::Zero(q, static_cast<Eigen::Index>(l));

    std::mt19937_64 rng(options.seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<std::size_t> dims(l);
    std::iota(dims.begin(), dims.end(), std::size_t{0});

    for (Eigen::Index qi = 0; qi < q; ++qi) {
        bool accepted = false;
        std::size_t source = 0;
        MaskRow mask = MaskRow::Zero(static_cast<Eigen::Index>(l));
        for (std::size_t attempt = 0; attempt < options.max_attempts && !accepted; ++attempt) {
            source = pick(rng);
            std::vector<std::size_t> active;
            std::sample(dims.begin(), dims.end(), std::back_inserter(active), options.active_filters, rng);
            mask.setZero();
            for (auto d : active) mask(static_cast<Eigen::Index>(d)) = 1;
            Query probe{base.features.row(static_cast<Eigen::Index>(source)),
                        base.attributes.row(static_cast<Eigen::Index>(source)), mask};
            accepted = count_matches(base.attributes, probe) >= options.min_matches;
        }
        if (!accepted)
            throw ConstraintError("generate_queries: no base record whose pattern over " +
                                  std::to_string(options.active_filters) + " active filters has >= " +
                                  std::to_string(options.min_matches) + " matches after " +
                                  std::to_string(options.max_attempts) + " attempts");
        const auto src = static_cast<Eigen::Index>(source);
        queries.attributes.row(qi) = base.attributes.row(src);
        queries.masks->row(qi) = mask;
        for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(m); ++j)
            queries.features(qi, j) = base.features(src, j) + static_cast<float>(noise_sd * noise(rng));
    }
    return queries;
}

Query QuerySet::at(std::size_t i) const {
    const auto row = static_cast<Eigen::Index>(i);
    Query query{features.row(row), attributes.row(row), std::nullopt};
    if (masks) query.mask = masks->row(row);
    return query;
}

}  // namespace helpann
