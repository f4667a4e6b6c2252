#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "helpann/error.hpp"
#include "helpann/help_index.hpp"

namespace helpann {

namespace {

constexpr char kMagic[4] = {'H', 'E', 'L', 'P'};

class Writer {
public:
    explicit Writer(std::ostream& out) : out_(out) {}

    template <typename T>
    void put(T value) {
        static_assert(std::is_trivially_copyable_v<T>);
        out_.write(reinterpret_cast<const char*>(&value), sizeof(T));
    }
    void put_bytes(const void* data, std::size_t size) {
        out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
    }
    void put_string(const std::string& s) {
        put(static_cast<std::uint32_t>(s.size()));
        put_bytes(s.data(), s.size());
    }

private:
    std::ostream& out_;
};

class Reader {
public:
    explicit Reader(std::vector<char> bytes) : bytes_(std::move(bytes)) {}

    template <typename T>
    T get(const char* what) {
        T value;
        get_bytes(&value, sizeof(T), what);
        return value;
    }
    void get_bytes(void* into, std::size_t size, const char* what) {
        if (bytes_.size() - pos_ < size) throw FormatError(std::string("index truncated reading ") + what, pos_);
        std::memcpy(into, bytes_.data() + pos_, size);
        pos_ += size;
    }
    std::string get_string(const char* what) {
        const auto len = get<std::uint32_t>(what);
        if (bytes_.size() - pos_ < len) throw FormatError(std::string("index truncated reading ") + what, pos_);
        std::string s(bytes_.data() + pos_, len);
        pos_ += len;
        return s;
    }
    std::size_t offset() const noexcept { return pos_; }
    bool exhausted() const noexcept { return pos_ == bytes_.size(); }

private:
    std::vector<char> bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

void write_index(std::ostream& out, const HelpIndex& index) {
    const auto& data = index.data;
    const auto& graph = index.graph;
    if (graph.size() != data.size()) throw ArgumentError("write_index: graph and dataset sizes differ");
    const auto& metric = graph.metric;

    Writer w(out);
    w.put_bytes(kMagic, 4);
    w.put(kIndexFormatVersion);
    w.put(static_cast<std::uint64_t>(data.size()));
    w.put(static_cast<std::uint32_t>(data.feature_dims()));
    w.put(static_cast<std::uint32_t>(data.attribute_dims()));
    w.put(graph.gamma);

    w.put(metric.alpha);
    w.put(static_cast<std::uint8_t>(metric.source));
    w.put(metric.feature_term);
    w.put(metric.attribute_term);
    w.put(metric.stats.avg_feature_distance);
    w.put(metric.stats.avg_attribute_distance);
    w.put(metric.stats.sample_size);
    w.put(metric.stats.rng_seed);
    w.put(metric.n_total);
    w.put(metric.l_dims);
    w.put_string(metric.warning);

    w.put(graph.sigma);

    const auto& dicts = data.schema.dictionaries();
    if (dicts.size() != data.attribute_dims()) throw ArgumentError("write_index: schema width differs from attributes");
    for (const auto& dict : dicts) {
        w.put(static_cast<std::uint32_t>(dict.size()));
        for (const auto& label : dict) w.put_string(label);
    }

    w.put_bytes(data.features.data(), static_cast<std::size_t>(data.features.size()) * sizeof(float));
    w.put_bytes(data.attributes.data(), static_cast<std::size_t>(data.attributes.size()) * sizeof(AttributeValue));

    for (const auto& list : graph.adjacency) {
        w.put(static_cast<std::uint32_t>(list.size()));
        for (const auto& nb : list) {
            w.put(nb.id);
            w.put(nb.distance);
        }
    }
    if (!out) throw Error("write_index: stream failure");
}

void write_index(const std::filesystem::path& path, const HelpIndex& index) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    write_index(out, index);
}

HelpIndex read_index(std::istream& in) {
    Reader r(std::vector<char>(std::istreambuf_iterator<char>(in), {}));

    char magic[4];
    r.get_bytes(magic, 4, "magic");
    if (std::memcmp(magic, kMagic, 4) != 0) throw FormatError("not a HELP index (bad magic)", 0);
    const auto version = r.get<std::uint32_t>("version");
    if (version != kIndexFormatVersion)
        throw FormatError("unsupported index format version " + std::to_string(version), 4);

    const auto n = r.get<std::uint64_t>("N");
    const auto m = r.get<std::uint32_t>("M");
    const auto l = r.get<std::uint32_t>("L");
    if (n == 0 || m == 0 || l == 0 || n > std::numeric_limits<NodeId>::max())
        throw FormatError("index header has invalid dimensions", r.offset());

    HelpIndex index;
    auto& graph = index.graph;
    graph.gamma = r.get<std::uint32_t>("gamma");

    auto& metric = graph.metric;
    metric.alpha = r.get<double>("alpha");
    const auto source = r.get<std::uint8_t>("alpha provenance");
    if (source > 1) throw FormatError("unknown alpha provenance", r.offset() - 1);
    metric.source = static_cast<AlphaSource>(source);
    metric.feature_term = r.get<double>("feature term");
    metric.attribute_term = r.get<double>("attribute term");
    metric.stats.avg_feature_distance = r.get<double>("avg feature distance");
    metric.stats.avg_attribute_distance = r.get<double>("avg attribute distance");
    metric.stats.sample_size = r.get<std::uint32_t>("sample size");
    metric.stats.rng_seed = r.get<std::uint64_t>("sample seed");
    metric.n_total = r.get<std::uint64_t>("n_total");
    metric.l_dims = r.get<std::uint32_t>("l_dims");
    metric.warning = r.get_string("calibration warning");
    if (!(metric.alpha > 0.0)) throw FormatError("index alpha must be positive", r.offset());

    graph.sigma = r.get<double>("sigma");

    std::vector<std::vector<std::string>> dicts(l);
    for (auto& dict : dicts) {
        const auto count = r.get<std::uint32_t>("dictionary size");
        for (std::uint32_t i = 0; i < count; ++i) dict.push_back(r.get_string("label"));
    }
    try {
        index.data.schema = AttributeSchema(std::move(dicts));
    } catch (const ArgumentError& e) {
        throw FormatError(std::string("bad schema: ") + e.what(), r.offset());
    }

    auto& data = index.data;
    data.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
    r.get_bytes(data.features.data(), static_cast<std::size_t>(data.features.size()) * sizeof(float), "features");
    data.attributes.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(l));
    const auto attr_offset = r.offset();
    r.get_bytes(data.attributes.data(), static_cast<std::size_t>(data.attributes.size()) * sizeof(AttributeValue),
                "attributes");
    for (Eigen::Index i = 0; i < data.attributes.rows(); ++i)
        for (Eigen::Index d = 0; d < data.attributes.cols(); ++d) {
            const auto v = data.attributes(i, d);
            if (v < 1 || v > data.schema.cardinality(static_cast<std::size_t>(d)))
                throw FormatError("attribute value out of schema range", attr_offset);
        }

    graph.adjacency.resize(n);
    for (auto& list : graph.adjacency) {
        const auto count = r.get<std::uint32_t>("adjacency count");
        if (count > graph.gamma) throw FormatError("adjacency list longer than gamma", r.offset() - 4);
        list.resize(count);
        for (auto& nb : list) {
            nb.id = r.get<std::uint32_t>("neighbor id");
            if (nb.id >= n) throw FormatError("neighbor id out of range", r.offset() - 4);
            nb.distance = r.get<float>("neighbor distance");
            nb.is_new = false;
        }
    }
    if (!r.exhausted()) throw FormatError("trailing bytes after adjacency block", r.offset());

    try {
        freeze(graph);
    } catch (const Error& e) {
        throw FormatError(e.what(), r.offset());
    }
    return index;
}

HelpIndex read_index(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open index '" + path.string() + "'");
    return read_index(in);
}

}  // namespace helpann
