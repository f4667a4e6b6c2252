#include "helpann/eval.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <ostream>
#include <sstream>

#include "helpann/dataset_io.hpp"
#include "helpann/error.hpp"
#include "parallel.hpp"

namespace helpann {

namespace {

struct Scored {
    double distance;
    NodeId id;
    bool operator<(const Scored& o) const noexcept {
        return distance < o.distance || (distance == o.distance && id < o.id);
    }
};

std::vector<NodeId> top_ids(std::vector<Scored>& scored, std::size_t k) {
    k = std::min(k, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(k), scored.end());
    std::vector<NodeId> ids(k);
    for (std::size_t i = 0; i < k; ++i) ids[i] = scored[i].id;
    return ids;
}

}  // namespace

std::vector<NodeId> oracle_auto_topk(const Dataset& data, const Query& query, std::size_t k,
                                     const MetricConfig& config) {
    const std::size_t n = data.size();
    if (k > n) throw ArgumentError("oracle_auto_topk: k exceeds dataset size");
    std::vector<Scored> scored(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = static_cast<Eigen::Index>(i);
        scored[i] = {auto_distance(data.features.row(row), data.attributes.row(row), query, config),
                     static_cast<NodeId>(i)};
    }
    return top_ids(scored, k);
}

std::vector<NodeId> oracle_hybrid_groundtruth(const Dataset& data, const Query& query, std::size_t k) {
    std::vector<Scored> matches;
    for (Eigen::Index i = 0; i < data.features.rows(); ++i) {
        const double s_a = query.mask ? attribute_distance_masked(data.attributes.row(i), query.attributes, *query.mask)
                                      : attribute_distance(data.attributes.row(i), query.attributes);
        if (s_a != 0.0) continue;
        matches.push_back({feature_distance(data.features.row(i), query.feature), static_cast<NodeId>(i)});
    }
    return top_ids(matches, k);
}

double recall_at_k(std::span<const NodeId> retrieved, std::span<const NodeId> truth, std::size_t k) {
    if (k == 0) throw ArgumentError("recall_at_k: k must be >= 1");
    if (truth.empty()) return 1.0;
    std::vector<NodeId> sorted_truth(truth.begin(), truth.end());
    std::sort(sorted_truth.begin(), sorted_truth.end());
    const std::size_t take = std::min(k, retrieved.size());
    std::size_t hits = 0;
    for (std::size_t i = 0; i < take; ++i)
        if (std::binary_search(sorted_truth.begin(), sorted_truth.end(), retrieved[i])) ++hits;
    return static_cast<double>(hits) / static_cast<double>(std::min(k, truth.size()));
}

double pool_recall(std::span<const NodeId> pool, std::span<const NodeId> truth, std::size_t k) {
    if (k == 0) throw ArgumentError("pool_recall: k must be >= 1");
    if (truth.empty()) return 1.0;
    std::vector<NodeId> sorted_pool(pool.begin(), pool.end());
    std::sort(sorted_pool.begin(), sorted_pool.end());
    const std::size_t want = std::min(k, truth.size());
    std::size_t hits = 0;
    for (std::size_t i = 0; i < want; ++i)
        if (std::binary_search(sorted_pool.begin(), sorted_pool.end(), truth[i])) ++hits;
    return static_cast<double>(hits) / static_cast<double>(want);
}

std::uint64_t mask_digest(const QuerySet& queries) {
    // FNV-1a over (rows, cols, bits); "no masks" hashes like an all-ones mask.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto feed = [&](std::uint64_t byte) {
        h ^= byte & 0xff;
        h *= 0x100000001b3ULL;
    };
    const auto rows = static_cast<std::uint64_t>(queries.size());
    const auto cols = static_cast<std::uint64_t>(queries.attributes.cols());
    for (int s = 0; s < 64; s += 8) feed(rows >> s);
    for (int s = 0; s < 64; s += 8) feed(cols >> s);
    for (Eigen::Index i = 0; i < queries.attributes.rows(); ++i)
        for (Eigen::Index d = 0; d < queries.attributes.cols(); ++d)
            feed(queries.masks ? (*queries.masks)(i, d) : 1);
    return h;
}

GroundTruth compute_ground_truth(const Dataset& data, const QuerySet& queries, std::uint32_t k, unsigned threads) {
    if (k == 0) throw ArgumentError("ground truth k must be >= 1");
    GroundTruth truth;
    truth.k = k;
    truth.mask_digest = mask_digest(queries);
    truth.ids.resize(queries.size());
    detail::parallel_for(queries.size(), threads,
                         [&](std::size_t q) { truth.ids[q] = oracle_hybrid_groundtruth(data, queries.at(q), k); });
    return truth;
}

void write_ground_truth(const std::filesystem::path& path, const GroundTruth& truth) {
    write_ivecs_lists(path, truth.ids);
    std::ofstream meta(path.string() + ".meta", std::ios::trunc);
    if (!meta) throw Error("cannot write '" + path.string() + ".meta'");
    meta << "k=" << truth.k << "\nmask_digest=" << truth.mask_digest << "\nqueries=" << truth.ids.size() << '\n';
}

GroundTruth read_ground_truth(const std::filesystem::path& path) {
    const std::string meta_path = path.string() + ".meta";
    std::ifstream meta(meta_path);
    if (!meta) throw Error("ground truth sidecar '" + meta_path + "' is missing");
    GroundTruth truth;
    std::size_t queries = 0;
    bool have_k = false, have_digest = false;
    std::string line;
    std::size_t ln = 0;
    while (std::getline(meta, line)) {
        ++ln;
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw FormatError("bad line in '" + meta_path + "'", ln);
        const auto key = line.substr(0, eq);
        const auto value = line.substr(eq + 1);
        try {
            if (key == "k") truth.k = static_cast<std::uint32_t>(std::stoul(value)), have_k = true;
            else if (key == "mask_digest") truth.mask_digest = std::stoull(value), have_digest = true;
            else if (key == "queries") queries = std::stoull(value);
        } catch (const std::exception&) {
            throw FormatError("bad value for '" + key + "' in '" + meta_path + "'", ln);
        }
    }
    if (!have_k || !have_digest) throw FormatError("'" + meta_path + "' lacks k or mask_digest", ln);
    truth.ids = read_ivecs_lists(path);
    if (truth.ids.size() != queries) throw FormatError("'" + path.string() + "' record count differs from sidecar", 0);
    return truth;
}

std::vector<EvalRow> bench_sweep(const HelpIndex& index, const QuerySet& queries, const GroundTruth& truth,
                                 std::span<const std::uint32_t> k_values, const SearchParams& params,
                                 const BenchOptions& options) {
    if (truth.ids.empty() && queries.size() > 0) throw ArgumentError("bench_sweep: ground truth is missing");
    if (truth.ids.size() != queries.size())
        throw ArgumentError("bench_sweep: ground truth covers " + std::to_string(truth.ids.size()) + " queries, " +
                            std::to_string(queries.size()) + " given");
    if (truth.k != options.recall_k)
        throw ArgumentError("bench_sweep: ground truth was computed for k=" + std::to_string(truth.k) +
                            ", Recall@" + std::to_string(options.recall_k) + " needs the same k");
    if (truth.mask_digest != mask_digest(queries))
        throw ArgumentError("bench_sweep: ground truth was computed under different query masks");
    for (auto k : k_values)
        if (k < 1 || k > index.graph.size())
            throw ArgumentError("bench_sweep: k=" + std::to_string(k) + " outside [1, " +
                                std::to_string(index.graph.size()) + "]");

    Router router(index);
    std::vector<EvalRow> rows;
    for (auto k : k_values) {
        SearchParams run = params;
        run.k = k;
        run.pioneer_size = params.pioneer_size ? std::min(params.pioneer_size, k) : 0;

        EvalRow row;
        row.k = k;
        row.pioneer = run.effective_pioneer_size();
        row.n_queries = queries.size();
        std::vector<double> pass_seconds;
        double recall_sum = 0.0;
        std::uint64_t evals = 0;
        for (std::uint32_t pass = 0; pass < std::max<std::uint32_t>(1, options.timing_passes); ++pass) {
            const auto start = std::chrono::steady_clock::now();
            for (std::size_t q = 0; q < queries.size(); ++q) {
                const auto result = router.search(queries.at(q), run, q);
                if (pass != 0) continue;
                evals += result.stats.distance_evaluations;
                const double r = pool_recall(result.ids, truth.ids[q], options.recall_k);
                row.recalls.push_back(r);
                if (!truth.ids[q].empty()) {
                    recall_sum += r;
                    ++row.scored_queries;
                }
            }
            pass_seconds.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
        }
        std::sort(pass_seconds.begin(), pass_seconds.end());
        const double median = pass_seconds[pass_seconds.size() / 2];
        row.qps = median > 0.0 ? static_cast<double>(queries.size()) / median : 0.0;
        row.mean_recall_at_10 = row.scored_queries ? recall_sum / static_cast<double>(row.scored_queries) : 0.0;
        if (queries.size() > 0 && row.scored_queries == 0)
            throw ConstraintError("bench_sweep: no query has a non-empty ground truth");
        row.mean_dist_evals = queries.size() ? static_cast<double>(evals) / static_cast<double>(queries.size()) : 0.0;
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_bench_csv(std::ostream& out, std::span<const EvalRow> rows) {
    out << "k,pioneer,mean_recall_at_10,qps,mean_dist_evals,n_queries\n";
    for (const auto& row : rows) {
        std::ostringstream line;
        line.precision(6);
        line << std::fixed << row.k << ',' << row.pioneer << ',' << row.mean_recall_at_10 << ',' << row.qps << ','
             << row.mean_dist_evals << ',' << row.n_queries << '\n';
        out << line.str();
    }
}

}  // namespace helpann
