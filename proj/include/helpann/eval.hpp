#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "helpann/help_index.hpp"
#include "helpann/metric.hpp"
#include "helpann/router.hpp"
#include "helpann/types.hpp"

namespace helpann {

/// Exact top-k under the fused metric by a full linear scan; ties by id.
std::vector<NodeId> oracle_auto_topk(const Dataset& data, const Query& query, std::size_t k,
                                     const MetricConfig& config);

/// Records matching the query on every active attribute dimension, ranked
/// by Euclidean feature distance (ties by id); at most k of them.
std::vector<NodeId> oracle_hybrid_groundtruth(const Dataset& data, const Query& query, std::size_t k);

/// |first-k(retrieved) n truth| / min(k, |truth|). Empty truth scores 1.
/// Throws ArgumentError for k == 0.
double recall_at_k(std::span<const NodeId> retrieved, std::span<const NodeId> truth, std::size_t k);

/// |pool n first-k(truth)| / min(k, |truth|): how much of the true top-k a
/// whole K-wide result list holds. Empty truth scores 1.
double pool_recall(std::span<const NodeId> pool, std::span<const NodeId> truth, std::size_t k);

/// Identity of the mask configuration a ground truth was computed under.
std::uint64_t mask_digest(const QuerySet& queries);

struct GroundTruth {
    std::uint32_t k = 0;
    std::uint64_t mask_digest = 0;
    std::vector<std::vector<NodeId>> ids;
};

/// Exact-match ground truth for every query (parallel over queries).
GroundTruth compute_ground_truth(const Dataset& data, const QuerySet& queries, std::uint32_t k,
                                 unsigned threads = 1);

/// ivecs ids at `path` plus a `<path>.meta` sidecar recording k and the mask digest.
void write_ground_truth(const std::filesystem::path& path, const GroundTruth& truth);
/// Throws Error when the sidecar is missing.
GroundTruth read_ground_truth(const std::filesystem::path& path);

struct EvalRow {
    std::uint32_t k = 0;
    std::uint32_t pioneer = 0;
    double mean_recall_at_10 = 0.0;
    double qps = 0.0;
    double mean_dist_evals = 0.0;
    std::size_t n_queries = 0;
    /// Queries with a non-empty ground truth (the recall mean runs over these).
    std::size_t scored_queries = 0;
    std::vector<double> recalls;
};

struct BenchOptions {
    std::uint32_t recall_k = 10;
    std::uint32_t timing_passes = 3;
};

/// For each k: runs every query single-threaded, scores Recall@10 against
/// `truth` and records the median QPS over the timing passes. `params`
/// supplies seed, pioneer size (0 = k/2) and phase selection.
std::vector<EvalRow> bench_sweep(const HelpIndex& index, const QuerySet& queries, const GroundTruth& truth,
                                 std::span<const std::uint32_t> k_values, const SearchParams& params,
                                 const BenchOptions& options = {});

/// CSV header `k,pioneer,mean_recall_at_10,qps,mean_dist_evals,n_queries`.
void write_bench_csv(std::ostream& out, std::span<const EvalRow> rows);

}  // namespace helpann
