#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "helpann/metric.hpp"
#include "helpann/types.hpp"

namespace helpann {

struct BuildParams {
    std::uint32_t gamma = 100;      ///< max out-degree
    std::uint32_t gamma_new = 100;  ///< max neighbors sampled as "new" per node and iteration
    double sigma = 0.44;            ///< cosine redundancy threshold for pruning
    double psi_target = 0.8;        ///< graph-quality stop threshold
    std::uint32_t max_iterations = 30;
    std::uint32_t quality_sample = 100;
    std::uint32_t quality_k = 0;  ///< 0 selects gamma
    std::uint64_t seed = 1;
    std::uint32_t threads = 1;

    std::uint32_t effective_quality_k() const noexcept { return quality_k ? quality_k : gamma; }
    /// Throws ArgumentError on out-of-range fields.
    void validate() const;
};

struct Neighbor {
    NodeId id = 0;
    float distance = 0.0f;
    bool is_new = true;
};

/// Ascending by distance, then by id.
inline bool closer(const Neighbor& a, const Neighbor& b) noexcept {
    return a.distance < b.distance || (a.distance == b.distance && a.id < b.id);
}

/// Flat proximity graph. Each adjacency list holds at most `gamma` distinct
/// neighbors sorted by fused distance. Mutable until frozen.
struct HelpGraph {
    std::uint32_t gamma = 0;
    double sigma = 0.0;
    MetricConfig metric;
    std::vector<std::vector<Neighbor>> adjacency;
    std::vector<std::uint32_t> in_degree;
    bool frozen = false;

    std::size_t size() const noexcept { return adjacency.size(); }
    std::size_t edge_count() const noexcept;
    std::vector<std::uint32_t> recount_in_degree() const;
    std::uint32_t min_in_degree() const;
    /// Human-readable descriptions of every violated structural invariant
    /// (self-loop, duplicate, unsorted list, degree > gamma, stale in-degree).
    std::vector<std::string> structural_violations() const;
};

struct QualityEstimate {
    std::vector<NodeId> sample_ids;
    /// Exact nearest neighbors (fused metric, self excluded) of each sampled node.
    std::vector<std::vector<NodeId>> ground_truth;
    std::uint32_t k = 0;
    double psi = 0.0;
};

/// Converged: an iteration changed nothing and no unexplored new neighbors remain.
enum class Termination { QualityReached, IterationCap, Converged };

struct BuildReport {
    std::uint32_t iterations = 0;
    std::vector<double> psi_history;  ///< psi before the first iteration, then after each
    std::vector<std::size_t> changes;  ///< edge replacements per iteration
    Termination termination = Termination::QualityReached;
    std::size_t edges_before_prune = 0;
    std::size_t edges_after_prune = 0;
    double final_psi() const { return psi_history.empty() ? 0.0 : psi_history.back(); }
};

struct PruneReport {
    std::size_t edges_before = 0;
    std::size_t edges_after = 0;
    /// (source, dropped neighbor, covering neighbor) for every edge removed
    /// by the redundancy rule.
    struct Redundant {
        NodeId source;
        NodeId dropped;
        NodeId covered_by;
    };
    std::vector<Redundant> redundant;
    std::size_t capacity_drops = 0;
    std::size_t reverse_inserted = 0;
    std::size_t repaired = 0;
};

/// Gamma distinct random neighbors per node, all flagged new. Throws
/// BuildError when n <= gamma.
HelpGraph init_random_graph(const Dataset& data, const BuildParams& params, const MetricConfig& metric);

/// One local-join round: sample new/old candidate sets (with reverse
/// neighbors), then try every new x (new u old) pair in both directions.
/// Returns the number of list replacements.
std::size_t descent_iteration(HelpGraph& graph, const Dataset& data, const BuildParams& params,
                              std::uint32_t iteration = 0);

/// Samples `quality_sample` nodes and computes their exact k-NN once.
QualityEstimate make_quality_estimate(const Dataset& data, const MetricConfig& metric, const BuildParams& params);

/// Mean fraction of each sampled node's true k-NN among its first
/// min(k, degree) current neighbors. Stores the value in `quality.psi`.
double estimate_graph_quality(const HelpGraph& graph, QualityEstimate& quality);

/// Random init plus descent iterations until psi >= psi_target or the
/// iteration cap. The result is not pruned or frozen.
HelpGraph build_unpruned(const Dataset& data, const BuildParams& params, const MetricConfig& metric,
                         BuildReport* report = nullptr);

/// Drops same-attribute, angularly redundant neighbors (cosine of the
/// feature-space offsets above sigma) without ever removing a node's last
/// in-edge, then reinforces with reverse edges.
PruneReport heterogeneous_semantic_prune(HelpGraph& graph, const Dataset& data, const BuildParams& params);

/// Recounts in-degrees, verifies invariants and marks the graph immutable.
void freeze(HelpGraph& graph);

/// build_unpruned + heterogeneous_semantic_prune + freeze.
HelpGraph build(const Dataset& data, const BuildParams& params, const MetricConfig& metric,
                BuildReport* report = nullptr);

/// A frozen graph bundled with the records it indexes.
struct HelpIndex {
    Dataset data;
    HelpGraph graph;
};

inline constexpr std::uint32_t kIndexFormatVersion = 1;

void write_index(std::ostream& out, const HelpIndex& index);
void write_index(const std::filesystem::path& path, const HelpIndex& index);
/// Throws FormatError on bad magic, unknown version or truncation.
HelpIndex read_index(std::istream& in);
HelpIndex read_index(const std::filesystem::path& path);

}  // namespace helpann
