#include "helpann/help_index.hpp"

#include <algorithm>
#include <atomic>
#include <numeric>
#include <random>

#include "helpann/error.hpp"
#include "parallel.hpp"

namespace helpann {

using detail::mix_seed;
using detail::NodeLocks;
using detail::parallel_for;

void BuildParams::validate() const {
    if (gamma < 2) throw ArgumentError("gamma must be >= 2");
    if (gamma_new < 1) throw ArgumentError("gamma_new must be >= 1");
    if (!(psi_target >= 0.0 && psi_target <= 1.0)) throw ArgumentError("psi_target must lie in [0, 1]");
    if (!(sigma >= -1.0 && sigma <= 1.0)) throw ArgumentError("sigma must lie in [-1, 1]");
    if (quality_sample < 1) throw ArgumentError("quality_sample must be >= 1");
    if (threads < 1) throw ArgumentError("threads must be >= 1");
}

std::size_t HelpGraph::edge_count() const noexcept {
    std::size_t total = 0;
    for (const auto& list : adjacency) total += list.size();
    return total;
}

std::vector<std::uint32_t> HelpGraph::recount_in_degree() const {
    std::vector<std::uint32_t> counts(adjacency.size(), 0);
    for (const auto& list : adjacency)
        for (const auto& nb : list) ++counts.at(nb.id);
    return counts;
}

std::uint32_t HelpGraph::min_in_degree() const {
    const auto counts = recount_in_degree();
    return counts.empty() ? 0 : *std::min_element(counts.begin(), counts.end());
}

std::vector<std::string> HelpGraph::structural_violations() const {
    std::vector<std::string> issues;
    const auto n = adjacency.size();
    for (std::size_t v = 0; v < n; ++v) {
        const auto& list = adjacency[v];
        const auto node = "node " + std::to_string(v);
        if (list.size() > gamma) issues.push_back(node + ": out-degree " + std::to_string(list.size()) + " > gamma");
        std::vector<NodeId> ids;
        for (std::size_t i = 0; i < list.size(); ++i) {
            if (list[i].id >= n) issues.push_back(node + ": neighbor id out of range");
            if (list[i].id == v) issues.push_back(node + ": self-loop");
            if (i > 0 && closer(list[i], list[i - 1])) issues.push_back(node + ": list not sorted");
            ids.push_back(list[i].id);
        }
        std::sort(ids.begin(), ids.end());
        if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) issues.push_back(node + ": duplicate neighbor");
    }
    if (in_degree.size() == n && in_degree != recount_in_degree()) issues.push_back("stale in-degree counters");
    return issues;
}

namespace {

float stored(double d) { return static_cast<float>(d); }

/// Sorted insert into a bounded list. Returns false when the candidate is a
/// duplicate or not better than a full list's last entry.
bool insert_bounded(std::vector<Neighbor>& list, const Neighbor& nb, std::size_t capacity) {
    if (list.size() >= capacity && !closer(nb, list.back())) return false;
    auto pos = std::lower_bound(list.begin(), list.end(), nb, closer);
    if (pos != list.end() && pos->id == nb.id) return false;
    // Same pair always yields the same distance, but guard against a stale copy.
    for (const auto& existing : list)
        if (existing.id == nb.id) return false;
    list.insert(pos, nb);
    if (list.size() > capacity) list.pop_back();
    return true;
}

void check_buildable(const Dataset& data, const BuildParams& params) {
    params.validate();
    if (data.size() != static_cast<std::size_t>(data.attributes.rows()))
        throw ArgumentError("feature and attribute row counts differ");
    if (data.size() <= params.gamma)
        throw BuildError("dataset has " + std::to_string(data.size()) + " nodes but gamma is " +
                         std::to_string(params.gamma) + "; choose gamma < n");
}

bool has_unexplored(const HelpGraph& graph) {
    for (const auto& list : graph.adjacency)
        for (const auto& nb : list)
            if (nb.is_new) return true;
    return false;
}

}  // namespace

HelpGraph init_random_graph(const Dataset& data, const BuildParams& params, const MetricConfig& metric) {
    check_buildable(data, params);
    const std::size_t n = data.size();
    const std::size_t gamma = params.gamma;

    HelpGraph graph;
    graph.gamma = params.gamma;
    graph.sigma = params.sigma;
    graph.metric = metric;
    graph.adjacency.resize(n);
    const AutoMetric dist(data, metric);

    parallel_for(n, params.threads, [&](std::size_t v) {
        std::mt19937_64 rng(mix_seed(params.seed, v));
        std::vector<NodeId> picked;
        picked.reserve(gamma);
        if (2 * gamma >= n) {
            std::vector<NodeId> others;
            others.reserve(n - 1);
            for (std::size_t u = 0; u < n; ++u)
                if (u != v) others.push_back(static_cast<NodeId>(u));
            std::shuffle(others.begin(), others.end(), rng);
            picked.assign(others.begin(), others.begin() + static_cast<std::ptrdiff_t>(gamma));
        } else {
            std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(n - 1));
            while (picked.size() < gamma) {
                const NodeId u = pick(rng);
                if (u == v || std::find(picked.begin(), picked.end(), u) != picked.end()) continue;
                picked.push_back(u);
            }
        }
        auto& list = graph.adjacency[v];
        list.reserve(gamma + 1);
        for (NodeId u : picked) list.push_back({u, stored(dist.between(static_cast<NodeId>(v), u)), true});
        std::sort(list.begin(), list.end(), closer);
    });
    graph.in_degree = graph.recount_in_degree();
    return graph;
}

std::size_t descent_iteration(HelpGraph& graph, const Dataset& data, const BuildParams& params,
                              std::uint32_t iteration) {
    if (graph.frozen) throw ArgumentError("descent_iteration: graph is frozen");
    const std::size_t n = graph.size();
    const std::size_t gamma_new = params.gamma_new;
    const AutoMetric dist(data, graph.metric);

    // Sample: up to gamma_new new-flagged neighbors become this round's new set
    // (and are marked old); already-old neighbors form the old set.
    std::vector<std::vector<NodeId>> fresh(n), stale(n);
    parallel_for(n, params.threads, [&](std::size_t v) {
        std::size_t taken = 0;
        for (auto& nb : graph.adjacency[v]) {
            if (nb.is_new) {
                if (taken < gamma_new) {
                    fresh[v].push_back(nb.id);
                    nb.is_new = false;
                    ++taken;
                }
            } else {
                stale[v].push_back(nb.id);
            }
        }
    });

    // Reverse neighbors, reservoir-sampled to gamma_new per node.
    std::vector<std::vector<NodeId>> rfresh(n), rstale(n);
    std::vector<std::uint32_t> seen_fresh(n, 0), seen_stale(n, 0);
    std::mt19937_64 rng(mix_seed(params.seed ^ 0x5eedULL, iteration));
    auto reservoir = [&](std::vector<NodeId>& bucket, std::uint32_t& seen, NodeId id) {
        ++seen;
        if (bucket.size() < gamma_new) {
            bucket.push_back(id);
            return;
        }
        const auto slot = std::uniform_int_distribution<std::uint32_t>(0, seen - 1)(rng);
        if (slot < gamma_new) bucket[slot] = id;
    };
    for (std::size_t v = 0; v < n; ++v) {
        for (NodeId u : fresh[v]) reservoir(rfresh[u], seen_fresh[u], static_cast<NodeId>(v));
        for (NodeId u : stale[v]) reservoir(rstale[u], seen_stale[u], static_cast<NodeId>(v));
    }
    auto merge = [](std::vector<NodeId>& into, std::vector<NodeId>& extra) {
        into.insert(into.end(), extra.begin(), extra.end());
        std::sort(into.begin(), into.end());
        into.erase(std::unique(into.begin(), into.end()), into.end());
        std::vector<NodeId>().swap(extra);
    };
    for (std::size_t v = 0; v < n; ++v) {
        merge(fresh[v], rfresh[v]);
        merge(stale[v], rstale[v]);
    }

    // Local join over new x (new u old).
    NodeLocks locks(n, params.threads > 1);
    std::atomic<std::size_t> changes{0};
    auto attempt = [&](NodeId a, NodeId b) -> std::size_t {
        const float d = stored(dist.between(a, b));
        std::size_t made = 0;
        {
            auto guard = locks.lock(a);
            if (insert_bounded(graph.adjacency[a], {b, d, true}, graph.gamma)) ++made;
        }
        {
            auto guard = locks.lock(b);
            if (insert_bounded(graph.adjacency[b], {a, d, true}, graph.gamma)) ++made;
        }
        return made;
    };
    parallel_for(n, params.threads, [&](std::size_t v) {
        std::size_t made = 0;
        const auto& nw = fresh[v];
        const auto& od = stale[v];
        for (std::size_t i = 0; i < nw.size(); ++i) {
            for (std::size_t j = i + 1; j < nw.size(); ++j) made += attempt(nw[i], nw[j]);
            for (NodeId o : od)
                if (o != nw[i]) made += attempt(nw[i], o);
        }
        changes.fetch_add(made, std::memory_order_relaxed);
    });
    graph.in_degree = graph.recount_in_degree();
    return changes.load();
}

QualityEstimate make_quality_estimate(const Dataset& data, const MetricConfig& metric, const BuildParams& params) {
    const std::size_t n = data.size();
    if (n < 2) throw ArgumentError("quality estimate needs at least two nodes");
    QualityEstimate quality;
    quality.k = static_cast<std::uint32_t>(std::min<std::size_t>(params.effective_quality_k(), n - 1));

    std::vector<NodeId> all(n);
    std::iota(all.begin(), all.end(), NodeId{0});
    std::mt19937_64 rng(mix_seed(params.seed, 0xA11CE));
    std::sample(all.begin(), all.end(), std::back_inserter(quality.sample_ids),
                std::min<std::size_t>(params.quality_sample, n), rng);

    const AutoMetric dist(data, metric);
    quality.ground_truth.resize(quality.sample_ids.size());
    parallel_for(quality.sample_ids.size(), params.threads, [&](std::size_t s) {
        const NodeId u = quality.sample_ids[s];
        std::vector<Neighbor> scored;
        scored.reserve(n - 1);
        for (std::size_t v = 0; v < n; ++v)
            if (v != u) scored.push_back({static_cast<NodeId>(v), stored(dist.between(u, static_cast<NodeId>(v))), false});
        std::partial_sort(scored.begin(), scored.begin() + quality.k, scored.end(), closer);
        auto& gt = quality.ground_truth[s];
        for (std::size_t i = 0; i < quality.k; ++i) gt.push_back(scored[i].id);
    });
    return quality;
}

double estimate_graph_quality(const HelpGraph& graph, QualityEstimate& quality) {
    if (quality.sample_ids.empty() || quality.k == 0) throw ArgumentError("quality estimate is empty");
    double total = 0.0;
    for (std::size_t s = 0; s < quality.sample_ids.size(); ++s) {
        std::vector<NodeId> truth = quality.ground_truth[s];
        std::sort(truth.begin(), truth.end());
        const auto& list = graph.adjacency.at(quality.sample_ids[s]);
        const std::size_t take = std::min<std::size_t>(quality.k, list.size());
        std::size_t hits = 0;
        for (std::size_t i = 0; i < take; ++i)
            if (std::binary_search(truth.begin(), truth.end(), list[i].id)) ++hits;
        total += static_cast<double>(hits) / quality.k;
    }
    quality.psi = total / static_cast<double>(quality.sample_ids.size());
    return quality.psi;
}

HelpGraph build_unpruned(const Dataset& data, const BuildParams& params, const MetricConfig& metric,
                         BuildReport* report) {
    BuildReport local;
    BuildReport& rep = report ? *report : local;
    rep = BuildReport{};

    HelpGraph graph = init_random_graph(data, params, metric);
    QualityEstimate quality = make_quality_estimate(data, metric, params);
    double psi = estimate_graph_quality(graph, quality);
    rep.psi_history.push_back(psi);

    rep.termination = Termination::IterationCap;
    while (psi < params.psi_target && rep.iterations < params.max_iterations) {
        const std::size_t changed = descent_iteration(graph, data, params, rep.iterations);
        ++rep.iterations;
        rep.changes.push_back(changed);
        psi = estimate_graph_quality(graph, quality);
        rep.psi_history.push_back(psi);
        if (changed == 0 && !has_unexplored(graph)) break;
    }
    if (psi >= params.psi_target) rep.termination = Termination::QualityReached;
    else if (!rep.changes.empty() && rep.changes.back() == 0 && !has_unexplored(graph))
        rep.termination = Termination::Converged;
    rep.edges_before_prune = graph.edge_count();
    return graph;
}

namespace {

/// Neighbor selection shared by the initial prune and the reverse-edge
/// re-prune. `release(id)` must return true iff dropping the edge to `id`
/// keeps that node reachable (in-degree stays >= 1); it commits the drop.
class NeighborSelector {
public:
    NeighborSelector(const Dataset& data, double sigma) : data_(data), sigma_(sigma) {}

    struct Outcome {
        std::vector<Neighbor> kept;
        std::vector<PruneReport::Redundant> redundant;
        std::vector<Neighbor> overflow;
    };

    template <typename Release>
    Outcome select(NodeId source, const std::vector<Neighbor>& candidates, std::size_t capacity, Release&& release) {
        Outcome out;
        offsets_.resize(static_cast<Eigen::Index>(candidates.size()), data_.features.cols());
        norms_.clear();
        const auto origin = data_.features.row(source).template cast<double>();
        for (const auto& cand : candidates) {
            const auto row = static_cast<Eigen::Index>(out.kept.size());
            offsets_.row(row) = data_.features.row(cand.id).template cast<double>() - origin;
            const double norm = offsets_.row(row).norm();
            if (!out.kept.empty()) {
                if (auto cover = covering(cand.id, out.kept, row, norm)) {
                    if (release(cand.id)) {
                        out.redundant.push_back({source, cand.id, *cover});
                        continue;
                    }
                }
            }
            if (out.kept.size() < capacity) {
                out.kept.push_back(cand);
                norms_.push_back(norm);
            } else {
                out.overflow.push_back(cand);
            }
        }
        return out;
    }

private:
    /// First kept neighbor sharing the candidate's attributes whose offset
    /// makes a cosine above sigma with the candidate's offset.
    std::optional<NodeId> covering(NodeId cand, const std::vector<Neighbor>& kept, Eigen::Index row, double norm) const {
        const auto& attrs = data_.attributes;
        for (std::size_t k = 0; k < kept.size(); ++k) {
            if (attrs.row(kept[k].id) != attrs.row(cand)) continue;
            double cosine = 1.0;
            if (norm > 0.0 && norms_[k] > 0.0)
                cosine = offsets_.row(row).dot(offsets_.row(static_cast<Eigen::Index>(k))) / (norm * norms_[k]);
            if (cosine > sigma_) return kept[k].id;
        }
        return std::nullopt;
    }

    const Dataset& data_;
    double sigma_;
    DenseRowMajor<double> offsets_;
    std::vector<double> norms_;
};

bool try_release(std::uint32_t& counter) {
    std::atomic_ref<std::uint32_t> ref(counter);
    std::uint32_t current = ref.load();
    while (current >= 2)
        if (ref.compare_exchange_weak(current, current - 1)) return true;
    return false;
}

void add_in_edge(std::uint32_t& counter) { std::atomic_ref<std::uint32_t>(counter).fetch_add(1); }

}  // namespace

PruneReport heterogeneous_semantic_prune(HelpGraph& graph, const Dataset& data, const BuildParams& params) {
    if (graph.frozen) throw ArgumentError("heterogeneous_semantic_prune: graph is frozen");
    const std::size_t n = graph.size();
    const std::size_t gamma = graph.gamma;
    graph.sigma = params.sigma;
    graph.in_degree = graph.recount_in_degree();

    PruneReport report;
    report.edges_before = graph.edge_count();
    std::vector<std::vector<PruneReport::Redundant>> redundant(n);
    std::mutex report_mutex;

    // Pass 1: filter every list in place.
    parallel_for(n, params.threads, [&](std::size_t v) {
        NeighborSelector local(data, params.sigma);
        auto release = [&](NodeId id) { return try_release(graph.in_degree[id]); };
        auto outcome = local.select(static_cast<NodeId>(v), graph.adjacency[v], gamma, release);
        graph.adjacency[v] = std::move(outcome.kept);
        redundant[v] = std::move(outcome.redundant);
    });

    // Pass 2: reverse reinforcement. Each surviving edge v->u offers v to u's
    // list; a list pushed past gamma is re-pruned.
    NodeLocks locks(n, params.threads > 1);
    std::atomic<std::size_t> capacity_drops{0}, inserted{0};
    parallel_for(n, params.threads, [&](std::size_t vi) {
        const auto v = static_cast<NodeId>(vi);
        std::vector<Neighbor> snapshot;
        {
            auto guard = locks.lock(v);
            snapshot = graph.adjacency[v];
        }
        NeighborSelector selector(data, params.sigma);
        std::vector<PruneReport::Redundant> extra;
        for (const auto& edge : snapshot) {
            const NodeId u = edge.id;
            auto guard = locks.lock(u);
            auto& list = graph.adjacency[u];
            if (std::any_of(list.begin(), list.end(), [&](const Neighbor& nb) { return nb.id == v; })) continue;
            const Neighbor offer{v, edge.distance, false};
            std::vector<Neighbor> tentative = list;
            tentative.insert(std::lower_bound(tentative.begin(), tentative.end(), offer, closer), offer);
            if (tentative.size() <= gamma) {
                list = std::move(tentative);
                add_in_edge(graph.in_degree[v]);
                inserted.fetch_add(1, std::memory_order_relaxed);
                continue;
            }
            // The offered edge does not exist yet: declining it is only allowed
            // when v already has another in-edge.
            auto release = [&](NodeId id) {
                if (id == v) return std::atomic_ref<std::uint32_t>(graph.in_degree[v]).load() >= 1;
                return try_release(graph.in_degree[id]);
            };
            auto outcome = selector.select(u, tentative, gamma, release);
            const bool offer_kept =
                std::any_of(outcome.kept.begin(), outcome.kept.end(), [&](const Neighbor& nb) { return nb.id == v; });
            if (!outcome.overflow.empty()) {
                // Nothing was redundant; the farthest candidate falls off.
                const NodeId last = outcome.overflow.front().id;
                if (last == v || !try_release(graph.in_degree[last])) continue;
                capacity_drops.fetch_add(1, std::memory_order_relaxed);
            }
            for (auto& r : outcome.redundant)
                if (r.dropped != v) extra.push_back(r);
            list = std::move(outcome.kept);
            if (offer_kept) {
                add_in_edge(graph.in_degree[v]);
                inserted.fetch_add(1, std::memory_order_relaxed);
            }
        }
        if (!extra.empty()) {
            std::lock_guard lock(report_mutex);
            auto& bucket = redundant[v];
            bucket.insert(bucket.end(), extra.begin(), extra.end());
        }
    });
    report.capacity_drops = capacity_drops.load();
    report.reverse_inserted = inserted.load();

    // Pass 3: nodes that never had an in-edge get one from their closest
    // out-neighbor, displacing that list's farthest releasable entry.
    graph.in_degree = graph.recount_in_degree();
    for (std::size_t vi = 0; vi < n; ++vi) {
        if (graph.in_degree[vi] > 0) continue;
        const auto v = static_cast<NodeId>(vi);
        bool placed = false;
        std::vector<NodeId> hosts;
        for (const auto& nb : graph.adjacency[v]) hosts.push_back(nb.id);
        for (std::size_t u = 0; u < n; ++u)
            if (u != vi) hosts.push_back(static_cast<NodeId>(u));
        const AutoMetric dist(data, graph.metric);
        for (NodeId u : hosts) {
            auto& list = graph.adjacency[u];
            if (std::any_of(list.begin(), list.end(), [&](const Neighbor& nb) { return nb.id == v; })) continue;
            if (list.size() >= gamma) {
                auto victim = std::find_if(list.rbegin(), list.rend(),
                                           [&](const Neighbor& nb) { return graph.in_degree[nb.id] >= 2; });
                if (victim == list.rend()) continue;
                --graph.in_degree[victim->id];
                list.erase(std::next(victim).base());
            }
            const Neighbor nb{v, stored(dist.between(u, v)), false};
            list.insert(std::lower_bound(list.begin(), list.end(), nb, closer), nb);
            ++graph.in_degree[v];
            ++report.repaired;
            placed = true;
            break;
        }
        if (!placed) throw BuildError("could not give node " + std::to_string(vi) + " an incoming edge");
    }

    for (auto& bucket : redundant) report.redundant.insert(report.redundant.end(), bucket.begin(), bucket.end());
    report.edges_after = graph.edge_count();
    return report;
}

void freeze(HelpGraph& graph) {
    graph.in_degree = graph.recount_in_degree();
    for (auto& list : graph.adjacency)
        for (auto& nb : list) nb.is_new = false;
    const auto issues = graph.structural_violations();
    if (!issues.empty()) throw Error("graph failed structural check: " + issues.front());
    graph.frozen = true;
}

HelpGraph build(const Dataset& data, const BuildParams& params, const MetricConfig& metric, BuildReport* report) {
    BuildReport local;
    BuildReport& rep = report ? *report : local;
    HelpGraph graph = build_unpruned(data, params, metric, &rep);
    heterogeneous_semantic_prune(graph, data, params);
    freeze(graph);
    rep.edges_after_prune = graph.edge_count();
    return graph;
}

}  // namespace helpann
