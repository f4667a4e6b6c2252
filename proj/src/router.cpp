#include "helpann/router.hpp"

#include <algorithm>
#include <random>

#include "helpann/error.hpp"
#include "parallel.hpp"

namespace helpann {

namespace {

bool ahead(NodeId a_id, double a_dist, const Candidate& b) noexcept {
    return a_dist < b.distance || (a_dist == b.distance && a_id < b.id);
}

}  // namespace

bool CandidateList::offer(NodeId id, double distance) {
    if (capacity_ == 0) return false;
    if (full() && !ahead(id, distance, items_.back())) return false;
    auto pos = std::lower_bound(items_.begin(), items_.end(), Candidate{id, distance, false},
                                [](const Candidate& a, const Candidate& b) { return ahead(a.id, a.distance, b); });
    items_.insert(pos, Candidate{id, distance, false});
    if (items_.size() > capacity_) items_.pop_back();
    return true;
}

std::size_t CandidateList::first_unchecked() const noexcept {
    for (std::size_t i = 0; i < items_.size(); ++i)
        if (!items_[i].checked) return i;
    return items_.size();
}

void CandidateList::uncheck_all() noexcept {
    for (auto& c : items_) c.checked = false;
}

void SearchState::reset(std::size_t n, std::uint32_t k, std::uint32_t pioneer_size) {
    if (marks_.size() != n) {
        marks_.assign(n, 0);
        epoch_ = 0;
    }
    if (++epoch_ == 0) {
        std::fill(marks_.begin(), marks_.end(), 0);
        epoch_ = 1;
    }
    result.reset(k);
    pioneer.reset(pioneer_size);
    stats = SearchStats{};
}

std::uint64_t query_seed(std::uint64_t seed, std::uint64_t query_index) noexcept {
    return detail::mix_seed(seed, query_index);
}

void initialize_route(SearchState& state, const HelpIndex& index, const Query& query, std::uint32_t k,
                      std::uint32_t pioneer_size, std::uint64_t entry_seed) {
    const std::size_t n = index.graph.size();
    state.reset(n, k, pioneer_size);
    const AutoMetric metric(index.data, index.graph.metric);
    auto eval = [&](NodeId v) { return metric.to_query(v, query); };

    std::mt19937_64 rng(entry_seed);
    std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(n - 1));
    if (static_cast<std::size_t>(k) * 2 >= n) {
        std::vector<NodeId> all(n);
        for (std::size_t i = 0; i < n; ++i) all[i] = static_cast<NodeId>(i);
        std::shuffle(all.begin(), all.end(), rng);
        for (std::uint32_t i = 0; i < k; ++i) {
            double d = 0.0;
            state.visit(all[i], eval, d);
            state.result.offer(all[i], d);
        }
    } else {
        while (state.result.size() < k) {
            const NodeId v = pick(rng);
            double d = 0.0;
            if (state.visit(v, eval, d)) state.result.offer(v, d);
        }
    }
    for (std::uint32_t i = 0; i < pioneer_size && i < state.result.size(); ++i)
        state.pioneer.offer(state.result[i].id, state.result[i].distance);
}

void coarse_route(SearchState& state, const HelpIndex& index, const Query& query) {
    const AutoMetric metric(index.data, index.graph.metric);
    auto eval = [&](NodeId v) { return metric.to_query(v, query); };
    auto& pioneer = state.pioneer;
    for (;;) {
        const std::size_t at = pioneer.first_unchecked();
        if (at == pioneer.size()) break;
        pioneer[at].checked = true;
        const auto& neighbors = index.graph.adjacency[pioneer[at].id];
        const std::size_t half = (neighbors.size() + 1) / 2;
        ++state.stats.expansions;
        ++state.stats.coarse_expansions;
        state.stats.coarse_budget += half;
        for (std::size_t j = 0; j < half; ++j) {
            const NodeId nb = neighbors[j].id;
            double d = 0.0;
            if (!state.visit(nb, eval, d)) continue;
            ++state.stats.coarse_evaluations;
            state.result.offer(nb, d);
            pioneer.offer(nb, d);
        }
    }
}

void refine_route(SearchState& state, const HelpIndex& index, const Query& query) {
    const AutoMetric metric(index.data, index.graph.metric);
    auto eval = [&](NodeId v) { return metric.to_query(v, query); };
    auto& result = state.result;
    result.uncheck_all();
    for (;;) {
        const std::size_t at = result.first_unchecked();
        if (at == result.size()) break;
        result[at].checked = true;
        ++state.stats.expansions;
        for (const auto& edge : index.graph.adjacency[result[at].id]) {
            double d = 0.0;
            if (state.visit(edge.id, eval, d)) result.offer(edge.id, d);
        }
    }
}

Router::Router(const HelpIndex& index) : index_(&index) {
    if (!index.graph.frozen) throw ArgumentError("Router requires a frozen index");
}

SearchResult Router::search(const Query& query, const SearchParams& params, std::uint64_t query_index) {
    const auto& data = index_->data;
    const std::size_t n = index_->graph.size();
    if (static_cast<std::size_t>(query.feature.size()) != data.feature_dims())
        throw ArgumentError("query feature dimension " + std::to_string(query.feature.size()) + " != index " +
                            std::to_string(data.feature_dims()));
    if (static_cast<std::size_t>(query.attributes.size()) != data.attribute_dims())
        throw ArgumentError("query attribute dimension mismatch");
    if (query.mask && static_cast<std::size_t>(query.mask->size()) != data.attribute_dims())
        throw ArgumentError("query mask dimension mismatch");
    if (params.k < 1 || params.k > n)
        throw ArgumentError("k = " + std::to_string(params.k) + " must lie in [1, " + std::to_string(n) + "]");
    const std::uint32_t pioneers = params.effective_pioneer_size();
    if (pioneers > params.k) throw ArgumentError("pioneer size exceeds k");

    initialize_route(state_, *index_, query, params.k, pioneers, query_seed(params.seed, query_index));
    if (params.coarse_phase) coarse_route(state_, *index_, query);
    refine_route(state_, *index_, query);

    SearchResult out;
    out.stats = state_.stats;
    for (const auto& c : state_.result.items()) {
        out.ids.push_back(c.id);
        out.distances.push_back(c.distance);
    }
    return out;
}

}  // namespace helpann
