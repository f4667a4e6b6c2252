#pragma once

#include <cstdint>
#include <vector>

#include "helpann/help_index.hpp"
#include "helpann/types.hpp"

namespace helpann {

struct SearchParams {
    std::uint32_t k = 10;
    /// Pioneer set size; 0 selects max(1, k / 2).
    std::uint32_t pioneer_size = 0;
    std::uint64_t seed = 1;
    /// false skips the half-neighbor coarse phase (refinement only).
    bool coarse_phase = true;

    std::uint32_t effective_pioneer_size() const noexcept {
        return pioneer_size ? pioneer_size : std::max<std::uint32_t>(1, k / 2);
    }
};

struct SearchStats {
    std::uint64_t distance_evaluations = 0;
    std::uint64_t expansions = 0;         ///< nodes whose neighbors were inspected (both phases)
    std::uint64_t coarse_expansions = 0;  ///< pioneer expansions in the coarse phase
    std::uint64_t coarse_evaluations = 0;
    /// Sum over expanded pioneers of ceil(out-degree / 2).
    std::uint64_t coarse_budget = 0;
};

struct Candidate {
    NodeId id = 0;
    double distance = 0.0;
    bool checked = false;
};

/// Bounded list kept sorted by (distance, id).
class CandidateList {
public:
    explicit CandidateList(std::size_t capacity = 0) : capacity_(capacity) {}

    void reset(std::size_t capacity) {
        capacity_ = capacity;
        items_.clear();
    }
    /// Inserts unless the list is full and the candidate is not better than
    /// the last entry. Returns whether it was inserted.
    bool offer(NodeId id, double distance);
    /// Index of the closest unchecked entry, or size() if none.
    std::size_t first_unchecked() const noexcept;
    void uncheck_all() noexcept;

    std::size_t size() const noexcept { return items_.size(); }
    std::size_t capacity() const noexcept { return capacity_; }
    bool full() const noexcept { return items_.size() >= capacity_; }
    Candidate& operator[](std::size_t i) { return items_[i]; }
    const Candidate& operator[](std::size_t i) const { return items_[i]; }
    const std::vector<Candidate>& items() const noexcept { return items_; }

private:
    std::size_t capacity_;
    std::vector<Candidate> items_;
};

/// Per-query routing state: result list R, pioneer list P and the visited
/// set that guarantees each node is evaluated at most once.
class SearchState {
public:
    SearchState() = default;

    /// Resets for a new query over an index of `n` nodes.
    void reset(std::size_t n, std::uint32_t k, std::uint32_t pioneer_size);
    /// Evaluates `node` unless already visited; returns false if it was.
    template <typename Eval>
    bool visit(NodeId node, Eval&& eval, double& distance) {
        if (marks_[node] == epoch_) return false;
        marks_[node] = epoch_;
        distance = eval(node);
        ++stats.distance_evaluations;
        return true;
    }
    bool visited(NodeId node) const noexcept { return marks_[node] == epoch_; }

    CandidateList result;
    CandidateList pioneer;
    SearchStats stats;

private:
    std::vector<std::uint32_t> marks_;
    std::uint32_t epoch_ = 0;
};

struct SearchResult {
    std::vector<NodeId> ids;
    std::vector<double> distances;
    SearchStats stats;
};

/// Derives the per-query entry seed from the run seed and the query index.
std::uint64_t query_seed(std::uint64_t seed, std::uint64_t query_index) noexcept;

/// Fills R with k distinct random nodes (sorted) and P with the first
/// pioneer_size of them.
void initialize_route(SearchState& state, const HelpIndex& index, const Query& query, std::uint32_t k,
                      std::uint32_t pioneer_size, std::uint64_t entry_seed);

/// Coarse phase: expands the closest unchecked pioneer over the first
/// ceil(degree / 2) of its neighbors until no pioneer is unchecked.
void coarse_route(SearchState& state, const HelpIndex& index, const Query& query);

/// Refinement phase: expands every unchecked result entry over all of its
/// neighbors until no result entry is unchecked. Result flags start fresh.
void refine_route(SearchState& state, const HelpIndex& index, const Query& query);

/// Answers hybrid top-k queries over a frozen index. One Router per thread;
/// the index is shared read-only.
class Router {
public:
    explicit Router(const HelpIndex& index);

    /// Throws ArgumentError on dimension mismatch or k > n.
    SearchResult search(const Query& query, const SearchParams& params, std::uint64_t query_index = 0);

private:
    const HelpIndex* index_;
    SearchState state_;
};

}  // namespace helpann
