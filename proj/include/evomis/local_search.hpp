#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "evomis/graph.hpp"
#include "evomis/random.hpp"
#include "evomis/solution_state.hpp"

namespace evomis {

struct ArwParams {
    std::uint32_t perturb_candidates = 4; // pool for the oldest-out rule
    std::uint32_t force_cap = 32;         // upper bound on forced insertions
};

/// Number of nodes forced into the solution by one perturbation:
/// f = i+1 with probability 1/2^i (i >= 1), truncated at cap.
inline std::uint32_t perturbation_force_count(Rng& rng, std::uint32_t cap) {
    std::uint32_t i = 1;
    while (i + 1 < cap && random_coin(rng)) ++i;
    return i + 1;
}

/// Looks for a (1,2)-swap at solution node x: two non-adjacent nodes
/// that are 1-tight with x as their only solution neighbor. Removing x
/// and inserting the pair gains one node. Exact: returns nullopt iff no
/// such pair exists for x. Cost is linear in the degrees involved.
inline std::optional<std::pair<NodeID, NodeID>> find_12_swap(const SolutionState& st, NodeID x) {
    const Graph& g = st.graph();
    std::vector<NodeID> one_tight;
    for (NodeID w : g.neighbors(x)) {
        if (!st.in_solution(w) && st.tightness_of(w) == 1) one_tight.push_back(w);
    }
    if (one_tight.size() < 2) return std::nullopt;

    st.mark_begin();
    for (NodeID w : one_tight) st.mark(w);
    // the pair exists iff the 1-tight neighborhood is not a clique
    for (NodeID v : one_tight) {
        std::size_t adjacent_in_set = 0;
        for (NodeID u : g.neighbors(v))
            if (st.marked(u)) ++adjacent_in_set;
        if (adjacent_in_set + 1 < one_tight.size()) {
            st.mark_begin();
            for (NodeID u : g.neighbors(v)) st.mark(u);
            for (NodeID w : one_tight)
                if (w != v && !st.marked(w)) return std::make_pair(v, w);
        }
    }
    return std::nullopt;
}

/// Adds free nodes until none remain, using the greedy
/// least-residual-degree rule.
inline void maximize(SolutionState& st, Rng& rng) {
    if (st.num_free() > 0) greedy_extend(st, rng);
}

/// Incremental (1,2)-swap local search: maximizes if needed, then
/// drains the candidate list, applying swaps (and re-maximizing after
/// each) until no solution node admits one.
inline void local_search(SolutionState& st, Rng& rng) {
    maximize(st, rng);
    while (st.has_candidates()) {
        NodeID x = st.pop_candidate();
        if (!st.in_solution(x)) continue;
        auto swap = find_12_swap(st, x);
        if (!swap) continue;
        st.remove(x);
        st.insert(swap->first);
        st.insert(swap->second);
        maximize(st, rng);
    }
}

namespace detail {

// Uniform draw from the non-solution nodes; rejection sampling with a
// linear-scan fallback for nearly full solutions.
inline NodeID random_nonsolution_node(const SolutionState& st, Rng& rng) {
    const NodeID n = st.graph().num_nodes();
    for (int attempt = 0; attempt < 64; ++attempt) {
        NodeID v = static_cast<NodeID>(random_index(rng, n));
        if (!st.in_solution(v)) return v;
    }
    NodeID start = static_cast<NodeID>(random_index(rng, n));
    for (NodeID i = 0; i < n; ++i) {
        NodeID v = (start + i) % n;
        if (!st.in_solution(v)) return v;
    }
    return SolutionState::npos;
}

} // namespace detail

/// Forces v into the solution, removing adjacent solution nodes first.
inline void force_insert(SolutionState& st, NodeID v) {
    if (st.in_solution(v)) return;
    while (st.tightness_of(v) > 0) st.remove(st.any_solution_neighbor(v));
    st.insert(v);
}

/// ARW perturbation: forces f nodes into the solution (f from the
/// 1/2^i law), each chosen as the oldest-out among a few random
/// non-solution candidates, then re-maximizes.
inline void perturb(SolutionState& st, Rng& rng, const ArwParams& params = {}) {
    const NodeID n = st.graph().num_nodes();
    std::uint32_t f = std::min<std::uint32_t>(perturbation_force_count(rng, params.force_cap), n);
    for (std::uint32_t k = 0; k < f; ++k) {
        if (st.num_nonsolution() == 0) break;
        NodeID chosen = SolutionState::npos;
        std::uint64_t oldest = std::numeric_limits<std::uint64_t>::max();
        for (std::uint32_t c = 0; c < params.perturb_candidates; ++c) {
            NodeID v = detail::random_nonsolution_node(st, rng);
            if (v == SolutionState::npos) break;
            if (st.last_removed_stamp(v) < oldest) {
                oldest = st.last_removed_stamp(v);
                chosen = v;
            }
        }
        if (chosen == SolutionState::npos) break;
        force_insert(st, chosen);
    }
    maximize(st, rng);
}

struct IterateResult {
    Individual best;
    std::uint32_t improved_at = 0; // iteration index of the last improvement
};

/// One ARW iteration is a perturbation followed by a local search.
/// Runs the cycle `iterations` times and reports the best solution
/// encountered; the final state may be worse than the best due to the
/// trailing perturbation.
inline IterateResult iterate(SolutionState& st, std::uint32_t iterations, Rng& rng,
                             const ArwParams& params = {},
                             std::chrono::steady_clock::time_point deadline =
                                 std::chrono::steady_clock::time_point::max()) {
    IterateResult result{st.to_individual(), 0};
    for (std::uint32_t it = 1; it <= iterations; ++it) {
        perturb(st, rng, params);
        local_search(st, rng);
        if (st.size() > result.best.size()) {
            result.best = st.to_individual();
            result.improved_at = it;
        }
        if ((it & 63u) == 0 && std::chrono::steady_clock::now() >= deadline) break;
    }
    return result;
}

} // namespace evomis
