#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "evomis/bucket_queue.hpp"
#include "evomis/graph.hpp"
#include "evomis/local_search.hpp"
#include "evomis/random.hpp"
#include "evomis/solution_state.hpp"

namespace evomis {

/// Adds nodes in uniformly random order, skipping any whose neighbor is
/// already in the set. Always ends maximal.
inline Individual random_maximal(const Graph& g, Rng& rng) {
    std::vector<NodeID> order(g.num_nodes());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    SolutionState st(g);
    for (NodeID v : order)
        if (st.is_free(v)) st.insert(v);
    return st.to_individual();
}

/// Greedy constructor: always add a node with the least residual degree
/// (number of free neighbors), ties broken uniformly at random.
/// `restrict_to` limits candidates and the residual-degree universe to
/// the free nodes of the given set.
inline Individual greedy_min_residual(const Graph& g, Rng& rng,
                                      const std::vector<NodeID>* restrict_to = nullptr) {
    SolutionState st(g);
    greedy_extend(st, rng, restrict_to);
    return st.to_individual();
}

/// Detour over a vertex cover: greedily add the node covering the most
/// uncovered edges until all edges are covered, complement the cover,
/// then maximize (the complement of a greedy cover need not be maximal).
inline Individual greedy_vertex_cover(const Graph& g, Rng& rng) {
    const NodeID n = g.num_nodes();
    std::uint32_t max_deg = 0;
    for (NodeID v = 0; v < n; ++v) max_deg = std::max(max_deg, g.degree(v));

    BucketQueue queue(n, max_deg);
    for (NodeID v = 0; v < n; ++v) queue.push(v, g.degree(v));

    std::vector<std::uint8_t> in_cover(n, 0);
    EdgeID uncovered = g.num_edges();
    while (uncovered > 0) {
        // max bucket holds a key >= 1 whenever an edge is uncovered
        NodeID v = queue.pop_max(rng);
        in_cover[v] = 1;
        for (NodeID w : g.neighbors(v)) {
            if (in_cover[w]) continue; // edge already covered by w
            --uncovered;
            if (queue.contains(w)) queue.update_key(w, queue.key_of(w) - 1);
        }
    }

    SolutionState st(g);
    for (NodeID v = 0; v < n; ++v)
        if (!in_cover[v] && st.is_free(v)) st.insert(v);
    greedy_extend(st, rng);
    return st.to_individual();
}

enum class InitKind { kMix, kRandom, kGreedyDegree, kGreedyVertexCover };

inline Individual construct_initial(const Graph& g, Rng& rng, InitKind kind) {
    switch (kind) {
        case InitKind::kRandom: return random_maximal(g, rng);
        case InitKind::kGreedyDegree: return greedy_min_residual(g, rng);
        case InitKind::kGreedyVertexCover: return greedy_vertex_cover(g, rng);
        case InitKind::kMix: break;
    }
    switch (random_index(rng, 3)) {
        case 0: return random_maximal(g, rng);
        case 1: return greedy_min_residual(g, rng);
        default: return greedy_vertex_cover(g, rng);
    }
}

/// Builds `size` individuals, each by a generator picked uniformly at
/// random (unless pinned), optionally refined by one local-search pass
/// so population members start locally maximal like offsprings do.
/// Per-individual seeds derive from the master seed, so the population
/// is independent of construction order.
inline std::vector<Individual> build_population(const Graph& g, std::size_t size, Rng& rng,
                                                InitKind kind = InitKind::kMix,
                                                bool refine = true) {
    std::uint64_t master = rng();
    std::vector<Individual> members;
    members.reserve(size);
    for (std::size_t i = 0; i < size; ++i) {
        Rng sub(derive_seed(master, i));
        Individual ind = construct_initial(g, sub, kind);
        if (refine) {
            SolutionState st(g, ind);
            local_search(st, sub);
            ind = st.to_individual();
        }
        members.push_back(std::move(ind));
    }
    return members;
}

} // namespace evomis
