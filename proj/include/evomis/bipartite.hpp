#pragma once

#include <cstdint>
#include <limits>
#include <queue>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "evomis/graph.hpp"

namespace evomis {

/// Bipartite subgraph over original node ids, typically induced by the
/// cut edges of a bipartition. Edges always run left -> right.
struct BipartiteSubgraph {
    std::vector<NodeID> left;
    std::vector<NodeID> right;
    std::vector<std::pair<NodeID, NodeID>> edges; // (left id, right id), original ids
};

struct Matching {
    std::vector<std::pair<NodeID, NodeID>> pairs; // (left id, right id), original ids
    std::size_t size() const { return pairs.size(); }
};

namespace detail {

// Index-space view of a BipartiteSubgraph plus the Hopcroft-Karp state.
// Kept separate so koenig_min_vertex_cover can reuse the final matching
// arrays for the alternating-reachability construction.
struct HopcroftKarpState {
    static constexpr std::size_t kNil = std::numeric_limits<std::size_t>::max();

    std::vector<std::vector<std::size_t>> adj; // left index -> right indices
    std::vector<std::size_t> match_left;       // left index -> right index or kNil
    std::vector<std::size_t> match_right;      // right index -> left index or kNil
    std::unordered_map<NodeID, std::size_t> left_index;
    std::unordered_map<NodeID, std::size_t> right_index;

    explicit HopcroftKarpState(const BipartiteSubgraph& b) {
        left_index.reserve(b.left.size());
        right_index.reserve(b.right.size());
        for (std::size_t i = 0; i < b.left.size(); ++i) left_index.emplace(b.left[i], i);
        for (std::size_t i = 0; i < b.right.size(); ++i) right_index.emplace(b.right[i], i);
        adj.resize(b.left.size());
        for (auto [l, r] : b.edges) {
            auto li = left_index.find(l);
            auto ri = right_index.find(r);
            if (li == left_index.end() || ri == right_index.end())
                throw std::invalid_argument("bipartite edge endpoint not listed in its side");
            adj[li->second].push_back(ri->second);
        }
        match_left.assign(b.left.size(), kNil);
        match_right.assign(b.right.size(), kNil);
    }

    void solve() {
        const std::size_t nl = adj.size();
        std::vector<std::uint32_t> dist(nl);
        constexpr std::uint32_t kInf = std::numeric_limits<std::uint32_t>::max();
        auto bfs_phase = [&]() {
            std::queue<std::size_t> q;
            bool reachable_free_right = false;
            for (std::size_t u = 0; u < nl; ++u) {
                if (match_left[u] == kNil) {
                    dist[u] = 0;
                    q.push(u);
                } else {
                    dist[u] = kInf;
                }
            }
            while (!q.empty()) {
                std::size_t u = q.front();
                q.pop();
                for (std::size_t r : adj[u]) {
                    std::size_t w = match_right[r];
                    if (w == kNil) {
                        reachable_free_right = true;
                    } else if (dist[w] == kInf) {
                        dist[w] = dist[u] + 1;
                        q.push(w);
                    }
                }
            }
            return reachable_free_right;
        };
        // iterative DFS along the BFS layering
        std::vector<std::size_t> edge_pos(nl);
        auto try_augment = [&](std::size_t start) {
            std::vector<std::size_t> stack{start};
            edge_pos[start] = 0;
            while (!stack.empty()) {
                std::size_t u = stack.back();
                if (edge_pos[u] == adj[u].size()) {
                    dist[u] = kInf;
                    stack.pop_back();
                    continue;
                }
                std::size_t r = adj[u][edge_pos[u]++];
                std::size_t w = match_right[r];
                if (w == kNil) {
                    // augmenting path found; flip matches along the stack
                    for (std::size_t i = stack.size(); i-- > 0;) {
                        std::size_t lu = stack[i];
                        std::size_t prev = match_left[lu];
                        match_left[lu] = r;
                        match_right[r] = lu;
                        r = prev;
                    }
                    return true;
                }
                if (dist[w] == dist[u] + 1) {
                    stack.push_back(w);
                    edge_pos[w] = 0;
                }
            }
            return false;
        };
        while (bfs_phase()) {
            for (std::size_t u = 0; u < nl; ++u)
                if (match_left[u] == kNil) try_augment(u);
        }
    }
};

} // namespace detail

/// Maximum-cardinality matching via Hopcroft-Karp, O(E sqrt(V)) on the
/// subgraph. Deterministic given input ordering.
inline Matching hopcroft_karp(const BipartiteSubgraph& b) {
    detail::HopcroftKarpState state(b);
    state.solve();
    Matching m;
    for (std::size_t u = 0; u < state.match_left.size(); ++u) {
        if (state.match_left[u] != detail::HopcroftKarpState::kNil)
            m.pairs.emplace_back(b.left[u], b.right[state.match_left[u]]);
    }
    return m;
}

/// Minimum vertex cover from a maximum matching via Koenig's theorem:
/// Z = nodes reachable from unmatched left nodes along alternating
/// paths; the cover is (left \ Z) ∪ (right ∩ Z). Asserts both Koenig
/// duality (|cover| = |matching|) and cover validity; a failure means
/// the supplied matching was not maximum.
inline std::vector<NodeID> koenig_min_vertex_cover(const BipartiteSubgraph& b, const Matching& m) {
    detail::HopcroftKarpState state(b);
    constexpr std::size_t kNil = detail::HopcroftKarpState::kNil;
    for (auto [l, r] : m.pairs) {
        std::size_t li = state.left_index.at(l);
        std::size_t ri = state.right_index.at(r);
        if (state.match_left[li] != kNil || state.match_right[ri] != kNil)
            throw std::invalid_argument("matching pairs are not vertex-disjoint");
        state.match_left[li] = ri;
        state.match_right[ri] = li;
    }

    std::vector<bool> z_left(b.left.size(), false), z_right(b.right.size(), false);
    std::queue<std::size_t> q;
    for (std::size_t u = 0; u < b.left.size(); ++u) {
        if (state.match_left[u] == kNil) {
            z_left[u] = true;
            q.push(u);
        }
    }
    while (!q.empty()) {
        std::size_t u = q.front();
        q.pop();
        for (std::size_t r : state.adj[u]) {
            if (z_right[r]) continue;
            if (state.match_left[u] == r) continue; // alternating: left->right via non-matching edges
            z_right[r] = true;
            std::size_t w = state.match_right[r];
            if (w != kNil && !z_left[w]) {
                z_left[w] = true;
                q.push(w);
            }
        }
    }

    std::vector<NodeID> cover;
    for (std::size_t u = 0; u < b.left.size(); ++u)
        if (!z_left[u]) cover.push_back(b.left[u]);
    for (std::size_t r = 0; r < b.right.size(); ++r)
        if (z_right[r]) cover.push_back(b.right[r]);

    if (cover.size() != m.size())
        throw std::logic_error("Koenig duality violated: supplied matching is not maximum");
    for (auto [l, r] : b.edges) {
        bool covered = !z_left[state.left_index.at(l)] || z_right[state.right_index.at(r)];
        if (!covered) throw std::logic_error("Koenig cover misses an edge: supplied matching is not maximum");
    }
    return cover;
}

} // namespace evomis
