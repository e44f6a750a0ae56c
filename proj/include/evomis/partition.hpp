#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "evomis/bipartite.hpp"
#include "evomis/bucket_queue.hpp"
#include "evomis/graph.hpp"
#include "evomis/random.hpp"

namespace evomis {

using BlockID = std::uint32_t;

/// L_max = (1+eps) * ceil(n/k), rounded down to the integer bound with
/// a guard against floating-point noise on exact products.
inline NodeID max_block_capacity(NodeID n, BlockID k, double epsilon) {
    double per_block = std::ceil(static_cast<double>(n) / k);
    return static_cast<NodeID>(std::floor((1.0 + epsilon) * per_block + 1e-9));
}

/// Balanced k-way edge partition: per-node block ids plus the recounted
/// cut and block sizes.
struct Partition {
    BlockID k = 0;
    double epsilon = 0.0;
    std::vector<BlockID> assignment;
    EdgeID cut = 0;
    std::vector<NodeID> block_sizes;

    NodeID num_nodes() const { return static_cast<NodeID>(assignment.size()); }

    BlockID nonempty_blocks() const {
        BlockID c = 0;
        for (NodeID s : block_sizes)
            if (s > 0) ++c;
        return c;
    }

    /// A partition with fewer than two nonempty blocks has no cut to
    /// exchange across and is unusable for combine operations.
    bool usable_for_combine() const { return nonempty_blocks() >= 2; }

    void recount(const Graph& g) {
        block_sizes.assign(k, 0);
        for (NodeID v = 0; v < g.num_nodes(); ++v) ++block_sizes[assignment[v]];
        cut = 0;
        for (NodeID v = 0; v < g.num_nodes(); ++v)
            for (NodeID u : g.neighbors(v))
                if (u > v && assignment[u] != assignment[v]) ++cut;
    }

    bool balanced() const {
        NodeID cap = max_block_capacity(num_nodes(), k, epsilon);
        return std::all_of(block_sizes.begin(), block_sizes.end(),
                           [cap](NodeID s) { return s <= cap; });
    }
};

/// k blocks plus a separator S such that no edge joins two distinct
/// blocks. The separator itself is free of any balance constraint.
struct NodeSeparator {
    static constexpr BlockID kSeparatorBlock = 0xFFFFFFFFu;

    BlockID k = 0;
    double epsilon = 0.0;
    std::vector<BlockID> assignment; // block id or kSeparatorBlock
    NodeID separator_size = 0;
    std::vector<NodeID> block_sizes;

    NodeID num_nodes() const { return static_cast<NodeID>(assignment.size()); }
    bool in_separator(NodeID v) const { return assignment[v] == kSeparatorBlock; }

    BlockID nonempty_blocks() const {
        BlockID c = 0;
        for (NodeID s : block_sizes)
            if (s > 0) ++c;
        return c;
    }

    bool usable_for_combine() const { return nonempty_blocks() >= 2 || separator_size > 0; }

    void recount(const Graph& g) {
        block_sizes.assign(k, 0);
        separator_size = 0;
        for (NodeID v = 0; v < g.num_nodes(); ++v) {
            if (assignment[v] == kSeparatorBlock)
                ++separator_size;
            else
                ++block_sizes[assignment[v]];
        }
    }

    /// The defining property: every edge either touches the separator
    /// or stays within one block.
    bool valid_separator(const Graph& g) const {
        for (NodeID v = 0; v < g.num_nodes(); ++v) {
            if (assignment[v] == kSeparatorBlock) continue;
            for (NodeID u : g.neighbors(v)) {
                if (assignment[u] == kSeparatorBlock) continue;
                if (assignment[u] != assignment[v]) return false;
            }
        }
        return true;
    }
};

struct PartitionParams {
    int restarts = 3;
    int lp_rounds = 10;
    int swap_rounds = 10;
};

namespace detail {

// Greedy graph growing: BFS regions from random seeds, each block
// capped at ceil(remaining / blocks_left) so every block is nonempty
// and no block exceeds ceil(n/k).
inline std::vector<BlockID> greedy_graph_growing(const Graph& g, BlockID k, Rng& rng) {
    const NodeID n = g.num_nodes();
    constexpr BlockID kUnassigned = 0xFFFFFFFFu;
    std::vector<BlockID> assignment(n, kUnassigned);
    std::vector<NodeID> unassigned(n);
    std::iota(unassigned.begin(), unassigned.end(), 0);
    std::vector<std::size_t> pos(n);
    std::iota(pos.begin(), pos.end(), 0);
    auto mark_assigned = [&](NodeID v, BlockID b) {
        assignment[v] = b;
        NodeID moved = unassigned.back();
        unassigned[pos[v]] = moved;
        pos[moved] = pos[v];
        unassigned.pop_back();
    };

    NodeID remaining = n;
    std::deque<NodeID> queue;
    for (BlockID b = 0; b < k && remaining > 0; ++b) {
        NodeID target = (remaining + (k - b) - 1) / (k - b);
        NodeID taken = 0;
        queue.clear();
        while (taken < target && remaining > 0) {
            if (queue.empty())
                queue.push_back(unassigned[random_index(rng, unassigned.size())]);
            NodeID v = queue.front();
            queue.pop_front();
            if (assignment[v] != kUnassigned) continue;
            mark_assigned(v, b);
            ++taken;
            --remaining;
            for (NodeID u : g.neighbors(v))
                if (assignment[u] == kUnassigned) queue.push_back(u);
        }
    }
    return assignment;
}

// Size-constrained label propagation: each node moves to the adjacent
// block with the largest incident-edge count, subject to L_max, ties
// broken uniformly at random. Source blocks are never emptied.
inline void label_propagation(const Graph& g, std::vector<BlockID>& assignment,
                              std::vector<NodeID>& block_sizes, NodeID cap, int rounds,
                              Rng& rng) {
    const NodeID n = g.num_nodes();
    const BlockID k = static_cast<BlockID>(block_sizes.size());
    std::vector<NodeID> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<std::uint32_t> block_count(k, 0);
    std::vector<BlockID> touched;
    std::vector<BlockID> best_blocks;

    for (int round = 0; round < rounds; ++round) {
        std::shuffle(order.begin(), order.end(), rng);
        bool moved_any = false;
        for (NodeID v : order) {
            BlockID own = assignment[v];
            if (block_sizes[own] <= 1) continue;
            touched.clear();
            for (NodeID u : g.neighbors(v)) {
                BlockID b = assignment[u];
                if (block_count[b]++ == 0) touched.push_back(b);
            }
            std::uint32_t own_count = block_count[own];
            std::uint32_t best = own_count;
            best_blocks.clear();
            for (BlockID b : touched) {
                if (b == own || block_sizes[b] + 1 > cap) continue;
                if (block_count[b] > best) {
                    best = block_count[b];
                    best_blocks.clear();
                    best_blocks.push_back(b);
                } else if (block_count[b] == best && best > own_count) {
                    best_blocks.push_back(b);
                }
            }
            if (!best_blocks.empty()) {
                BlockID to = best_blocks[random_index(rng, best_blocks.size())];
                assignment[v] = to;
                --block_sizes[own];
                ++block_sizes[to];
                moved_any = true;
            }
            for (BlockID b : touched) block_count[b] = 0;
        }
        if (!moved_any) break;
    }
}

// Pairwise exchange refinement for bipartitions. Single moves cannot
// improve a balance-tight instance (epsilon = 0), swaps can: they keep
// both block sizes fixed.
inline void swap_refinement(const Graph& g, std::vector<BlockID>& assignment, int rounds,
                            Rng& rng) {
    const NodeID n = g.num_nodes();
    for (int round = 0; round < rounds; ++round) {
        std::vector<NodeID> side[2];
        std::vector<int> gain(n, 0);
        for (NodeID v = 0; v < n; ++v) {
            int ext = 0, internal = 0;
            for (NodeID u : g.neighbors(v))
                (assignment[u] != assignment[v] ? ext : internal)++;
            gain[v] = ext - internal;
            if (ext > 0) side[assignment[v]].push_back(v);
        }
        auto by_gain = [&](NodeID a, NodeID b) { return gain[a] > gain[b]; };
        std::shuffle(side[0].begin(), side[0].end(), rng);
        std::shuffle(side[1].begin(), side[1].end(), rng);
        std::stable_sort(side[0].begin(), side[0].end(), by_gain);
        std::stable_sort(side[1].begin(), side[1].end(), by_gain);

        constexpr std::size_t kProbe = 64;
        bool swapped = false;
        for (std::size_t i = 0; i < side[0].size() && i < kProbe && !swapped; ++i) {
            for (std::size_t j = 0; j < side[1].size() && j < kProbe && !swapped; ++j) {
                NodeID u = side[0][i], v = side[1][j];
                int delta = gain[u] + gain[v] - 2 * (g.adjacent(u, v) ? 1 : 0);
                if (delta > 0) {
                    std::swap(assignment[u], assignment[v]);
                    swapped = true;
                }
            }
        }
        if (!swapped) break;
    }
}

} // namespace detail

/// Balanced k-way partition: greedy graph growing from random seeds,
/// refined by size-constrained label propagation (and a pairwise swap
/// pass for bipartitions); the best of `restarts` attempts by cut.
inline Partition partition_kway(const Graph& g, BlockID k, double epsilon, Rng& rng,
                                const PartitionParams& params = {}) {
    const NodeID n = g.num_nodes();
    if (k < 2) throw std::invalid_argument("partition_kway requires k >= 2");
    if (k > n) throw std::invalid_argument("partition_kway: k exceeds node count");
    if (epsilon < 0) throw std::invalid_argument("partition_kway requires epsilon >= 0");

    NodeID cap = max_block_capacity(n, k, epsilon);
    Partition best;
    for (int r = 0; r < std::max(params.restarts, 1); ++r) {
        Partition p;
        p.k = k;
        p.epsilon = epsilon;
        p.assignment = detail::greedy_graph_growing(g, k, rng);
        p.block_sizes.assign(k, 0);
        for (BlockID b : p.assignment) ++p.block_sizes[b];
        detail::label_propagation(g, p.assignment, p.block_sizes, cap, params.lp_rounds, rng);
        if (k == 2) detail::swap_refinement(g, p.assignment, params.swap_rounds, rng);
        p.recount(g);
        if (best.assignment.empty() || p.cut < best.cut) best = std::move(p);
    }
    return best;
}

/// Separator from a bipartition: the cut edges induce a bipartite
/// subgraph; a minimum vertex cover of it (Hopcroft-Karp + Koenig) is
/// removed from the blocks to form S.
inline NodeSeparator bipartition_separator(const Graph& g, const Partition& p) {
    if (p.k != 2) throw std::invalid_argument("bipartition_separator requires k == 2");
    BipartiteSubgraph cut_graph;
    std::vector<std::uint8_t> seen_left(g.num_nodes(), 0), seen_right(g.num_nodes(), 0);
    for (NodeID v = 0; v < g.num_nodes(); ++v) {
        if (p.assignment[v] != 0) continue;
        for (NodeID u : g.neighbors(v)) {
            if (p.assignment[u] != 1) continue;
            cut_graph.edges.emplace_back(v, u);
            if (!seen_left[v]) {
                seen_left[v] = 1;
                cut_graph.left.push_back(v);
            }
            if (!seen_right[u]) {
                seen_right[u] = 1;
                cut_graph.right.push_back(u);
            }
        }
    }

    Matching m = hopcroft_karp(cut_graph);
    std::vector<NodeID> cover = koenig_min_vertex_cover(cut_graph, m);

    NodeSeparator sep;
    sep.k = 2;
    sep.epsilon = p.epsilon;
    sep.assignment = p.assignment;
    for (NodeID v : cover) sep.assignment[v] = NodeSeparator::kSeparatorBlock;
    sep.recount(g);
    return sep;
}

namespace detail {

// Greedy max-uncovered-degree vertex cover over an explicit edge list.
// Shared by the k-way separator extraction and the multi-way partition
// combine repair.
inline std::vector<NodeID> greedy_cover_of_edges(
    const Graph& g, const std::vector<std::pair<NodeID, NodeID>>& edges, Rng& rng) {
    if (edges.empty()) return {};
    std::vector<NodeID> nodes;
    std::vector<std::uint32_t> incident_count(g.num_nodes(), 0);
    for (auto [u, v] : edges) {
        if (incident_count[u]++ == 0) nodes.push_back(u);
        if (incident_count[v]++ == 0) nodes.push_back(v);
    }
    std::vector<std::vector<std::size_t>> incident(g.num_nodes());
    for (NodeID v : nodes) incident[v].reserve(incident_count[v]);
    for (std::size_t e = 0; e < edges.size(); ++e) {
        incident[edges[e].first].push_back(e);
        incident[edges[e].second].push_back(e);
    }

    std::uint32_t max_key = 0;
    for (NodeID v : nodes) max_key = std::max(max_key, incident_count[v]);
    BucketQueue queue(g.num_nodes(), max_key);
    for (NodeID v : nodes) queue.push(v, incident_count[v]);

    std::vector<std::uint8_t> covered(edges.size(), 0);
    std::size_t uncovered = edges.size();
    std::vector<NodeID> cover;
    while (uncovered > 0) {
        NodeID v = queue.pop_max(rng);
        cover.push_back(v);
        for (std::size_t e : incident[v]) {
            if (covered[e]) continue;
            covered[e] = 1;
            --uncovered;
            NodeID other = edges[e].first == v ? edges[e].second : edges[e].first;
            if (queue.contains(other)) queue.update_key(other, queue.key_of(other) - 1);
        }
    }
    return cover;
}

inline NodeSeparator separator_via_greedy_cover(const Graph& g, const Partition& p, Rng& rng) {
    std::vector<std::pair<NodeID, NodeID>> cut_edges;
    for (NodeID v = 0; v < g.num_nodes(); ++v)
        for (NodeID u : g.neighbors(v))
            if (u > v && p.assignment[u] != p.assignment[v]) cut_edges.emplace_back(v, u);

    NodeSeparator sep;
    sep.k = p.k;
    sep.epsilon = p.epsilon;
    sep.assignment = p.assignment;
    for (NodeID v : greedy_cover_of_edges(g, cut_edges, rng))
        sep.assignment[v] = NodeSeparator::kSeparatorBlock;
    sep.recount(g);
    return sep;
}

} // namespace detail

/// Separator extraction from any partition: exact minimum vertex cover
/// of the cut edges for k = 2 (bipartite), greedy cover otherwise.
inline NodeSeparator extract_separator(const Graph& g, const Partition& p, Rng& rng) {
    if (p.k == 2) return bipartition_separator(g, p);
    return detail::separator_via_greedy_cover(g, p, rng);
}

inline NodeSeparator kway_separator(const Graph& g, BlockID k, double epsilon, Rng& rng,
                                    const PartitionParams& params = {}) {
    Partition p = partition_kway(g, k, epsilon, rng, params);
    return extract_separator(g, p, rng);
}

/// Ablation partitioner: BFS from a random start node, stopped after
/// touching `target` nodes (default ceil(n/2)); touched nodes form
/// block 0 and the rest block 1. On components smaller than the target
/// the split is whatever the component allows, so the stored epsilon is
/// widened to the actual imbalance.
inline Partition bfs_partition(const Graph& g, Rng& rng, NodeID target = 0) {
    const NodeID n = g.num_nodes();
    if (target == 0) target = (n + 1) / 2;

    Partition p;
    p.k = 2;
    p.assignment.assign(n, 1);
    if (n > 0) {
        NodeID start = static_cast<NodeID>(random_index(rng, n));
        std::deque<NodeID> queue{start};
        p.assignment[start] = 0;
        NodeID touched = 1;
        while (!queue.empty() && touched < target) {
            NodeID v = queue.front();
            queue.pop_front();
            for (NodeID u : g.neighbors(v)) {
                if (p.assignment[u] == 0) continue;
                p.assignment[u] = 0;
                ++touched;
                queue.push_back(u);
                if (touched >= target) break;
            }
        }
    }
    p.recount(g);
    NodeID half = (n + 1) / 2;
    NodeID max_size = std::max(p.block_sizes[0], p.block_sizes[1]);
    p.epsilon = half == 0 ? 0.0 : std::max(0.0, static_cast<double>(max_size) / half - 1.0);
    return p;
}

/// Precomputed diversity pool: pool_size entries per flavor, each with
/// an independently drawn imbalance in [0.05, 0.75] and its own derived
/// seed, so the pool is identical regardless of construction order.
struct PartitionPool {
    std::vector<Partition> bipartitions;
    std::vector<NodeSeparator> biseparators;
    std::vector<Partition> multiway_partitions;
    std::vector<NodeSeparator> multiway_separators;
    std::uint32_t generation = 0;

    std::size_t size_per_flavor() const { return bipartitions.size(); }
};

inline PartitionPool build_pool(const Graph& g, std::size_t pool_size, BlockID k_multi, Rng& rng,
                                const PartitionParams& params = {}) {
    if (pool_size < 1) throw std::invalid_argument("pool_size must be >= 1");
    const NodeID n = g.num_nodes();
    if (n < 2) throw std::invalid_argument("build_pool requires at least two nodes");
    BlockID km = std::min<BlockID>(k_multi, n); // singleton blocks at worst

    std::uint64_t master = rng();
    PartitionPool pool;
    pool.bipartitions.reserve(pool_size);
    pool.biseparators.reserve(pool_size);
    pool.multiway_partitions.reserve(pool_size);
    pool.multiway_separators.reserve(pool_size);
    for (std::size_t i = 0; i < pool_size; ++i) {
        {
            Rng sub(derive_seed(master, 4 * i + 0));
            double eps = random_real(sub, 0.05, 0.75);
            pool.bipartitions.push_back(partition_kway(g, 2, eps, sub, params));
        }
        {
            Rng sub(derive_seed(master, 4 * i + 1));
            double eps = random_real(sub, 0.05, 0.75);
            pool.biseparators.push_back(
                bipartition_separator(g, partition_kway(g, 2, eps, sub, params)));
        }
        {
            Rng sub(derive_seed(master, 4 * i + 2));
            double eps = random_real(sub, 0.05, 0.75);
            pool.multiway_partitions.push_back(partition_kway(g, km, eps, sub, params));
        }
        {
            Rng sub(derive_seed(master, 4 * i + 3));
            double eps = random_real(sub, 0.05, 0.75);
            pool.multiway_separators.push_back(kway_separator(g, km, eps, sub, params));
        }
    }
    return pool;
}

/// METIS partition-file import: one block id per line, n lines. Cut and
/// block sizes are recomputed; balance is the caller's concern (checked
/// and reported, never rejected).
inline Partition import_partition(const Graph& g, std::istream& in,
                                  std::optional<BlockID> expected_k = std::nullopt) {
    std::vector<BlockID> assignment;
    assignment.reserve(g.num_nodes());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() && assignment.size() == g.num_nodes()) continue; // trailing blank
        std::istringstream tok(line);
        long long b = -1;
        if (!(tok >> b) || b < 0)
            throw GraphFormatError("line " + std::to_string(line_no) + ": expected a block id");
        assignment.push_back(static_cast<BlockID>(b));
    }
    if (assignment.size() != g.num_nodes())
        throw GraphFormatError("partition file has " + std::to_string(assignment.size()) +
                               " entries, graph has " + std::to_string(g.num_nodes()) + " nodes");

    BlockID max_id = assignment.empty() ? 0 : *std::max_element(assignment.begin(), assignment.end());
    if (expected_k && max_id >= *expected_k)
        throw GraphFormatError("block id " + std::to_string(max_id) + " out of range for k = " +
                               std::to_string(*expected_k));

    Partition p;
    p.k = expected_k ? *expected_k : max_id + 1;
    p.assignment = std::move(assignment);
    p.recount(g);
    NodeID per_block = (g.num_nodes() + p.k - 1) / p.k;
    NodeID max_size = *std::max_element(p.block_sizes.begin(), p.block_sizes.end());
    p.epsilon = per_block == 0 ? 0.0 : std::max(0.0, static_cast<double>(max_size) / per_block - 1.0);
    return p;
}

inline Partition import_partition(const Graph& g, const std::string& text,
                                  std::optional<BlockID> expected_k = std::nullopt) {
    std::istringstream in(text);
    return import_partition(g, in, expected_k);
}

inline void write_partition(const Partition& p, std::ostream& out) {
    for (BlockID b : p.assignment) out << b << '\n';
}

} // namespace evomis
