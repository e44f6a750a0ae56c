#pragma once

#include <algorithm>
#include <cassert>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "evomis/bipartite.hpp"
#include "evomis/construction.hpp"
#include "evomis/convergence.hpp"
#include "evomis/graph.hpp"
#include "evomis/local_search.hpp"
#include "evomis/partition.hpp"
#include "evomis/random.hpp"
#include "evomis/solution_state.hpp"

namespace evomis {

enum class CombineOp : std::uint8_t {
    kNodeSeparator,
    kEdgeSeparator,
    kMultiwaySeparator,
    kMultiwayPartition,
};

inline const char* combine_op_name(CombineOp op) {
    switch (op) {
        case CombineOp::kNodeSeparator: return "node-separator";
        case CombineOp::kEdgeSeparator: return "edge-separator";
        case CombineOp::kMultiwaySeparator: return "multiway-separator";
        case CombineOp::kMultiwayPartition: return "multiway-partition";
    }
    return "?";
}

struct Offspring {
    Individual individual;
    CombineOp op = CombineOp::kNodeSeparator;
    std::vector<std::size_t> parent_ids;
    bool success = false;
};

enum class PartitionerKind { kBuiltin, kBfs, kImport };

struct EvoConfig {
    std::size_t population_size = 250;
    std::size_t pool_size = 30;
    std::uint32_t arw_iterations = 15000; // post-acceptance refinement budget
    BlockID multiway_k = 64;
    std::uint32_t unsuccessful_threshold = 200;
    double time_limit_seconds = 10.0;
    std::uint64_t seed = 1;
    std::uint32_t multiway_parents = 4;
    ArwParams arw;
    bool uniform_over_four_ops = false; // alternative to the three-family draw
    bool distinct_parents = false;
    InitKind init = InitKind::kMix;
    bool init_refine = true;
    std::optional<NodeID> target_size; // optional early-stop criterion
    bool deterministic_time = false;   // improvement-counter timestamps
    PartitionParams partition;
    PartitionerKind partitioner = PartitionerKind::kBuiltin;
    std::string import_path_template; // partition files, "{}" = entry index
};

struct Population {
    std::vector<Individual> members;
    std::size_t capacity = 0;
    Individual best_ever;
    double best_ever_time = 0.0;

    NodeID max_fitness() const {
        NodeID best = 0;
        for (const auto& m : members) best = std::max(best, m.size());
        return best;
    }
};

/// Fittest of two uniformly drawn members (independent draws).
inline std::size_t tournament_select_index(const Population& pop, Rng& rng) {
    std::size_t a = random_index(rng, pop.members.size());
    std::size_t b = random_index(rng, pop.members.size());
    return pop.members[a].size() >= pop.members[b].size() ? a : b;
}

inline const Individual& tournament_select(const Population& pop, Rng& rng) {
    return pop.members[tournament_select_index(pop, rng)];
}

namespace detail {

// Maximization plus one local-search pass: the common tail of every
// combine operator.
inline Individual refine_offspring(const Graph& g, const Individual& raw, Rng& rng) {
    SolutionState st(g, raw);
    local_search(st, rng);
    return st.to_individual();
}

} // namespace detail

/// Pre-maximization candidates of the node-separator crossover:
/// O1 = (V1 ∩ I1) ∪ (V2 ∩ I2) and O2 = (V1 ∩ I2) ∪ (V2 ∩ I1), with
/// separator nodes left out. Both are valid independent sets because no
/// edge runs between the blocks.
inline std::pair<Individual, Individual> node_separator_candidates(const NodeSeparator& sep,
                                                                   const Individual& i1,
                                                                   const Individual& i2) {
    const NodeID n = i1.num_nodes();
    Individual o1(n), o2(n);
    for (NodeID v = 0; v < n; ++v) {
        if (sep.in_separator(v)) continue;
        const Individual& first = sep.assignment[v] == 0 ? i1 : i2;
        const Individual& second = sep.assignment[v] == 0 ? i2 : i1;
        if (first.contains(v)) o1.insert(v);
        if (second.contains(v)) o2.insert(v);
    }
    return {std::move(o1), std::move(o2)};
}

inline Offspring combine_node_separator(const Graph& g, const Individual& i1,
                                        const Individual& i2, const NodeSeparator& sep,
                                        Rng& rng) {
    auto [o1, o2] = node_separator_candidates(sep, i1, i2);
    Individual r1 = detail::refine_offspring(g, o1, rng);
    Individual r2 = detail::refine_offspring(g, o2, rng);
    Offspring off;
    off.op = CombineOp::kNodeSeparator;
    off.individual = r1.size() >= r2.size() ? std::move(r1) : std::move(r2);
    return off;
}

namespace detail {

// Collects the edges not covered by `cover` and checks the §-claim the
// operators rely on: every such edge must be a cut edge. A violation
// is an operator bug, not an input problem.
inline std::vector<std::pair<NodeID, NodeID>> uncovered_edges(const Graph& g,
                                                              const Individual& cover,
                                                              const Partition& p) {
    std::vector<std::pair<NodeID, NodeID>> result;
    for (NodeID v = 0; v < g.num_nodes(); ++v) {
        if (cover.contains(v)) continue;
        for (NodeID u : g.neighbors(v)) {
            if (u <= v || cover.contains(u)) continue;
            if (p.assignment[u] == p.assignment[v])
                throw std::logic_error("uncovered edge inside a block: combine operator bug");
            result.emplace_back(v, u);
        }
    }
    return result;
}

} // namespace detail

/// Pre-repair cover candidates of the edge-separator crossover:
/// D1 = (C1 ∩ V1) ∪ (C2 ∩ V2), D2 mirrored, with C_i = V \ I_i.
inline std::pair<Individual, Individual> edge_separator_cover_candidates(const Partition& p,
                                                                         const Individual& i1,
                                                                         const Individual& i2) {
    const NodeID n = i1.num_nodes();
    Individual d1(n), d2(n);
    for (NodeID v = 0; v < n; ++v) {
        const Individual& first = p.assignment[v] == 0 ? i1 : i2;
        const Individual& second = p.assignment[v] == 0 ? i2 : i1;
        if (!first.contains(v)) d1.insert(v);
        if (!second.contains(v)) d2.insert(v);
    }
    return {std::move(d1), std::move(d2)};
}

/// Repairs a tentative vertex-cover offspring by adding a minimum
/// vertex cover (Hopcroft-Karp + Koenig) of the bipartite graph induced
/// by the non-covered cut edges.
inline void repair_cover_bipartite(const Graph& g, const Partition& p, Individual& cover) {
    auto missing = detail::uncovered_edges(g, cover, p);
    if (missing.empty()) return;
    BipartiteSubgraph b;
    std::vector<std::uint8_t> seen(g.num_nodes(), 0);
    for (auto& [u, v] : missing) {
        NodeID left = p.assignment[u] == 0 ? u : v;
        NodeID right = p.assignment[u] == 0 ? v : u;
        if (!seen[left]) {
            seen[left] = 1;
            b.left.push_back(left);
        }
        if (!seen[right]) {
            seen[right] = 1;
            b.right.push_back(right);
        }
        b.edges.emplace_back(left, right);
    }
    Matching m = hopcroft_karp(b);
    for (NodeID v : koenig_min_vertex_cover(b, m)) cover.insert(v);
}

/// Greedy repair for the multi-way case, where the uncovered cut edges
/// no longer induce a bipartite graph.
inline void repair_cover_greedy(const Graph& g, const Partition& p, Individual& cover, Rng& rng) {
    auto missing = detail::uncovered_edges(g, cover, p);
    if (missing.empty()) return;
    for (NodeID v : detail::greedy_cover_of_edges(g, missing, rng)) cover.insert(v);
}

inline Offspring combine_edge_separator(const Graph& g, const Individual& i1,
                                        const Individual& i2, const Partition& p, Rng& rng) {
    if (p.k != 2) throw std::invalid_argument("combine_edge_separator requires a bipartition");
    auto [d1, d2] = edge_separator_cover_candidates(p, i1, i2);
    repair_cover_bipartite(g, p, d1);
    repair_cover_bipartite(g, p, d2);
    Individual r1 = detail::refine_offspring(g, complement_set(d1), rng);
    Individual r2 = detail::refine_offspring(g, complement_set(d2), rng);
    Offspring off;
    off.op = CombineOp::kEdgeSeparator;
    off.individual = r1.size() >= r2.size() ? std::move(r1) : std::move(r2);
    return off;
}

/// Pre-maximization candidate of the multi-way node-separator combine:
/// for every block the parent with the most solution nodes inside it
/// wins (ties to the lower parent index), separator nodes left out.
inline Individual multiway_separator_candidate(const NodeSeparator& sep,
                                               std::span<const Individual> parents) {
    const NodeID n = parents.front().num_nodes();
    std::vector<std::vector<NodeID>> score(parents.size(), std::vector<NodeID>(sep.k, 0));
    for (NodeID v = 0; v < n; ++v) {
        if (sep.in_separator(v)) continue;
        for (std::size_t i = 0; i < parents.size(); ++i)
            if (parents[i].contains(v)) ++score[i][sep.assignment[v]];
    }
    std::vector<std::size_t> winner(sep.k, 0);
    for (BlockID b = 0; b < sep.k; ++b)
        for (std::size_t i = 1; i < parents.size(); ++i)
            if (score[i][b] > score[winner[b]][b]) winner[b] = i;

    Individual out(n);
    for (NodeID v = 0; v < n; ++v) {
        if (sep.in_separator(v)) continue;
        if (parents[winner[sep.assignment[v]]].contains(v)) out.insert(v);
    }
    return out;
}

inline Offspring combine_multiway_separator(const Graph& g, std::span<const Individual> parents,
                                            const NodeSeparator& sep, Rng& rng) {
    if (parents.size() < 2)
        throw std::invalid_argument("multi-way combine needs at least two parents");
    Individual raw = multiway_separator_candidate(sep, parents);
    Offspring off;
    off.op = CombineOp::kMultiwaySeparator;
    off.individual = detail::refine_offspring(g, raw, rng);
    return off;
}

/// Pre-repair cover of the multi-way partition combine: per block the
/// parent whose vertex cover has the fewest nodes inside it (ties to
/// the lower parent index).
inline Individual multiway_partition_cover(const Partition& p,
                                           std::span<const Individual> parents) {
    const NodeID n = parents.front().num_nodes();
    // cover score = block size - solution nodes inside the block
    std::vector<std::vector<NodeID>> in_block(parents.size(), std::vector<NodeID>(p.k, 0));
    for (NodeID v = 0; v < n; ++v)
        for (std::size_t i = 0; i < parents.size(); ++i)
            if (parents[i].contains(v)) ++in_block[i][p.assignment[v]];
    std::vector<std::size_t> winner(p.k, 0);
    for (BlockID b = 0; b < p.k; ++b) {
        for (std::size_t i = 1; i < parents.size(); ++i) {
            NodeID best_cover = p.block_sizes[b] - in_block[winner[b]][b];
            NodeID this_cover = p.block_sizes[b] - in_block[i][b];
            if (this_cover < best_cover) winner[b] = i;
        }
    }
    Individual cover(n);
    for (NodeID v = 0; v < n; ++v)
        if (!parents[winner[p.assignment[v]]].contains(v)) cover.insert(v);
    return cover;
}

inline Offspring combine_multiway_partition(const Graph& g, std::span<const Individual> parents,
                                            const Partition& p, Rng& rng) {
    if (parents.size() < 2)
        throw std::invalid_argument("multi-way combine needs at least two parents");
    Individual cover = multiway_partition_cover(p, parents);
    repair_cover_greedy(g, p, cover, rng);
    Offspring off;
    off.op = CombineOp::kMultiwayPartition;
    off.individual = detail::refine_offspring(g, complement_set(cover), rng);
    return off;
}

/// Forced insertions followed by local search, as in the ARW
/// perturbation routine.
inline void mutate(const Graph& g, Offspring& o, Rng& rng, const ArwParams& params = {}) {
    SolutionState st(g, o.individual);
    perturb(st, rng, params);
    local_search(st, rng);
    o.individual = st.to_individual();
}

/// Replaces the population member most similar (smallest Hamming
/// distance) to the offspring among those with smaller or equal
/// fitness; rejects the offspring if no such member exists.
inline bool evict(Population& pop, const Offspring& o, std::size_t* replaced = nullptr) {
    std::size_t best_idx = pop.members.size();
    NodeID best_dist = 0;
    NodeID best_size = 0;
    for (std::size_t i = 0; i < pop.members.size(); ++i) {
        const Individual& m = pop.members[i];
        if (m.size() > o.individual.size()) continue;
        NodeID dist = hamming_distance(m, o.individual);
        if (best_idx == pop.members.size() || dist < best_dist ||
            (dist == best_dist && m.size() < best_size)) {
            best_idx = i;
            best_dist = dist;
            best_size = m.size();
        }
    }
    if (best_idx == pop.members.size()) return false;
    pop.members[best_idx] = o.individual;
    if (replaced) *replaced = best_idx;
    return true;
}

struct EvolveStats {
    std::uint64_t combines = 0;
    std::uint64_t acceptances = 0;
    std::uint64_t pool_refreshes = 0;
    std::uint64_t op_counts[4] = {0, 0, 0, 0};
};

struct EvolveResult {
    Individual best;
    ConvergenceLog log;
    EvolveStats stats;
};

namespace detail {

inline PartitionPool build_pool_for_config(const Graph& g, const EvoConfig& cfg, Rng& rng) {
    if (cfg.partitioner == PartitionerKind::kBuiltin)
        return build_pool(g, cfg.pool_size, cfg.multiway_k, rng, cfg.partition);

    PartitionPool pool;
    if (cfg.partitioner == PartitionerKind::kBfs) {
        // ablation mode: every flavor comes from plain BFS bipartitions
        std::uint64_t master = rng();
        for (std::size_t i = 0; i < cfg.pool_size; ++i) {
            Rng sub(derive_seed(master, i));
            Partition p = bfs_partition(g, sub);
            pool.bipartitions.push_back(p);
            pool.multiway_partitions.push_back(p);
            NodeSeparator s = bipartition_separator(g, p);
            pool.biseparators.push_back(s);
            pool.multiway_separators.push_back(std::move(s));
        }
        return pool;
    }

    // import: read partition files, extract separators; entry index is
    // substituted for "{}" in the path template
    Rng sub(rng());
    for (std::size_t i = 0; i < cfg.pool_size; ++i) {
        std::string path = cfg.import_path_template;
        auto pos = path.find("{}");
        if (pos != std::string::npos) path.replace(pos, 2, std::to_string(i));
        std::ifstream in(path);
        if (!in) {
            if (i == 0) throw std::runtime_error("cannot open partition file: " + path);
            break; // template ran out of files
        }
        Partition p = import_partition(g, in);
        if (!p.usable_for_combine())
            throw std::runtime_error("partition file " + path + " is degenerate (single block)");
        NodeSeparator s = extract_separator(g, p, sub);
        if (p.k == 2) {
            pool.bipartitions.push_back(std::move(p));
            pool.biseparators.push_back(std::move(s));
        } else {
            pool.multiway_partitions.push_back(std::move(p));
            pool.multiway_separators.push_back(std::move(s));
        }
        if (pos == std::string::npos) break; // single fixed file
    }
    if (pool.bipartitions.empty() && pool.multiway_partitions.empty())
        throw std::runtime_error("no partitions imported");
    return pool;
}

// Family draw per configuration; falls back to whatever the pool offers
// (import mode may fill only one k).
inline CombineOp pick_combine_op(const PartitionPool& pool, const EvoConfig& cfg, Rng& rng) {
    bool have_two_way = !pool.bipartitions.empty() && !pool.biseparators.empty();
    bool have_multi = !pool.multiway_partitions.empty() && !pool.multiway_separators.empty();
    for (int attempt = 0; attempt < 16; ++attempt) {
        CombineOp op;
        if (cfg.uniform_over_four_ops) {
            op = static_cast<CombineOp>(random_index(rng, 4));
        } else {
            switch (random_index(rng, 3)) {
                case 0: op = CombineOp::kNodeSeparator; break;
                case 1: op = CombineOp::kEdgeSeparator; break;
                default:
                    op = random_coin(rng) ? CombineOp::kMultiwaySeparator
                                          : CombineOp::kMultiwayPartition;
                    break;
            }
        }
        bool needs_multi = op == CombineOp::kMultiwaySeparator ||
                           op == CombineOp::kMultiwayPartition;
        if (needs_multi ? have_multi : have_two_way) return op;
    }
    if (have_two_way) return CombineOp::kNodeSeparator;
    if (have_multi) return CombineOp::kMultiwaySeparator;
    throw std::logic_error("partition pool is empty");
}

} // namespace detail

/// The steady-state loop: select, combine with a random pool entry,
/// mutate, evict; refine accepted members with the ARW budget; rebuild
/// the pool after a stretch of unsuccessful combines.
inline EvolveResult evolve(const Graph& g, const EvoConfig& cfg) {
    using Clock = std::chrono::steady_clock;
    const auto start = Clock::now();
    const auto deadline =
        start + std::chrono::duration_cast<Clock::duration>(
                    std::chrono::duration<double>(cfg.time_limit_seconds));
    auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };

    Rng rng(cfg.seed);
    EvolveResult result;
    result.log.seed = cfg.seed;
    result.log.algo = "evomis";
    std::uint64_t improvement_counter = 0;

    auto consider = [&](const Individual& ind) {
        if (result.best.num_nodes() != 0 && ind.size() <= result.best.size()) return;
        result.best = ind;
        double t = cfg.deterministic_time ? static_cast<double>(improvement_counter++)
                                          : elapsed();
        if (!result.log.records.empty() && t <= result.log.records.back().t)
            t = result.log.records.back().t + 1e-9;
        result.log.add(t, ind.size());
    };

    const NodeID n = g.num_nodes();
    if (n == 0) {
        result.best = Individual(0);
        result.log.initial_size = 0;
        return result;
    }

    Population pop;
    pop.capacity = cfg.population_size;
    pop.members = build_population(g, cfg.population_size, rng, cfg.init, cfg.init_refine);

    // the t=0 record: best of the initial population
    std::size_t seed_best = 0;
    for (std::size_t i = 1; i < pop.members.size(); ++i)
        if (pop.members[i].size() > pop.members[seed_best].size()) seed_best = i;
    result.best = pop.members[seed_best];
    result.log.initial_size = result.best.size();
    if (cfg.deterministic_time) improvement_counter = 1;
    result.log.records.push_back({0.0, result.best.size()});

    auto done = [&] {
        if (cfg.target_size && result.best.size() >= *cfg.target_size) return true;
        return Clock::now() >= deadline;
    };

    if (n < 2 || pop.members.size() < 2) return result;

    PartitionPool pool = detail::build_pool_for_config(g, cfg, rng);
    std::uint32_t unsuccessful = 0;

    while (!done()) {
        CombineOp op = detail::pick_combine_op(pool, cfg, rng);
        ++result.stats.combines;
        ++result.stats.op_counts[static_cast<int>(op)];

        auto select_distinct = [&](std::size_t other) {
            std::size_t idx = tournament_select_index(pop, rng);
            for (int tries = 0; cfg.distinct_parents && idx == other && tries < 8; ++tries)
                idx = tournament_select_index(pop, rng);
            return idx;
        };

        Offspring off;
        NodeID best_parent = 0;
        if (op == CombineOp::kNodeSeparator || op == CombineOp::kEdgeSeparator) {
            std::size_t a = tournament_select_index(pop, rng);
            std::size_t b = select_distinct(a);
            best_parent = std::max(pop.members[a].size(), pop.members[b].size());
            if (op == CombineOp::kNodeSeparator) {
                const NodeSeparator& sep =
                    pool.biseparators[random_index(rng, pool.biseparators.size())];
                off = combine_node_separator(g, pop.members[a], pop.members[b], sep, rng);
            } else {
                const Partition& p =
                    pool.bipartitions[random_index(rng, pool.bipartitions.size())];
                off = combine_edge_separator(g, pop.members[a], pop.members[b], p, rng);
            }
            off.parent_ids = {a, b};
        } else {
            std::vector<std::size_t> ids;
            std::vector<Individual> parents;
            for (std::uint32_t i = 0; i < std::max<std::uint32_t>(cfg.multiway_parents, 2); ++i) {
                std::size_t idx = ids.empty() ? tournament_select_index(pop, rng)
                                              : select_distinct(ids.back());
                ids.push_back(idx);
                parents.push_back(pop.members[idx]);
                best_parent = std::max(best_parent, pop.members[idx].size());
            }
            if (op == CombineOp::kMultiwaySeparator) {
                const NodeSeparator& sep =
                    pool.multiway_separators[random_index(rng, pool.multiway_separators.size())];
                off = combine_multiway_separator(g, parents, sep, rng);
            } else {
                const Partition& p =
                    pool.multiway_partitions[random_index(rng, pool.multiway_partitions.size())];
                off = combine_multiway_partition(g, parents, p, rng);
            }
            off.parent_ids = std::move(ids);
        }

        mutate(g, off, rng, cfg.arw);
        off.success = off.individual.size() > best_parent;
        consider(off.individual);

        std::size_t accepted_at = 0;
        if (evict(pop, off, &accepted_at)) {
            ++result.stats.acceptances;
            // post-acceptance refinement with the full ARW budget
            SolutionState st(g, pop.members[accepted_at]);
            Individual incumbent = pop.members[accepted_at];
            for (std::uint32_t it = 0; it < cfg.arw_iterations; ++it) {
                perturb(st, rng, cfg.arw);
                local_search(st, rng);
                if (st.size() > incumbent.size()) {
                    incumbent = st.to_individual();
                    consider(incumbent);
                }
                if ((it & 63u) == 0 && done()) break;
            }
            pop.members[accepted_at] = std::move(incumbent);
        }

        if (off.success) {
            unsuccessful = 0;
        } else if (++unsuccessful >= cfg.unsuccessful_threshold) {
            std::uint32_t generation = pool.generation + 1;
            pool = detail::build_pool_for_config(g, cfg, rng);
            pool.generation = generation;
            ++result.stats.pool_refreshes;
            unsuccessful = 0;
        }
    }

    pop.best_ever = result.best;
    pop.best_ever_time = result.log.records.empty() ? 0.0 : result.log.records.back().t;
    return result;
}

} // namespace evomis
