#pragma once

#include <cassert>
#include <cstdint>
#include <limits>
#include <vector>

#include "evomis/bucket_queue.hpp"
#include "evomis/graph.hpp"
#include "evomis/random.hpp"

namespace evomis {

/// Working structure of the ARW local search. Tracks for every node
/// whether it is a solution node, a free node (zero tightness, outside
/// the solution) or a non-free non-solution node, together with the
/// tightness counts. Insertion and removal cost O(deg).
///
/// The candidate worklist holds solution nodes whose neighborhood
/// changed in a way that may have created a (1,2)-swap: a node is
/// (re)pushed whenever one of its neighbors becomes 1-tight. Draining
/// the list therefore certifies that no swap exists anywhere.
class SolutionState {
public:
    enum class NodeClass : std::uint8_t { kSolution, kFree, kNonFree };

    static constexpr NodeID npos = std::numeric_limits<NodeID>::max();

    explicit SolutionState(const Graph& g)
        : g_(&g),
          cls_(g.num_nodes(), NodeClass::kFree),
          tight_(g.num_nodes(), 0),
          out_since_(g.num_nodes(), 0),
          in_candidates_(g.num_nodes(), 0),
          free_pos_(g.num_nodes(), 0),
          mark_(g.num_nodes(), 0) {
        free_list_.reserve(g.num_nodes());
        for (NodeID v = 0; v < g.num_nodes(); ++v) {
            free_pos_[v] = free_list_.size();
            free_list_.push_back(v);
        }
    }

    SolutionState(const Graph& g, const Individual& ind) : SolutionState(g) { load(ind); }

    const Graph& graph() const { return *g_; }
    NodeID size() const { return size_; }
    NodeID num_free() const { return static_cast<NodeID>(free_list_.size()); }
    NodeID num_nonsolution() const { return g_->num_nodes() - size_; }

    bool in_solution(NodeID v) const { return cls_[v] == NodeClass::kSolution; }
    bool is_free(NodeID v) const { return cls_[v] == NodeClass::kFree; }
    NodeClass node_class(NodeID v) const { return cls_[v]; }
    std::uint32_t tightness_of(NodeID v) const { return tight_[v]; }
    std::uint64_t last_removed_stamp(NodeID v) const { return out_since_[v]; }
    const std::vector<NodeID>& free_nodes() const { return free_list_; }

    void insert(NodeID v) {
        assert(cls_[v] == NodeClass::kFree);
        cls_[v] = NodeClass::kSolution;
        free_list_erase(v);
        tight_[v] = 0;
        ++size_;
        push_candidate(v);
        for (NodeID w : g_->neighbors(v)) {
            if (++tight_[w] == 1) {
                cls_[w] = NodeClass::kNonFree;
                free_list_erase(w);
            }
        }
    }

    void remove(NodeID v) {
        assert(cls_[v] == NodeClass::kSolution);
        cls_[v] = NodeClass::kNonFree; // provisional, settled below
        --size_;
        out_since_[v] = ++stamp_;
        std::uint32_t tv = 0;
        NodeID sole = npos;
        for (NodeID w : g_->neighbors(v)) {
            if (cls_[w] == NodeClass::kSolution) {
                ++tv;
                sole = w;
                continue;
            }
            if (--tight_[w] == 0) {
                cls_[w] = NodeClass::kFree;
                free_list_add(w);
            } else if (tight_[w] == 1) {
                push_candidate(sole_solution_neighbor(w));
            }
        }
        tight_[v] = tv;
        if (tv == 0) {
            cls_[v] = NodeClass::kFree;
            free_list_add(v);
        } else if (tv == 1) {
            push_candidate(sole);
        }
    }

    /// Resets to the given independent set. Timestamps survive so the
    /// oldest-out perturbation rule keeps its history across reloads.
    void load(const Individual& ind) {
        assert(ind.num_nodes() == g_->num_nodes());
        for (NodeID v = 0; v < g_->num_nodes(); ++v) {
            cls_[v] = NodeClass::kFree;
            tight_[v] = 0;
            in_candidates_[v] = 0;
        }
        candidates_.clear();
        free_list_.clear();
        for (NodeID v = 0; v < g_->num_nodes(); ++v) {
            free_pos_[v] = free_list_.size();
            free_list_.push_back(v);
        }
        size_ = 0;
        for (NodeID v = 0; v < g_->num_nodes(); ++v)
            if (ind.contains(v)) insert(v);
    }

    Individual to_individual() const {
        Individual ind(g_->num_nodes());
        for (NodeID v = 0; v < g_->num_nodes(); ++v)
            if (cls_[v] == NodeClass::kSolution) ind.insert(v);
        return ind;
    }

    bool has_candidates() const { return !candidates_.empty(); }

    NodeID pop_candidate() {
        assert(!candidates_.empty());
        NodeID v = candidates_.back();
        candidates_.pop_back();
        in_candidates_[v] = 0;
        return v;
    }

    void push_candidate(NodeID v) {
        if (!in_candidates_[v]) {
            in_candidates_[v] = 1;
            candidates_.push_back(v);
        }
    }

    void push_all_solution_candidates() {
        for (NodeID v = 0; v < g_->num_nodes(); ++v)
            if (cls_[v] == NodeClass::kSolution) push_candidate(v);
    }

    NodeID sole_solution_neighbor(NodeID w) const {
        assert(tight_[w] == 1);
        return any_solution_neighbor(w);
    }

    NodeID any_solution_neighbor(NodeID w) const {
        for (NodeID u : g_->neighbors(w))
            if (cls_[u] == NodeClass::kSolution) return u;
        assert(false && "tightness count inconsistent");
        return npos;
    }

    /// Full recount of classes, tightness and size; used by tests and
    /// debug checks to validate the incremental bookkeeping.
    bool check_consistency() const {
        NodeID count = 0;
        for (NodeID v = 0; v < g_->num_nodes(); ++v) {
            std::uint32_t t = 0;
            for (NodeID u : g_->neighbors(v))
                if (cls_[u] == NodeClass::kSolution) ++t;
            if (cls_[v] == NodeClass::kSolution) {
                ++count;
                if (t != 0) return false; // adjacent solution nodes
                if (tight_[v] != 0) return false;
            } else {
                if (tight_[v] != t) return false;
                if (cls_[v] == NodeClass::kFree && t != 0) return false;
                if (cls_[v] == NodeClass::kNonFree && t == 0) return false;
            }
        }
        if (count != size_) return false;
        if (free_list_.size() != static_cast<std::size_t>(
                std::count(cls_.begin(), cls_.end(), NodeClass::kFree)))
            return false;
        for (std::size_t i = 0; i < free_list_.size(); ++i)
            if (free_pos_[free_list_[i]] != i) return false;
        return true;
    }

    // Epoch-stamped scratch marker shared by the swap search; avoids an
    // O(n) clear per query.
    void mark_begin() const {
        if (++mark_epoch_ == 0) {
            std::fill(mark_.begin(), mark_.end(), 0);
            mark_epoch_ = 1;
        }
    }
    void mark(NodeID v) const { mark_[v] = mark_epoch_; }
    bool marked(NodeID v) const { return mark_[v] == mark_epoch_; }

private:
    void free_list_add(NodeID v) {
        free_pos_[v] = free_list_.size();
        free_list_.push_back(v);
    }

    void free_list_erase(NodeID v) {
        NodeID moved = free_list_.back();
        free_list_[free_pos_[v]] = moved;
        free_pos_[moved] = free_pos_[v];
        free_list_.pop_back();
    }

    const Graph* g_;
    std::vector<NodeClass> cls_;
    std::vector<std::uint32_t> tight_;
    std::vector<std::uint64_t> out_since_;
    std::vector<NodeID> candidates_;
    std::vector<std::uint8_t> in_candidates_;
    std::vector<NodeID> free_list_;
    std::vector<std::size_t> free_pos_;
    NodeID size_ = 0;
    std::uint64_t stamp_ = 0;
    mutable std::vector<std::uint32_t> mark_;
    mutable std::uint32_t mark_epoch_ = 0;
};

namespace detail {

// Bucket-queue variant for large universes.
inline void greedy_extend_bucketed(SolutionState& st, Rng& rng, std::vector<NodeID>& universe) {
    const Graph& g = st.graph();
    std::vector<std::uint8_t> in_universe(g.num_nodes(), 0);
    for (NodeID v : universe) in_universe[v] = 1;

    std::uint32_t max_deg = 0;
    for (NodeID v : universe) max_deg = std::max(max_deg, g.degree(v));
    BucketQueue queue(g.num_nodes(), max_deg);
    for (NodeID v : universe) {
        std::uint32_t residual = 0;
        for (NodeID u : g.neighbors(v))
            if (in_universe[u]) ++residual;
        queue.push(v, residual);
    }

    std::vector<NodeID> newly_blocked;
    while (!queue.empty()) {
        NodeID v = queue.pop_min(rng);
        in_universe[v] = 0;
        newly_blocked.clear();
        for (NodeID w : g.neighbors(v))
            if (in_universe[w]) newly_blocked.push_back(w);
        st.insert(v);
        for (NodeID w : newly_blocked) {
            in_universe[w] = 0;
            queue.erase(w);
            for (NodeID x : g.neighbors(w))
                if (in_universe[x]) queue.update_key(x, queue.key_of(x) - 1);
        }
    }
}

// Index-local variant for small universes (the common case inside the
// ARW loop, where a perturbation frees only a handful of nodes);
// avoids the O(n) scratch of the bucket queue.
inline void greedy_extend_small(SolutionState& st, Rng& rng, std::vector<NodeID>& universe) {
    const Graph& g = st.graph();
    std::sort(universe.begin(), universe.end());
    const std::size_t sz = universe.size();
    auto index_of = [&](NodeID v) -> std::size_t {
        auto it = std::lower_bound(universe.begin(), universe.end(), v);
        if (it == universe.end() || *it != v) return sz;
        return static_cast<std::size_t>(it - universe.begin());
    };

    std::vector<std::uint8_t> alive(sz, 1);
    std::vector<std::uint32_t> residual(sz, 0);
    for (std::size_t i = 0; i < sz; ++i)
        for (NodeID u : g.neighbors(universe[i]))
            if (index_of(u) != sz) ++residual[i];

    std::size_t remaining = sz;
    std::vector<std::size_t> ties;
    while (remaining > 0) {
        std::uint32_t best = std::numeric_limits<std::uint32_t>::max();
        ties.clear();
        for (std::size_t i = 0; i < sz; ++i) {
            if (!alive[i]) continue;
            if (residual[i] < best) {
                best = residual[i];
                ties.clear();
                ties.push_back(i);
            } else if (residual[i] == best) {
                ties.push_back(i);
            }
        }
        std::size_t pick = ties[random_index(rng, ties.size())];
        NodeID v = universe[pick];
        alive[pick] = 0;
        --remaining;
        st.insert(v);
        for (NodeID w : g.neighbors(v)) {
            std::size_t j = index_of(w);
            if (j == sz || !alive[j]) continue;
            alive[j] = 0;
            --remaining;
            for (NodeID x : g.neighbors(w)) {
                std::size_t jx = index_of(x);
                if (jx != sz && alive[jx]) --residual[jx];
            }
        }
    }
}

} // namespace detail

/// Greedy least-residual-degree fill: repeatedly inserts, among the
/// still-free candidate nodes, one with the fewest free neighbors
/// (uniform random tie-break). With no restriction this is the greedy
/// constructor; restricted to the current free nodes it is the
/// maximization step applied to offsprings.
inline void greedy_extend(SolutionState& st, Rng& rng,
                          const std::vector<NodeID>* restrict_to = nullptr) {
    if (st.num_free() == 0) return;

    std::vector<NodeID> universe;
    if (restrict_to) {
        universe.reserve(restrict_to->size());
        for (NodeID v : *restrict_to)
            if (st.is_free(v)) universe.push_back(v);
    } else {
        universe = st.free_nodes();
    }
    if (universe.empty()) return;

    if (universe.size() <= 64)
        detail::greedy_extend_small(st, rng, universe);
    else
        detail::greedy_extend_bucketed(st, rng, universe);
}

} // namespace evomis
