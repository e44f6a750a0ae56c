#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace evomis {

using NodeID = std::uint32_t;
using EdgeID = std::uint64_t;

class GraphFormatError : public std::runtime_error {
public:
    explicit GraphFormatError(const std::string& what) : std::runtime_error(what) {}
};

/// Immutable undirected simple graph in CSR form. Neighbor lists are
/// sorted ascending; the builder symmetrizes, deduplicates and drops
/// self-loops, so adjacency is always clean regardless of the input.
class Graph {
public:
    Graph() = default;

    static Graph from_edges(NodeID n, std::vector<std::pair<NodeID, NodeID>> edges) {
        for (auto [u, v] : edges) {
            if (u >= n || v >= n) throw std::invalid_argument("edge endpoint out of range");
        }
        // symmetrize, then sort + dedup per node
        std::size_t directed = 0;
        for (auto [u, v] : edges) {
            if (u != v) directed += 2;
        }
        std::vector<std::pair<NodeID, NodeID>> arcs;
        arcs.reserve(directed);
        for (auto [u, v] : edges) {
            if (u == v) continue;
            arcs.emplace_back(u, v);
            arcs.emplace_back(v, u);
        }
        std::sort(arcs.begin(), arcs.end());
        arcs.erase(std::unique(arcs.begin(), arcs.end()), arcs.end());

        Graph g;
        g.offsets_.assign(n + 1, 0);
        for (auto [u, v] : arcs) g.offsets_[u + 1]++;
        for (NodeID u = 0; u < n; ++u) g.offsets_[u + 1] += g.offsets_[u];
        g.adj_.reserve(arcs.size());
        for (auto [u, v] : arcs) g.adj_.push_back(v);
        g.m_ = arcs.size() / 2;
        return g;
    }

    NodeID num_nodes() const { return static_cast<NodeID>(offsets_.empty() ? 0 : offsets_.size() - 1); }
    EdgeID num_edges() const { return m_; }

    std::span<const NodeID> neighbors(NodeID v) const {
        return {adj_.data() + offsets_[v], adj_.data() + offsets_[v + 1]};
    }

    NodeID degree(NodeID v) const { return static_cast<NodeID>(offsets_[v + 1] - offsets_[v]); }

    bool adjacent(NodeID u, NodeID v) const {
        auto nb = neighbors(u);
        return std::binary_search(nb.begin(), nb.end(), v);
    }

    bool operator==(const Graph& other) const {
        return offsets_ == other.offsets_ && adj_ == other.adj_;
    }

private:
    std::vector<EdgeID> offsets_;
    std::vector<NodeID> adj_;
    EdgeID m_ = 0;
};

/// Candidate independent set: bit array plus cached cardinality.
/// Validity (independence, maximality) is a property of the surrounding
/// code path, not enforced here; see is_independent_set / is_maximal.
class Individual {
public:
    Individual() = default;
    explicit Individual(NodeID n) : n_(n), words_((n + 63) / 64, 0) {}

    static Individual from_nodes(NodeID n, const std::vector<NodeID>& nodes) {
        Individual ind(n);
        for (NodeID v : nodes) ind.insert(v);
        return ind;
    }

    NodeID num_nodes() const { return n_; }
    NodeID size() const { return size_; }

    bool contains(NodeID v) const { return (words_[v >> 6] >> (v & 63)) & 1; }

    void insert(NodeID v) {
        std::uint64_t& w = words_[v >> 6];
        std::uint64_t mask = 1ULL << (v & 63);
        if (!(w & mask)) {
            w |= mask;
            ++size_;
        }
    }

    void remove(NodeID v) {
        std::uint64_t& w = words_[v >> 6];
        std::uint64_t mask = 1ULL << (v & 63);
        if (w & mask) {
            w &= ~mask;
            --size_;
        }
    }

    std::vector<NodeID> to_nodes() const {
        std::vector<NodeID> nodes;
        nodes.reserve(size_);
        for (NodeID v = 0; v < n_; ++v)
            if (contains(v)) nodes.push_back(v);
        return nodes;
    }

    NodeID popcount() const {
        NodeID c = 0;
        for (std::uint64_t w : words_) c += static_cast<NodeID>(std::popcount(w));
        return c;
    }

    bool operator==(const Individual& other) const {
        return n_ == other.n_ && words_ == other.words_;
    }

private:
    NodeID n_ = 0;
    NodeID size_ = 0;
    std::vector<std::uint64_t> words_;

    friend NodeID hamming_distance(const Individual&, const Individual&);
};

inline NodeID hamming_distance(const Individual& a, const Individual& b) {
    NodeID d = 0;
    for (std::size_t i = 0; i < a.words_.size(); ++i)
        d += static_cast<NodeID>(std::popcount(a.words_[i] ^ b.words_[i]));
    return d;
}

/// Complement as a node set (vertex cover <-> independent set duality).
inline Individual complement_set(const Individual& ind) {
    Individual out(ind.num_nodes());
    for (NodeID v = 0; v < ind.num_nodes(); ++v)
        if (!ind.contains(v)) out.insert(v);
    return out;
}

inline bool is_independent_set(const Graph& g, const Individual& ind) {
    if (ind.num_nodes() != g.num_nodes()) throw std::invalid_argument("bit array length mismatch");
    for (NodeID v = 0; v < g.num_nodes(); ++v) {
        if (!ind.contains(v)) continue;
        for (NodeID u : g.neighbors(v))
            if (u > v && ind.contains(u)) return false;
    }
    return true;
}

/// True iff every node outside the set has a neighbor inside it.
inline bool is_maximal(const Graph& g, const Individual& ind) {
    if (!is_independent_set(g, ind)) throw std::invalid_argument("input is not an independent set");
    for (NodeID v = 0; v < g.num_nodes(); ++v) {
        if (ind.contains(v)) continue;
        bool covered = false;
        for (NodeID u : g.neighbors(v)) {
            if (ind.contains(u)) {
                covered = true;
                break;
            }
        }
        if (!covered) return false;
    }
    return true;
}

/// tau(v) = |N(v) ∩ I| for a non-solution node v.
inline NodeID tightness(const Graph& g, const Individual& ind, NodeID v) {
    if (ind.contains(v)) throw std::invalid_argument("tightness queried for a solution node");
    NodeID t = 0;
    for (NodeID u : g.neighbors(v))
        if (ind.contains(u)) ++t;
    return t;
}

namespace detail {

inline bool read_data_line(std::istream& in, std::string& line, std::size_t& line_no) {
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line[0] == '%') continue;
        return true;
    }
    return false;
}

[[noreturn]] inline void parse_fail(std::size_t line_no, const std::string& what) {
    throw GraphFormatError("line " + std::to_string(line_no) + ": " + what);
}

} // namespace detail

/// METIS adjacency format: header "n m [fmt [ncon]]", then one line of
/// 1-indexed neighbors per node. '%' lines are comments. Node/edge
/// weights announced by fmt are parsed and ignored; input edges are
/// symmetrized and deduplicated, so m is recounted after cleanup.
inline Graph parse_metis(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    if (!detail::read_data_line(in, line, line_no))
        throw GraphFormatError("empty input: missing METIS header");

    std::istringstream header(line);
    long long n = -1, m_declared = -1;
    std::string fmt;
    if (!(header >> n >> m_declared) || n < 0 || m_declared < 0)
        detail::parse_fail(line_no, "malformed METIS header, expected \"n m [fmt]\"");
    header >> fmt; // optional
    bool has_node_weights = false, has_edge_weights = false;
    if (!fmt.empty()) {
        if (fmt.find_first_not_of("01") != std::string::npos)
            detail::parse_fail(line_no, "unsupported METIS fmt field \"" + fmt + "\"");
        has_edge_weights = fmt.size() >= 1 && fmt[fmt.size() - 1] == '1';
        has_node_weights = fmt.size() >= 2 && fmt[fmt.size() - 2] == '1';
    }

    std::vector<std::pair<NodeID, NodeID>> edges;
    edges.reserve(static_cast<std::size_t>(m_declared));
    for (long long v = 0; v < n; ++v) {
        if (!detail::read_data_line(in, line, line_no))
            detail::parse_fail(line_no, "unexpected end of input, expected " + std::to_string(n) + " adjacency lines");
        std::istringstream tokens(line);
        std::string tok;
        if (has_node_weights) {
            if (tokens >> tok) {
                if (tok.find_first_not_of("0123456789") != std::string::npos)
                    detail::parse_fail(line_no, "non-numeric node weight \"" + tok + "\"");
            }
        }
        while (tokens >> tok) {
            if (tok.find_first_not_of("0123456789") != std::string::npos)
                detail::parse_fail(line_no, "non-numeric token \"" + tok + "\"");
            long long u = std::stoll(tok);
            if (u < 1 || u > n)
                detail::parse_fail(line_no, "neighbor id " + tok + " out of range [1, " + std::to_string(n) + "]");
            edges.emplace_back(static_cast<NodeID>(v), static_cast<NodeID>(u - 1));
            if (has_edge_weights) {
                if (!(tokens >> tok))
                    detail::parse_fail(line_no, "missing edge weight");
                if (tok.find_first_not_of("0123456789") != std::string::npos)
                    detail::parse_fail(line_no, "non-numeric edge weight \"" + tok + "\"");
            }
        }
    }
    return Graph::from_edges(static_cast<NodeID>(n), std::move(edges));
}

inline Graph parse_metis(const std::string& text) {
    std::istringstream in(text);
    return parse_metis(in);
}

inline void serialize_metis(const Graph& g, std::ostream& out) {
    out << g.num_nodes() << ' ' << g.num_edges() << '\n';
    for (NodeID v = 0; v < g.num_nodes(); ++v) {
        bool first = true;
        for (NodeID u : g.neighbors(v)) {
            if (!first) out << ' ';
            out << (u + 1);
            first = false;
        }
        out << '\n';
    }
}

inline std::string serialize_metis(const Graph& g) {
    std::ostringstream out;
    serialize_metis(g, out);
    return out.str();
}

/// DIMACS edge list: "p edge n m" header, "e u v" edges (1-indexed),
/// "c" comment lines.
inline Graph parse_dimacs(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    long long n = -1;
    std::vector<std::pair<NodeID, NodeID>> edges;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == 'c') continue;
        std::istringstream tokens(line);
        std::string kind;
        tokens >> kind;
        if (kind == "p") {
            std::string problem;
            long long m = -1;
            if (!(tokens >> problem >> n >> m) || n < 0 || m < 0)
                detail::parse_fail(line_no, "malformed DIMACS problem line");
            edges.reserve(static_cast<std::size_t>(m));
        } else if (kind == "e") {
            if (n < 0) detail::parse_fail(line_no, "edge before problem line");
            long long u, v;
            if (!(tokens >> u >> v))
                detail::parse_fail(line_no, "malformed edge line");
            if (u < 1 || u > n || v < 1 || v > n)
                detail::parse_fail(line_no, "edge endpoint out of range [1, " + std::to_string(n) + "]");
            edges.emplace_back(static_cast<NodeID>(u - 1), static_cast<NodeID>(v - 1));
        } else {
            detail::parse_fail(line_no, "unknown DIMACS line kind \"" + kind + "\"");
        }
    }
    if (n < 0) throw GraphFormatError("missing DIMACS problem line");
    return Graph::from_edges(static_cast<NodeID>(n), std::move(edges));
}

inline Graph parse_dimacs(const std::string& text) {
    std::istringstream in(text);
    return parse_dimacs(in);
}

} // namespace evomis
