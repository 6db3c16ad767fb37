/*
 * Copyright 2026 The latentid authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "latentid/errors.hpp"

namespace latentid {

using Edge = std::pair<int, int>;  // directed (tail, head), 1-based nodes

/*
 * Directed acyclic graph on nodes 1..m.  Immutable after construction;
 * acyclicity is verified by topological sort at construction time and a
 * deterministic (smallest-node-first) topological order is stored.
 */
class Dag {
public:
    Dag(int m, std::vector<Edge> edges) : m_(m) {
        if (m < 0) throw index_error("negative node count");
        adj_.assign(static_cast<std::size_t>(m) * m, 0);
        std::sort(edges.begin(), edges.end());
        for (const Edge& e : edges) {
            if (e.first < 1 || e.first > m || e.second < 1 || e.second > m)
                throw index_error("edge endpoint out of range: " + std::to_string(e.first) +
                                  "->" + std::to_string(e.second));
            if (e.first == e.second)
                throw index_error("self-loop at node " + std::to_string(e.first));
            if (at(e.first, e.second))
                throw index_error("duplicate edge " + std::to_string(e.first) + "->" +
                                  std::to_string(e.second));
            at(e.first, e.second) = 1;
        }
        edges_ = std::move(edges);
        topo_ = topological_order();
    }

    int m() const { return m_; }
    const std::vector<Edge>& edges() const { return edges_; }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    const std::vector<int>& topo_order() const { return topo_; }

    bool has_edge(int v, int w) const {
        return v >= 1 && v <= m_ && w >= 1 && w <= m_ && v != w && at(v, w);
    }
    bool adjacent(int v, int w) const { return has_edge(v, w) || has_edge(w, v); }

    std::vector<int> parents(int v) const {
        check_node(v);
        std::vector<int> out;
        for (int w = 1; w <= m_; ++w)
            if (at(w, v)) out.push_back(w);
        return out;
    }

    std::vector<int> children(int v) const {
        check_node(v);
        std::vector<int> out;
        for (int w = 1; w <= m_; ++w)
            if (at(v, w)) out.push_back(w);
        return out;
    }

    std::vector<int> sinks() const {
        std::vector<int> out;
        for (int v = 1; v <= m_; ++v)
            if (children(v).empty()) out.push_back(v);
        return out;
    }

    std::vector<int> sources() const {
        std::vector<int> out;
        for (int v = 1; v <= m_; ++v)
            if (parents(v).empty()) out.push_back(v);
        return out;
    }

    /// Self-inclusive ancestor set of v, as a sorted node list.
    std::vector<int> ancestors(int v) const {
        check_node(v);
        std::vector<char> seen(m_ + 1, 0);
        std::deque<int> queue{v};
        seen[v] = 1;
        while (!queue.empty()) {
            const int u = queue.front();
            queue.pop_front();
            for (int w = 1; w <= m_; ++w)
                if (at(w, u) && !seen[w]) {
                    seen[w] = 1;
                    queue.push_back(w);
                }
        }
        std::vector<int> out;
        for (int w = 1; w <= m_; ++w)
            if (seen[w]) out.push_back(w);
        return out;
    }

private:
    void check_node(int v) const {
        if (v < 1 || v > m_) throw index_error("node out of range: " + std::to_string(v));
    }

    std::uint8_t& at(int v, int w) { return adj_[static_cast<std::size_t>(v - 1) * m_ + (w - 1)]; }
    std::uint8_t at(int v, int w) const {
        return adj_[static_cast<std::size_t>(v - 1) * m_ + (w - 1)];
    }

    // Kahn's algorithm, always popping the smallest available node.
    std::vector<int> topological_order() const {
        std::vector<int> indeg(m_ + 1, 0);
        for (const Edge& e : edges_) ++indeg[e.second];
        std::set<int> ready;
        for (int v = 1; v <= m_; ++v)
            if (indeg[v] == 0) ready.insert(v);
        std::vector<int> order;
        order.reserve(m_);
        while (!ready.empty()) {
            const int v = *ready.begin();
            ready.erase(ready.begin());
            order.push_back(v);
            for (int w = 1; w <= m_; ++w)
                if (at(v, w) && --indeg[w] == 0) ready.insert(w);
        }
        if (static_cast<int>(order.size()) != m_)
            throw cycle_error("graph contains a directed cycle");
        return order;
    }

    int m_;
    std::vector<Edge> edges_;
    std::vector<std::uint8_t> adj_;
    std::vector<int> topo_;
};

inline Dag make_dag(int m, std::vector<Edge> edges) { return Dag(m, std::move(edges)); }

/// Undirected graph on nodes 1..m; edges stored as (v, w) with v < w.
class UGraph {
public:
    UGraph(int m, std::vector<Edge> edges) : m_(m) {
        if (m < 0) throw index_error("negative node count");
        adj_.assign(static_cast<std::size_t>(m) * m, 0);
        for (Edge& e : edges) {
            if (e.first > e.second) std::swap(e.first, e.second);
            if (e.first < 1 || e.second > m)
                throw index_error("edge endpoint out of range");
            if (e.first == e.second) throw index_error("self-loop in undirected graph");
        }
        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
        for (const Edge& e : edges) {
            at(e.first, e.second) = 1;
            at(e.second, e.first) = 1;
        }
        edges_ = std::move(edges);
    }

    int m() const { return m_; }
    const std::vector<Edge>& edges() const { return edges_; }
    int edge_count() const { return static_cast<int>(edges_.size()); }

    bool has_edge(int v, int w) const {
        return v >= 1 && v <= m_ && w >= 1 && w <= m_ && v != w && at(v, w);
    }

    std::vector<int> neighbors(int v) const {
        if (v < 1 || v > m_) throw index_error("node out of range");
        std::vector<int> out;
        for (int w = 1; w <= m_; ++w)
            if (at(v, w)) out.push_back(w);
        return out;
    }

private:
    std::uint8_t& at(int v, int w) { return adj_[static_cast<std::size_t>(v - 1) * m_ + (w - 1)]; }
    std::uint8_t at(int v, int w) const {
        return adj_[static_cast<std::size_t>(v - 1) * m_ + (w - 1)];
    }

    int m_;
    std::vector<Edge> edges_;
    std::vector<std::uint8_t> adj_;
};

/// {v, w} present iff neither (v, w) nor (w, v) is an edge of G.
inline UGraph complement(const Dag& g) {
    std::vector<Edge> edges;
    for (int v = 1; v <= g.m(); ++v)
        for (int w = v + 1; w <= g.m(); ++w)
            if (!g.adjacent(v, w)) edges.emplace_back(v, w);
    return UGraph(g.m(), std::move(edges));
}

inline UGraph complement(const UGraph& g) {
    std::vector<Edge> edges;
    for (int v = 1; v <= g.m(); ++v)
        for (int w = v + 1; w <= g.m(); ++w)
            if (!g.has_edge(v, w)) edges.emplace_back(v, w);
    return UGraph(g.m(), std::move(edges));
}

struct OddCycleReport {
    std::vector<int> component;        // size m, 0-based component id per node 1..m
    std::vector<char> has_odd_cycle;   // per component: non-bipartite?
    int count() const { return static_cast<int>(has_odd_cycle.size()); }
    int components_without_odd_cycle() const {
        int d = 0;
        for (char f : has_odd_cycle)
            if (!f) ++d;
        return d;
    }
};

/*
 * Connected components with a per-component odd-cycle flag, decided by
 * 2-coloring BFS: a component contains an odd cycle iff it is not
 * bipartite.  Isolated nodes form bipartite singleton components.
 */
inline OddCycleReport odd_cycle_components(const UGraph& g) {
    OddCycleReport rep;
    rep.component.assign(g.m(), -1);
    std::vector<int> color(g.m() + 1, -1);
    for (int start = 1; start <= g.m(); ++start) {
        if (rep.component[start - 1] >= 0) continue;
        const int comp = rep.count();
        rep.has_odd_cycle.push_back(0);
        color[start] = 0;
        rep.component[start - 1] = comp;
        std::deque<int> queue{start};
        while (!queue.empty()) {
            const int v = queue.front();
            queue.pop_front();
            for (int w : g.neighbors(v)) {
                if (color[w] < 0) {
                    color[w] = 1 - color[v];
                    rep.component[w - 1] = comp;
                    queue.push_back(w);
                } else if (color[w] == color[v]) {
                    rep.has_odd_cycle[comp] = 1;
                }
            }
        }
    }
    return rep;
}

/*
 * Concentration graph: {v, w} present iff v, w are adjacent in G or share
 * a child (the moral graph).  This is the support of the concentration
 * matrix of the latent-free model on G.
 */
inline UGraph concentration_graph(const Dag& g) {
    std::vector<Edge> edges;
    for (int v = 1; v <= g.m(); ++v)
        for (int w = v + 1; w <= g.m(); ++w) {
            bool linked = g.adjacent(v, w);
            for (int c = 1; !linked && c <= g.m(); ++c)
                linked = g.has_edge(v, c) && g.has_edge(w, c);
            if (linked) edges.emplace_back(v, w);
        }
    return UGraph(g.m(), std::move(edges));
}

/*
 * Latent-conditional covariance graph: {v, w} present iff v and w have a
 * common ancestor (self-inclusive), i.e. a trek connects them and the
 * conditional covariance entry is not identically zero.
 */
inline UGraph latent_covariance_graph(const Dag& g) {
    std::vector<std::vector<int>> anc(g.m() + 1);
    for (int v = 1; v <= g.m(); ++v) anc[v] = g.ancestors(v);
    std::vector<Edge> edges;
    for (int v = 1; v <= g.m(); ++v)
        for (int w = v + 1; w <= g.m(); ++w) {
            std::vector<int> common;
            std::set_intersection(anc[v].begin(), anc[v].end(), anc[w].begin(), anc[w].end(),
                                  std::back_inserter(common));
            if (!common.empty()) edges.emplace_back(v, w);
        }
    return UGraph(g.m(), std::move(edges));
}

/// v-structures a -> c <- b with a, b non-adjacent, as tuples (min, c, max).
inline std::set<std::tuple<int, int, int>> v_structures(const Dag& g) {
    std::set<std::tuple<int, int, int>> out;
    for (int c = 1; c <= g.m(); ++c) {
        const std::vector<int> pa = g.parents(c);
        for (std::size_t i = 0; i < pa.size(); ++i)
            for (std::size_t j = i + 1; j < pa.size(); ++j)
                if (!g.adjacent(pa[i], pa[j])) out.emplace(pa[i], c, pa[j]);
    }
    return out;
}

/// Same skeleton and same v-structures.
inline bool markov_equivalent(const Dag& g1, const Dag& g2) {
    if (g1.m() != g2.m()) throw size_error("graphs have different node counts");
    for (int v = 1; v <= g1.m(); ++v)
        for (int w = v + 1; w <= g1.m(); ++w)
            if (g1.adjacent(v, w) != g2.adjacent(v, w)) return false;
    return v_structures(g1) == v_structures(g2);
}

/*
 * Every DAG in the Markov equivalence class of g (same labeled node set):
 * all acyclic reorientations of the skeleton with the same v-structures,
 * g itself included.  Exponential in the edge count; fine at the scales
 * here (at most a few hundred orientations).
 */
inline std::vector<Dag> markov_equivalence_class(const Dag& g) {
    std::vector<Edge> skeleton;
    for (int v = 1; v <= g.m(); ++v)
        for (int w = v + 1; w <= g.m(); ++w)
            if (g.adjacent(v, w)) skeleton.emplace_back(v, w);
    const std::set<std::tuple<int, int, int>> colliders = v_structures(g);
    std::vector<Dag> out;
    const std::size_t k = skeleton.size();
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << k); ++mask) {
        std::vector<Edge> edges;
        edges.reserve(k);
        for (std::size_t s = 0; s < k; ++s)
            edges.push_back(mask >> s & 1 ? Edge{skeleton[s].second, skeleton[s].first}
                                          : skeleton[s]);
        try {
            Dag candidate(g.m(), std::move(edges));
            if (v_structures(candidate) == colliders) out.push_back(std::move(candidate));
        } catch (const cycle_error&) {
        }
    }
    return out;
}

/*
 * Induced subgraph on `keep`, relabeled 1..|keep| preserving node order so
 * a topological labeling stays topological.
 */
inline Dag induced_subgraph(const Dag& g, std::vector<int> keep) {
    std::sort(keep.begin(), keep.end());
    keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
    if (keep.empty()) throw index_error("empty keep set");
    std::vector<int> relabel(g.m() + 1, 0);
    for (std::size_t i = 0; i < keep.size(); ++i) {
        if (keep[i] < 1 || keep[i] > g.m()) throw index_error("keep node out of range");
        relabel[keep[i]] = static_cast<int>(i) + 1;
    }
    std::vector<Edge> edges;
    for (const Edge& e : g.edges())
        if (relabel[e.first] && relabel[e.second])
            edges.emplace_back(relabel[e.first], relabel[e.second]);
    return Dag(static_cast<int>(keep.size()), std::move(edges));
}

inline UGraph induced_subgraph(const UGraph& g, std::vector<int> keep) {
    std::sort(keep.begin(), keep.end());
    keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
    if (keep.empty()) throw index_error("empty keep set");
    std::vector<int> relabel(g.m() + 1, 0);
    for (std::size_t i = 0; i < keep.size(); ++i) {
        if (keep[i] < 1 || keep[i] > g.m()) throw index_error("keep node out of range");
        relabel[keep[i]] = static_cast<int>(i) + 1;
    }
    std::vector<Edge> edges;
    for (const Edge& e : g.edges())
        if (relabel[e.first] && relabel[e.second])
            edges.emplace_back(relabel[e.first], relabel[e.second]);
    return UGraph(static_cast<int>(keep.size()), std::move(edges));
}

/// Relabels node v as perm[v-1]; perm must be a permutation of 1..m.
inline Dag permuted(const Dag& g, const std::vector<int>& perm) {
    if (static_cast<int>(perm.size()) != g.m()) throw size_error("permutation length mismatch");
    std::vector<Edge> edges;
    edges.reserve(g.edges().size());
    for (const Edge& e : g.edges())
        edges.emplace_back(perm[e.first - 1], perm[e.second - 1]);
    return Dag(g.m(), std::move(edges));
}

/*
 * Canonical form for directed-graph isomorphism: two Dags have equal keys
 * iff some node relabeling maps one onto the other.  Computed as the
 * minimum, over all m! permutations, of the bit-packed adjacency matrix.
 * Brute force is fine at m <= 8 (at most 40320 permutations).
 */
struct CanonicalKey {
    std::uint8_t m = 0;
    std::uint64_t bits = 0;

    friend auto operator<=>(const CanonicalKey&, const CanonicalKey&) = default;

    std::string hex() const {
        static const char* digits = "0123456789abcdef";
        std::string s;
        s += digits[(m >> 4) & 0xF];
        s += digits[m & 0xF];
        s += ':';
        for (int shift = 60; shift >= 0; shift -= 4) s += digits[(bits >> shift) & 0xF];
        return s;
    }

    static std::optional<CanonicalKey> from_hex(const std::string& s) {
        if (s.size() != 19 || s[2] != ':') return std::nullopt;
        auto nibble = [](char c) -> int {
            if (c >= '0' && c <= '9') return c - '0';
            if (c >= 'a' && c <= 'f') return c - 'a' + 10;
            return -1;
        };
        CanonicalKey k;
        int hi = nibble(s[0]), lo = nibble(s[1]);
        if (hi < 0 || lo < 0) return std::nullopt;
        k.m = static_cast<std::uint8_t>(hi * 16 + lo);
        for (int i = 3; i < 19; ++i) {
            const int d = nibble(s[i]);
            if (d < 0) return std::nullopt;
            k.bits = (k.bits << 4) | static_cast<std::uint64_t>(d);
        }
        return k;
    }
};

inline std::uint64_t pack_adjacency(const Dag& g) {
    std::uint64_t bits = 0;
    for (const Edge& e : g.edges())
        bits |= std::uint64_t{1} << ((e.first - 1) * g.m() + (e.second - 1));
    return bits;
}

inline CanonicalKey canonical_key(const Dag& g) {
    const int m = g.m();
    if (m > 8) throw size_error("canonical key supports at most 8 nodes");
    std::vector<int> perm(m);
    std::iota(perm.begin(), perm.end(), 0);
    std::uint64_t best = ~std::uint64_t{0};
    const std::vector<Edge>& edges = g.edges();
    do {
        std::uint64_t bits = 0;
        for (const Edge& e : edges)
            bits |= std::uint64_t{1} << (perm[e.first - 1] * m + perm[e.second - 1]);
        if (bits < best) best = bits;
    } while (std::next_permutation(perm.begin(), perm.end()));
    if (edges.empty()) best = 0;
    return CanonicalKey{static_cast<std::uint8_t>(m), best};
}

/// Rebuilds the canonical representative graph from a key.
inline Dag dag_from_key(const CanonicalKey& key) {
    const int m = key.m;
    std::vector<Edge> edges;
    for (int v = 1; v <= m; ++v)
        for (int w = 1; w <= m; ++w)
            if (v != w && (key.bits >> ((v - 1) * m + (w - 1))) & 1) edges.emplace_back(v, w);
    return Dag(m, std::move(edges));
}

/*
 * Graph text format: first content line "m", then one "u v" line per edge
 * u -> v (1-indexed).  Blank lines and lines starting with '#' are ignored.
 */
inline Dag read_graph(std::istream& in) {
    std::string line;
    long lineno = 0;
    int m = -1;
    std::vector<Edge> edges;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string::size_type first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ls(line);
        if (m < 0) {
            if (!(ls >> m) || m < 0) throw parse_error("expected node count", lineno);
            std::string extra;
            if (ls >> extra) throw parse_error("unexpected token '" + extra + "'", lineno);
            continue;
        }
        int u = 0, v = 0;
        if (!(ls >> u >> v)) throw parse_error("expected edge 'u v'", lineno);
        std::string extra;
        if (ls >> extra) throw parse_error("unexpected token '" + extra + "'", lineno);
        edges.emplace_back(u, v);
    }
    if (m < 0) throw parse_error("empty graph file", lineno);
    return Dag(m, std::move(edges));
}

inline void write_graph(std::ostream& out, const Dag& g) {
    out << g.m() << '\n';
    for (const Edge& e : g.edges()) out << e.first << ' ' << e.second << '\n';
}

}  // namespace latentid
