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
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "latentid/graph.hpp"

namespace latentid {

/*
 * Graphical identifiability criteria.
 *
 * Sufficient: every connected component of the complement graph contains
 * an odd cycle.  Necessary: the derived concentration / latent-covariance
 * graphs must carry enough extra edges to cover the odd-cycle-free
 * components of their complements.  Both take an optional excluded-node
 * set for models whose latent loadings are pinned to zero on those nodes;
 * the complements are then restricted to the remaining nodes.
 */

inline std::vector<int> keep_after_excluding(int m, const std::vector<int>& excluded) {
    std::vector<int> keep;
    for (int v = 1; v <= m; ++v)
        if (!std::binary_search(excluded.begin(), excluded.end(), v)) keep.push_back(v);
    return keep;
}

inline bool sufficient_odd_cycle(const Dag& g, std::vector<int> excluded = {}) {
    std::sort(excluded.begin(), excluded.end());
    const std::vector<int> keep = keep_after_excluding(g.m(), excluded);
    if (keep.empty()) return true;  // loading-free model, identifiable outright
    const UGraph comp = induced_subgraph(complement(g), keep);
    const OddCycleReport rep = odd_cycle_components(comp);
    return rep.components_without_odd_cycle() == 0;
}

enum class FailedClause { none, clause_i, clause_ii, both };

inline const char* to_string(FailedClause c) {
    switch (c) {
        case FailedClause::none: return "none";
        case FailedClause::clause_i: return "clause_i";
        case FailedClause::clause_ii: return "clause_ii";
        case FailedClause::both: return "both";
    }
    return "?";
}

struct NecessaryReport {
    bool holds = true;
    int e_con = 0;      // edges of the concentration graph
    int d_con = 0;      // odd-cycle-free components of its (restricted) complement
    int cov_edges = 0;  // edges of the latent-covariance graph
    int d_cov = 0;
    FailedClause failed_clause = FailedClause::none;
};

inline NecessaryReport necessary_condition(const Dag& g, std::vector<int> excluded = {}) {
    std::sort(excluded.begin(), excluded.end());
    const std::vector<int> keep = keep_after_excluding(g.m(), excluded);
    const UGraph con = concentration_graph(g);
    const UGraph cov = latent_covariance_graph(g);
    NecessaryReport rep;
    rep.e_con = con.edge_count();
    rep.cov_edges = cov.edge_count();
    if (!keep.empty()) {
        rep.d_con = odd_cycle_components(induced_subgraph(complement(con), keep))
                        .components_without_odd_cycle();
        rep.d_cov = odd_cycle_components(induced_subgraph(complement(cov), keep))
                        .components_without_odd_cycle();
    }
    const bool clause_i = rep.e_con - g.edge_count() >= rep.d_con;
    const bool clause_ii = rep.cov_edges - g.edge_count() >= rep.d_cov;
    rep.holds = clause_i && clause_ii;
    if (clause_i && clause_ii) rep.failed_clause = FailedClause::none;
    else if (!clause_i && clause_ii) rep.failed_clause = FailedClause::clause_i;
    else if (clause_i && !clause_ii) rep.failed_clause = FailedClause::clause_ii;
    else rep.failed_clause = FailedClause::both;
    return rep;
}

/*
 * Stanghellini-Wermuth style sufficient condition: every component of the
 * complement of the latent-covariance graph has an odd cycle, or the same
 * for the concentration graph.  Strictly weaker than sufficient_odd_cycle
 * (every graph it certifies is also certified there).
 */
struct WermuthReport {
    bool clause_cov = false;  // complement of the latent-covariance graph
    bool clause_con = false;  // complement of the concentration graph
    bool holds() const { return clause_cov || clause_con; }
};

inline WermuthReport wermuth_report(const Dag& g) {
    WermuthReport rep;
    rep.clause_cov = odd_cycle_components(complement(latent_covariance_graph(g)))
                         .components_without_odd_cycle() == 0;
    rep.clause_con = odd_cycle_components(complement(concentration_graph(g)))
                         .components_without_odd_cycle() == 0;
    return rep;
}

inline bool wermuth_condition(const Dag& g) { return wermuth_report(g).holds(); }

/*
 * Subgraph extension certificates.
 *
 * Removing a sink s with pa(s) != V \ {s} (or a source with the mirror
 * condition) preserves identifiability of the smaller model upward, so a
 * chain of such removals ending at a graph known identifiable certifies
 * the original graph.  Cache verdicts are only trusted when they are
 * certificates (graphical or Jacobian), never probabilistic negatives.
 */
enum class RemovalRole { sink, source };

inline const char* to_string(RemovalRole r) {
    return r == RemovalRole::sink ? "sink" : "source";
}

struct CacheEntry {
    bool identifiable = false;
    bool certified = false;     // certificate-grade verdict, usable for extension
    bool suff = false;          // satisfied the odd-cycle sufficient condition
    std::string provenance;     // "criteria" or "jacobian"
};

using VerdictCache = std::map<CanonicalKey, CacheEntry>;

struct ExtensionCertificate {
    // (removed node, role) pairs; node ids refer to the graph at that step.
    std::vector<std::pair<int, RemovalRole>> chain;
    CanonicalKey base_graph_key;
};

namespace detail {

inline std::optional<ExtensionCertificate> extension_search(const Dag& g,
                                                            const VerdictCache& cache,
                                                            int depth, int max_depth) {
    const int m = g.m();
    if (m <= 3) return std::nullopt;
    for (int s = 1; s <= m; ++s) {
        for (const RemovalRole role : {RemovalRole::sink, RemovalRole::source}) {
            if (role == RemovalRole::sink) {
                if (!g.children(s).empty()) continue;
                if (static_cast<int>(g.parents(s).size()) == m - 1) continue;
            } else {
                if (!g.parents(s).empty()) continue;
                if (static_cast<int>(g.children(s).size()) == m - 1) continue;
            }
            std::vector<int> keep;
            for (int v = 1; v <= m; ++v)
                if (v != s) keep.push_back(v);
            const Dag sub = induced_subgraph(g, keep);
            bool base = false;
            CanonicalKey sub_key{};
            if (sub.m() <= 8) {
                sub_key = canonical_key(sub);
                const auto it = cache.find(sub_key);
                if (it != cache.end() && it->second.identifiable && it->second.certified)
                    base = true;
            }
            if (!base && sufficient_odd_cycle(sub)) {
                base = true;
                if (sub.m() <= 8) sub_key = canonical_key(sub);
            }
            if (base) {
                ExtensionCertificate cert;
                cert.chain.emplace_back(s, role);
                cert.base_graph_key = sub_key;
                return cert;
            }
            if (depth < max_depth) {
                std::optional<ExtensionCertificate> deeper =
                    extension_search(sub, cache, depth + 1, max_depth);
                if (deeper) {
                    deeper->chain.insert(deeper->chain.begin(), {s, role});
                    return deeper;
                }
            }
        }
    }
    return std::nullopt;
}

}  // namespace detail

/// Deterministic DFS over removable sinks/sources, in ascending node order.
inline std::optional<ExtensionCertificate> subgraph_extension(const Dag& g,
                                                              const VerdictCache& cache,
                                                              int max_depth = -1) {
    if (max_depth < 0) max_depth = std::max(1, g.m() - 3);
    return detail::extension_search(g, cache, 1, max_depth);
}

/// Re-executes a certificate's removal chain; true iff it reaches the
/// claimed base graph and the base is certified identifiable.
inline bool replay_extension(const Dag& g, const ExtensionCertificate& cert,
                             const VerdictCache& cache) {
    Dag current = g;
    for (const auto& [node, role] : cert.chain) {
        if (node < 1 || node > current.m()) return false;
        const int m = current.m();
        if (role == RemovalRole::sink) {
            if (!current.children(node).empty()) return false;
            if (static_cast<int>(current.parents(node).size()) == m - 1) return false;
        } else {
            if (!current.parents(node).empty()) return false;
            if (static_cast<int>(current.children(node).size()) == m - 1) return false;
        }
        std::vector<int> keep;
        for (int v = 1; v <= m; ++v)
            if (v != node) keep.push_back(v);
        current = induced_subgraph(current, keep);
    }
    if (current.m() > 8) return false;
    if (canonical_key(current) != cert.base_graph_key) return false;
    const auto it = cache.find(cert.base_graph_key);
    if (it != cache.end() && it->second.identifiable && it->second.certified) return true;
    return sufficient_odd_cycle(current);
}

}  // namespace latentid
