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
#include <bit>
#include <cstdint>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <unordered_set>
#include <utility>
#include <vector>

#include "latentid/criteria.hpp"
#include "latentid/graph.hpp"
#include "latentid/jacobian.hpp"

namespace latentid {

/*
 * Exhaustive sweep over unlabeled DAGs under the edge bound
 * |E| <= binom(m+1,2) - 2m, classification of every representative by the
 * graphical criteria plus the Jacobian decision, and the gap analysis via
 * subgraph extension.
 */

struct RunConfig {
    std::uint64_t seed = 42;
    long bound = 1000000;
    int trials = 8;
    int workers = 0;  // 0: use available parallelism
    std::string output_dir = ".";
};

/*
 * Every DAG admits a topological labeling, so enumerating subsets of the
 * upper-triangular edge slots hits every isomorphism class; canonical keys
 * deduplicate.  Representatives are rebuilt from the keys themselves, so
 * the output is independent of the subset iteration order.  Yields one
 * representative per class, in ascending key order.
 */
inline std::vector<Dag> enumerate_unlabeled_dags(int m) {
    if (m < 3 || m > 7) throw size_error("enumeration supports 3 <= m <= 7");
    const int slots = static_cast<int>(binom2(m));
    const long max_edges = binom2(m + 1) - 2 * m;
    std::vector<Edge> slot_edges;
    for (int v = 1; v <= m; ++v)
        for (int w = v + 1; w <= m; ++w) slot_edges.emplace_back(v, w);

    std::vector<std::vector<int>> perms;
    {
        std::vector<int> perm(m);
        std::iota(perm.begin(), perm.end(), 0);
        do perms.push_back(perm);
        while (std::next_permutation(perm.begin(), perm.end()));
    }

    std::unordered_set<std::uint64_t> seen;
    for (std::uint64_t subset = 0; subset < (std::uint64_t{1} << slots); ++subset) {
        if (std::popcount(subset) > max_edges) continue;
        std::uint64_t best = ~std::uint64_t{0};
        for (const std::vector<int>& perm : perms) {
            std::uint64_t bits = 0;
            std::uint64_t rest = subset;
            while (rest) {
                const int slot = std::countr_zero(rest);
                rest &= rest - 1;
                const Edge& e = slot_edges[slot];
                bits |= std::uint64_t{1} << (perm[e.first - 1] * m + perm[e.second - 1]);
            }
            if (bits < best) best = bits;
        }
        seen.insert(best);
    }

    std::vector<std::uint64_t> keys(seen.begin(), seen.end());
    std::sort(keys.begin(), keys.end());
    std::vector<Dag> out;
    out.reserve(keys.size());
    for (std::uint64_t bits : keys)
        out.push_back(dag_from_key(CanonicalKey{static_cast<std::uint8_t>(m), bits}));
    return out;
}

struct ClassificationRow {
    CanonicalKey key;
    int m = 0;
    int edge_count = 0;
    bool suff = false;
    bool wermuth = false;
    NecessaryReport nec;
    VerdictStatus jacobian = VerdictStatus::NotIdentifiableProbable;
    int jacobian_trials = 0;
    bool extension_certified = false;
};

struct Table1Report {
    int m = 0;
    int total = 0;
    int jacobian_identifiable = 0;
    int suff_thm = 0;
    int wermuth = 0;
    int nec_violated = 0;
    int jacobian_nonidentifiable = 0;
    int gap = 0;                       // identifiable minus sufficient-condition-certified
    int extension_certified_in_gap = 0;
    // gap graphs certified after also closing over the Markov equivalence
    // class (identifiability is a class property, so a certificate for any
    // reorientation transfers)
    int markov_extension_certified_in_gap = 0;
    std::vector<CanonicalKey> probable_only;  // deficient yet passing the necessary condition
    std::vector<CanonicalKey> extension_markov_only;  // closure-certified, not directly
    std::vector<CanonicalKey> extension_disagreements;  // extension fired on a non-identifiable graph
};

struct ClassifyResult {
    Table1Report report;
    std::vector<ClassificationRow> rows;
    std::vector<Dag> graphs;
};

/// Cache of verdicts keyed by canonical form, as consumed by the
/// extension certifier and the `extend` CLI subcommand.
inline VerdictCache build_cache(const ClassifyResult& result, bool identifiable_not_suff_only) {
    VerdictCache cache;
    for (const ClassificationRow& row : result.rows) {
        CacheEntry entry;
        entry.identifiable = row.jacobian == VerdictStatus::IdentifiableCertified;
        entry.certified = entry.identifiable;  // deficiency is never certificate-grade
        entry.suff = row.suff;
        entry.provenance = row.suff ? "criteria" : "jacobian";
        if (identifiable_not_suff_only && !(entry.identifiable && !row.suff)) continue;
        cache.emplace(row.key, entry);
    }
    return cache;
}

struct GapResult {
    int gap_size = 0;
    int extension_certified = 0;
    int markov_extension_certified = 0;
    std::vector<CanonicalKey> markov_only;
    std::vector<CanonicalKey> disagreements;
};

/*
 * Gap analysis: graphs certified by the Jacobian but missed by the
 * sufficient condition, re-certified through sink/source removal against
 * the lower cache (the identifiable-but-not-sufficient graphs one node
 * down).  A second pass additionally searches the graph's whole Markov
 * equivalence class, since identifiability transfers across the class;
 * graphs certified only that way are listed separately.  Extension is
 * also attempted on every non-identifiable graph; a hit there contradicts
 * the Jacobian evidence and is surfaced instead of trusted.
 */
inline GapResult gap_analysis(const std::vector<ClassificationRow>& rows,
                              const std::vector<Dag>& graphs, const VerdictCache& cache_lower,
                              std::vector<ClassificationRow>* rows_out = nullptr) {
    if (rows.size() != graphs.size()) throw size_error("rows/graphs mismatch");
    GapResult out;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const ClassificationRow& row = rows[i];
        const bool identifiable = row.jacobian == VerdictStatus::IdentifiableCertified;
        if (identifiable && !row.suff) {
            ++out.gap_size;
            const std::optional<ExtensionCertificate> cert =
                subgraph_extension(graphs[i], cache_lower);
            if (cert) {
                ++out.extension_certified;
                ++out.markov_extension_certified;
                if (rows_out) (*rows_out)[i].extension_certified = true;
                continue;
            }
            for (const Dag& sibling : markov_equivalence_class(graphs[i])) {
                if (subgraph_extension(sibling, cache_lower)) {
                    ++out.markov_extension_certified;
                    out.markov_only.push_back(row.key);
                    break;
                }
            }
        } else if (!identifiable) {
            if (subgraph_extension(graphs[i], cache_lower)) out.disagreements.push_back(row.key);
        }
    }
    return out;
}

namespace detail {

inline ClassificationRow classify_one(const Dag& g, const RunConfig& cfg) {
    ClassificationRow row;
    row.key = canonical_key(g);
    row.m = g.m();
    row.edge_count = g.edge_count();
    row.suff = sufficient_odd_cycle(g);
    row.wermuth = wermuth_condition(g);
    row.nec = necessary_condition(g);
    const Verdict verdict =
        decide_identifiability(g, {}, DecideConfig{cfg.seed, cfg.bound, cfg.trials});
    row.jacobian = verdict.status;
    row.jacobian_trials = verdict.trials;

    const bool identifiable = verdict.status == VerdictStatus::IdentifiableCertified;
    if (row.suff && !identifiable)
        throw consistency_error("sufficient condition holds but Jacobian deficient: " +
                                row.key.hex());
    if (row.wermuth && !row.suff)
        throw consistency_error("Wermuth condition holds but odd-cycle condition fails: " +
                                row.key.hex());
    if (!row.nec.holds && identifiable)
        throw consistency_error("necessary condition fails but Jacobian certified: " +
                                row.key.hex());
    return row;
}

}  // namespace detail

/*
 * Classifies every enumerated graph.  Embarrassingly parallel over graphs;
 * verdicts depend only on (seed, canonical key), so worker count never
 * changes the output.  When `lower` is absent the m-1 sweep needed by the
 * gap analysis is computed internally (cheap next to the m sweep).
 */
inline ClassifyResult classify_all(int m, const RunConfig& cfg = {},
                                   const ClassifyResult* lower = nullptr) {
    if (m < 3 || m > 6) throw size_error("classification supports 3 <= m <= 6");
    ClassifyResult result;
    result.graphs = enumerate_unlabeled_dags(m);
    const std::size_t n = result.graphs.size();
    result.rows.resize(n);

    int workers = cfg.workers > 0 ? cfg.workers
                                  : static_cast<int>(std::thread::hardware_concurrency());
    if (workers < 1) workers = 1;
    workers = std::min<int>(workers, static_cast<int>(n) > 0 ? static_cast<int>(n) : 1);
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i)
            result.rows[i] = detail::classify_one(result.graphs[i], cfg);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(workers);
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t i = w; i < n; i += workers)
                        result.rows[i] = detail::classify_one(result.graphs[i], cfg);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (std::thread& t : pool) t.join();
        for (const std::exception_ptr& e : errors)
            if (e) std::rethrow_exception(e);
    }

    Table1Report& rep = result.report;
    rep.m = m;
    rep.total = static_cast<int>(n);
    for (const ClassificationRow& row : result.rows) {
        const bool identifiable = row.jacobian == VerdictStatus::IdentifiableCertified;
        rep.jacobian_identifiable += identifiable;
        rep.jacobian_nonidentifiable += !identifiable;
        rep.suff_thm += row.suff;
        rep.wermuth += row.wermuth;
        rep.nec_violated += !row.nec.holds;
        if (!identifiable && row.nec.holds) rep.probable_only.push_back(row.key);
    }
    rep.gap = rep.jacobian_identifiable - rep.suff_thm;

    ClassifyResult lower_local;
    if (!lower && m > 3) {
        lower_local = classify_all(m - 1, cfg);
        lower = &lower_local;
    }
    VerdictCache cache_lower;
    if (lower) cache_lower = build_cache(*lower, /*identifiable_not_suff_only=*/true);
    const GapResult gap = gap_analysis(result.rows, result.graphs, cache_lower, &result.rows);
    rep.extension_certified_in_gap = gap.extension_certified;
    rep.markov_extension_certified_in_gap = gap.markov_extension_certified;
    rep.extension_markov_only = gap.markov_only;
    rep.extension_disagreements = gap.disagreements;
    return result;
}

inline std::string summary_line(const Table1Report& rep) {
    std::string s;
    s += "total=" + std::to_string(rep.total);
    s += " identifiable=" + std::to_string(rep.jacobian_identifiable);
    s += " suff=" + std::to_string(rep.suff_thm);
    s += " wermuth=" + std::to_string(rep.wermuth);
    s += " nec_violated=" + std::to_string(rep.nec_violated);
    s += " nonidentifiable=" + std::to_string(rep.jacobian_nonidentifiable);
    s += " gap=" + std::to_string(rep.gap);
    s += " extension_certified=" + std::to_string(rep.extension_certified_in_gap);
    s += " extension_markov=" + std::to_string(rep.markov_extension_certified_in_gap);
    return s;
}

inline void write_rows_csv(std::ostream& out, const std::vector<ClassificationRow>& rows) {
    out << "key,m,edges,suff,wermuth,nec,jacobian,extension\n";
    for (const ClassificationRow& row : rows) {
        out << row.key.hex() << ',' << row.m << ',' << row.edge_count << ',' << (row.suff ? 1 : 0)
            << ',' << (row.wermuth ? 1 : 0) << ',' << (row.nec.holds ? 1 : 0) << ','
            << to_string(row.jacobian) << ',' << (row.extension_certified ? 1 : 0) << '\n';
    }
}

}  // namespace latentid
