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
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "latentid/errors.hpp"
#include "latentid/graph.hpp"
#include "latentid/maps.hpp"
#include "latentid/matrix.hpp"
#include "latentid/params.hpp"
#include "latentid/rng.hpp"

namespace latentid {

inline long binom2(long n) { return n * (n - 1) / 2; }

/*
 * Jacobian of the split concentration map at a parameter point.
 *
 * Rows are indexed by the upper-triangular entry pairs, arranged in three
 * blocks: D (diagonal pairs), E (edge pairs), N (non-edge pairs), each in
 * lexicographic order.  Columns come in the order diag, edge coefficients,
 * loadings, with loading columns only for nodes outside the excluded set.
 * The matrix has binom(m+1, 2) rows and 2m + |E| - |excluded| columns.
 */
struct JacobianMatrix {
    RatMatrix mat;
    int m = 0;
    std::vector<std::pair<int, int>> row_pairs;  // D then E then N
    int d_rows = 0, e_rows = 0, n_rows = 0;
    std::vector<Edge> coeff_cols;
    std::vector<int> loading_cols;  // node ids carrying a loading column

    int diag_col(int v) const { return v - 1; }
    int coeff_col(const Edge& e) const {
        const auto it = std::lower_bound(coeff_cols.begin(), coeff_cols.end(), e);
        return m + static_cast<int>(it - coeff_cols.begin());
    }
    int loading_col(int v) const {
        const auto it = std::lower_bound(loading_cols.begin(), loading_cols.end(), v);
        return m + static_cast<int>(coeff_cols.size()) + static_cast<int>(it - loading_cols.begin());
    }
    /// Rows of the N block restricted to the loading columns.
    RatMatrix n_loading_block() const {
        RatMatrix sub(n_rows, static_cast<int>(loading_cols.size()));
        const int row0 = d_rows + e_rows;
        const int col0 = m + static_cast<int>(coeff_cols.size());
        for (int i = 0; i < n_rows; ++i)
            for (int j = 0; j < sub.cols(); ++j) sub(i, j) = mat(row0 + i, col0 + j);
        return sub;
    }
};

/*
 * Entry (v, w) of the split concentration map is
 *   sum_u B[v][u] * B[w][u] * diag[u] - loading[v] * loading[w]
 * with B = I - L, so with respect to the free inputs:
 *   d/d diag[u]     =  B[v][u] * B[w][u]
 *   d/d coeff(c,d)  = -diag[d] * (B[w][d] * [v==c] + B[v][d] * [w==c])
 *   d/d loading[u]  = -(loading[w] * [v==u] + loading[v] * [w==u]),
 * which at v == w reduces to the familiar 1 / coeff^2 / 2*coeff*diag /
 * -2*loading forms.
 */
inline JacobianMatrix split_concentration_jacobian(const Dag& g, const ParamPoint& p) {
    validate_point(g, p);
    const int m = g.m();
    JacobianMatrix jac;
    jac.m = m;
    jac.coeff_cols = g.edges();
    for (int v = 1; v <= m; ++v)
        if (!std::binary_search(p.excluded.begin(), p.excluded.end(), v))
            jac.loading_cols.push_back(v);

    for (int v = 1; v <= m; ++v) jac.row_pairs.emplace_back(v, v);
    jac.d_rows = m;
    std::vector<std::pair<int, int>> e_pairs, n_pairs;
    for (int v = 1; v <= m; ++v)
        for (int w = v + 1; w <= m; ++w)
            (g.adjacent(v, w) ? e_pairs : n_pairs).emplace_back(v, w);
    jac.e_rows = static_cast<int>(e_pairs.size());
    jac.n_rows = static_cast<int>(n_pairs.size());
    jac.row_pairs.insert(jac.row_pairs.end(), e_pairs.begin(), e_pairs.end());
    jac.row_pairs.insert(jac.row_pairs.end(), n_pairs.begin(), n_pairs.end());

    const RatMatrix b = RatMatrix::identity(m) - coefficient_matrix(g, p);
    const int cols = m + static_cast<int>(jac.coeff_cols.size()) +
                     static_cast<int>(jac.loading_cols.size());
    jac.mat = RatMatrix(static_cast<int>(jac.row_pairs.size()), cols);

    for (int r = 0; r < static_cast<int>(jac.row_pairs.size()); ++r) {
        const int v = jac.row_pairs[r].first, w = jac.row_pairs[r].second;
        for (int u = 1; u <= m; ++u) {
            const Rat entry = b(v - 1, u - 1) * b(w - 1, u - 1);
            if (entry != 0) jac.mat(r, jac.diag_col(u)) = entry;
        }
        for (std::size_t i = 0; i < jac.coeff_cols.size(); ++i) {
            const int c = jac.coeff_cols[i].first, d = jac.coeff_cols[i].second;
            Rat entry(0);
            if (v == c) entry += b(w - 1, d - 1);
            if (w == c) entry += b(v - 1, d - 1);
            if (entry != 0) jac.mat(r, m + static_cast<int>(i)) = -p.diag[d - 1] * entry;
        }
        for (std::size_t i = 0; i < jac.loading_cols.size(); ++i) {
            const int u = jac.loading_cols[i];
            Rat entry(0);
            if (v == u) entry += p.loading[w - 1];
            if (w == u) entry += p.loading[v - 1];
            if (entry != 0)
                jac.mat(r, m + static_cast<int>(jac.coeff_cols.size()) + static_cast<int>(i)) =
                    -entry;
        }
    }
    return jac;
}

/// Trivial necessary condition: binom(m+1,2) - 2m >= |E|.
inline bool edge_bound_ok(const Dag& g) {
    return binom2(g.m() + 1) - 2 * g.m() >= g.edge_count();
}

enum class VerdictStatus { IdentifiableCertified, NotIdentifiableProbable, EdgeBoundViolated };

inline const char* to_string(VerdictStatus s) {
    switch (s) {
        case VerdictStatus::IdentifiableCertified: return "IdentifiableCertified";
        case VerdictStatus::NotIdentifiableProbable: return "NotIdentifiableProbable";
        case VerdictStatus::EdgeBoundViolated: return "EdgeBoundViolated";
    }
    return "?";
}

/*
 * Identifiability decision with one-sided certainty: full column rank of
 * the exact Jacobian at a single rational point is a mathematical
 * certificate (a nonzero maximal minor), while repeated deficiency is only
 * probabilistic evidence and is reported as such with the trial count.
 */
struct Verdict {
    VerdictStatus status = VerdictStatus::NotIdentifiableProbable;
    std::optional<ParamPoint> witness;
    int rank_observed = 0;
    int columns = 0;
    int trials = 0;
    std::uint64_t seed = 0;

    bool identifiable() const { return status == VerdictStatus::IdentifiableCertified; }
};

struct DecideConfig {
    std::uint64_t seed = 42;
    long bound = 1000000;
    int trials = 8;
};

inline std::uint64_t graph_stream_seed(const Dag& g, std::uint64_t root_seed) {
    if (g.m() <= 8) return derive_seed(root_seed, canonical_key(g).bits ^ (std::uint64_t{1} << 62 | g.m()));
    std::uint64_t h = 0x243F6A8885A308D3ULL ^ g.m();
    for (const Edge& e : g.edges()) h = derive_seed(h, (std::uint64_t(e.first) << 32) | std::uint64_t(e.second));
    return derive_seed(root_seed, h);
}

inline Verdict decide_identifiability(const Dag& g, std::vector<int> excluded = {},
                                      const DecideConfig& cfg = {}) {
    excluded = normalize_excluded(g, excluded);
    const int m = g.m();
    const int columns = 2 * m + g.edge_count() - static_cast<int>(excluded.size());
    Verdict verdict;
    verdict.columns = columns;
    verdict.seed = graph_stream_seed(g, cfg.seed);
    if (binom2(m + 1) < columns) {
        verdict.status = VerdictStatus::EdgeBoundViolated;
        return verdict;
    }
    if (cfg.trials < 1) throw domain_error("trial count must be at least 1");
    for (int t = 0; t < cfg.trials; ++t) {
        ParamPoint p = random_param_point(g, ParamKind::concentration,
                                          derive_seed(verdict.seed, static_cast<std::uint64_t>(t)),
                                          cfg.bound, excluded);
        const JacobianMatrix jac = split_concentration_jacobian(g, p);
        const int r = rank(jac.mat);
        verdict.rank_observed = std::max(verdict.rank_observed, r);
        verdict.trials = t + 1;
        if (r == columns) {
            verdict.status = VerdictStatus::IdentifiableCertified;
            verdict.witness = std::move(p);
            return verdict;
        }
    }
    verdict.status = VerdictStatus::NotIdentifiableProbable;
    return verdict;
}

/*
 * Generic rank of the Jacobian of the edge product map of an undirected
 * graph (coordinates x_v * x_w per edge), evaluated exactly at a random
 * nonzero rational point.  Equals m minus the number of connected
 * components without an odd cycle, generically.
 */
inline int edge_product_map_rank(const UGraph& h, std::uint64_t seed, long bound = 1000000) {
    SplitMix64 rng(seed);
    std::vector<Rat> x;
    x.reserve(h.m());
    for (int v = 1; v <= h.m(); ++v) x.push_back(Rat(static_cast<long>(rng.nonzero_in(bound))));
    RatMatrix jac(h.edge_count(), h.m());
    for (int r = 0; r < h.edge_count(); ++r) {
        const Edge& e = h.edges()[r];
        jac(r, e.first - 1) = x[e.second - 1];
        jac(r, e.second - 1) = x[e.first - 1];
    }
    return rank(std::move(jac));
}

/// Jacobian dump: row/column labels as comments, then the matrix body.
inline void write_jacobian(std::ostream& out, const JacobianMatrix& jac) {
    for (int v = 1; v <= jac.m; ++v) out << "# col diag_" << v << '\n';
    for (const Edge& e : jac.coeff_cols)
        out << "# col coeff_" << e.first << '_' << e.second << '\n';
    for (int v : jac.loading_cols) out << "# col loading_" << v << '\n';
    for (const auto& rp : jac.row_pairs) out << "# row (" << rp.first << "," << rp.second << ")\n";
    write_matrix(out, jac.mat);
}

}  // namespace latentid
