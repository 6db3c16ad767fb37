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
#include <vector>

#include "latentid/errors.hpp"
#include "latentid/graph.hpp"
#include "latentid/rational.hpp"
#include "latentid/rng.hpp"

namespace latentid {

enum class ParamKind { covariance, concentration };

/*
 * A point in the parameter domain of a one-latent-source model.
 *
 * edge_coeffs is parallel to the owning Dag's sorted edge list and houses
 * the free coefficients (the support constraint).  diag holds the positive
 * per-node variances (covariance kind) or precisions (concentration kind);
 * loading holds the latent loadings, pinned to 0 on excluded nodes.
 */
struct ParamPoint {
    ParamKind kind = ParamKind::covariance;
    std::vector<Edge> edges;
    std::vector<Rat> edge_coeffs;
    std::vector<Rat> diag;
    std::vector<Rat> loading;
    std::vector<int> excluded;  // sorted, deduplicated
};

inline void validate_point(const Dag& g, const ParamPoint& p) {
    if (p.edges != g.edges())
        throw size_error("parameter point does not match the graph's edge set");
    if (p.edge_coeffs.size() != p.edges.size() ||
        static_cast<int>(p.diag.size()) != g.m() ||
        static_cast<int>(p.loading.size()) != g.m())
        throw size_error("parameter point has wrong field lengths");
    for (const Rat& d : p.diag)
        if (sign(d) <= 0) throw domain_error("diagonal parameter must be positive");
    for (int v : p.excluded) {
        if (v < 1 || v > g.m()) throw index_error("excluded node out of range");
        if (p.loading[v - 1] != 0) throw domain_error("excluded node has nonzero loading");
    }
}

inline std::vector<int> normalize_excluded(const Dag& g, std::vector<int> excluded) {
    std::sort(excluded.begin(), excluded.end());
    excluded.erase(std::unique(excluded.begin(), excluded.end()), excluded.end());
    for (int v : excluded)
        if (v < 1 || v > g.m()) throw index_error("excluded node out of range: " + std::to_string(v));
    return excluded;
}

/*
 * Deterministic generic point: integer coefficients and loadings uniform
 * on [-bound, bound] \ {0}, diagonal uniform on [1, bound].  Excluded
 * nodes draw nothing and get loading 0.
 */
inline ParamPoint random_param_point(const Dag& g, ParamKind kind, std::uint64_t seed,
                                     long bound, std::vector<int> excluded = {}) {
    if (bound < 2) throw domain_error("sampling bound must be at least 2");
    excluded = normalize_excluded(g, excluded);
    SplitMix64 rng(seed);
    ParamPoint p;
    p.kind = kind;
    p.edges = g.edges();
    p.excluded = excluded;
    p.edge_coeffs.reserve(p.edges.size());
    for (std::size_t i = 0; i < p.edges.size(); ++i)
        p.edge_coeffs.push_back(Rat(static_cast<long>(rng.nonzero_in(bound))));
    p.diag.reserve(g.m());
    for (int v = 1; v <= g.m(); ++v)
        p.diag.push_back(Rat(static_cast<long>(rng.int_in(1, bound))));
    p.loading.assign(g.m(), Rat(0));
    for (int v = 1; v <= g.m(); ++v)
        if (!std::binary_search(excluded.begin(), excluded.end(), v))
            p.loading[v - 1] = Rat(static_cast<long>(rng.nonzero_in(bound)));
    return p;
}

}  // namespace latentid
