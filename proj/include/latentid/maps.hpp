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

#include <utility>
#include <vector>

#include "latentid/errors.hpp"
#include "latentid/graph.hpp"
#include "latentid/matrix.hpp"
#include "latentid/params.hpp"

namespace latentid {

/*
 * The four exact parametrization maps of the one-latent-source model,
 * plus the rational parameter recovery for the latent-free submodel.
 *
 * With L the coefficient matrix supported on the DAG's edges, Sigma is
 *   covariance_map:          (I - L^T)^-1 (D + l l^T) (I - L)^-1
 *   split_covariance_map:    (I - L^T)^-1  D          (I - L)^-1 + l l^T
 * and on the concentration side
 *   concentration_map:       (I - L) (D - l l^T) (I - L^T)
 *   split_concentration_map: (I - L)  D          (I - L^T) - l l^T
 * where D = diag(p.diag) and l = p.loading.
 */

/// m x m coefficient matrix with p.edge_coeffs at the graph's edges.
inline RatMatrix coefficient_matrix(const Dag& g, const ParamPoint& p) {
    RatMatrix lam(g.m(), g.m());
    for (std::size_t i = 0; i < p.edges.size(); ++i)
        lam(p.edges[i].first - 1, p.edges[i].second - 1) = p.edge_coeffs[i];
    return lam;
}

/*
 * (I - L)^-1 for nilpotent L, as the finite sum I + L + ... + L^(m-1).
 * Valid because L is supported on an acyclic graph; avoids a general
 * matrix inversion.
 */
inline RatMatrix nilpotent_inverse(const RatMatrix& lam) {
    if (!lam.is_square()) throw size_error("coefficient matrix must be square");
    const int m = lam.rows();
    RatMatrix acc = RatMatrix::identity(m);
    RatMatrix power = RatMatrix::identity(m);
    for (int k = 1; k < m; ++k) {
        power = power * lam;
        acc = acc + power;
    }
    return acc;
}

inline RatMatrix diag_matrix(const std::vector<Rat>& d) {
    RatMatrix m(static_cast<int>(d.size()), static_cast<int>(d.size()));
    for (std::size_t i = 0; i < d.size(); ++i) m(static_cast<int>(i), static_cast<int>(i)) = d[i];
    return m;
}

inline RatMatrix outer(const std::vector<Rat>& x) {
    const int n = static_cast<int>(x.size());
    RatMatrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = x[i] * x[j];
    return m;
}

inline RatMatrix covariance_map(const Dag& g, const ParamPoint& p) {
    validate_point(g, p);
    const RatMatrix lam = coefficient_matrix(g, p);
    const RatMatrix ninv = nilpotent_inverse(lam);  // (I - L)^-1
    return ninv.transpose() * (diag_matrix(p.diag) + outer(p.loading)) * ninv;
}

inline RatMatrix split_covariance_map(const Dag& g, const ParamPoint& p) {
    validate_point(g, p);
    const RatMatrix lam = coefficient_matrix(g, p);
    const RatMatrix ninv = nilpotent_inverse(lam);
    return ninv.transpose() * diag_matrix(p.diag) * ninv + outer(p.loading);
}

inline RatMatrix concentration_map(const Dag& g, const ParamPoint& p) {
    validate_point(g, p);
    const RatMatrix lam = coefficient_matrix(g, p);
    const RatMatrix b = RatMatrix::identity(g.m()) - lam;  // I - L
    return b * (diag_matrix(p.diag) - outer(p.loading)) * b.transpose();
}

inline RatMatrix split_concentration_map(const Dag& g, const ParamPoint& p) {
    validate_point(g, p);
    const RatMatrix lam = coefficient_matrix(g, p);
    const RatMatrix b = RatMatrix::identity(g.m()) - lam;
    return b * diag_matrix(p.diag) * b.transpose() - outer(p.loading);
}

struct RecoveredParams {
    std::vector<Rat> edge_coeffs;  // parallel to the graph's edge list
    std::vector<Rat> noise_vars;   // per node
};

/*
 * Exact recovery of (coefficients, noise variances) from the latent-free
 * covariance: per node v, solve the linear system over the parents of v
 * and take the Schur complement for the noise variance.  Round-trips the
 * split covariance map at loading 0 exactly.
 */
inline RecoveredParams recover_parameters(const Dag& g, const RatMatrix& sigma) {
    if (sigma.rows() != g.m() || sigma.cols() != g.m())
        throw size_error("covariance size does not match graph");
    RecoveredParams out;
    out.edge_coeffs.assign(g.edges().size(), Rat(0));
    out.noise_vars.assign(g.m(), Rat(0));
    for (int v = 1; v <= g.m(); ++v) {
        const std::vector<int> pa = g.parents(v);
        const int k = static_cast<int>(pa.size());
        if (k == 0) {
            out.noise_vars[v - 1] = sigma(v - 1, v - 1);
            continue;
        }
        RatMatrix spp(k, k);
        std::vector<Rat> spv(k);
        for (int i = 0; i < k; ++i) {
            for (int j = 0; j < k; ++j) spp(i, j) = sigma(pa[i] - 1, pa[j] - 1);
            spv[i] = sigma(pa[i] - 1, v - 1);
        }
        std::optional<std::vector<Rat>> coeffs = solve_unique(spp, spv);
        if (!coeffs)
            throw singular_error("singular parent submatrix at node " + std::to_string(v));
        Rat schur = sigma(v - 1, v - 1);
        for (int i = 0; i < k; ++i) schur -= spv[i] * (*coeffs)[i];
        out.noise_vars[v - 1] = schur;
        for (int i = 0; i < k; ++i) {
            const Edge e{pa[i], v};
            const auto it = std::lower_bound(g.edges().begin(), g.edges().end(), e);
            out.edge_coeffs[static_cast<std::size_t>(it - g.edges().begin())] = (*coeffs)[i];
        }
    }
    return out;
}

}  // namespace latentid
