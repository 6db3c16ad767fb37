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

#include <optional>
#include <utility>
#include <vector>

#include "latentid/errors.hpp"
#include "latentid/graph.hpp"
#include "latentid/maps.hpp"
#include "latentid/matrix.hpp"
#include "latentid/rational.hpp"

namespace latentid {

/*
 * Tetrads and the Spearman / coSpearman membership tests.
 *
 * A tetrad of a symmetric matrix U is a 2x2 minor using only off-diagonal
 * entries; all tetrads vanish exactly on matrices whose off-diagonal part
 * has rank one.  Per quadruple i<j<k<l the three tetrads are dependent, so
 * a fixed basis of two is stored:
 *   (U_ij U_kl - U_ik U_jl,  U_il U_jk - U_ik U_jl)
 * in lexicographic quadruple order, 2 * binom(m,4) values in total.
 */
struct TetradVector {
    int m = 0;
    std::vector<Rat> values;

    bool all_zero() const {
        for (const Rat& v : values)
            if (v != 0) return false;
        return true;
    }
};

inline void for_each_quadruple(int m, const auto& fn) {
    for (int i = 1; i <= m; ++i)
        for (int j = i + 1; j <= m; ++j)
            for (int k = j + 1; k <= m; ++k)
                for (int l = k + 1; l <= m; ++l) fn(i, j, k, l);
}

inline TetradVector tetrads(const RatMatrix& u) {
    if (!u.is_symmetric()) throw shape_error("tetrads need a symmetric matrix");
    const int m = u.rows();
    if (m < 4) throw size_error("tetrads need at least 4 nodes");
    TetradVector t;
    t.m = m;
    for_each_quadruple(m, [&](int i, int j, int k, int l) {
        const Rat cross = u(i - 1, k - 1) * u(j - 1, l - 1);
        t.values.push_back(u(i - 1, j - 1) * u(k - 1, l - 1) - cross);
        t.values.push_back(u(i - 1, l - 1) * u(j - 1, k - 1) - cross);
    });
    return t;
}

namespace detail {

/*
 * Sign normalization: node signs s with s_v * s_w * U_vw of the target
 * sign for every off-diagonal entry.  All off-diagonals must be nonzero
 * (a zero blocks normalization).  Seeded from node 1, then verified
 * globally; returns nullopt on any inconsistency.
 */
inline std::optional<std::vector<int>> sign_normalize(const RatMatrix& u, int target) {
    const int m = u.rows();
    std::vector<int> s(m, 1);
    for (int j = 1; j < m; ++j) {
        const int sg = sign(u(0, j));
        if (sg == 0) return std::nullopt;
        s[j] = sg * target;
    }
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
            const int sg = sign(u(i, j));
            if (sg == 0 || sg * s[i] * s[j] != target) return std::nullopt;
        }
    return s;
}

inline RatMatrix apply_signs(const RatMatrix& u, const std::vector<int>& s) {
    RatMatrix out = u;
    for (int i = 0; i < u.rows(); ++i)
        for (int j = 0; j < u.cols(); ++j)
            if (s[i] * s[j] < 0) out(i, j) = -out(i, j);
    return out;
}

/// U_ii U_jk - U_ik U_ij compared against `cmp` for all distinct triples.
inline bool triple_minors_have_sign(const RatMatrix& u, int cmp) {
    const int m = u.rows();
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = j + 1; k < m; ++k) {
                if (j == i || k == i) continue;
                const Rat val = u(i, i) * u(j, k) - u(i, k) * u(i, j);
                if (sign(val) != cmp) return false;
            }
    return true;
}

/// Direct 3x3 decomposition test; sgn = +1 for Spearman, -1 for coSpearman.
inline bool decomposes_3x3(const RatMatrix& u, int sgn) {
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            if (u(i, j) == 0) return false;
    const Rat prod = u(0, 1) * u(0, 2) * u(1, 2);
    if (sign(prod) != sgn) return false;  // loading_sq entries must be positive
    for (int i = 0; i < 3; ++i) {
        const int j = i == 0 ? 1 : 0;
        const int k = i == 2 ? 1 : 2;
        const Rat lsq = Rat(sgn) * u(i, j) * u(i, k) / u(j, k);
        const Rat diag_part = u(i, i) - Rat(sgn) * lsq;
        if (sign(diag_part) <= 0) return false;
    }
    return true;
}

}  // namespace detail

inline void check_membership_input(const RatMatrix& u) {
    if (!u.is_symmetric()) throw shape_error("membership test needs a symmetric matrix");
    if (u.rows() < 3) throw size_error("membership test needs at least 3 nodes");
}

/*
 * Spearman matrix: positive diagonal plus a rank-one d d^T with d free of
 * zeros.  For m >= 4 decided by sign normalization, vanishing tetrads and
 * strictly positive triple minors; m = 3 falls back to the direct
 * decomposition test (the tetrad characterization starts at m = 4).
 */
inline bool is_spearman(const RatMatrix& u) {
    check_membership_input(u);
    if (u.rows() == 3) return detail::decomposes_3x3(u, +1);
    if (!is_positive_definite(u)) return false;
    const std::optional<std::vector<int>> signs = detail::sign_normalize(u, +1);
    if (!signs) return false;
    const RatMatrix norm = detail::apply_signs(u, *signs);
    if (!tetrads(norm).all_zero()) return false;
    return detail::triple_minors_have_sign(norm, +1);
}

/// Mirror of is_spearman for positive diagonal minus a rank-one part.
/// Positive definiteness is required (the membership test is scoped to
/// covariance/concentration matrices, which are PD by construction).
inline bool is_cospearman(const RatMatrix& u) {
    check_membership_input(u);
    if (!is_positive_definite(u)) return false;
    if (u.rows() == 3) return detail::decomposes_3x3(u, -1);
    const std::optional<std::vector<int>> signs = detail::sign_normalize(u, -1);
    if (!signs) return false;
    const RatMatrix norm = detail::apply_signs(u, *signs);
    if (!tetrads(norm).all_zero()) return false;
    return detail::triple_minors_have_sign(norm, -1);
}

/*
 * Decomposition into the diagonal component and the squared loadings.
 * Loadings themselves need a square root, so only their squares are
 * returned, together with one representative sign pattern; callers verify
 * reconstruction through U_ij^2 = loading_sq_i * loading_sq_j.
 */
struct SpearmanDecomposition {
    std::vector<Rat> diag_part;
    std::vector<Rat> loading_sq;
    std::vector<int> loading_signs;
};

namespace detail {

inline SpearmanDecomposition decompose(const RatMatrix& u, int sgn) {
    const int m = u.rows();
    const std::optional<std::vector<int>> signs = sign_normalize(u, sgn);
    if (!signs) throw domain_error("matrix does not sign-normalize");
    const RatMatrix norm = apply_signs(u, *signs);
    SpearmanDecomposition dec;
    dec.loading_signs = *signs;
    for (int i = 0; i < m; ++i) {
        // any admissible pair j, k agrees once the tetrads vanish
        const int j = i == 0 ? 1 : 0;
        const int k = i == m - 1 ? m - 2 : m - 1;
        const Rat lsq = Rat(sgn) * norm(i, j) * norm(i, k) / norm(j, k);
        dec.loading_sq.push_back(lsq);
        dec.diag_part.push_back(u(i, i) - Rat(sgn) * lsq);
    }
    return dec;
}

}  // namespace detail

inline SpearmanDecomposition spearman_decompose(const RatMatrix& u) {
    if (!is_spearman(u)) throw domain_error("not a Spearman matrix");
    return detail::decompose(u, +1);
}

inline SpearmanDecomposition cospearman_decompose(const RatMatrix& u) {
    if (!is_cospearman(u)) throw domain_error("not a coSpearman matrix");
    return detail::decompose(u, -1);
}

/*
 * Linear tetrad systems for the two star shapes.
 *
 * sink mode: every edge points into node m.  The tetrads of
 * (I - L^T) * base * (I - L), restricted to quadruples containing m, are
 * affine in the coefficients into m and assemble into C x = c with C of
 * size 2*binom(m-1,3) x |pa(m)|.  source mode mirrors this with edges out
 * of node 1 and (I - L)^-1 * base * (I - L^T)^-1 on a concentration base.
 * Solving the system at a base generated from known coefficients must
 * reproduce them exactly.
 */
enum class StarMode { sink, source };

struct TetradSystem {
    RatMatrix coeff;        // C
    std::vector<Rat> rhs;   // c; at zero coefficients this is the tetrad vector itself
    std::vector<int> vars;  // parent (sink) or child (source) node per column
};

namespace detail {

inline std::vector<Rat> star_tetrads(const Dag& g, StarMode mode, const RatMatrix& base,
                                     const std::vector<Rat>& coeffs,
                                     const std::vector<int>& vars) {
    const int m = g.m();
    RatMatrix lam(m, m);
    for (std::size_t i = 0; i < vars.size(); ++i) {
        if (mode == StarMode::sink) lam(vars[i] - 1, m - 1) = coeffs[i];
        else lam(0, vars[i] - 1) = coeffs[i];
    }
    RatMatrix s(m, m);
    if (mode == StarMode::sink) {
        const RatMatrix b = RatMatrix::identity(m) - lam;  // I - L
        s = b.transpose() * base * b;
    } else {
        const RatMatrix ninv = nilpotent_inverse(lam);  // (I - L)^-1
        s = ninv * base * ninv.transpose();
    }
    const int special = mode == StarMode::sink ? m : 1;
    std::vector<Rat> out;
    for_each_quadruple(m, [&](int i, int j, int k, int l) {
        if (i != special && j != special && k != special && l != special) return;
        const Rat cross = s(i - 1, k - 1) * s(j - 1, l - 1);
        out.push_back(s(i - 1, j - 1) * s(k - 1, l - 1) - cross);
        out.push_back(s(i - 1, l - 1) * s(j - 1, k - 1) - cross);
    });
    return out;
}

}  // namespace detail

inline TetradSystem tetrad_linear_system(const Dag& g, StarMode mode, const RatMatrix& base) {
    const int m = g.m();
    if (m < 4) throw size_error("tetrad system needs at least 4 nodes");
    if (base.rows() != m || base.cols() != m || !base.is_symmetric())
        throw shape_error("base matrix must be symmetric of matching size");
    for (const Edge& e : g.edges()) {
        if (mode == StarMode::sink && e.second != m)
            throw shape_error("sink mode requires all edges to point into the last node");
        if (mode == StarMode::source && e.first != 1)
            throw shape_error("source mode requires all edges to leave node 1");
    }
    TetradSystem sys;
    sys.vars = mode == StarMode::sink ? g.parents(m) : g.children(1);
    const int n = static_cast<int>(sys.vars.size());
    std::vector<Rat> zero(n, Rat(0));
    const std::vector<Rat> at_zero = detail::star_tetrads(g, mode, base, zero, sys.vars);
    const int rows = static_cast<int>(at_zero.size());
    sys.coeff = RatMatrix(rows, n);
    sys.rhs = at_zero;
    for (int p = 0; p < n; ++p) {
        std::vector<Rat> unit(n, Rat(0));
        unit[p] = 1;
        const std::vector<Rat> shifted = detail::star_tetrads(g, mode, base, unit, sys.vars);
        for (int r = 0; r < rows; ++r) sys.coeff(r, p) = at_zero[r] - shifted[r];
    }
    return sys;
}

}  // namespace latentid
