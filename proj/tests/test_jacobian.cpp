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

#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "latentid/jacobian.hpp"
#include "oracles.hpp"

using namespace latentid;

namespace {

const Dag& certified5() {
    static const Dag g = make_dag(5, {{1, 3}, {1, 2}, {2, 4}, {3, 4}, {4, 5}});
    return g;
}

const Dag& matching4() {
    static const Dag g = make_dag(4, {{1, 2}, {3, 4}});
    return g;
}

ParamPoint concentration_point(const Dag& g, std::vector<Rat> coeffs, std::vector<Rat> diag,
                               std::vector<Rat> loading) {
    ParamPoint p;
    p.kind = ParamKind::concentration;
    p.edges = g.edges();
    p.edge_coeffs = std::move(coeffs);
    p.diag = std::move(diag);
    p.loading = std::move(loading);
    return p;
}

}  // namespace

TEST_CASE("edge bound") {
    CHECK(edge_bound_ok(matching4()));                                 // 10 - 8 = 2 >= 2
    CHECK_FALSE(edge_bound_ok(make_dag(3, {{1, 2}, {1, 3}, {2, 3}}))); // 6 - 6 = 0 < 3
    const Dag nine_edges =
        make_dag(6, {{1, 2}, {1, 3}, {1, 6}, {2, 4}, {2, 3}, {2, 6}, {3, 5}, {4, 5}, {3, 6}});
    CHECK(edge_bound_ok(nine_edges));                                  // 21 - 12 = 9 >= 9
}

TEST_CASE("jacobian blocks at closed-form points") {
    const Dag empty3 = make_dag(3, {});
    const ParamPoint p = concentration_point(empty3, {}, std::vector<Rat>(3, Rat(1)),
                                             std::vector<Rat>(3, Rat(1)));
    const JacobianMatrix jac = split_concentration_jacobian(empty3, p);
    REQUIRE(jac.mat.rows() == 6);
    REQUIRE(jac.mat.cols() == 6);
    // diagonal rows: identity in the diag block, -2 in the own loading column
    for (int v = 1; v <= 3; ++v)
        for (int u = 1; u <= 3; ++u) {
            CHECK(jac.mat(v - 1, jac.diag_col(u)) == (v == u ? 1 : 0));
            CHECK(jac.mat(v - 1, jac.loading_col(u)) == (v == u ? -2 : 0));
        }
    // non-edge row {v, w} carries -loading[w], -loading[v]
    for (int r = jac.d_rows; r < jac.mat.rows(); ++r) {
        const auto [v, w] = jac.row_pairs[r];
        CHECK(jac.mat(r, jac.loading_col(v)) == -1);
        CHECK(jac.mat(r, jac.loading_col(w)) == -1);
        CHECK(jac.mat(r, jac.diag_col(v)) == 0);
    }

    const Dag single = make_dag(2, {{1, 2}});
    const ParamPoint q = concentration_point(single, {rat(3)}, {rat(1), rat(5)},
                                             std::vector<Rat>(2, Rat(1)));
    const JacobianMatrix jac2 = split_concentration_jacobian(single, q);
    // edge row (1,2): derivative in the edge-coefficient column is -diag[2]
    CHECK(jac2.row_pairs[2] == std::pair<int, int>{1, 2});
    CHECK(jac2.mat(2, jac2.coeff_col({1, 2})) == -5);
    // diagonal row (1,1): coeff^2 against diag_2, 2*coeff*diag_2 in the coeff column
    CHECK(jac2.mat(0, jac2.diag_col(2)) == 9);
    CHECK(jac2.mat(0, jac2.coeff_col({1, 2})) == 30);
}

TEST_CASE("closed-form jacobian equals the divided-difference jacobian") {
    SplitMix64 rng(3001);
    for (int trial = 0; trial < 40; ++trial) {
        const int m = 3 + static_cast<int>(rng.bounded(3));
        const Dag g = oracle::random_dag(rng, m);
        const ParamPoint p = random_param_point(g, ParamKind::concentration, rng.next(), 1000);
        const JacobianMatrix jac = split_concentration_jacobian(g, p);
        const RatMatrix dd = oracle::divided_difference_jacobian(
            g, p, [](const Dag& gg, const ParamPoint& pp) { return split_concentration_map(gg, pp); },
            oracle::standard_row_pairs(g));
        CHECK(jac.mat == dd);
    }
}

TEST_CASE("jacobian with excluded loadings matches the oracle and drops columns") {
    SplitMix64 rng(3002);
    for (int trial = 0; trial < 20; ++trial) {
        const int m = 4 + static_cast<int>(rng.bounded(2));
        const Dag g = oracle::random_dag(rng, m);
        const std::vector<int> excluded{1 + static_cast<int>(rng.bounded(m))};
        const ParamPoint p =
            random_param_point(g, ParamKind::concentration, rng.next(), 1000, excluded);
        const JacobianMatrix jac = split_concentration_jacobian(g, p);
        CHECK(jac.mat.cols() == 2 * m + g.edge_count() - 1);
        const RatMatrix dd = oracle::divided_difference_jacobian(
            g, p, [](const Dag& gg, const ParamPoint& pp) { return split_concentration_map(gg, pp); },
            oracle::standard_row_pairs(g));
        CHECK(jac.mat == dd);
    }
}

TEST_CASE("deficient rank at the hand-picked matching-graph point") {
    const ParamPoint p = concentration_point(
        matching4(), {rat(1), rat(1)}, {rat(1), rat(2), rat(3), rat(4)},
        std::vector<Rat>(4, Rat(1)));
    const JacobianMatrix jac = split_concentration_jacobian(matching4(), p);
    REQUIRE(jac.mat.rows() == 10);
    REQUIRE(jac.mat.cols() == 10);
    const int r = rank(jac.mat);
    CHECK(r < 10);
    const RatMatrix dd = oracle::divided_difference_jacobian(
        matching4(), p,
        [](const Dag& gg, const ParamPoint& pp) { return split_concentration_map(gg, pp); },
        oracle::standard_row_pairs(matching4()));
    CHECK(r == rank(dd));
}

TEST_CASE("identifiability decisions") {
    const Verdict empty3 = decide_identifiability(make_dag(3, {}));
    CHECK(empty3.status == VerdictStatus::IdentifiableCertified);
    CHECK(empty3.columns == 6);
    CHECK(empty3.rank_observed == 6);
    REQUIRE(empty3.witness.has_value());

    const Verdict matching = decide_identifiability(matching4());
    CHECK(matching.status == VerdictStatus::NotIdentifiableProbable);
    CHECK(matching.trials == 8);
    CHECK(matching.rank_observed < matching.columns);
    CHECK_FALSE(matching.witness.has_value());

    const Verdict fig = decide_identifiability(certified5());
    CHECK(fig.status == VerdictStatus::IdentifiableCertified);
    CHECK(fig.rank_observed == 15);

    const Verdict crowded = decide_identifiability(make_dag(3, {{1, 2}, {1, 3}, {2, 3}}));
    CHECK(crowded.status == VerdictStatus::EdgeBoundViolated);
}

TEST_CASE("decisions are reproducible and seed-dependent only") {
    const Verdict a = decide_identifiability(certified5(), {}, {99, 1000, 4});
    const Verdict b = decide_identifiability(certified5(), {}, {99, 1000, 4});
    CHECK(a.status == b.status);
    REQUIRE(a.witness.has_value());
    REQUIRE(b.witness.has_value());
    CHECK(a.witness->edge_coeffs == b.witness->edge_coeffs);
    CHECK(a.seed == b.seed);
}

TEST_CASE("excluded loadings change the decision problem") {
    // loading-free model: plain DAG parameters are exactly recoverable
    const Verdict all_excluded = decide_identifiability(certified5(), {1, 2, 3, 4, 5});
    CHECK(all_excluded.status == VerdictStatus::IdentifiableCertified);
    CHECK(all_excluded.columns == 10);

    // complement of the 4-node matching restricted to a 3-node subset
    // stays bipartite, so deficiency persists
    const Verdict still_bad = decide_identifiability(matching4(), {1});
    CHECK(still_bad.status == VerdictStatus::NotIdentifiableProbable);
}

TEST_CASE("edge product map rank") {
    CHECK(edge_product_map_rank(UGraph(3, {{1, 2}, {2, 3}, {1, 3}}), 1) == 3);
    CHECK(edge_product_map_rank(UGraph(4, {{1, 2}, {2, 3}, {3, 4}, {1, 4}}), 1) == 3);
    CHECK(edge_product_map_rank(UGraph(2, {{1, 2}}), 1) == 1);
    CHECK(edge_product_map_rank(UGraph(3, {}), 1) == 0);

    SplitMix64 rng(3003);
    for (int trial = 0; trial < 100; ++trial) {
        const int m = 2 + static_cast<int>(rng.bounded(6));
        const UGraph h = oracle::random_ugraph(rng, m, 20 + static_cast<int>(rng.bounded(60)));
        const OddCycleReport rep = odd_cycle_components(h);
        CHECK(edge_product_map_rank(h, rng.next()) ==
              m - rep.components_without_odd_cycle());
    }
}

TEST_CASE("full-rank loading block forces a full-rank jacobian generically") {
    SplitMix64 rng(3004);
    int hits = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const int m = 3 + static_cast<int>(rng.bounded(3));
        const Dag g = oracle::random_dag(rng, m, 25);
        if (!edge_bound_ok(g)) continue;
        const ParamPoint p = random_param_point(g, ParamKind::concentration, rng.next(), 1000000);
        const JacobianMatrix jac = split_concentration_jacobian(g, p);
        if (rank(jac.n_loading_block()) != m) continue;
        ++hits;
        // re-randomize the loadings only
        ParamPoint q = p;
        SplitMix64 fresh(derive_seed(3004, trial));
        for (int v = 0; v < m; ++v)
            q.loading[v] = Rat(static_cast<long>(fresh.nonzero_in(1000000)));
        const JacobianMatrix jac2 = split_concentration_jacobian(g, q);
        CHECK(rank(jac2.mat) == jac2.mat.cols());
    }
    CHECK(hits > 50);  // the property must actually have been exercised
}

TEST_CASE("split covariance and split concentration jacobians have equal rank at mapped points") {
    // both maps factor through diffeomorphisms of the same parametrization,
    // so their Jacobian ranks agree at corresponding points
    SplitMix64 rng(3005);
    for (int trial = 0; trial < 30; ++trial) {
        const int m = 3 + static_cast<int>(rng.bounded(3));
        const Dag g = oracle::random_dag(rng, m);
        ParamPoint p = random_param_point(g, ParamKind::covariance, rng.next(), 20);
        p.diag.assign(m, Rat(1));
        p.loading = oracle::pythagorean_loading(m);

        // g-map: push the loading through the inverse transpose
        ParamPoint at_split = p;
        at_split.loading =
            [&] {
                const RatMatrix ninv_t = nilpotent_inverse(coefficient_matrix(g, p)).transpose();
                std::vector<Rat> out(m, Rat(0));
                for (int i = 0; i < m; ++i)
                    for (int j = 0; j < m; ++j) out[i] += ninv_t(i, j) * p.loading[j];
                return out;
            }();
        const RatMatrix cov_jac = oracle::divided_difference_jacobian(
            g, at_split,
            [](const Dag& gg, const ParamPoint& pp) { return split_covariance_map(gg, pp); },
            oracle::standard_row_pairs(g));

        // rho then h: concentration-side point with rational normalization
        Rat norm2(1);
        for (const Rat& l : p.loading) norm2 += l * l;
        const mpz_class root = sqrt(norm2.get_num());
        REQUIRE(root * root == norm2.get_num());
        ParamPoint conc = p;
        conc.kind = ParamKind::concentration;
        for (Rat& l : conc.loading) l /= Rat(root);
        ParamPoint conc_split = conc;
        conc_split.loading = [&] {
            const RatMatrix b = RatMatrix::identity(m) - coefficient_matrix(g, conc);
            std::vector<Rat> out(m, Rat(0));
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j) out[i] += b(i, j) * conc.loading[j];
            return out;
        }();
        const JacobianMatrix conc_jac = split_concentration_jacobian(g, conc_split);
        CHECK(rank(cov_jac) == rank(conc_jac.mat));
    }
}

TEST_CASE("jacobian dump round-trips through the matrix parser") {
    const ParamPoint p = random_param_point(certified5(), ParamKind::concentration, 5, 100);
    const JacobianMatrix jac = split_concentration_jacobian(certified5(), p);
    std::ostringstream out;
    write_jacobian(out, jac);
    std::istringstream in(out.str());
    CHECK(read_matrix(in) == jac.mat);
}
