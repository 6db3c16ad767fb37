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

#include "latentid/maps.hpp"
#include "oracles.hpp"

using namespace latentid;

namespace {

const Dag& certified5() {
    static const Dag g = make_dag(5, {{1, 3}, {1, 2}, {2, 4}, {3, 4}, {4, 5}});
    return g;
}

ParamPoint point_of(const Dag& g, ParamKind kind, std::vector<Rat> coeffs,
                    std::vector<Rat> diag, std::vector<Rat> loading) {
    ParamPoint p;
    p.kind = kind;
    p.edges = g.edges();
    p.edge_coeffs = std::move(coeffs);
    p.diag = std::move(diag);
    p.loading = std::move(loading);
    return p;
}

std::vector<Rat> ones(int n, long value = 1) { return std::vector<Rat>(n, Rat(value)); }

std::vector<Rat> mat_vec(const RatMatrix& m, const std::vector<Rat>& x) {
    std::vector<Rat> out(m.rows(), Rat(0));
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) out[i] += m(i, j) * x[j];
    return out;
}

}  // namespace

TEST_CASE("covariance map on closed-form cases") {
    const Dag empty3 = make_dag(3, {});
    const RatMatrix sigma =
        covariance_map(empty3, point_of(empty3, ParamKind::covariance, {}, ones(3), ones(3)));
    CHECK(sigma == RatMatrix{{2, 1, 1}, {1, 2, 1}, {1, 1, 2}});

    const Dag single = make_dag(2, {{1, 2}});
    const RatMatrix sigma2 = covariance_map(
        single, point_of(single, ParamKind::covariance, {rat(2)}, ones(2), ones(2, 0)));
    CHECK(sigma2 == RatMatrix{{1, 2}, {2, 5}});
}

TEST_CASE("covariance map agrees with a straight-line cofactor-inverse evaluation") {
    const ParamPoint p =
        point_of(certified5(), ParamKind::covariance, ones(5), ones(5), ones(5));
    const RatMatrix lam = coefficient_matrix(certified5(), p);
    const RatMatrix lhs = oracle::adjugate_inverse(RatMatrix::identity(5) - lam.transpose());
    const RatMatrix core = diag_matrix(p.diag) + outer(p.loading);
    const RatMatrix rhs = oracle::adjugate_inverse(RatMatrix::identity(5) - lam);
    CHECK(covariance_map(certified5(), p) == lhs * core * rhs);
}

TEST_CASE("nilpotent inverse equals the finite power sum") {
    const ParamPoint p =
        point_of(certified5(), ParamKind::covariance, ones(5), ones(5), ones(5));
    const RatMatrix lam_t = coefficient_matrix(certified5(), p).transpose();
    const RatMatrix direct = inverse(RatMatrix::identity(5) - lam_t);
    RatMatrix sum = RatMatrix::identity(5);
    RatMatrix power = RatMatrix::identity(5);
    for (int k = 1; k <= 4; ++k) {
        power = power * lam_t;
        sum = sum + power;
    }
    CHECK(direct == sum);
    CHECK(nilpotent_inverse(lam_t) == sum);
}

TEST_CASE("split covariance map") {
    const Dag empty2 = make_dag(2, {});
    CHECK(split_covariance_map(empty2,
                               point_of(empty2, ParamKind::covariance, {}, ones(2),
                                        {rat(1), rat(2)})) == RatMatrix{{2, 2}, {2, 5}});

    SplitMix64 rng(2001);
    for (int trial = 0; trial < 200; ++trial) {
        const Dag g = oracle::random_dag(rng, 3 + static_cast<int>(rng.bounded(3)));
        ParamPoint p = random_param_point(g, ParamKind::covariance, rng.next(), 50);
        ParamPoint zero_loading = p;
        zero_loading.loading.assign(g.m(), Rat(0));
        CHECK(covariance_map(g, zero_loading) == split_covariance_map(g, zero_loading));

        // the two covariance maps agree after pushing the loading through
        // the inverse transpose
        ParamPoint pushed = p;
        pushed.loading =
            mat_vec(nilpotent_inverse(coefficient_matrix(g, p)).transpose(), p.loading);
        CHECK(covariance_map(g, p) == split_covariance_map(g, pushed));
    }
}

TEST_CASE("concentration maps on closed-form cases") {
    const Dag empty2 = make_dag(2, {});
    CHECK(concentration_map(empty2, point_of(empty2, ParamKind::concentration, {}, ones(2, 4),
                                             ones(2))) == RatMatrix{{3, -1}, {-1, 3}});

    const Dag single = make_dag(2, {{1, 2}});
    CHECK(split_concentration_map(
              single, point_of(single, ParamKind::concentration, {rat(1)}, ones(2),
                               ones(2, 0))) == RatMatrix{{2, -1}, {-1, 1}});

    // loading zero and coefficients zero: both maps give the diagonal
    const Dag empty3 = make_dag(3, {});
    const ParamPoint diag_only =
        point_of(empty3, ParamKind::concentration, {}, {rat(2), rat(5), rat(7)}, ones(3, 0));
    CHECK(concentration_map(empty3, diag_only) == diag_matrix(diag_only.diag));
    CHECK(split_concentration_map(empty3, diag_only) == diag_matrix(diag_only.diag));
}

TEST_CASE("concentration map equals split map after pushing the loading") {
    SplitMix64 rng(2002);
    for (int trial = 0; trial < 200; ++trial) {
        const Dag g = oracle::random_dag(rng, 3 + static_cast<int>(rng.bounded(3)));
        const ParamPoint p = random_param_point(g, ParamKind::concentration, rng.next(), 50);
        ParamPoint pushed = p;
        const RatMatrix b = RatMatrix::identity(g.m()) - coefficient_matrix(g, p);
        pushed.loading = mat_vec(b, p.loading);
        CHECK(concentration_map(g, p) == split_concentration_map(g, pushed));
    }
}

TEST_CASE("inverse of the covariance equals the concentration map at mapped points") {
    // rational reparametrization: diag = 1, loading with 1 + |l|^2 a
    // perfect square, so the normalizing square root stays rational
    SplitMix64 rng(2003);
    for (int trial = 0; trial < 60; ++trial) {
        const int m = 3 + static_cast<int>(rng.bounded(3));
        const Dag g = oracle::random_dag(rng, m);
        ParamPoint p = random_param_point(g, ParamKind::covariance, rng.next(), 20);
        p.diag = ones(m);
        p.loading = oracle::pythagorean_loading(m);

        Rat norm2(1);
        for (const Rat& l : p.loading) norm2 += l * l;
        // norm2 is a perfect square by construction
        Rat root(0);
        {
            mpz_class r = sqrt(norm2.get_num());
            REQUIRE(r * r == norm2.get_num());
            REQUIRE(norm2.get_den() == 1);
            root = Rat(r);
        }
        ParamPoint q = p;
        q.kind = ParamKind::concentration;
        for (Rat& l : q.loading) l /= root;  // diag stays 1 = 1^-1
        CHECK(inverse(covariance_map(g, p)) == concentration_map(g, q));
    }
}

TEST_CASE("parameter recovery round trip") {
    const Dag single = make_dag(2, {{1, 2}});
    const RecoveredParams rec = recover_parameters(single, RatMatrix{{1, 2}, {2, 5}});
    CHECK(rec.edge_coeffs == std::vector<Rat>{rat(2)});
    CHECK(rec.noise_vars == std::vector<Rat>{rat(1), rat(1)});

    const Dag empty3 = make_dag(3, {});
    const RecoveredParams diag_rec =
        recover_parameters(empty3, RatMatrix{{3, 0, 0}, {0, 5, 0}, {0, 0, 7}});
    CHECK(diag_rec.noise_vars == std::vector<Rat>{rat(3), rat(5), rat(7)});

    SplitMix64 rng(2004);
    for (int trial = 0; trial < 200; ++trial) {
        const Dag g = trial < 40 ? certified5()
                                 : oracle::random_dag(rng, 3 + static_cast<int>(rng.bounded(4)));
        ParamPoint p = random_param_point(g, ParamKind::covariance, rng.next(), 1000);
        p.loading.assign(g.m(), Rat(0));
        p.excluded.clear();
        const RatMatrix sigma = covariance_map(g, p);
        const RecoveredParams rec = recover_parameters(g, sigma);
        CHECK(rec.edge_coeffs == p.edge_coeffs);
        CHECK(rec.noise_vars == p.diag);
    }
}

TEST_CASE("recovery rejects a singular parent submatrix") {
    const Dag g = make_dag(3, {{1, 3}, {2, 3}});
    RatMatrix sigma{{1, 1, 1}, {1, 1, 1}, {1, 1, 2}};  // parents block singular
    CHECK_THROWS_AS(recover_parameters(g, sigma), singular_error);
}

TEST_CASE("random parameter points") {
    const ParamPoint a = random_param_point(certified5(), ParamKind::concentration, 77, 1000000);
    const ParamPoint b = random_param_point(certified5(), ParamKind::concentration, 77, 1000000);
    CHECK(a.edge_coeffs == b.edge_coeffs);
    CHECK(a.diag == b.diag);
    CHECK(a.loading == b.loading);

    const ParamPoint all_excluded =
        random_param_point(certified5(), ParamKind::concentration, 77, 1000000, {1, 2, 3, 4, 5});
    for (const Rat& l : all_excluded.loading) CHECK(l == 0);

    for (const Rat& l : a.loading) CHECK(l != 0);
    for (const Rat& c : a.edge_coeffs) CHECK(c != 0);
    for (const Rat& d : a.diag) CHECK(sign(d) > 0);

    CHECK_THROWS_AS(random_param_point(certified5(), ParamKind::concentration, 1, 1), domain_error);
}

TEST_CASE("covariance is symmetric positive definite and even in the loading") {
    SplitMix64 rng(2005);
    for (int trial = 0; trial < 60; ++trial) {
        const Dag g = oracle::random_dag(rng, 3 + static_cast<int>(rng.bounded(3)));
        const ParamPoint p = random_param_point(g, ParamKind::covariance, rng.next(), 30);
        const RatMatrix sigma = covariance_map(g, p);
        CHECK(sigma.is_symmetric());
        CHECK(is_positive_definite(sigma));
        ParamPoint flipped = p;
        for (Rat& l : flipped.loading) l = -l;
        CHECK(covariance_map(g, flipped) == sigma);
    }
}

TEST_CASE("maps reject mismatched points") {
    const ParamPoint p = random_param_point(certified5(), ParamKind::covariance, 1, 100);
    const Dag other = make_dag(5, {{1, 2}});
    CHECK_THROWS_AS(covariance_map(other, p), size_error);
}
