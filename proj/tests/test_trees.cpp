#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "vmcoal/rng.hpp"
#include "vmcoal/trees.hpp"

using namespace vmcoal;

namespace {

WeightMatrix unit1() { return WeightMatrix(Matrix::Constant(1, 1, 1.0)); }

WeightMatrix bip2() {
    Matrix m(2, 2);
    m << 0, 1, 1, 0;
    return WeightMatrix(m);
}

Composition comp(std::vector<int> parts) { return Composition(std::move(parts)); }

}  // namespace

TEST_CASE("single-type counts match Cayley's formula") {
    // n labeled vertices, all edges weight 1: n^(n-2) spanning trees.
    CHECK(enumerator_cofactor(unit1(), comp({3})).value == doctest::Approx(3.0));
    CHECK(enumerator_rank_one(unit1(), comp({4})).value == doctest::Approx(16.0));
    CHECK(enumerator_closed(unit1(), comp({5})).value == doctest::Approx(125.0));
    CHECK(enumerator_brute_force(unit1(), comp({6})).value == doctest::Approx(1296.0));
}

TEST_CASE("singleton clusters have exactly one tree") {
    CHECK(enumerator_cofactor(unit1(), comp({1})).value == doctest::Approx(1.0));
    CHECK(enumerator_closed(bip2(), comp({0, 1})).value == doctest::Approx(1.0));
    CHECK(enumerator_brute_force(bip2(), comp({1, 0})).value == doctest::Approx(1.0));
}

TEST_CASE("bipartite counts match the two-sided formula") {
    // Complete bipartite K_{a,b}: a^(b-1) b^(a-1) spanning trees.
    CHECK(enumerator_cofactor(bip2(), comp({2, 2})).value == doctest::Approx(4.0));
    CHECK(enumerator_closed(bip2(), comp({3, 2})).value ==
          doctest::Approx(std::pow(3.0, 1) * std::pow(2.0, 2)).epsilon(1e-9));
    CHECK(enumerator_brute_force(bip2(), comp({4, 3})).value ==
          doctest::Approx(std::pow(4.0, 2) * std::pow(3.0, 3)).epsilon(1e-9));
}

TEST_CASE("disconnected cluster graphs report exactly zero") {
    // Two same-side vertices of a bipartite weight matrix cannot join.
    const Composition x = comp({2, 0});
    CHECK_FALSE(cluster_graph_connected(bip2(), x));
    CHECK(enumerator_cofactor(bip2(), x).value_log == -std::numeric_limits<double>::infinity());
    CHECK(enumerator_rank_one(bip2(), x).value == 0.0);
    CHECK(enumerator_closed(bip2(), x).value == 0.0);
    CHECK(enumerator_brute_force(bip2(), x).value == 0.0);
    CHECK(tree_count_exact(bip2(), x) == 0);
}

TEST_CASE("laplacian rows sum to zero and carry the right weights") {
    Matrix m(2, 2);
    m << 0.5, 2.0, 2.0, 0.25;
    const WeightMatrix v(m);
    const Matrix lap = weighted_laplacian(v, comp({2, 1}));
    REQUIRE(lap.rows() == 3);
    for (int r = 0; r < 3; ++r) CHECK(lap.row(r).sum() == doctest::Approx(0.0).epsilon(1e-15));
    // Vertices 0,1 are type 0; vertex 2 is type 1.
    CHECK(lap(0, 1) == doctest::Approx(-0.5));
    CHECK(lap(0, 2) == doctest::Approx(-2.0));
    CHECK(lap(0, 0) == doctest::Approx(2.5));
    CHECK(lap(2, 2) == doctest::Approx(4.0));
}

TEST_CASE("cofactor value is independent of the struck row and column") {
    Matrix m(2, 2);
    m << 0.3, 1.7, 1.7, 0.9;
    const WeightMatrix v(m);
    const Composition x = comp({3, 2});
    const double base = enumerator_cofactor(v, x, 0, 0).value_log;
    for (int r = 0; r < 5; ++r)
        for (int c = 0; c < 5; ++c)
            CHECK(enumerator_cofactor(v, x, r, c).value_log == doctest::Approx(base).epsilon(1e-10));
}

TEST_CASE("all four methods agree on a random real-weighted case") {
    Rng rng(20240817);
    Matrix m(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) {
            const double w = (i == j) ? 0.5 * rng.uniform() : 0.3 + rng.uniform();
            m(i, j) = m(j, i) = w;
        }
    const WeightMatrix v(m);
    const Composition x = comp({3, 2, 2});
    const double ref = enumerator_cofactor(v, x).value_log;
    CHECK(enumerator_rank_one(v, x).value_log == doctest::Approx(ref).epsilon(1e-10));
    CHECK(enumerator_closed(v, x).value_log == doctest::Approx(ref).epsilon(1e-10));
    CHECK(enumerator_brute_force(v, x).value_log == doctest::Approx(ref).epsilon(1e-10));
}

TEST_CASE("rank-one deflation rejects perturbations with zero entry sum") {
    const Composition x = comp({3});
    Vector a(1), b(1);
    a << 0.0;
    b << 1.0;
    CHECK_THROWS_AS(enumerator_rank_one(unit1(), x, a, b), validation_error);
}

TEST_CASE("brute force refuses more than nine vertices") {
    CHECK_THROWS_AS(enumerator_brute_force(unit1(), comp({10})), validation_error);
    CHECK_THROWS_AS(tree_count_brute_exact(unit1(), comp({10})), validation_error);
}

TEST_CASE("exact integer paths agree with each other and with the doubles") {
    Matrix m(2, 2);
    m << 1, 3, 3, 2;
    const WeightMatrix v(m);
    REQUIRE(v.integer_valued());
    for (const auto& x : graded_compositions(2, 7)) {
        const int128 a = tree_count_exact(v, x);
        const int128 b = tree_count_brute_exact(v, x);
        CHECK(to_string(a) == to_string(b));
        const double d = enumerator_cofactor(v, x).value;
        CHECK(d == doctest::Approx(static_cast<double>(a)).epsilon(1e-9));
    }
}

TEST_CASE("int128 decimal rendering") {
    CHECK(to_string(int128(0)) == "0");
    CHECK(to_string(int128(-17)) == "-17");
    int128 big = 1;
    for (int i = 0; i < 21; ++i) big *= 10;
    CHECK(to_string(big) == "1000000000000000000000");
}

TEST_CASE("contracted polynomial restricts to the support") {
    // partition_tau ignores zero parts entirely; a lone populated type gives 1.
    CHECK(partition_tau(bip2(), comp({0, 3})) == doctest::Approx(1.0));
    // Two-type support: single contracted edge of weight x1 x2 v12 = 2.
    CHECK(partition_tau(bip2(), comp({2, 1})) == doctest::Approx(2.0));
    CHECK(partition_tau_log(bip2(), comp({2, 1})) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("scaled coefficients divide out the multinomial factor") {
    // S_x = T_x / x!; for a single type of four, T = 16 and 4! = 24.
    CHECK(std::exp(s_coefficient_log(unit1(), comp({4}))) == doctest::Approx(16.0 / 24.0).epsilon(1e-12));
    CHECK(std::exp(s_coefficient_log(bip2(), comp({2, 2}))) == doctest::Approx(4.0 / 4.0).epsilon(1e-12));
}

TEST_CASE("tree totals satisfy the pairwise merge recursion") {
    // 2 (n_x - 1) T_x = sum over ordered splits of binom(x; y) <y|V|z> T_y T_z.
    Matrix m(3, 3);
    m << 0, 1, 1, 1, 0, 1, 1, 1, 0;
    const WeightMatrix v(m);
    const Composition x = comp({2, 1, 1});
    const double tx = enumerator_cofactor(v, x).value;
    CHECK(tx == doctest::Approx(8.0));

    double sum = 0.0;
    for (const auto& [y, z] : ordered_splits(x)) {
        const double ty = enumerator_cofactor(v, y).value;
        const double tz = enumerator_cofactor(v, z).value;
        const double coeff = std::exp(log_factorial(x) - log_factorial(y) - log_factorial(z));
        sum += coeff * bilinear(v.mat(), y, z) * ty * tz;
    }
    CHECK(sum == doctest::Approx(2.0 * (x.total() - 1) * tx).epsilon(1e-12));
}

TEST_CASE("closed form handles totals far beyond double range") {
    // Single type, n = 200: log count = 198 log 200, value overflows a double.
    const TreeEnumeratorReport rep = enumerator_closed(unit1(), comp({200}));
    CHECK(rep.value_log == doctest::Approx(198.0 * std::log(200.0)).epsilon(1e-12));
}
