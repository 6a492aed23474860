#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>

#include "vmcoal/linalg.hpp"
#include "vmcoal/rng.hpp"

using namespace vmcoal;

namespace {

Matrix mat2(double a, double b, double c, double d) {
    Matrix m(2, 2);
    m << a, b, c, d;
    return m;
}

}  // namespace

TEST_CASE("spectral radius of a 2x2 cross matrix is sqrt(bc)") {
    CHECK(spectral_radius(mat2(0, 2, 3, 0)) == doctest::Approx(std::sqrt(6.0)).epsilon(1e-12));
}

TEST_CASE("spectral radius handles diagonal and zero matrices") {
    CHECK(spectral_radius(Matrix::Zero(3, 3)) == doctest::Approx(0.0));
    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = 0.25;
    d(1, 1) = 4.0;
    CHECK(spectral_radius(d) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("power iteration survives period-two structure") {
    // Bipartite-type matrices make unshifted iteration oscillate.
    CHECK(spectral_radius(mat2(0, 1, 1, 0)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("perron vector of the 2x2 cross matrix") {
    const Vector v = perron_vector(mat2(0, 2, 3, 0));
    CHECK(v[1] == doctest::Approx(1.0));
    CHECK(v[0] == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-10));
}

TEST_CASE("perron vector requires two-way reachability") {
    CHECK_THROWS_AS(perron_vector(mat2(0, 1, 0, 0)), validation_error);
}

TEST_CASE("weight matrix validation") {
    CHECK_THROWS_AS(WeightMatrix(mat2(0, 1, 2, 0)), validation_error);  // asymmetric
    CHECK_THROWS_AS(WeightMatrix(mat2(0, -1, -1, 0)), validation_error);
    CHECK_THROWS_AS(WeightMatrix(mat2(1, 0, 0, 1)), validation_error);  // split support
    Matrix bad = mat2(0, 1, 1, 0);
    bad(0, 0) = std::nan("");
    CHECK_THROWS_AS(WeightMatrix{bad}, validation_error);
    CHECK_THROWS_AS(WeightMatrix(Matrix::Zero(2, 3)), validation_error);

    const WeightMatrix ok(mat2(0.5, 1, 1, 0));
    CHECK(ok.dim() == 2);
    CHECK(!ok.integer_valued());
    CHECK(WeightMatrix(mat2(0, 2, 2, 1)).integer_valued());
}

TEST_CASE("scaled spectral radius matches the similarity transform") {
    const WeightMatrix v(mat2(0, 1, 1, 0));
    Vector z(2);
    z << 4.0, 1.0;
    CHECK(spectral_radius(v, z) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("region classification bands") {
    const WeightMatrix v(Matrix::Constant(1, 1, 1.0));
    Vector z(1);
    z << 0.5;
    CHECK(classify_region(v, z) == Region::Interior);
    z << 1.0;
    CHECK(classify_region(v, z) == Region::Boundary);
    z << 1.0 + 5e-10;
    CHECK(classify_region(v, z) == Region::Boundary);
    z << 2.0;
    CHECK(classify_region(v, z) == Region::Exterior);
}

TEST_CASE("mass vector validation") {
    Vector z(2);
    z << 1.0, 0.0;
    CHECK_THROWS_AS(require_mass_vector(z, 2, "test"), validation_error);
    z << 1.0, 2.0;
    CHECK_THROWS_AS(require_mass_vector(z, 3, "test"), validation_error);
    CHECK_NOTHROW(require_mass_vector(z, 2, "test"));
}

TEST_CASE("diagonal scaling on either side") {
    Vector x(2);
    x << 1.0, 2.0;
    const Matrix m = mat2(1, 2, 3, 4);
    const Matrix left = diag_scale(x, m, Side::Left);
    CHECK(left(1, 0) == doctest::Approx(6.0));
    CHECK(left(0, 1) == doctest::Approx(2.0));
    const Matrix right = diag_scale(x, m, Side::Right);
    CHECK(right(0, 1) == doctest::Approx(4.0));
    CHECK(right(1, 0) == doctest::Approx(3.0));
}

TEST_CASE("rng streams are deterministic and distinct") {
    Rng a = Rng::stream(42, 0);
    Rng b = Rng::stream(42, 0);
    Rng c = Rng::stream(42, 1);
    bool same = true, distinct = false;
    for (int i = 0; i < 100; ++i) {
        const std::uint64_t x = a.next();
        same = same && (x == b.next());
        distinct = distinct || (x != c.next());
    }
    CHECK(same);
    CHECK(distinct);
}

TEST_CASE("uniform draws live in [0,1) and below() respects its bound") {
    Rng r(7);
    double lo = 1.0, hi = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double u = r.uniform();
        lo = std::min(lo, u);
        hi = std::max(hi, u);
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        const std::uint64_t n = r.below(13);
        CHECK(n < 13);
    }
    CHECK(lo < 0.01);
    CHECK(hi > 0.99);
}

TEST_CASE("exponential draws have roughly the right mean") {
    Rng r(11);
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) sum += r.exponential(2.0);
    CHECK(sum / n == doctest::Approx(0.5).epsilon(0.02));
}
