#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <vector>

#include "vmcoal/kinetics.hpp"

using namespace vmcoal;

namespace {

WeightMatrix unit1() { return WeightMatrix(Matrix::Constant(1, 1, 1.0)); }

WeightMatrix bip2() {
    Matrix m(2, 2);
    m << 0, 1, 1, 0;
    return WeightMatrix(m);
}

Vector vec1(double x) {
    Vector v(1);
    v << x;
    return v;
}

Vector vec2(double a, double b) {
    Vector v(2);
    v << a, b;
    return v;
}

}  // namespace

TEST_CASE("gelation times from the scaled spectral radius") {
    CHECK(gelation_time(unit1(), vec1(1.0)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(gelation_time(bip2(), vec2(1.0, 1.0)) == doctest::Approx(1.0).epsilon(1e-12));
    // Asymmetric masses: rho(V D[alpha]) = sqrt(4 * 1) = 2.
    CHECK(gelation_time(bip2(), vec2(4.0, 1.0)) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("closed-form densities at hand-checked points") {
    const Composition two({2});
    const Composition pair11({1, 1});
    for (double t : {0.1, 0.4, 0.9}) {
        CHECK(zeta_closed(unit1(), vec1(1.0), two, t) ==
              doctest::Approx(0.5 * t * std::exp(-2.0 * t)).epsilon(1e-13));
        CHECK(zeta_closed(bip2(), vec2(1.0, 1.0), pair11, t) ==
              doctest::Approx(t * std::exp(-2.0 * t)).epsilon(1e-13));
    }
}

TEST_CASE("densities at time zero are the pure singleton profile") {
    CHECK(zeta_closed(unit1(), vec1(0.7), Composition({1}), 0.0) == doctest::Approx(0.7));
    CHECK(zeta_closed(unit1(), vec1(0.7), Composition({3}), 0.0) == doctest::Approx(0.0));
    CHECK(zeta_closed(bip2(), vec2(0.3, 0.9), Composition({0, 1}), 0.0) == doctest::Approx(0.9));
}

TEST_CASE("unreachable compositions carry zero density at all times") {
    // Same-side pairs never bond under a bipartite kernel.
    CHECK(zeta_closed(bip2(), vec2(1.0, 1.0), Composition({2, 0}), 0.8) == doctest::Approx(0.0));
    CHECK(zeta_closed_log(bip2(), vec2(1.0, 1.0), Composition({2, 0}), 0.8) ==
          -std::numeric_limits<double>::infinity());
}

TEST_CASE("truncated integration reproduces the closed form exactly in law") {
    // Mass only flows upward, so the cut cannot disturb retained states.
    KineticsConfig cfg{unit1(), vec1(1.0), 6, {0.3, 0.7, 1.3}, 1e-11};
    const KineticsTrajectory traj = integrate_truncated(cfg);
    REQUIRE(traj.times.size() == 3);
    double worst = 0.0;
    for (size_t ti = 0; ti < traj.times.size(); ++ti)
        for (int s = 0; s < traj.index.size(); ++s) {
            const double ref = zeta_closed(cfg.v, cfg.alpha, traj.index.at(s), traj.times[ti]);
            worst = std::max(worst, std::abs(traj.values(static_cast<int>(ti), s) - ref));
        }
    CHECK(worst <= 1e-8);
}

TEST_CASE("two-type truncated integration matches the closed form") {
    KineticsConfig cfg{bip2(), vec2(0.9, 0.6), 5, {0.25, 0.8}, 1e-11};
    const KineticsTrajectory traj = integrate_truncated(cfg);
    double worst = 0.0;
    for (size_t ti = 0; ti < traj.times.size(); ++ti)
        for (int s = 0; s < traj.index.size(); ++s) {
            const double ref = zeta_closed(cfg.v, cfg.alpha, traj.index.at(s), traj.times[ti]);
            worst = std::max(worst, std::abs(traj.values(static_cast<int>(ti), s) - ref));
        }
    CHECK(worst <= 1e-8);
}

TEST_CASE("full-interaction truncation converges to the closed form before gelation") {
    const double tg = gelation_time(unit1(), vec1(1.0));
    KineticsConfig cfg{unit1(), vec1(1.0), 30, {0.25 * tg, 0.5 * tg}, 1e-11};
    const std::vector<double> win = smoluchowski_vs_flory_window(cfg);
    REQUIRE(win.size() == 2);
    // The deficit is the escaped tail mass; it grows toward the gel point.
    CHECK(win[0] <= 1e-5);
    CHECK(win[1] <= 1e-3);
    CHECK(win[0] <= win[1]);
}

TEST_CASE("window refuses grids that cross the gel point") {
    KineticsConfig cfg{unit1(), vec1(1.0), 10, {0.5, 1.5}, 1e-9};
    CHECK_THROWS_AS(smoluchowski_vs_flory_window(cfg), validation_error);
}

TEST_CASE("grid validation") {
    CHECK_THROWS_AS(integrate_truncated(KineticsConfig{unit1(), vec1(1.0), 4, {}, 1e-9}),
                    validation_error);
    CHECK_THROWS_AS(integrate_truncated(KineticsConfig{unit1(), vec1(1.0), 4, {0.5, 0.4}, 1e-9}),
                    validation_error);
    CHECK_THROWS_AS(integrate_truncated(KineticsConfig{unit1(), vec1(1.0), 4, {-0.1, 0.4}, 1e-9}),
                    validation_error);
    CHECK_THROWS_AS(integrate_truncated(KineticsConfig{unit1(), vec1(1.0), 0, {0.5}, 1e-9}),
                    validation_error);
}

TEST_CASE("total mass is conserved before gelation and lost after") {
    CHECK(total_mass(unit1(), vec1(1.0), 0.6)[0] == doctest::Approx(1.0).epsilon(1e-10));
    // Post-gel: y(2)/2 with y the minimal root of y e^{-y} = 2 e^{-2}.
    CHECK(total_mass(unit1(), vec1(1.0), 2.0)[0] == doctest::Approx(0.4063757 / 2.0).epsilon(1e-6));
    const Vector m = total_mass(bip2(), vec2(1.0, 1.0), 3.0);
    CHECK(m[0] < 1.0);
    CHECK(m[1] < 1.0);
}

TEST_CASE("second moments: resolvent value, divergence, and truncated agreement") {
    CHECK(second_moments(unit1(), vec1(1.0), 0.5)(0, 0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK_THROWS_AS(second_moments(unit1(), vec1(1.0), 1.0), validation_error);
    CHECK_THROWS_AS(second_moments(unit1(), vec1(1.0), 1.7), validation_error);

    const Matrix truncated = second_moments_truncated(unit1(), vec1(1.0), 40, 0.5);
    CHECK(truncated(0, 0) == doctest::Approx(2.0).epsilon(1e-3));

    // Two-type check of the resolvent shape at t = 0: A(0) = D[alpha].
    const Matrix a0 = second_moments(bip2(), vec2(0.4, 1.1), 0.0);
    CHECK(a0(0, 0) == doctest::Approx(0.4));
    CHECK(a0(1, 1) == doctest::Approx(1.1));
    CHECK(a0(0, 1) == doctest::Approx(0.0));
}
