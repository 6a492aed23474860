#include "vmcoal/validate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "vmcoal/compositions.hpp"
#include "vmcoal/inversion.hpp"
#include "vmcoal/kinetics.hpp"
#include "vmcoal/linalg.hpp"
#include "vmcoal/mst.hpp"
#include "vmcoal/rng.hpp"
#include "vmcoal/simulator.hpp"
#include "vmcoal/trees.hpp"

namespace vmcoal {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

CheckResult check_le(std::string name, double measured, double limit, std::string detail = "") {
    CheckResult c;
    c.name = std::move(name);
    c.measured = measured;
    c.limit = limit;
    c.pass = (measured == measured) && measured <= limit;
    c.detail = std::move(detail);
    return c;
}

CheckResult check_ge(std::string name, double measured, double limit, std::string detail = "") {
    CheckResult c;
    c.name = std::move(name);
    c.measured = measured;
    c.limit = limit;
    c.pass = (measured == measured) && measured >= limit;
    c.detail = std::move(detail);
    return c;
}

std::string fmt17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// Run one check block.  A thrown error becomes a failing row for every check
// the block did not get to append, so a suite always reports its full roster
// instead of aborting the run.
template <typename Fn>
void guarded(SuiteResult& s, std::initializer_list<const char*> names, Fn&& fn) {
    const std::size_t before = s.checks.size();
    try {
        fn();
    } catch (const std::exception& e) {
        for (const char* name : names) {
            bool present = false;
            for (std::size_t i = before; i < s.checks.size(); ++i)
                if (s.checks[i].name == name) present = true;
            if (present) continue;
            CheckResult c;
            c.name = name;
            c.measured = std::numeric_limits<double>::quiet_NaN();
            c.limit = 0.0;
            c.pass = false;
            c.detail = e.what();
            s.checks.push_back(std::move(c));
        }
    }
}

// Symmetric nonnegative k x k matrix with connected support: a positive
// path i ~ i+1 plus random extra entries (some zero).
Matrix random_weight(int k, Rng& rng, bool integer) {
    Matrix m = Matrix::Zero(k, k);
    for (int i = 0; i < k; ++i) {
        for (int j = i; j < k; ++j) {
            double w;
            if (j == i + 1) {
                w = integer ? 1.0 + static_cast<double>(rng.below(3)) : 0.2 + 1.6 * rng.uniform();
            } else if (j == i) {
                w = rng.uniform() < 0.5
                        ? 0.0
                        : (integer ? static_cast<double>(rng.below(3)) : 0.1 + 0.9 * rng.uniform());
            } else {
                w = rng.uniform() < 0.3
                        ? 0.0
                        : (integer ? static_cast<double>(rng.below(4)) : 0.2 + 1.6 * rng.uniform());
            }
            m(i, j) = w;
            m(j, i) = w;
        }
    }
    if (k == 1 && m(0, 0) <= 0.0) m(0, 0) = integer ? 1.0 : 0.5 + rng.uniform();
    return m;
}

Vector random_point(int k, Rng& rng) {
    Vector z(k);
    for (int i = 0; i < k; ++i) z[i] = std::exp(-0.7 + 1.4 * rng.uniform());
    return z;
}

Vector scaled_to_radius(const WeightMatrix& v, Vector z, double target) {
    const double rho = spectral_radius(v, z);
    z *= target / rho;
    return z;
}

double rel_spread(std::initializer_list<double> vals) {
    double lo = kInf, hi = -kInf, mag = 0.0;
    for (double x : vals) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
        mag = std::max(mag, std::abs(x));
    }
    if (mag == 0.0) return 0.0;
    return (hi - lo) / mag;
}

double rel_diff(double a, double b) {
    const double mag = std::max(std::abs(a), std::abs(b));
    if (mag == 0.0) return 0.0;
    return std::abs(a - b) / mag;
}

int128 ipow(int128 base, int exp) {
    int128 r = 1;
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
}

// ---------------------------------------------------------------- trees ----

void trees_method_agreement(SuiteResult& s, const ValidateOptions& opts) {
    Rng rng = Rng::stream(opts.seed, 1);
    double worst = 0.0;
    std::string where = "all agree";
    long zero_conflicts = 0;
    for (int k = 1; k <= 4; ++k) {
        for (int rep = 0; rep < 5; ++rep) {
            const WeightMatrix v(random_weight(k, rng, false));
            for (int n = 1; n <= 8; ++n) {
                for (const Composition& x : compositions_of(k, n)) {
                    const auto a = enumerator_cofactor(v, x);
                    const auto b = enumerator_rank_one(v, x);
                    const auto c = enumerator_closed(v, x);
                    const auto d = enumerator_brute_force(v, x);
                    const bool zero = a.value_log == -kInf;
                    if (zero || b.value_log == -kInf || c.value_log == -kInf ||
                        d.value_log == -kInf) {
                        // An exact zero must be an exact zero on every path.
                        if (std::max(std::max(a.value, b.value), std::max(c.value, d.value)) >
                            1e-9)
                            ++zero_conflicts;
                        continue;
                    }
                    const double err = rel_spread({a.value, b.value, c.value, d.value});
                    if (err > worst) {
                        worst = err;
                        where = "k=" + std::to_string(k) + " rep=" + std::to_string(rep) +
                                " x=" + x.key();
                    }
                }
            }
        }
    }
    s.checks.push_back(check_le("method-agreement", worst, 1e-9, where));
    s.checks.push_back(check_le("method-zero-agreement", static_cast<double>(zero_conflicts),
                                0.0, "paths disagreeing about exact zeros"));
}

void trees_integer_paths(SuiteResult& s, const ValidateOptions& opts) {
    Rng rng = Rng::stream(opts.seed, 2);
    long mismatches = 0;
    for (int k = 1; k <= 3; ++k) {
        for (int rep = 0; rep < 2; ++rep) {
            const WeightMatrix v(random_weight(k, rng, true));
            for (int n = 1; n <= 7; ++n)
                for (const Composition& x : compositions_of(k, n))
                    if (tree_count_exact(v, x) != tree_count_brute_exact(v, x)) ++mismatches;
        }
    }
    s.checks.push_back(check_le("integer-paths-equal", static_cast<double>(mismatches), 0.0,
                                "fraction-free vs exhaustive, integer weights"));
}

void trees_known_counts(SuiteResult& s) {
    // Complete graph: n^(n-2) labeled trees.
    {
        const WeightMatrix v(Matrix::Constant(1, 1, 1.0));
        long bad = 0;
        for (int n = 2; n <= 10; ++n)
            if (tree_count_exact(v, Composition({n})) != ipow(n, n - 2)) ++bad;
        s.checks.push_back(
            check_le("cayley-counts", static_cast<double>(bad), 0.0, "sizes 2..10"));
    }
    // Complete bipartite: x1^(x2-1) x2^(x1-1).
    {
        Matrix m(2, 2);
        m << 0, 1, 1, 0;
        const WeightMatrix v(m);
        long bad = 0;
        for (int x1 = 1; x1 <= 5; ++x1)
            for (int x2 = 1; x2 <= 5; ++x2)
                if (tree_count_exact(v, Composition({x1, x2})) !=
                    ipow(x1, x2 - 1) * ipow(x2, x1 - 1))
                    ++bad;
        s.checks.push_back(
            check_le("bipartite-counts", static_cast<double>(bad), 0.0, "parts up to 5"));
    }
    // Complete multipartite with unit weights: n^(k-2) prod (n-x_i)^(x_i-1).
    {
        const int k = 3;
        Matrix m = Matrix::Constant(k, k, 1.0);
        m.diagonal().setZero();
        const WeightMatrix v(m);
        double worst = 0.0;
        for (int n = 1; n <= 7; ++n) {
            for (const Composition& x : compositions_of(k, n)) {
                double formula = std::pow(n, k - 2);
                for (int i = 0; i < k; ++i) formula *= std::pow(n - x[i], x[i] - 1);
                const double got = enumerator_cofactor(v, x).value;
                worst = std::max(worst, rel_diff(formula, got));
            }
        }
        s.checks.push_back(
            check_le("uniform-multipartite-counts", worst, 1e-9, "k=3, sizes up to 7"));
    }
}

void trees_merge_recursion(SuiteResult& s, const ValidateOptions& opts) {
    // 2 (n_x - 1) T_x = sum over ordered splits x = y + z of
    // x!/(y! z!) <y|V|z> T_y T_z.
    Rng rng = Rng::stream(opts.seed, 3);
    double worst = 0.0;
    std::string where;
    for (int k = 1; k <= 3; ++k) {
        const WeightMatrix v(random_weight(k, rng, false));
        std::map<std::vector<int>, double> t_of;
        for (const Composition& x : graded_compositions(k, 7))
            t_of[x.parts()] = enumerator_cofactor(v, x).value;
        for (const Composition& x : graded_compositions(k, 7)) {
            if (x.total() < 2) continue;
            const double lhs = 2.0 * (x.total() - 1) * t_of[x.parts()];
            double rhs = 0.0;
            for (const auto& [y, z] : ordered_splits(x)) {
                const double coeff =
                    std::exp(log_factorial(x) - log_factorial(y) - log_factorial(z));
                rhs += coeff * bilinear(v.mat(), y, z) * t_of[y.parts()] * t_of[z.parts()];
            }
            const double err = rel_diff(lhs, rhs);
            if (err > worst) {
                worst = err;
                where = "k=" + std::to_string(k) + " x=" + x.key();
            }
        }
    }
    s.checks.push_back(check_le("merge-recursion", worst, 1e-9, where));
}

void trees_partition_form_recursion(SuiteResult& s, const ValidateOptions& opts) {
    // The same recursion with every enumerator evaluated through the
    // partition-polynomial product form; exercises that route end to end.
    Rng rng = Rng::stream(opts.seed, 4);
    Matrix m = random_weight(3, rng, false);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (m(i, j) == 0.0 && i != j) {
                m(i, j) = 0.15 + 0.5 * rng.uniform();
                m(j, i) = m(i, j);
            }
    const WeightMatrix v(m);
    std::map<std::vector<int>, double> t_of;
    for (const Composition& x : graded_compositions(3, 8))
        t_of[x.parts()] = enumerator_closed(v, x).value;
    double worst = 0.0;
    std::string where;
    for (const Composition& x : graded_compositions(3, 8)) {
        if (x.total() < 2) continue;
        const double lhs = 2.0 * (x.total() - 1) * t_of[x.parts()];
        double rhs = 0.0;
        for (const auto& [y, z] : ordered_splits(x)) {
            const double coeff = std::exp(log_factorial(x) - log_factorial(y) - log_factorial(z));
            rhs += coeff * bilinear(v.mat(), y, z) * t_of[y.parts()] * t_of[z.parts()];
        }
        const double err = rel_diff(lhs, rhs);
        if (err > worst) {
            worst = err;
            where = "x=" + x.key();
        }
    }
    s.checks.push_back(check_le("partition-form-recursion", worst, 1e-9, where));
}

void trees_abel_sum(SuiteResult& s) {
    // sum over |x| = n of n!/x! prod_i n (n - x_i)^(x_i - 1) = k (k-1)^(n-1) n^n,
    // checked in exact integers.
    int128 fact[11];
    fact[0] = 1;
    for (int i = 1; i <= 10; ++i) fact[i] = fact[i - 1] * i;
    long bad = 0;
    for (int k = 2; k <= 3; ++k) {
        for (int n = 1; n <= 10; ++n) {
            int128 total = 0;
            for (const Composition& x : compositions_of(k, n)) {
                int128 term = fact[n];
                for (int i = 0; i < k; ++i) term /= fact[x[i]];
                for (int i = 0; i < k; ++i)
                    if (x[i] > 0) term *= static_cast<int128>(n) * ipow(n - x[i], x[i] - 1);
                total += term;
            }
            const int128 expected = static_cast<int128>(k) * ipow(k - 1, n - 1) * ipow(n, n);
            if (total != expected) ++bad;
        }
    }
    s.checks.push_back(check_le("abel-multinomial-sum", static_cast<double>(bad), 0.0,
                                "k in {2,3}, sizes up to 10, exact integers"));
}

void trees_eigenweight(SuiteResult& s, const ValidateOptions& opts) {
    // V = |w><w| - D[w^2]: T_x = (prod w_i) <w|x>^(k-2) prod_i (Vx)_i^(x_i-1).
    Rng rng = Rng::stream(opts.seed, 5);
    double worst = 0.0;
    std::string where;
    for (int k = 2; k <= 3; ++k) {
        for (int rep = 0; rep < 2; ++rep) {
            Vector w(k);
            for (int i = 0; i < k; ++i) w[i] = 0.3 + 1.4 * rng.uniform();
            Matrix m = w * w.transpose();
            m.diagonal().setZero();
            const WeightMatrix v(m);
            for (int n = 1; n <= 6; ++n) {
                for (const Composition& x : compositions_of(k, n)) {
                    const Vector vx = m * x.as_vector();
                    double formula = std::pow(w.dot(x.as_vector()), k - 2);
                    for (int i = 0; i < k; ++i) formula *= w[i];
                    for (int i = 0; i < k; ++i) formula *= std::pow(vx[i], x[i] - 1);
                    const double got = enumerator_cofactor(v, x).value;
                    const double err = rel_diff(formula, got);
                    if (err > worst) {
                        worst = err;
                        where = "k=" + std::to_string(k) + " x=" + x.key();
                    }
                }
            }
        }
    }
    s.checks.push_back(check_le("eigenweight-closed-form", worst, 1e-9, where));
}

// ------------------------------------------------------------- inversion ----

void inversion_roundtrip(SuiteResult& s, const ValidateOptions& opts) {
    Rng rng = Rng::stream(opts.seed, 10);
    double worst = 0.0;
    std::string where;
    FixedPointOptions fp;
    fp.tol = 1e-12;
    fp.rel_change = 1e-15;
    for (int k = 1; k <= 4; ++k) {
        for (int rep = 0; rep < 25; ++rep) {
            const WeightMatrix v(random_weight(k, rng, false));
            const double target = 0.15 + 0.83 * rng.uniform();
            const Vector z = scaled_to_radius(v, random_point(k, rng), target);
            const Vector u = psi(v, z);
            const Vector y = detail::solve_fixed_point(v, u, fp).y;
            const double err = (y - z).cwiseAbs().maxCoeff();
            if (err > worst) {
                worst = err;
                where = "k=" + std::to_string(k) + " radius=" + fmt17(target);
            }
        }
    }
    s.checks.push_back(check_le("roundtrip-subcritical", worst, 1e-8, where));
}

void inversion_minimality(SuiteResult& s, const ValidateOptions& opts) {
    Rng rng = Rng::stream(opts.seed, 11);
    double min_margin = kInf;
    double worst_rho = 0.0;
    double worst_resid = 0.0;
    int count = 0;
    for (int k = 1; k <= 3; ++k) {
        const int reps = (k == 3) ? 16 : 17;
        for (int rep = 0; rep < reps; ++rep) {
            const WeightMatrix v(random_weight(k, rng, false));
            const double target =
                (rep < 4) ? 1.001 + 0.049 * rng.uniform() : 1.05 + 1.95 * rng.uniform();
            const Vector z = scaled_to_radius(v, random_point(k, rng), target);
            const InversionResult res = invert_minimal(v, z);
            ++count;
            min_margin = std::min(min_margin, (z - res.y).minCoeff());
            worst_rho = std::max(worst_rho, spectral_radius(v, res.y));
            worst_resid =
                std::max(worst_resid, (psi(v, res.y) - psi(v, z)).cwiseAbs().maxCoeff());
        }
    }
    s.checks.push_back(check_ge("minimality-strict", min_margin, 1e-12,
                                std::to_string(count) + " supercritical points"));
    s.checks.push_back(check_le("image-subcritical-radius", worst_rho - 1.0, 1e-10));
    s.checks.push_back(check_le("forward-residual", worst_resid, 1e-8));
}

void inversion_method_agreement(SuiteResult& s, const ValidateOptions& opts) {
    Rng rng = Rng::stream(opts.seed, 12);
    double worst = 0.0;
    std::string where;
    for (int k = 1; k <= 3; ++k) {
        for (int rep = 0; rep < 7; ++rep) {
            const WeightMatrix v(random_weight(k, rng, false));
            const double target = 1.05 + 1.45 * rng.uniform();
            const Vector z = scaled_to_radius(v, random_point(k, rng), target);
            const Vector y_fp = detail::solve_fixed_point(v, psi(v, z)).y;
            const EtaCertificate cert = eta_fixed_point(v, z);
            const Vector y_ode = ode_flow_invert(v, z, cert).y;
            const double err = (y_fp - y_ode).cwiseAbs().maxCoeff();
            if (err > worst) {
                worst = err;
                where = "k=" + std::to_string(k) + " radius=" + fmt17(target);
            }
        }
    }
    s.checks.push_back(check_le("method-agreement", worst, 1e-7, where));
}

void inversion_scalar_benchmark(SuiteResult& s) {
    const WeightMatrix v(Matrix::Constant(1, 1, 1.0));
    Vector z(1);
    z[0] = 2.0;
    const double y = invert_minimal(v, z).y[0];

    // Bisection on y e^{-y} = 2 e^{-2} over (0, 1), where the map increases.
    const double target = 2.0 * std::exp(-2.0);
    double lo = 1e-12, hi = 1.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (mid * std::exp(-mid) < target ? lo : hi) = mid;
    }
    const double oracle = 0.5 * (lo + hi);
    s.checks.push_back(
        check_le("scalar-benchmark", std::abs(y - oracle), 1e-6, "oracle " + fmt17(oracle)));
    s.checks.push_back(check_le("scalar-benchmark-frozen", std::abs(y - 0.4063757), 1e-6));
}

void inversion_curve_decay(SuiteResult& s) {
    double worst = 0.0;
    {
        const WeightMatrix v(Matrix::Constant(1, 1, 1.0));
        const Vector alpha = Vector::Constant(1, 1.0);
        const double t = 16.0 / spectral_radius(v, alpha);
        const Vector y = minimal_curve(v, alpha, t);
        worst = std::max(worst, (y.array() / (alpha.array() * t)).maxCoeff());
    }
    {
        Matrix m(2, 2);
        m << 0, 1, 1, 0;
        const WeightMatrix v(m);
        const Vector alpha = Vector::Constant(2, 1.0);
        const double t = 16.0 / spectral_radius(v, alpha);
        const Vector y = minimal_curve(v, alpha, t);
        worst = std::max(worst, (y.array() / (alpha.array() * t)).maxCoeff());
    }
    s.checks.push_back(check_le("curve-decay", worst, 1e-3, "largest y_i/(alpha_i t) at t = 16 t_c"));
}

// -------------------------------------------------------------- kinetics ----

struct KineticsCase {
    std::string tag;
    WeightMatrix v;
    Vector alpha;
};

std::vector<KineticsCase> kinetics_cases() {
    std::vector<KineticsCase> cases;
    cases.push_back({"k1", WeightMatrix(Matrix::Constant(1, 1, 1.0)), Vector::Constant(1, 1.0)});
    {
        Matrix m(2, 2);
        m << 0.4, 1.1, 1.1, 0.2;
        Vector a(2);
        a << 0.9, 0.6;
        cases.push_back({"k2", WeightMatrix(m), a});
    }
    {
        Matrix m(3, 3);
        m << 0.2, 1.0, 0.5, 1.0, 0.0, 0.8, 0.5, 0.8, 0.3;
        Vector a(3);
        a << 0.7, 1.0, 0.5;
        cases.push_back({"k3", WeightMatrix(m), a});
    }
    return cases;
}

void kinetics_closed_vs_ode(SuiteResult& s) {
    double worst = 0.0;
    std::string where;
    for (const KineticsCase& c : kinetics_cases()) {
        const double tg = gelation_time(c.v, c.alpha);
        KineticsConfig cfg{c.v, c.alpha, 6, {}, 1e-10};
        for (double f : {0.25, 0.5, 1.0, 1.5, 2.0}) cfg.t_grid.push_back(f * tg);
        const KineticsTrajectory traj = integrate_truncated(cfg);
        for (size_t r = 0; r < traj.times.size(); ++r) {
            for (int j = 0; j < traj.index.size(); ++j) {
                const double closed =
                    zeta_closed(c.v, c.alpha, traj.index.at(j), traj.times[r]);
                const double err = std::abs(traj.values(r, j) - closed);
                if (err > worst) {
                    worst = err;
                    where = c.tag + " x=" + traj.index.at(j).key() +
                            " t=" + fmt17(traj.times[r]);
                }
            }
        }
    }
    s.checks.push_back(check_le("closed-vs-ode", worst, 1e-6, where));
}

void kinetics_density_residual(SuiteResult& s) {
    // Residual of the closed form in d zeta_x/dt =
    // (1/2) sum_{y+z=x} <y|V|z> zeta_y zeta_z - <x|V|alpha> zeta_x.
    double worst = 0.0;
    std::string where;
    const auto cases = kinetics_cases();
    for (int ci = 0; ci < 2; ++ci) {
        const KineticsCase& c = cases[ci];
        const double tg = gelation_time(c.v, c.alpha);
        for (const Composition& x : graded_compositions(c.v.dim(), 5)) {
            for (double f : {0.2, 0.5, 0.9, 1.4}) {
                const double t = f * tg;
                const double zx = zeta_closed(c.v, c.alpha, x, t);
                const double death = bilinear(c.v.mat(), x, Vector(c.alpha));
                const double dz = zx * (-death + (x.total() - 1) / t);
                double birth = 0.0;
                for (const auto& [y, z] : ordered_splits(x))
                    birth += 0.5 * bilinear(c.v.mat(), y, z) * zeta_closed(c.v, c.alpha, y, t) *
                             zeta_closed(c.v, c.alpha, z, t);
                const double resid = std::abs(dz + death * zx - birth);
                const double scale =
                    std::max({std::abs(dz), std::abs(death * zx), std::abs(birth), 1e-300});
                const double err = resid / scale;
                if (err > worst) {
                    worst = err;
                    where = c.tag + " x=" + x.key() + " t=" + fmt17(t);
                }
            }
        }
    }
    s.checks.push_back(check_le("density-residual", worst, 1e-8, where));
}

void kinetics_mass(SuiteResult& s) {
    const auto cases = kinetics_cases();
    double worst_cons = 0.0;
    double min_decay = kInf;
    for (int ci = 0; ci < 2; ++ci) {
        const KineticsCase& c = cases[ci];
        const double tg = gelation_time(c.v, c.alpha);
        for (double f : {0.25, 0.5, 0.9, 1.0}) {
            const Vector m = total_mass(c.v, c.alpha, f * tg);
            worst_cons = std::max(worst_cons, (m - c.alpha).cwiseAbs().maxCoeff());
        }
        Vector prev = c.alpha;
        for (double f : {1.2, 1.5, 2.0, 3.0}) {
            const Vector m = total_mass(c.v, c.alpha, f * tg);
            min_decay = std::min(min_decay, (prev - m).minCoeff());
            prev = m;
        }
    }
    s.checks.push_back(check_le("mass-conservation", worst_cons, 1e-8, "t up to t_c"));
    s.checks.push_back(
        check_ge("mass-decay", min_decay, 1e-12, "strict componentwise decrease past t_c"));
}

void kinetics_moments(SuiteResult& s) {
    {
        const WeightMatrix v(Matrix::Constant(1, 1, 1.0));
        const Vector alpha = Vector::Constant(1, 1.0);
        const double closed = second_moments(v, alpha, 0.5)(0, 0);
        const double truncated = second_moments_truncated(v, alpha, 40, 0.5)(0, 0);
        s.checks.push_back(check_le("moments-truncated-sum", std::abs(closed - truncated), 1e-3,
                                    "closed " + fmt17(closed)));
        const double tg = gelation_time(v, alpha);
        const double near = second_moments(v, alpha, tg * (1.0 - 1e-7)).cwiseAbs().maxCoeff();
        s.checks.push_back(check_ge("moments-divergence", near, 1e6, "just below t_c"));
    }
    {
        Matrix m(2, 2);
        m << 0.3, 1.2, 1.2, 0.5;
        const WeightMatrix v(m);
        Vector alpha(2);
        alpha << 0.8, 1.1;
        const double tg = gelation_time(v, alpha);
        const double t0 = 0.3 * tg;
        const double h = 1e-4 * tg;
        const Matrix b0 = v.mat() * second_moments(v, alpha, t0);
        const Matrix fd = (v.mat() * second_moments(v, alpha, t0 + h) -
                           v.mat() * second_moments(v, alpha, t0 - h)) /
                          (2.0 * h);
        const Matrix sq = b0 * b0;
        const double err =
            (fd - sq).cwiseAbs().maxCoeff() / std::max(1e-300, sq.cwiseAbs().maxCoeff());
        s.checks.push_back(check_le("moments-flow-derivative", err, 1e-6,
                                    "d(VA)/dt against (VA)^2 at 0.3 t_c"));
    }
}

void kinetics_gel_times(SuiteResult& s) {
    {
        const WeightMatrix v(Matrix::Constant(1, 1, 1.0));
        const double tg = gelation_time(v, Vector::Constant(1, 1.0));
        s.checks.push_back(check_le("gel-time-scalar", std::abs(tg - 1.0), 1e-9));
    }
    Matrix m(2, 2);
    m << 0, 1, 1, 0;
    const WeightMatrix v(m);
    {
        const double tg = gelation_time(v, Vector::Constant(2, 1.0));
        s.checks.push_back(check_le("gel-time-bipartite", std::abs(tg - 1.0), 1e-9));
    }
    {
        Vector alpha(2);
        alpha << 4.0, 1.0;
        const double tg = gelation_time(v, alpha);
        s.checks.push_back(check_le("gel-time-bipartite-scaled", std::abs(tg - 0.5), 1e-9,
                                    "expected 1/sqrt(4*1)"));
    }
}

// -------------------------------------------------------------- simulator ----

void simulator_suite(SuiteResult& s, const ValidateOptions& opts) {
    struct Case {
        std::string tag;
        WeightMatrix v;
        Vector alpha;
    };
    std::vector<Case> cases;
    cases.push_back({"k1", WeightMatrix(Matrix::Constant(1, 1, 1.0)), Vector::Constant(1, 1.0)});
    {
        Matrix m(2, 2);
        m << 0, 1, 1, 0;
        cases.push_back({"k2", WeightMatrix(m), Vector::Constant(2, 1.0)});
    }

    double worst_ratio = 0.0;
    std::string ratio_where;
    for (const Case& c : cases) {
        const int k = c.v.dim();
        const double tg = gelation_time(c.v, c.alpha);
        std::vector<double> times = {0.3 * tg, 0.6 * tg, 0.9 * tg};
        std::vector<std::pair<Composition, double>> queries;
        for (double t : times)
            for (const Composition& x : graded_compositions(k, 4)) queries.emplace_back(x, t);

        double err_small = 0.0, err_large = 0.0, worst_z = 0.0;
        std::string z_where;
        for (long n : {500L, 2000L}) {
            SimConfig cfg{c.v, c.alpha, n, times.back(), opts.seed + 1000 * k + n, times};
            const EnsembleResult ens = simulate_ensemble(cfg, 200, queries, opts.threads);
            double sum_abs = 0.0;
            for (size_t q = 0; q < queries.size(); ++q) {
                const double zeta =
                    zeta_closed(c.v, c.alpha, queries[q].first, queries[q].second);
                const double diff = std::abs(ens.mean[q] - zeta);
                sum_abs += diff;
                if (n == 2000) {
                    const double z = ens.se[q] > 0.0 ? diff / ens.se[q]
                                                     : (diff > 1e-12 ? kInf : 0.0);
                    if (z > worst_z) {
                        worst_z = z;
                        z_where = "x=" + queries[q].first.key() +
                                  " t=" + fmt17(queries[q].second);
                    }
                }
            }
            (n == 500 ? err_small : err_large) = sum_abs / static_cast<double>(queries.size());
        }
        s.checks.push_back(check_le("hydrodynamic-" + c.tag, worst_z, 3.0,
                                    "largest |mean - limit|/s.e., 200 replicas, n=2000, " +
                                        z_where));
        const double ratio = err_large / std::max(err_small, 1e-300);
        if (ratio > worst_ratio) {
            worst_ratio = ratio;
            ratio_where = c.tag + " mean error " + fmt17(err_small) + " (n=500) -> " +
                          fmt17(err_large) + " (n=2000)";
        }
    }
    s.checks.push_back(check_le("density-error-scaling", worst_ratio, 1.0, ratio_where));
}

// -------------------------------------------------------------------- mst ----

void mst_suite(SuiteResult& s, const ValidateOptions& opts) {
    const double zeta3 = 1.2020569031595943;
    struct Case {
        std::string tag;
        WeightMatrix v;
        Vector alpha;
        double limit_value;
    };
    std::vector<Case> cases;
    cases.push_back(
        {"k1", WeightMatrix(Matrix::Constant(1, 1, 1.0)), Vector::Constant(1, 1.0), zeta3});
    {
        Matrix m(2, 2);
        m << 0, 1, 1, 0;
        cases.push_back({"k2", WeightMatrix(m), Vector::Constant(2, 1.0), 2.0 * zeta3});
    }
    {
        Matrix m = Matrix::Constant(3, 3, 1.0);
        m.diagonal().setZero();
        cases.push_back({"k3", WeightMatrix(m), Vector::Constant(3, 1.0), 1.5 * zeta3});
    }

    for (const Case& c : cases) {
        const MstSeriesReport rep = mst_series(c.v, c.alpha, 200, 1e-6, opts.threads);
        s.checks.push_back(check_le("series-" + c.tag, std::abs(rep.partial_sum - c.limit_value),
                                    1e-3,
                                    "sum " + fmt17(rep.partial_sum) + " after size " +
                                        std::to_string(rep.n_max) + ", last shell " +
                                        fmt17(rep.last_shell)));
    }
    for (int i = 0; i < 3; ++i) {
        const Case& c = cases[i];
        const MstMonteCarlo mc =
            mst_monte_carlo(c.v, c.alpha, 300, 200, opts.seed + 31 * (i + 1), opts.threads);
        s.checks.push_back(check_le("carlo-" + c.tag,
                                    std::abs(mc.mean - c.limit_value) / c.limit_value, 0.05,
                                    "mean " + fmt17(mc.mean) + " s.e. " + fmt17(mc.se)));
    }

    {
        double worst = 0.0;
        const WeightMatrix& v1 = cases[0].v;
        const WeightMatrix& v2 = cases[1].v;
        worst = std::max(worst,
                         std::abs(percolation_threshold(v1, cases[0].alpha, 1000) - 1e-3));
        worst = std::max(worst,
                         std::abs(percolation_threshold(v2, cases[1].alpha, 1000) - 1e-3));
        worst = std::max(worst,
                         std::abs(percolation_threshold(v2, cases[1].alpha, 2000) - 5e-4));
        s.checks.push_back(check_le("threshold-values", worst, 1e-12));
    }
    {
        const Case& c = cases[1];
        const long n = 2000;
        const double pc = percolation_threshold(c.v, c.alpha, n);
        const std::vector<long> counts = {n, n};
        Rng rng = Rng::stream(opts.seed, 99);
        double sup = 0.0, sub = 0.0;
        const int reps = 10;
        for (int r = 0; r < reps; ++r) sup += largest_component_fraction(c.v, counts, 1.2 * pc, rng);
        for (int r = 0; r < reps; ++r) sub += largest_component_fraction(c.v, counts, 0.8 * pc, rng);
        const double ratio = sup / std::max(sub, 1e-300);
        s.checks.push_back(check_ge("threshold-empirical", ratio, 3.0,
                                    "giant fraction ratio at 1.2 p_c vs 0.8 p_c"));
    }
}

}  // namespace

bool SuiteResult::pass() const {
    for (const CheckResult& c : checks)
        if (!c.pass) return false;
    return true;
}

SuiteResult validate_trees(const ValidateOptions& opts) {
    SuiteResult s{"trees", {}};
    guarded(s, {"method-agreement", "method-zero-agreement"},
            [&] { trees_method_agreement(s, opts); });
    guarded(s, {"integer-paths-equal"}, [&] { trees_integer_paths(s, opts); });
    guarded(s, {"cayley-counts", "bipartite-counts", "uniform-multipartite-counts"},
            [&] { trees_known_counts(s); });
    guarded(s, {"merge-recursion"}, [&] { trees_merge_recursion(s, opts); });
    guarded(s, {"partition-form-recursion"}, [&] { trees_partition_form_recursion(s, opts); });
    guarded(s, {"abel-multinomial-sum"}, [&] { trees_abel_sum(s); });
    guarded(s, {"eigenweight-closed-form"}, [&] { trees_eigenweight(s, opts); });
    return s;
}

SuiteResult validate_inversion(const ValidateOptions& opts) {
    SuiteResult s{"inversion", {}};
    guarded(s, {"roundtrip-subcritical"}, [&] { inversion_roundtrip(s, opts); });
    guarded(s, {"minimality-strict", "image-subcritical-radius", "forward-residual"},
            [&] { inversion_minimality(s, opts); });
    guarded(s, {"method-agreement"}, [&] { inversion_method_agreement(s, opts); });
    guarded(s, {"scalar-benchmark", "scalar-benchmark-frozen"},
            [&] { inversion_scalar_benchmark(s); });
    guarded(s, {"curve-decay"}, [&] { inversion_curve_decay(s); });
    return s;
}

SuiteResult validate_kinetics(const ValidateOptions& opts) {
    SuiteResult s{"kinetics", {}};
    (void)opts;
    guarded(s, {"closed-vs-ode"}, [&] { kinetics_closed_vs_ode(s); });
    guarded(s, {"density-residual"}, [&] { kinetics_density_residual(s); });
    guarded(s, {"mass-conservation", "mass-decay"}, [&] { kinetics_mass(s); });
    guarded(s, {"moments-truncated-sum", "moments-divergence", "moments-flow-derivative"},
            [&] { kinetics_moments(s); });
    guarded(s, {"gel-time-scalar", "gel-time-bipartite", "gel-time-bipartite-scaled"},
            [&] { kinetics_gel_times(s); });
    return s;
}

SuiteResult validate_simulator(const ValidateOptions& opts) {
    SuiteResult s{"simulator", {}};
    guarded(s, {"hydrodynamic-k1", "hydrodynamic-k2", "density-error-scaling"},
            [&] { simulator_suite(s, opts); });
    return s;
}

SuiteResult validate_mst(const ValidateOptions& opts) {
    SuiteResult s{"mst", {}};
    guarded(s,
            {"series-k1", "series-k2", "series-k3", "carlo-k1", "carlo-k2", "carlo-k3",
             "threshold-values", "threshold-empirical"},
            [&] { mst_suite(s, opts); });
    return s;
}

std::vector<SuiteResult> validate_suites(const std::string& suite, const ValidateOptions& opts) {
    std::vector<SuiteResult> out;
    const bool all = suite == "all";
    if (all || suite == "trees") out.push_back(validate_trees(opts));
    if (all || suite == "inversion") out.push_back(validate_inversion(opts));
    if (all || suite == "kinetics") out.push_back(validate_kinetics(opts));
    if (all || suite == "simulator") out.push_back(validate_simulator(opts));
    if (all || suite == "mst") out.push_back(validate_mst(opts));
    if (out.empty()) throw validation_error("validate: unknown suite '" + suite + "'");
    return out;
}

namespace {

std::string csv_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace

void write_suite_csv(const SuiteResult& r, std::ostream& os) {
    for (const CheckResult& c : r.checks)
        os << r.suite << ',' << c.name << ',' << fmt17(c.measured) << ',' << fmt17(c.limit)
           << ',' << (c.pass ? "true" : "false") << ',' << csv_quote(c.detail) << "\r\n";
}

void write_suites_csv(const std::vector<SuiteResult>& rs, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw validation_error("cannot open CSV output path: " + path);
    os << "suite,check,measured,limit,pass,detail\r\n";
    for (const SuiteResult& r : rs) write_suite_csv(r, os);
}

}  // namespace vmcoal
