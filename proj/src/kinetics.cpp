#include "vmcoal/kinetics.hpp"

#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <limits>

#include "vmcoal/trees.hpp"

namespace vmcoal {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require_grid(const std::vector<double>& grid) {
    if (grid.empty()) throw validation_error("kinetics: empty time grid");
    double prev = -1.0;
    for (double t : grid) {
        if (!std::isfinite(t) || t < 0.0) throw validation_error("kinetics: bad grid time");
        if (t <= prev) throw validation_error("kinetics: grid must be strictly increasing");
        prev = t;
    }
}

// Precomputed truncated system: per-state frozen death rates and the
// coagulation pair list with coefficients <y|V|z>/2 over ordered splits.
struct TruncatedModel {
    CompositionIndex index;
    std::vector<double> death;  // <x|V|alpha>
    struct Pair {
        int target, left, right;
        double w;
    };
    std::vector<Pair> pairs;
    Matrix type_mass;  // k x states: column i holds the composition vector

    TruncatedModel(const WeightMatrix& v, const MassVector& alpha, int n_max)
        : index(v.dim(), n_max) {
        const int m = index.size();
        death.resize(m);
        type_mass.resize(v.dim(), m);
        for (int i = 0; i < m; ++i) {
            death[i] = bilinear(v.mat(), index.at(i), alpha);
            type_mass.col(i) = index.at(i).as_vector();
        }
        for (int i = 0; i < m; ++i) {
            const Composition& x = index.at(i);
            if (x.total() < 2) continue;
            for (const auto& [y, z] : ordered_splits(x)) {
                const int iy = index.find(y.parts());
                const int iz = index.find(z.parts());
                pairs.push_back({i, iy, iz, 0.5 * bilinear(v.mat(), y, z)});
            }
        }
    }
};

using State = std::vector<double>;

KineticsTrajectory run_model(const KineticsConfig& cfg, bool frozen_death) {
    require_mass_vector(cfg.alpha, cfg.v.dim(), "kinetics: alpha");
    require_grid(cfg.t_grid);
    if (cfg.n_max < 1) throw validation_error("kinetics: n_max must be >= 1");
    if (!(cfg.ode_tol > 0.0)) throw validation_error("kinetics: ode_tol must be positive");

    const TruncatedModel model(cfg.v, cfg.alpha, cfg.n_max);
    const int m = model.index.size();
    const int k = cfg.v.dim();

    const auto rhs = [&](const State& s, State& ds, double) {
        Eigen::Map<const Vector> zeta(s.data(), m);
        Eigen::Map<Vector> out(ds.data(), m);
        if (frozen_death) {
            for (int i = 0; i < m; ++i) out[i] = -model.death[i] * zeta[i];
        } else {
            const Vector m1 = model.type_mass * zeta;  // truncated first moment
            const Vector vm1 = cfg.v.mat() * m1;
            for (int i = 0; i < m; ++i)
                out[i] = -model.type_mass.col(i).dot(vm1) * zeta[i];
        }
        for (const auto& p : model.pairs) out[p.target] += p.w * s[p.left] * s[p.right];
        (void)k;
    };

    State state(m, 0.0);
    for (int i = 0; i < k; ++i) {
        std::vector<int> e(k, 0);
        e[i] = 1;
        state[model.index.find(e)] = cfg.alpha[i];
    }

    std::vector<double> times = cfg.t_grid;
    if (times.front() > 0.0) times.insert(times.begin(), 0.0);

    KineticsTrajectory traj{model.index, cfg.t_grid,
                            Matrix(static_cast<int>(cfg.t_grid.size()), m)};
    int row = 0;
    const auto observer = [&](const State& s, double t) {
        // Record only requested grid times (0 may have been prepended).
        if (row < static_cast<int>(cfg.t_grid.size()) &&
            t == cfg.t_grid[static_cast<size_t>(row)]) {
            for (int i = 0; i < m; ++i) traj.values(row, i) = s[i];
            ++row;
        }
    };

    namespace ode = boost::numeric::odeint;
    ode::integrate_times(
        ode::make_controlled(cfg.ode_tol, cfg.ode_tol, ode::runge_kutta_cash_karp54<State>()),
        rhs, state, times.begin(), times.end(), 1e-4, observer);
    if (row != static_cast<int>(cfg.t_grid.size()))
        throw convergence_error("kinetics: integrator skipped grid points");
    return traj;
}

}  // namespace

double gelation_time(const WeightMatrix& v, const MassVector& alpha) {
    require_mass_vector(alpha, v.dim(), "gelation_time: alpha");
    const double rho = spectral_radius(v, alpha);
    if (rho <= 0.0) return std::numeric_limits<double>::infinity();
    return 1.0 / rho;
}

double zeta_closed_log(const WeightMatrix& v, const MassVector& alpha, const Composition& x,
                       double t) {
    require_mass_vector(alpha, v.dim(), "zeta_closed: alpha");
    if (x.dim() != v.dim()) throw validation_error("zeta_closed: dimension mismatch");
    if (!(t >= 0.0) || !std::isfinite(t)) throw validation_error("zeta_closed: t must be >= 0");

    if (t == 0.0) {
        if (x.total() != 1) return kNegInf;
        for (int i = 0; i < x.dim(); ++i)
            if (x[i] == 1) return std::log(alpha[i]);
    }

    double lg = enumerator_closed(v, x).value_log - log_factorial(x);
    if (lg == kNegInf) return kNegInf;
    for (int i = 0; i < x.dim(); ++i)
        if (x[i] > 0) lg += x[i] * std::log(alpha[i]);
    lg += -bilinear(v.mat(), x, alpha) * t + (x.total() - 1) * std::log(t);
    return lg;
}

double zeta_closed(const WeightMatrix& v, const MassVector& alpha, const Composition& x,
                   double t) {
    return std::exp(zeta_closed_log(v, alpha, x, t));
}

KineticsTrajectory integrate_truncated(const KineticsConfig& cfg) { return run_model(cfg, true); }

KineticsTrajectory integrate_full_truncated(const KineticsConfig& cfg) {
    return run_model(cfg, false);
}

std::vector<double> smoluchowski_vs_flory_window(const KineticsConfig& cfg) {
    const double tgel = gelation_time(cfg.v, cfg.alpha);
    for (double t : cfg.t_grid)
        if (t > tgel * (1.0 + 1e-12))
            throw validation_error("smoluchowski_vs_flory_window: grid extends past t_c = " +
                                   std::to_string(tgel));

    const KineticsTrajectory full = integrate_full_truncated(cfg);
    std::vector<double> dev(cfg.t_grid.size(), 0.0);
    for (size_t r = 0; r < cfg.t_grid.size(); ++r) {
        double worst = 0.0;
        for (int i = 0; i < full.index.size(); ++i) {
            const double closed =
                zeta_closed(cfg.v, cfg.alpha, full.index.at(i), cfg.t_grid[r]);
            worst = std::max(worst, std::abs(full.values(static_cast<int>(r), i) - closed));
        }
        dev[r] = worst;
    }
    return dev;
}

Vector total_mass(const WeightMatrix& v, const MassVector& alpha, double t) {
    require_mass_vector(alpha, v.dim(), "total_mass: alpha");
    if (!(t >= 0.0) || !std::isfinite(t)) throw validation_error("total_mass: t must be >= 0");
    if (t == 0.0) return alpha;
    return minimal_curve(v, alpha, t) / t;
}

Matrix second_moments(const WeightMatrix& v, const MassVector& alpha, double t) {
    require_mass_vector(alpha, v.dim(), "second_moments: alpha");
    if (!(t >= 0.0) || !std::isfinite(t)) throw validation_error("second_moments: t must be >= 0");
    const double tc = gelation_time(v, alpha);
    if (t >= tc)
        throw validation_error("second_moments: t = " + std::to_string(t) +
                               " at or beyond the divergence time t_c = " + std::to_string(tc));
    const int k = v.dim();
    const Matrix m = Matrix::Identity(k, k) - t * v.mat() * alpha.asDiagonal();
    return alpha.asDiagonal() * m.partialPivLu().solve(Matrix::Identity(k, k));
}

Matrix second_moments_truncated(const WeightMatrix& v, const MassVector& alpha, int n_max,
                                double t) {
    require_mass_vector(alpha, v.dim(), "second_moments_truncated: alpha");
    const int k = v.dim();
    Matrix out = Matrix::Zero(k, k);
    for (const auto& x : graded_compositions(k, n_max)) {
        const double z = zeta_closed(v, alpha, x, t);
        if (z == 0.0) continue;
        const Vector xv = x.as_vector();
        out += z * xv * xv.transpose();
    }
    return out;
}

}  // namespace vmcoal
