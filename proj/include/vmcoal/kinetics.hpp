#pragma once

#include <vector>

#include "vmcoal/compositions.hpp"
#include "vmcoal/inversion.hpp"
#include "vmcoal/linalg.hpp"

namespace vmcoal {

struct KineticsConfig {
    WeightMatrix v;
    MassVector alpha;
    int n_max = 20;
    std::vector<double> t_grid;  // strictly increasing, nonnegative
    double ode_tol = 1e-9;
};

// t_c = 1 / rho(V D[alpha]); +inf for a zero kernel.
double gelation_time(const WeightMatrix& v, const MassVector& alpha);

// Cluster density zeta_x(t) = alpha^x T_x / x! * exp(-<x|V|alpha> t) t^(n_x - 1).
double zeta_closed_log(const WeightMatrix& v, const MassVector& alpha, const Composition& x,
                       double t);
double zeta_closed(const WeightMatrix& v, const MassVector& alpha, const Composition& x, double t);

struct KineticsTrajectory {
    CompositionIndex index;  // graded lex state order
    std::vector<double> times;
    Matrix values;  // times x states
};

// Truncated kinetics with the death term frozen at <x|V|alpha>.  The
// truncation is exact for the retained states: clusters only feed upward.
KineticsTrajectory integrate_truncated(const KineticsConfig& cfg);

// Same truncation with the death term computed from the retained partial
// first moment (the full-interaction variant); differs from the frozen-death
// system only through the missing tail mass.
KineticsTrajectory integrate_full_truncated(const KineticsConfig& cfg);

// sup_x |full_truncated - closed form| at each grid time; grid must stay
// within [0, gelation_time].
std::vector<double> smoluchowski_vs_flory_window(const KineticsConfig& cfg);

// First-moment vector sum_x x zeta_x(t) = y(t)/t via the minimal curve.
// Equals alpha up to the gelation time, strictly smaller after.
Vector total_mass(const WeightMatrix& v, const MassVector& alpha, double t);

// Second-moment matrix A(t) = D[alpha](I - t V D[alpha])^{-1}.
// Throws for t at or beyond the divergence time t_c = gelation_time.
Matrix second_moments(const WeightMatrix& v, const MassVector& alpha, double t);

// Truncated moment sum over n_x <= n_max of zeta_x(t) |x><x|.
Matrix second_moments_truncated(const WeightMatrix& v, const MassVector& alpha, int n_max,
                                double t);

}  // namespace vmcoal
