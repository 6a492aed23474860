#pragma once

#include <functional>

#include "vmcoal/linalg.hpp"

namespace vmcoal {

inline constexpr double kTolInv = 1e-10;          // residual target, natural units
inline constexpr double kNearBoundaryRho = 1.02;  // above this the fixed point is preferred

enum class InversionMethod { FixedPoint, OdeFlow, NewtonPolish };
const char* to_string(InversionMethod m);

struct InversionResult {
    Vector y;
    Region region_of_input;
    InversionMethod method;
    int iterations;
    double residual;  // max_j |y_j exp(-<e_j|V|y>) - u_j|
};

// Witness for an exterior z: eta in (0,1)^k with rho(V D[z o eta]) = 1, a
// shrink delta such that the flow potential stays positive at (1-delta) eta.
struct EtaCertificate {
    Vector eta;
    double delta;
    Vector f_value;  // flow_potential(z, (1-delta)*eta), componentwise > 0
};

// Forward map: psi(z)_j = z_j exp(-<e_j|V|z>).
Vector psi(const WeightMatrix& v, const Vector& z);

// f_z(xi) = log(xi) + V D[z](1 - xi).  Zero exactly at xi with z o xi a
// solution of the inversion problem for u = psi(z).
Vector flow_potential(const WeightMatrix& v, const Vector& z, const Vector& xi);

// Jacobian of F(x; z) = x - sum_j z_j exp(<e_j|V|x-z>) e_j:
// I - D[z_j exp(<e_j|V|x-z>)] V.
Matrix jacobian_F(const WeightMatrix& v, const Vector& x, const Vector& z);

struct FixedPointOptions {
    double tol = kTolInv;
    double rel_change = 1e-13;
    int max_iter = 100000;
    std::function<void(int, const Vector&)> on_iterate;  // called after each update
};

namespace detail {

struct FixedPointOutcome {
    Vector y;
    int iterations;
    double residual;
};

// Componentwise-minimal solution of y_j = u_j exp(<e_j|V|y>) by monotone
// iteration started at y = u.  Iterates are nondecreasing; violation of that
// or the iteration cap raises convergence_error (with the last iterate).
FixedPointOutcome solve_fixed_point(const WeightMatrix& v, const Vector& u,
                                    const FixedPointOptions& opts = {});

}  // namespace detail

// Critical-scaling certificate for exterior z, built by the monotone
// recursion eta <- 1/(1 + V D[z] (1 - eta)) seeded just below 1 along the
// Perron direction of V D[z].
EtaCertificate eta_fixed_point(const WeightMatrix& v, const Vector& z);

using OdeObserver = std::function<void(double t, const Vector& x)>;

struct OdeFlowOptions {
    double step = 1e-3;    // RK4 step; a half-step run cross-checks the result
    double ode_tol = 1e-9; // budget for the linear-decay identity along the flow
    bool polish = true;    // Newton cleanup if the endpoint misses kTolInv
    OdeObserver observer;  // observes the fine-step trajectory
};

// Integrates dx/dt = -D[x](I - V D[z o x])^{-1} f from x(0) = (1-delta) eta
// to t = 1 and returns y = z o x(1).  f_z(x(t)) decays linearly to zero.
InversionResult ode_flow_invert(const WeightMatrix& v, const Vector& z,
                                const EtaCertificate& cert, const OdeFlowOptions& opts = {});

// Minimal solution y of y_j exp(-<e_j|V|y>) = psi(z)_j.  Returns z itself
// when z is interior or boundary; otherwise solves, preferring the fixed
// point and routing near-boundary inputs through the ODE flow.
InversionResult invert_minimal(const WeightMatrix& v, const Vector& z);

// y(t) for the curve of initial condition alpha: identity up to the critical
// time 1/rho(V D[alpha]), strictly below alpha*t afterwards.
Vector minimal_curve(const WeightMatrix& v, const Vector& alpha, double t);

}  // namespace vmcoal
