#include "vmcoal/inversion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace vmcoal {

const char* to_string(InversionMethod m) {
    switch (m) {
        case InversionMethod::FixedPoint: return "FixedPoint";
        case InversionMethod::OdeFlow: return "OdeFlow";
        case InversionMethod::NewtonPolish: return "NewtonPolish";
    }
    return "?";
}

Vector psi(const WeightMatrix& v, const Vector& z) {
    require_mass_vector(z, v.dim(), "psi: z");
    const Vector vz = v.mat() * z;
    return z.array() * (-vz.array()).exp();
}

Vector flow_potential(const WeightMatrix& v, const Vector& z, const Vector& xi) {
    require_mass_vector(z, v.dim(), "flow_potential: z");
    if (xi.size() != v.dim()) throw validation_error("flow_potential: xi length mismatch");
    const Vector scaled = z.array() * (1.0 - xi.array());
    return xi.array().log() + (v.mat() * scaled).array();
}

Matrix jacobian_F(const WeightMatrix& v, const Vector& x, const Vector& z) {
    require_mass_vector(z, v.dim(), "jacobian_F: z");
    if (x.size() != v.dim()) throw validation_error("jacobian_F: x length mismatch");
    const Vector e = (v.mat() * (x - z)).array().exp();
    const Vector d = z.array() * e.array();
    return Matrix::Identity(v.dim(), v.dim()) - d.asDiagonal() * v.mat();
}

namespace {

double inversion_residual(const WeightMatrix& v, const Vector& y, const Vector& u) {
    const Vector vy = v.mat() * y;
    return ((y.array() * (-vy.array()).exp()) - u.array()).abs().maxCoeff();
}

std::string vec_to_string(const Vector& z) {
    std::ostringstream os;
    os << "[";
    for (int i = 0; i < z.size(); ++i) os << (i ? ", " : "") << z[i];
    os << "]";
    return os.str();
}

// Enforce the result contract before handing it out.
InversionResult finalize(const WeightMatrix& v, InversionResult res) {
    if (res.residual > 10 * kTolInv)
        throw convergence_error("inversion: residual above tolerance, y = " +
                                    vec_to_string(res.y),
                                res.y, res.iterations);
    const double rho = spectral_radius(v, res.y);
    if (rho > 1.0 + 1e-6)
        throw convergence_error("inversion: solution not minimal, rho(V D[y]) = " +
                                    std::to_string(rho),
                                res.y, res.iterations);
    return res;
}

// Newton on F(x) = x - z o exp(V(x-z)); quadratic once close.
InversionResult newton_polish(const WeightMatrix& v, const Vector& z, const Vector& u,
                              InversionResult seed) {
    Vector x = seed.y;
    int iters = seed.iterations;
    double resid = seed.residual;
    for (int it = 0; it < 50 && resid > kTolInv; ++it) {
        const Vector e = (v.mat() * (x - z)).array().exp();
        const Vector f = x.array() - z.array() * e.array();
        const Matrix j = Matrix::Identity(v.dim(), v.dim()) -
                         Matrix((z.array() * e.array()).matrix().asDiagonal()) * v.mat();
        x -= j.partialPivLu().solve(f);
        ++iters;
        resid = inversion_residual(v, x, u);
    }
    return {x, seed.region_of_input, InversionMethod::NewtonPolish, iters, resid};
}

}  // namespace

namespace detail {

FixedPointOutcome solve_fixed_point(const WeightMatrix& v, const Vector& u,
                                    const FixedPointOptions& opts) {
    if (u.size() != v.dim()) throw validation_error("solve_fixed_point: u length mismatch");
    if ((u.array() <= 0.0).any())
        throw validation_error("solve_fixed_point: u must be positive");

    Vector y = u;
    Vector vy = v.mat() * y;
    for (int it = 1; it <= opts.max_iter; ++it) {
        const Vector next = u.array() * vy.array().exp();
        if (!next.allFinite())
            throw convergence_error(
                "solve_fixed_point: iterates diverged (u outside the attainable set), u = " +
                    vec_to_string(u),
                y, it);
        // Monotone from below; small slack for roundoff near the limit.
        if (((next.array() - y.array()) < -4e-15 * y.array().abs() - 1e-300).any())
            throw convergence_error(
                "solve_fixed_point: iteration lost monotonicity at u = " + vec_to_string(u), next,
                it);
        const double change = ((next - y).cwiseAbs().array() /
                               next.cwiseAbs().array().max(1e-300))
                                  .maxCoeff();
        y = next;
        vy = v.mat() * y;
        if (opts.on_iterate) opts.on_iterate(it, y);
        const double resid = ((y.array() * (-vy.array()).exp()) - u.array()).abs().maxCoeff();
        if (resid <= opts.tol || change <= opts.rel_change)
            return {y, it, resid};
    }
    throw convergence_error("solve_fixed_point: iteration cap reached at u = " + vec_to_string(u),
                            y, opts.max_iter);
}

}  // namespace detail

EtaCertificate eta_fixed_point(const WeightMatrix& v, const Vector& z) {
    require_mass_vector(z, v.dim(), "eta_fixed_point: z");
    const int k = v.dim();
    const double rho = spectral_radius(v, z);
    if (!(rho > 1.0 + kTolRegion))
        throw validation_error("eta_fixed_point: z must lie strictly outside the critical surface");

    const Matrix vdz = v.mat() * z.asDiagonal();
    const Vector u = perron_vector(vdz);

    // Seed w = eps*u with eps small enough that the first step already
    // decreases eta; halve until it does.
    double eps = 1e-3;
    Vector w;
    bool seeded = false;
    for (int h = 0; h < 80; ++h) {
        w = eps * u;
        const Vector eta0 = Vector::Ones(k) - w;
        const Vector eta1 = (1.0 + (vdz * w).array()).inverse();
        if ((eta1.array() < eta0.array()).all()) {
            seeded = true;
            break;
        }
        eps *= 0.5;
    }
    if (!seeded)
        throw convergence_error("eta_fixed_point: could not seed a decreasing recursion for z = " +
                                vec_to_string(z));

    Vector eta = Vector::Ones(k) - w;
    const int cap = 2000000;
    for (int it = 0; it < cap; ++it) {
        const Vector next = (1.0 + (vdz * w).array()).inverse();
        if ((next.array() > eta.array() * (1.0 + 4e-15)).any())
            throw convergence_error(
                "eta_fixed_point: recursion not monotone at z = " + vec_to_string(z), next, it);
        const double change = ((eta - next).cwiseAbs().array() / next.array()).maxCoeff();
        eta = next;
        w = Vector::Ones(k) - eta;
        if (change <= 1e-15) break;
        if (it + 1 == cap)
            throw convergence_error("eta_fixed_point: recursion cap reached for z = " +
                                        vec_to_string(z),
                                    eta, cap);
    }

    // Prefer the largest shrink with positive potential: rho(V D[z o x]) stays
    // <= 1 - delta along the flow, so a generous delta keeps the ODE far from
    // the resolvent singularity at the start.
    double delta = 0.4;
    for (int h = 0; h <= 40; ++h) {
        const Vector f = flow_potential(v, z, (1.0 - delta) * eta);
        if ((f.array() > 0.0).all()) return {eta, delta, f};
        if (h == 40) break;
        delta *= 0.5;
    }
    throw convergence_error("eta_fixed_point: no positive flow potential after 40 halvings, z = " +
                                vec_to_string(z),
                            eta, 40);
}

namespace {

// Below this step size the flow is declared numerically singular.
constexpr double kMinFlowStep = 1e-12;

// Half-step agreement cannot be measured below roundoff on x ~ 1, so the
// per-step budget is floored here instead of shrinking with h forever.
constexpr double kFlowErrFloor = 64 * std::numeric_limits<double>::epsilon();

struct FlowRun {
    Vector x;          // endpoint x(1)
    int steps;         // accepted RK4 steps
    double decay_err;  // worst |f_z(x(t)) - (1-t) f0| over accepted points
};

// Integrate dx/dt = -D[x](I - V D[z o x])^{-1} f0 from x0 at t = 0 to t = 1
// with classical RK4.  Every step is verified by Richardson step halving:
// one full step must agree with two half steps to within tol_per_unit * h,
// else the step is halved and retried.  The start point sits a shrink delta
// away from the critical surface, where the resolvent is O(1/delta) and the
// trajectory leaves through a square-root layer; local halving resolves the
// layer and the step grows back to base_step once the flow is smooth.  A
// step that cannot be certified above kMinFlowStep means (I - V D[z o x])
// is numerically singular.
FlowRun rk4_flow(const WeightMatrix& v, const Vector& z, const Vector& x0, const Vector& f0,
                 double base_step, double tol_per_unit, const OdeObserver& observer) {
    const int k = v.dim();
    const Matrix id = Matrix::Identity(k, k);
    const auto rhs = [&](const Vector& x) -> Vector {
        const Matrix m = id - v.mat() * (z.array() * x.array()).matrix().asDiagonal();
        const Vector s = m.partialPivLu().solve(f0);
        return -(x.array() * s.array());
    };
    const auto rk4_step = [&](const Vector& x, double h) -> Vector {
        const Vector k1 = rhs(x);
        const Vector k2 = rhs(x + 0.5 * h * k1);
        const Vector k3 = rhs(x + 0.5 * h * k2);
        const Vector k4 = rhs(x + h * k3);
        return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    };

    FlowRun run{x0, 0, 0.0};
    if (observer) observer(0.0, run.x);
    double t = 0.0;
    double h = base_step;
    long attempts = 0;
    while (t < 1.0) {
        if (++attempts > 50000000)
            throw convergence_error("rk4_flow: step acceptance stalled", run.x, run.steps);
        const bool last = h >= 1.0 - t;
        const double he = last ? 1.0 - t : h;
        const Vector full = rk4_step(run.x, he);
        const Vector half = rk4_step(rk4_step(run.x, 0.5 * he), 0.5 * he);
        const double err = (full - half).cwiseAbs().maxCoeff();
        const double budget = std::max(tol_per_unit * he, kFlowErrFloor);
        if (!(err <= budget)) {
            if (0.5 * he < kMinFlowStep)
                throw convergence_error(
                    "rk4_flow: (I - V D[z o x]) numerically singular, step halved below " +
                        std::to_string(kMinFlowStep),
                    run.x, run.steps);
            h = 0.5 * he;
            continue;
        }
        run.x = half;
        t = last ? 1.0 : t + he;
        ++run.steps;
        const Vector dev = flow_potential(v, z, run.x) - (1.0 - t) * f0;
        run.decay_err = std::max(run.decay_err, dev.cwiseAbs().maxCoeff());
        if (observer) observer(t, run.x);
        if (err <= budget / 64.0) h = std::min(2.0 * h, base_step);
    }
    return run;
}

}  // namespace

InversionResult ode_flow_invert(const WeightMatrix& v, const Vector& z, const EtaCertificate& cert,
                                const OdeFlowOptions& opts) {
    require_mass_vector(z, v.dim(), "ode_flow_invert: z");
    if (cert.eta.size() != v.dim())
        throw validation_error("ode_flow_invert: certificate dimension mismatch");
    if (!(opts.step > 0.0) || opts.step > 0.5)
        throw validation_error("ode_flow_invert: step must lie in (0, 0.5]");

    const Vector x0 = (1.0 - cert.delta) * cert.eta;
    const Vector f0 = flow_potential(v, z, x0);
    if ((f0.array() <= 0.0).any())
        throw validation_error("ode_flow_invert: certificate has nonpositive flow potential");

    // Per-unit-time error budget: accepted step errors sum to at most the
    // overall gate across [0, 1].
    const double gate = std::max(opts.ode_tol, 1e-12);
    const FlowRun run = rk4_flow(v, z, x0, f0, opts.step, gate, opts.observer);
    if (run.decay_err > 10 * opts.ode_tol)
        throw convergence_error("ode_flow_invert: linear decay violated, err = " +
                                    std::to_string(run.decay_err),
                                run.x, run.steps);

    const Vector u = psi(v, z);
    const Vector y = z.array() * run.x.array();
    InversionResult res{y, classify_region(v, z), InversionMethod::OdeFlow, run.steps,
                        inversion_residual(v, y, u)};
    if (res.residual > kTolInv && opts.polish) res = newton_polish(v, z, u, res);
    return finalize(v, res);
}

InversionResult invert_minimal(const WeightMatrix& v, const Vector& z) {
    require_mass_vector(z, v.dim(), "invert_minimal: z");
    const double rho = spectral_radius(v, z);
    const Region region = classify_region(v, z);

    if (region != Region::Exterior)
        return {z, region, InversionMethod::FixedPoint, 0, 0.0};

    if (rho <= kNearBoundaryRho) {
        // Fixed-point contraction degenerates as rho -> 1; take the flow.
        const EtaCertificate cert = eta_fixed_point(v, z);
        OdeFlowOptions opts;
        InversionResult res = ode_flow_invert(v, z, cert, opts);
        res.region_of_input = region;
        return res;
    }

    const Vector u = psi(v, z);
    try {
        const auto out = detail::solve_fixed_point(v, u, {});
        InversionResult res{out.y, region, InversionMethod::FixedPoint, out.iterations,
                            out.residual};
        if (res.residual > kTolInv) res = newton_polish(v, z, u, res);
        return finalize(v, res);
    } catch (const convergence_error&) {
        const EtaCertificate cert = eta_fixed_point(v, z);
        OdeFlowOptions opts;
        InversionResult res = ode_flow_invert(v, z, cert, opts);
        res.region_of_input = region;
        return res;
    }
}

Vector minimal_curve(const WeightMatrix& v, const Vector& alpha, double t) {
    require_mass_vector(alpha, v.dim(), "minimal_curve: alpha");
    if (t < 0.0 || !std::isfinite(t)) throw validation_error("minimal_curve: t must be >= 0");
    if (t == 0.0) return Vector::Zero(v.dim());
    return invert_minimal(v, Vector(alpha * t)).y;
}

}  // namespace vmcoal
