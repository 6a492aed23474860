#include "vmcoal/linalg.hpp"

#include <cmath>
#include <vector>

namespace vmcoal {

const char* to_string(Region r) {
    switch (r) {
        case Region::Interior: return "Interior";
        case Region::Boundary: return "Boundary";
        case Region::Exterior: return "Exterior";
    }
    return "?";
}

namespace {

bool reaches_all(const Matrix& v, bool transpose) {
    const int k = static_cast<int>(v.rows());
    std::vector<char> seen(k, 0);
    std::vector<int> queue{0};
    seen[0] = 1;
    while (!queue.empty()) {
        int i = queue.back();
        queue.pop_back();
        for (int j = 0; j < k; ++j) {
            const double e = transpose ? v(j, i) : v(i, j);
            if (!seen[j] && e > 0.0) {
                seen[j] = 1;
                queue.push_back(j);
            }
        }
    }
    for (char c : seen)
        if (!c) return false;
    return true;
}

// Strong connectivity of the support digraph: everything reachable from
// vertex 0 and vertex 0 reachable from everything.
bool support_connected(const Matrix& v) { return reaches_all(v, false) && reaches_all(v, true); }

}  // namespace

WeightMatrix::WeightMatrix(Matrix v) : v_(std::move(v)) {
    if (v_.rows() == 0 || v_.rows() != v_.cols())
        throw validation_error("WeightMatrix: matrix must be square and nonempty");
    integer_valued_ = true;
    for (int i = 0; i < v_.rows(); ++i) {
        for (int j = 0; j < v_.cols(); ++j) {
            const double e = v_(i, j);
            if (!std::isfinite(e)) throw validation_error("WeightMatrix: nonfinite entry");
            if (e < 0.0) throw validation_error("WeightMatrix: negative entry");
            if (e != v_(j, i)) throw validation_error("WeightMatrix: not symmetric");
            if (e != std::floor(e)) integer_valued_ = false;
        }
    }
    if (!support_connected(v_))
        throw validation_error("WeightMatrix: support graph is not connected (reducible kernel)");
}

void require_mass_vector(const Vector& z, int k, const char* what) {
    if (z.size() != k) throw validation_error(std::string(what) + ": wrong length");
    for (int i = 0; i < k; ++i)
        if (!(z[i] > 0.0) || !std::isfinite(z[i]))
            throw validation_error(std::string(what) + ": entries must be positive and finite");
}

namespace {

struct PowerResult {
    double value = 0.0;
    Vector vec;
    double residual = 0.0;
    bool converged = false;
};

// Shifted power iteration on a nonnegative matrix.  The shift makes the
// dominant eigenvalue of M + sigma*I strictly dominant in modulus (the
// spectrum of M lies in [-rho, rho]), so bipartite-type period-2 modes decay.
PowerResult power_iterate(const Matrix& m, int max_iter) {
    const int k = static_cast<int>(m.rows());
    PowerResult out;
    out.vec = Vector::Ones(k) / std::sqrt(static_cast<double>(k));

    const double bound = m.cwiseAbs().rowwise().sum().maxCoeff();
    if (bound == 0.0) {
        out.converged = true;
        return out;  // zero matrix
    }
    const double sigma = 0.55 * bound;

    double lambda = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        Vector w = m * out.vec + sigma * out.vec;
        const double norm = w.norm();
        if (norm == 0.0) {  // nilpotent direction; restart positive
            out.vec = Vector::Ones(k) / std::sqrt(static_cast<double>(k));
            continue;
        }
        w /= norm;
        Vector mw = m * w;
        lambda = w.dot(mw);
        out.vec = w;
        out.residual = (mw - lambda * w).cwiseAbs().maxCoeff();
        if (out.residual <= kTolEig * std::max(1.0, std::abs(lambda))) {
            out.value = lambda;
            out.converged = true;
            return out;
        }
    }
    out.value = lambda;
    return out;
}

}  // namespace

double spectral_radius(const Matrix& m, int max_iter) {
    if (m.rows() == 0 || m.rows() != m.cols())
        throw validation_error("spectral_radius: matrix must be square and nonempty");
    if ((m.array() < 0.0).any())
        throw validation_error("spectral_radius: matrix must be nonnegative");

    PowerResult pr = power_iterate(m, max_iter);
    if (pr.converged) return std::max(0.0, pr.value);

    // Stalled: clustered leading eigenvalues.  Dense solve.
    if (m.isApprox(m.transpose())) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(m);
        return es.eigenvalues().cwiseAbs().maxCoeff();
    }
    Eigen::EigenSolver<Matrix> es(m);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

double spectral_radius(const WeightMatrix& v, const Vector& z) {
    require_mass_vector(z, v.dim(), "spectral_radius: z");
    const Vector r = z.cwiseSqrt();
    // D[sqrt z] V D[sqrt z] is symmetric and similar to V D[z].
    const Matrix s = r.asDiagonal() * v.mat() * r.asDiagonal();
    PowerResult pr = power_iterate(s, kMaxPowerIter);
    if (pr.converged) return std::max(0.0, pr.value);
    Eigen::SelfAdjointEigenSolver<Matrix> es(s);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

Vector perron_vector(const Matrix& m, int max_iter) {
    if (m.rows() == 0 || m.rows() != m.cols())
        throw validation_error("perron_vector: matrix must be square and nonempty");
    if ((m.array() < 0.0).any())
        throw validation_error("perron_vector: matrix must be nonnegative");
    if (!support_connected(m))
        throw validation_error("perron_vector: matrix must be irreducible");

    PowerResult pr = power_iterate(m, max_iter);
    Vector u = pr.vec.cwiseAbs();
    u /= u.maxCoeff();
    if (!pr.converged)
        throw convergence_error("perron_vector: power iteration did not converge", u, max_iter);
    return u;
}

Region classify_region(const WeightMatrix& v, const Vector& z) {
    const double rho = spectral_radius(v, z);
    if (rho < 1.0 - kTolRegion) return Region::Interior;
    if (rho > 1.0 + kTolRegion) return Region::Exterior;
    return Region::Boundary;
}

Matrix diag_scale(const Vector& x, const Matrix& m, Side side) {
    if (side == Side::Left) {
        if (x.size() != m.rows()) throw validation_error("diag_scale: x length != rows");
        return x.asDiagonal() * m;
    }
    if (x.size() != m.cols()) throw validation_error("diag_scale: x length != cols");
    return m * x.asDiagonal();
}

}  // namespace vmcoal
