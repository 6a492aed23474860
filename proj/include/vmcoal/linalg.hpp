#pragma once

#include <Eigen/Dense>

#include "vmcoal/errors.hpp"

namespace vmcoal {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Strictly positive mass/concentration vector; validated at use sites.
using MassVector = Eigen::VectorXd;

inline constexpr double kTolEig = 1e-12;     // eigenvalue absolute tolerance
inline constexpr double kTolRegion = 1e-9;   // half-width of the boundary band around rho = 1
inline constexpr int kMaxPowerIter = 10000;

// Position of z relative to the critical surface rho(V D[z]) = 1.
enum class Region { Interior, Boundary, Exterior };

const char* to_string(Region r);

// Symmetric nonnegative interaction kernel between types.
// Irreducibility = connectivity of the support graph (edge i-j iff v_ij > 0,
// loops allowed), checked by BFS at construction and required.
class WeightMatrix {
  public:
    explicit WeightMatrix(Matrix v);

    int dim() const { return static_cast<int>(v_.rows()); }
    const Matrix& mat() const { return v_; }
    double operator()(int i, int j) const { return v_(i, j); }

    // True iff every entry is integral (enables exact determinant paths).
    bool integer_valued() const { return integer_valued_; }

  private:
    Matrix v_;
    bool integer_valued_;
};

void require_mass_vector(const Vector& z, int k, const char* what);

// Largest-modulus eigenvalue of a square nonnegative matrix.
// Power iteration (shifted, so period-2 oscillation cannot stall it) with a
// dense eigensolve fallback; |result - rho(M)| <= kTolEig * max(1, rho).
double spectral_radius(const Matrix& m, int max_iter = kMaxPowerIter);

// rho(V D[z]) through the symmetric similarity D[sqrt z] V D[sqrt z].
double spectral_radius(const WeightMatrix& v, const Vector& z);

// Positive eigenvector of an irreducible nonnegative matrix, scaled so the
// largest entry is 1.  Throws convergence_error (with the last iterate) if
// power iteration does not meet kTolEig within max_iter.
Vector perron_vector(const Matrix& m, int max_iter = kMaxPowerIter);

Region classify_region(const WeightMatrix& v, const Vector& z);

// D[x] * M (Left) or M * D[x] (Right).
enum class Side { Left, Right };
Matrix diag_scale(const Vector& x, const Matrix& m, Side side);

}  // namespace vmcoal
