#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace vmcoal {

// Bad input: dimensions, signs, symmetry, irreducibility, out-of-range knobs.
struct validation_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// An iteration failed to meet its tolerance within its budget.
// Carries the last iterate so callers can inspect or restart.
struct convergence_error : std::runtime_error {
    Eigen::VectorXd last_iterate;
    int iterations = 0;

    explicit convergence_error(const std::string& msg) : std::runtime_error(msg) {}
    convergence_error(const std::string& msg, Eigen::VectorXd last, int iters)
        : std::runtime_error(msg), last_iterate(std::move(last)), iterations(iters) {}
};

}  // namespace vmcoal
