#pragma once

#include <cstdint>
#include <vector>

#include "vmcoal/linalg.hpp"
#include "vmcoal/rng.hpp"

namespace vmcoal {

struct MstSeriesReport {
    double partial_sum = 0.0;
    int n_max = 0;          // size of the last shell included
    double last_shell = 0.0;
    bool tail_flag = false; // last shell fell below tail_tol
    std::vector<double> shell_sums;  // one entry per size 1..n_max
};

// Limit mean spanning-tree length as a graded series: the shell of size n
// contributes sum over |x| = n of (n-1)!/x! alpha^x T_x <x|V|alpha>^{-n}.
// Stops early once a shell drops below tail_tol.
MstSeriesReport mst_series(const WeightMatrix& v, const MassVector& alpha, int n_max,
                           double tail_tol = 1e-6, int threads = 1);

// One series term, log-space helper shared with the quadrature cross-check.
double mst_term_log(const WeightMatrix& v, const MassVector& alpha,
                    const std::vector<int>& x);

struct MstMonteCarlo {
    double mean = 0.0;
    double se = 0.0;
    std::vector<double> lengths;  // per replica
};

// Spanning-tree length of the complete multipartite graph on round(alpha_i n)
// vertices per type (within-type edges iff v_ii > 0) with independent edge
// lengths ~ Beta(1, v_ij), minimised exactly per replica.
MstMonteCarlo mst_monte_carlo(const WeightMatrix& v, const MassVector& alpha, long n,
                              int replicas, std::uint64_t seed, int threads = 1);

// Beta(1, v) draw on (0,1) by inverse transform.
double beta_edge_length(double v, Rng& rng);

// Predicted giant-component threshold 1/(n rho(V D[alpha])).
double percolation_threshold(const WeightMatrix& v, const MassVector& alpha, long n);

// Fraction of vertices in the largest component when pair (u,w) is open
// independently with probability 1 - (1-p)^{v_{type_u, type_w}}.
double largest_component_fraction(const WeightMatrix& v, const std::vector<long>& type_counts,
                                  double p, Rng& rng);

}  // namespace vmcoal
