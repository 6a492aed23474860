#pragma once

#include <string>

#include "vmcoal/compositions.hpp"
#include "vmcoal/linalg.hpp"

namespace vmcoal {

enum class TreeMethod { Cofactor, RankOne, ClosedForm, BruteForce };

const char* to_string(TreeMethod m);

// Weighted spanning-tree count of the multipartite cluster graph K_x(V).
// value_log is the natural log (-inf for exactly zero); value is exp(value_log)
// and only meaningful while |value_log| < 700.
struct TreeEnumeratorReport {
    double value_log;
    double value;
    TreeMethod method;
};

using int128 = __int128;
std::string to_string(int128 v);

// True iff K_x(V) is connected, i.e. the enumerator is nonzero.
bool cluster_graph_connected(const WeightMatrix& v, const Composition& x);

// n_x by n_x Laplacian of K_x(V): vertices grouped by type in composition
// order; diagonal <e_i|V|x> - v_ii, off-diagonal -v_ij.  Rows sum to zero.
Matrix weighted_laplacian(const WeightMatrix& v, const Composition& x);

// Matrix-tree cofactor (-1)^{row+col} det of the (row,col) minor of L_x.
// Dispatches to the fraction-free integer path for integer V with n_x <= 12.
TreeEnumeratorReport enumerator_cofactor(const WeightMatrix& v, const Composition& x,
                                         int row = 0, int col = 0);

// det(L_x + |a><b|) / (<a|1><b|1>); entry sums of a and b must be nonzero.
// Defaults a = b = ones.
TreeEnumeratorReport enumerator_rank_one(const WeightMatrix& v, const Composition& x);
TreeEnumeratorReport enumerator_rank_one(const WeightMatrix& v, const Composition& x,
                                         const Vector& a, const Vector& b);

// Spanning-tree polynomial of the complete graph on support(x) with edge
// weights x_i x_j v_ij (the type-contracted graph).  Support size 1 -> 1.
double partition_tau(const WeightMatrix& v, const Composition& x);
double partition_tau_log(const WeightMatrix& v, const Composition& x);

// Product formula: tau * (Vx)^(x-1) / x^1, all factors restricted to
// support(x).  Log-space; safe for totals far beyond double range.
TreeEnumeratorReport enumerator_closed(const WeightMatrix& v, const Composition& x);

// Exhaustive sum over labeled trees (Prufer sequences).  Refuses n_x > 9.
TreeEnumeratorReport enumerator_brute_force(const WeightMatrix& v, const Composition& x);

// log S_x with S_x = T_x / x!; S is the coefficient sequence solving the
// quadratic convolution recursion with unit singletons.
double s_coefficient_log(const WeightMatrix& v, const Composition& x);

// Exact integer paths; require integer-valued V.
int128 tree_count_exact(const WeightMatrix& v, const Composition& x);        // Bareiss, n_x <= 12
int128 tree_count_exact(const WeightMatrix& v, const Composition& x, int row, int col);
int128 tree_count_brute_exact(const WeightMatrix& v, const Composition& x);  // Prufer, n_x <= 9

}  // namespace vmcoal
