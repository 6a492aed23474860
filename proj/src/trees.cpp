#include "vmcoal/trees.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace vmcoal {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr int kBruteMax = 9;    // n^(n-2) trees; 9 is the largest sane exhaustive size
constexpr int kBareissMax = 12; // Hadamard bound of the minors stays within __int128

TreeEnumeratorReport make_report(double value_log, TreeMethod method) {
    return TreeEnumeratorReport{value_log, std::exp(value_log), method};
}

void require_composition(const WeightMatrix& v, const Composition& x, const char* what) {
    if (x.dim() != v.dim()) throw validation_error(std::string(what) + ": dimension mismatch");
}

}  // namespace

const char* to_string(TreeMethod m) {
    switch (m) {
        case TreeMethod::Cofactor: return "Cofactor";
        case TreeMethod::RankOne: return "RankOne";
        case TreeMethod::ClosedForm: return "ClosedForm";
        case TreeMethod::BruteForce: return "BruteForce";
    }
    return "?";
}

std::string to_string(int128 v) {
    if (v == 0) return "0";
    bool neg = v < 0;
    unsigned __int128 u = neg ? -static_cast<unsigned __int128>(v) : v;
    std::string s;
    while (u > 0) {
        s.push_back(static_cast<char>('0' + static_cast<int>(u % 10)));
        u /= 10;
    }
    if (neg) s.push_back('-');
    std::reverse(s.begin(), s.end());
    return s;
}

bool cluster_graph_connected(const WeightMatrix& v, const Composition& x) {
    require_composition(v, x, "cluster_graph_connected");
    const auto supp = x.support();
    if (supp.size() == 1) {
        int i = supp[0];
        return x[i] == 1 || v(i, i) > 0.0;
    }
    // BFS over support types; v_ij > 0 joins every vertex of i to every one of j.
    std::vector<char> seen(supp.size(), 0);
    std::vector<int> queue{0};
    seen[0] = 1;
    size_t found = 1;
    while (!queue.empty()) {
        int a = queue.back();
        queue.pop_back();
        for (size_t b = 0; b < supp.size(); ++b) {
            if (!seen[b] && v(supp[a], supp[b]) > 0.0) {
                seen[b] = 1;
                ++found;
                queue.push_back(static_cast<int>(b));
            }
        }
    }
    return found == supp.size();
}

Matrix weighted_laplacian(const WeightMatrix& v, const Composition& x) {
    require_composition(v, x, "weighted_laplacian");
    const int n = x.total();
    std::vector<int> type;
    type.reserve(n);
    for (int i = 0; i < x.dim(); ++i)
        for (int c = 0; c < x[i]; ++c) type.push_back(i);

    const Vector vx = v.mat() * x.as_vector();
    Matrix l(n, n);
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            if (a == b)
                l(a, b) = vx[type[a]] - v(type[a], type[a]);
            else
                l(a, b) = -v(type[a], type[b]);
        }
    }
    return l;
}

namespace {

double minor_det(const Matrix& m, int row, int col) {
    const int n = static_cast<int>(m.rows());
    Matrix sub(n - 1, n - 1);
    for (int a = 0, i = 0; a < n; ++a) {
        if (a == row) continue;
        for (int b = 0, j = 0; b < n; ++b) {
            if (b == col) continue;
            sub(i, j) = m(a, b);
            ++j;
        }
        ++i;
    }
    if (sub.rows() == 0) return 1.0;
    return sub.partialPivLu().determinant();
}

int128 bareiss_det(std::vector<std::vector<int128>> a) {
    const int n = static_cast<int>(a.size());
    if (n == 0) return 1;
    int128 prev = 1;
    int sign = 1;
    for (int c = 0; c + 1 < n; ++c) {
        if (a[c][c] == 0) {
            int p = -1;
            for (int r = c + 1; r < n; ++r) {
                if (a[r][c] != 0) {
                    p = r;
                    break;
                }
            }
            if (p < 0) return 0;
            std::swap(a[c], a[p]);
            sign = -sign;
        }
        for (int r = c + 1; r < n; ++r) {
            for (int col = c + 1; col < n; ++col) {
                // Fraction-free update; the division is exact.
                a[r][col] = (a[r][col] * a[c][c] - a[r][c] * a[c][col]) / prev;
            }
            a[r][c] = 0;
        }
        prev = a[c][c];
    }
    return sign * a[n - 1][n - 1];
}

// Sum over all labeled trees on n vertices of the product of edge weights.
// W is the vertex-pair weight table; Acc must hold the exact total.
template <typename Acc, typename Weight>
Acc prufer_total(const Weight (&w)[kBruteMax][kBruteMax], int n) {
    if (n == 1) return Acc(1);
    if (n == 2) return Acc(w[0][1]);

    const int m = n - 2;
    int seq[kBruteMax - 2] = {0};
    int deg[kBruteMax];
    Acc total = 0;
    while (true) {
        for (int i = 0; i < n; ++i) deg[i] = 1;
        for (int i = 0; i < m; ++i) ++deg[seq[i]];

        int ptr = 0;
        while (deg[ptr] != 1) ++ptr;
        int leaf = ptr;
        Acc prod = 1;
        for (int i = 0; i < m; ++i) {
            const int s = seq[i];
            prod *= w[leaf][s];
            if (prod == Acc(0)) break;
            if (--deg[s] == 1 && s < ptr) {
                leaf = s;
            } else {
                ++ptr;
                while (deg[ptr] != 1) ++ptr;
                leaf = ptr;
            }
        }
        if (prod != Acc(0)) total += prod * w[leaf][n - 1];

        int pos = 0;
        while (pos < m && seq[pos] == n - 1) seq[pos++] = 0;
        if (pos == m) break;
        ++seq[pos];
    }
    return total;
}

template <typename Acc, typename Weight>
Acc brute_force_total(const WeightMatrix& v, const Composition& x) {
    const int n = x.total();
    std::vector<int> type;
    for (int i = 0; i < x.dim(); ++i)
        for (int c = 0; c < x[i]; ++c) type.push_back(i);
    Weight w[kBruteMax][kBruteMax] = {};
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) w[a][b] = static_cast<Weight>(v(type[a], type[b]));
    return prufer_total<Acc, Weight>(w, n);
}

// Hadamard bound on every Bareiss intermediate must stay inside __int128.
bool bareiss_in_range(const Matrix& l) {
    const int m = static_cast<int>(l.rows()) - 1;
    if (m <= 0) return true;
    const double maxe = std::max(1.0, l.cwiseAbs().maxCoeff());
    return m * (0.5 * std::log(static_cast<double>(m)) + std::log(maxe)) < 87.0;
}

std::vector<std::vector<int128>> integer_minor(const WeightMatrix& v, const Composition& x,
                                               int row, int col) {
    const Matrix l = weighted_laplacian(v, x);
    const int n = static_cast<int>(l.rows());
    std::vector<std::vector<int128>> a;
    a.reserve(n - 1);
    for (int i = 0; i < n; ++i) {
        if (i == row) continue;
        std::vector<int128> r;
        r.reserve(n - 1);
        for (int j = 0; j < n; ++j) {
            if (j == col) continue;
            r.push_back(static_cast<int128>(std::llround(l(i, j))));
        }
        a.push_back(std::move(r));
    }
    return a;
}

}  // namespace

TreeEnumeratorReport enumerator_cofactor(const WeightMatrix& v, const Composition& x, int row,
                                         int col) {
    require_composition(v, x, "enumerator_cofactor");
    const int n = x.total();
    if (row < 0 || row >= n || col < 0 || col >= n)
        throw validation_error("enumerator_cofactor: minor index out of range");
    if (!cluster_graph_connected(v, x)) return {kNegInf, 0.0, TreeMethod::Cofactor};

    const Matrix l = weighted_laplacian(v, x);
    if (v.integer_valued() && n <= kBareissMax && bareiss_in_range(l)) {
        const int128 exact = tree_count_exact(v, x, row, col);
        const double val = static_cast<double>(exact);
        return {val > 0.0 ? std::log(val) : kNegInf, val, TreeMethod::Cofactor};
    }
    const double sign = ((row + col) % 2 == 0) ? 1.0 : -1.0;
    const double det = sign * minor_det(l, row, col);
    return {det > 0.0 ? std::log(det) : kNegInf, det, TreeMethod::Cofactor};
}

TreeEnumeratorReport enumerator_rank_one(const WeightMatrix& v, const Composition& x) {
    const Vector ones = Vector::Ones(x.total());
    return enumerator_rank_one(v, x, ones, ones);
}

TreeEnumeratorReport enumerator_rank_one(const WeightMatrix& v, const Composition& x,
                                         const Vector& a, const Vector& b) {
    require_composition(v, x, "enumerator_rank_one");
    const int n = x.total();
    if (a.size() != n || b.size() != n)
        throw validation_error("enumerator_rank_one: a and b must have length n_x");
    const double sa = a.sum(), sb = b.sum();
    if (sa == 0.0 || sb == 0.0)
        throw validation_error("enumerator_rank_one: entry sums of a and b must be nonzero");
    if (!cluster_graph_connected(v, x)) return {kNegInf, 0.0, TreeMethod::RankOne};

    const Matrix m = weighted_laplacian(v, x) + a * b.transpose();
    const double det = m.partialPivLu().determinant() / (sa * sb);
    return {det > 0.0 ? std::log(det) : kNegInf, det, TreeMethod::RankOne};
}

double partition_tau_log(const WeightMatrix& v, const Composition& x) {
    require_composition(v, x, "partition_tau");
    const auto supp = x.support();
    const int s = static_cast<int>(supp.size());
    if (s == 1) return 0.0;

    // Contracted-graph connectivity (within-partition weights are irrelevant here).
    {
        std::vector<char> seen(s, 0);
        std::vector<int> queue{0};
        seen[0] = 1;
        int found = 1;
        while (!queue.empty()) {
            int a = queue.back();
            queue.pop_back();
            for (int b = 0; b < s; ++b) {
                if (!seen[b] && a != b && v(supp[a], supp[b]) > 0.0) {
                    seen[b] = 1;
                    ++found;
                    queue.push_back(b);
                }
            }
        }
        if (found != s) return kNegInf;
    }

    Matrix l = Matrix::Zero(s, s);
    for (int a = 0; a < s; ++a) {
        for (int b = 0; b < s; ++b) {
            if (a == b) continue;
            const double w =
                static_cast<double>(x[supp[a]]) * static_cast<double>(x[supp[b]]) * v(supp[a], supp[b]);
            l(a, b) = -w;
            l(a, a) += w;
        }
    }
    const double det = minor_det(l, 0, 0);
    return det > 0.0 ? std::log(det) : kNegInf;
}

double partition_tau(const WeightMatrix& v, const Composition& x) {
    return std::exp(partition_tau_log(v, x));
}

TreeEnumeratorReport enumerator_closed(const WeightMatrix& v, const Composition& x) {
    require_composition(v, x, "enumerator_closed");
    if (!cluster_graph_connected(v, x)) return {kNegInf, 0.0, TreeMethod::ClosedForm};

    const Vector vx = v.mat() * x.as_vector();
    double lg = partition_tau_log(v, x);
    for (int i : x.support()) {
        if (x[i] > 1) {
            if (vx[i] <= 0.0) return {kNegInf, 0.0, TreeMethod::ClosedForm};
            lg += (x[i] - 1) * std::log(vx[i]);
        }
        lg -= std::log(static_cast<double>(x[i]));
    }
    return make_report(lg, TreeMethod::ClosedForm);
}

TreeEnumeratorReport enumerator_brute_force(const WeightMatrix& v, const Composition& x) {
    require_composition(v, x, "enumerator_brute_force");
    if (x.total() > kBruteMax)
        throw validation_error("enumerator_brute_force: n_x > 9 is not tractable exhaustively");
    if (!cluster_graph_connected(v, x)) return {kNegInf, 0.0, TreeMethod::BruteForce};

    if (v.integer_valued()) {
        const double val = static_cast<double>(tree_count_brute_exact(v, x));
        return {val > 0.0 ? std::log(val) : kNegInf, val, TreeMethod::BruteForce};
    }
    const double total = brute_force_total<double, double>(v, x);
    return {total > 0.0 ? std::log(total) : kNegInf, total, TreeMethod::BruteForce};
}

double s_coefficient_log(const WeightMatrix& v, const Composition& x) {
    return enumerator_closed(v, x).value_log - log_factorial(x);
}

int128 tree_count_exact(const WeightMatrix& v, const Composition& x, int row, int col) {
    require_composition(v, x, "tree_count_exact");
    if (!v.integer_valued())
        throw validation_error("tree_count_exact: V must be integer-valued");
    if (x.total() > kBareissMax)
        throw validation_error("tree_count_exact: n_x > 12 exceeds the exact-path bound");
    if (!bareiss_in_range(weighted_laplacian(v, x)))
        throw validation_error("tree_count_exact: entries too large for the 128-bit exact path");
    const int128 det = bareiss_det(integer_minor(v, x, row, col));
    return ((row + col) % 2 == 0) ? det : -det;
}

int128 tree_count_exact(const WeightMatrix& v, const Composition& x) {
    return tree_count_exact(v, x, 0, 0);
}

int128 tree_count_brute_exact(const WeightMatrix& v, const Composition& x) {
    require_composition(v, x, "tree_count_brute_exact");
    if (!v.integer_valued())
        throw validation_error("tree_count_brute_exact: V must be integer-valued");
    if (x.total() > kBruteMax)
        throw validation_error("tree_count_brute_exact: n_x > 9 is not tractable exhaustively");
    return brute_force_total<int128, long long>(v, x);
}

}  // namespace vmcoal
