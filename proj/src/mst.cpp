#include "vmcoal/mst.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "vmcoal/compositions.hpp"
#include "vmcoal/threads.hpp"
#include "vmcoal/trees.hpp"

namespace vmcoal {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Dsu {
    std::vector<int> parent;
    std::vector<int> rank_;

    explicit Dsu(int n) : parent(n), rank_(n, 0) { std::iota(parent.begin(), parent.end(), 0); }

    int find(int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }

    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (rank_[a] < rank_[b]) std::swap(a, b);
        parent[b] = a;
        if (rank_[a] == rank_[b]) ++rank_[a];
        return true;
    }
};

std::vector<long> rounded_counts(const MassVector& alpha, long n) {
    std::vector<long> counts(alpha.size());
    for (int i = 0; i < alpha.size(); ++i)
        counts[i] = std::llround(alpha[i] * static_cast<double>(n));
    return counts;
}

}  // namespace

double mst_term_log(const WeightMatrix& v, const MassVector& alpha,
                    const std::vector<int>& x) {
    const Composition comp(x);
    const int n = comp.total();
    const double t_log = enumerator_closed(v, comp).value_log;
    if (t_log == kNegInf) return kNegInf;
    double alpha_log = 0.0;
    for (int i = 0; i < comp.dim(); ++i)
        if (x[i] > 0) alpha_log += x[i] * std::log(alpha[i]);
    const double lam = bilinear(v.mat(), comp, Vector(alpha));
    return std::lgamma(n) - log_factorial(comp) + alpha_log + t_log - n * std::log(lam);
}

MstSeriesReport mst_series(const WeightMatrix& v, const MassVector& alpha, int n_max,
                           double tail_tol, int threads) {
    require_mass_vector(alpha, v.dim(), "mst_series: alpha");
    if (n_max < 1) throw validation_error("mst_series: n_max must be >= 1");
    if (!(tail_tol > 0.0)) throw validation_error("mst_series: tail_tol must be positive");

    const int nthreads = resolve_threads(threads);
    MstSeriesReport rep;
    for (int n = 1; n <= n_max; ++n) {
        const auto shell = compositions_of(v.dim(), n);
        std::vector<double> terms(shell.size());
        parallel_for(static_cast<int>(shell.size()), nthreads, [&](int i) {
            const double tl = mst_term_log(v, alpha, shell[i].parts());
            terms[i] = (tl == kNegInf) ? 0.0 : std::exp(tl);
        });
        // Reduce in composition order so the sum is thread-count independent.
        const double shell_sum = std::accumulate(terms.begin(), terms.end(), 0.0);
        rep.partial_sum += shell_sum;
        rep.last_shell = shell_sum;
        rep.n_max = n;
        rep.shell_sums.push_back(shell_sum);
        if (n >= 2 && shell_sum < tail_tol) {
            rep.tail_flag = true;
            break;
        }
    }
    return rep;
}

double beta_edge_length(double v, Rng& rng) {
    if (!(v > 0.0)) throw validation_error("beta_edge_length: shape must be positive");
    // F(x) = 1 - (1-x)^v, so F^{-1}(u) = 1 - (1-u)^{1/v}.
    return 1.0 - std::pow(1.0 - rng.uniform(), 1.0 / v);
}

MstMonteCarlo mst_monte_carlo(const WeightMatrix& v, const MassVector& alpha, long n,
                              int replicas, std::uint64_t seed, int threads) {
    require_mass_vector(alpha, v.dim(), "mst_monte_carlo: alpha");
    if (replicas < 2) throw validation_error("mst_monte_carlo: need at least 2 replicas");
    const std::vector<long> counts = rounded_counts(alpha, n);
    long vertices = 0;
    for (long c : counts) vertices += c;
    if (vertices < 2) throw validation_error("mst_monte_carlo: fewer than 2 vertices");
    if (vertices > 50000) throw validation_error("mst_monte_carlo: vertex count above 5e4");
    if (vertices * (vertices - 1) / 2 > 200000000L)
        throw validation_error("mst_monte_carlo: dense edge list would exceed memory budget");

    std::vector<int> type_of;
    type_of.reserve(vertices);
    for (int i = 0; i < v.dim(); ++i)
        type_of.insert(type_of.end(), counts[i], i);

    MstMonteCarlo out;
    out.lengths.resize(replicas);
    const int nv = static_cast<int>(vertices);

    parallel_for(replicas, resolve_threads(threads), [&](int r) {
        Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(r));
        struct Edge {
            float len;
            int a, b;
        };
        std::vector<Edge> edges;
        edges.reserve(static_cast<size_t>(nv) * (nv - 1) / 2);
        for (int a = 0; a < nv; ++a) {
            for (int b = a + 1; b < nv; ++b) {
                const double w = v(type_of[a], type_of[b]);
                if (w <= 0.0) continue;
                edges.push_back({static_cast<float>(beta_edge_length(w, rng)), a, b});
            }
        }
        std::sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) {
            if (x.len != y.len) return x.len < y.len;
            if (x.a != y.a) return x.a < y.a;
            return x.b < y.b;
        });
        Dsu dsu(nv);
        double total = 0.0;
        int used = 0;
        for (const Edge& e : edges) {
            if (dsu.unite(e.a, e.b)) {
                total += e.len;
                if (++used == nv - 1) break;
            }
        }
        if (used != nv - 1)
            throw validation_error("mst_monte_carlo: host graph is disconnected");
        out.lengths[r] = total;
    });

    const double mean = std::accumulate(out.lengths.begin(), out.lengths.end(), 0.0) / replicas;
    double ss = 0.0;
    for (double x : out.lengths) ss += (x - mean) * (x - mean);
    out.mean = mean;
    out.se = std::sqrt(ss / (replicas - 1.0) / replicas);
    return out;
}

double percolation_threshold(const WeightMatrix& v, const MassVector& alpha, long n) {
    require_mass_vector(alpha, v.dim(), "percolation_threshold: alpha");
    if (n <= 0) throw validation_error("percolation_threshold: n must be positive");
    return 1.0 / (static_cast<double>(n) * spectral_radius(v, alpha));
}

double largest_component_fraction(const WeightMatrix& v, const std::vector<long>& type_counts,
                                  double p, Rng& rng) {
    if (static_cast<int>(type_counts.size()) != v.dim())
        throw validation_error("largest_component_fraction: count length mismatch");
    if (!(p >= 0.0 && p <= 1.0))
        throw validation_error("largest_component_fraction: p must lie in [0,1]");

    std::vector<long> offset(type_counts.size() + 1, 0);
    for (size_t i = 0; i < type_counts.size(); ++i) offset[i + 1] = offset[i] + type_counts[i];
    const long nv = offset.back();
    if (nv == 0) throw validation_error("largest_component_fraction: no vertices");
    Dsu dsu(static_cast<int>(nv));

    // Per type block the open probability is constant, so walk the block's
    // pair list with geometric jumps instead of testing every pair.
    for (int i = 0; i < v.dim(); ++i) {
        for (int j = i; j < v.dim(); ++j) {
            const double w = v(i, j);
            if (w <= 0.0 || p == 0.0) continue;
            const double q = -std::expm1(w * std::log1p(-p));  // 1 - (1-p)^w
            const long mi = type_counts[i];
            const long mj = type_counts[j];
            const long pairs = (i == j) ? mi * (mi - 1) / 2 : mi * mj;
            if (pairs == 0) continue;
            const double log1mq = std::log1p(-q);
            long idx = -1;
            while (true) {
                if (q >= 1.0) {
                    ++idx;
                } else {
                    const double jump = std::floor(std::log(rng.uniform_pos()) / log1mq);
                    if (jump > static_cast<double>(pairs)) break;
                    idx += 1 + static_cast<long>(jump);
                }
                if (idx >= pairs) break;
                long a, b;
                if (i != j) {
                    a = offset[i] + idx / mj;
                    b = offset[j] + idx % mj;
                } else {
                    // Triangular decode of pair index within one block.
                    const double m = static_cast<double>(mi);
                    long row = static_cast<long>(
                        std::floor(m - 0.5 - std::sqrt((m - 0.5) * (m - 0.5) - 2.0 * idx)));
                    auto row_start = [&](long rr) { return rr * mi - rr * (rr + 1) / 2; };
                    while (row > 0 && row_start(row) > idx) --row;
                    while (row_start(row + 1) <= idx) ++row;
                    a = offset[i] + row;
                    b = offset[i] + row + 1 + (idx - row_start(row));
                }
                dsu.unite(static_cast<int>(a), static_cast<int>(b));
            }
        }
    }

    std::vector<long> size(nv, 0);
    long best = 0;
    for (long u = 0; u < nv; ++u) {
        const int root = dsu.find(static_cast<int>(u));
        best = std::max(best, ++size[root]);
    }
    return static_cast<double>(best) / static_cast<double>(nv);
}

}  // namespace vmcoal
