#include "vmcoal/simulator.hpp"

#include <algorithm>
#include <cmath>

#include "vmcoal/threads.hpp"

namespace vmcoal {

namespace {

double comp_bilinear(const Matrix& v, const std::vector<int>& a, const std::vector<int>& b) {
    double s = 0.0;
    const int k = static_cast<int>(a.size());
    for (int i = 0; i < k; ++i) {
        if (a[i] == 0) continue;
        double row = 0.0;
        for (int j = 0; j < k; ++j) row += v(i, j) * b[j];
        s += a[i] * row;
    }
    return s;
}

}  // namespace

std::vector<long> ClusterState::mass(int k) const {
    std::vector<long> m(k, 0);
    for (const auto& [x, c] : counts)
        for (int i = 0; i < k; ++i) m[i] += c * x[i];
    return m;
}

long ClusterState::clusters() const {
    long c = 0;
    for (const auto& kv : counts) c += kv.second;
    return c;
}

MergeEngine::MergeEngine(const WeightMatrix& v, const std::vector<long>& type_counts, long n)
    : v_(v), n_(n), k_(v.dim()) {
    if (static_cast<int>(type_counts.size()) != k_)
        throw validation_error("MergeEngine: type_counts length mismatch");
    if (n <= 0) throw validation_error("MergeEngine: n must be positive");

    long total = 0;
    mass_.assign(k_, 0.0);
    cluster_of_.assign(k_, {});
    for (int i = 0; i < k_; ++i) {
        if (type_counts[i] < 0) throw validation_error("MergeEngine: negative count");
        total += type_counts[i];
        mass_[i] = static_cast<double>(type_counts[i]);
        cluster_of_[i].resize(type_counts[i]);
    }
    if (total == 0) throw validation_error("MergeEngine: no particles");

    comp_.reserve(total);
    members_.reserve(total);
    for (int i = 0; i < k_; ++i) {
        for (long p = 0; p < type_counts[i]; ++p) {
            const int slot = static_cast<int>(comp_.size());
            std::vector<int> x(k_, 0);
            x[i] = 1;
            comp_.push_back(std::move(x));
            members_.emplace_back(k_);
            members_[slot][i].push_back(static_cast<int>(p));
            cluster_of_[i][p] = slot;
        }
    }
    dead_.assign(comp_.size(), 0);
    alive_ = static_cast<int>(comp_.size());

    Vector m(k_);
    for (int i = 0; i < k_; ++i) m[i] = mass_[i];
    vm_ = v_.mat() * m;
    mvm_ = m.dot(vm_);
    stage_a_cum_.resize(k_);
    double acc = 0.0;
    for (int i = 0; i < k_; ++i) {
        acc += mass_[i] * vm_[i];
        stage_a_cum_[i] = acc;
    }

    q_ = 0.0;
    for (int i = 0; i < k_; ++i) q_ += v_(i, i) * mass_[i];  // singletons: <e_i|V|e_i>
}

double MergeEngine::total_rate() const {
    const double num = mvm_ - q_;
    return std::max(0.0, num) / (2.0 * static_cast<double>(n_));
}

int MergeEngine::sample_by_affinity(const Vector& w, Rng& rng) {
    // Type j with probability mass_[j] * w[j], then a uniform particle of
    // that type; the containing cluster comes out weighted by its j-mass.
    double total = 0.0;
    for (int j = 0; j < k_; ++j) total += mass_[j] * w[j];
    double u = rng.uniform() * total;
    int type = k_ - 1;
    for (int j = 0; j < k_; ++j) {
        u -= mass_[j] * w[j];
        if (u < 0.0) {
            type = j;
            break;
        }
    }
    while (mass_[type] == 0.0) --type;  // guard against an empty trailing type
    const long p = static_cast<long>(rng.below(static_cast<std::uint64_t>(mass_[type])));
    return cluster_of_[type][p];
}

std::pair<int, int> MergeEngine::sample_pair_direct(Rng& rng) {
    std::vector<int> live;
    live.reserve(alive_);
    for (int s = 0; s < slots(); ++s)
        if (!dead_[s]) live.push_back(s);

    double total = 0.0;
    for (size_t i = 0; i < live.size(); ++i)
        for (size_t j = i + 1; j < live.size(); ++j)
            total += comp_bilinear(v_.mat(), comp_[live[i]], comp_[live[j]]);
    if (total <= 0.0) throw convergence_error("MergeEngine: no positive-rate pair remains");

    double u = rng.uniform() * total;
    for (size_t i = 0; i < live.size(); ++i) {
        for (size_t j = i + 1; j < live.size(); ++j) {
            u -= comp_bilinear(v_.mat(), comp_[live[i]], comp_[live[j]]);
            if (u < 0.0) return {live[i], live[j]};
        }
    }
    return {live[live.size() - 2], live[live.size() - 1]};
}

std::pair<int, int> MergeEngine::sample_pair(Rng& rng) {
    if (alive_ < 2) throw validation_error("MergeEngine: fewer than two clusters");
    if (alive_ <= 32) return sample_pair_direct(rng);

    for (int attempt = 0; attempt < 100000; ++attempt) {
        // Stage A: cluster a ~ <x_a|V|m> (cumulative table is constant).
        double u = rng.uniform() * stage_a_cum_.back();
        int type = k_ - 1;
        for (int j = 0; j < k_; ++j) {
            if (u < stage_a_cum_[j]) {
                type = j;
                break;
            }
        }
        while (mass_[type] == 0.0) --type;
        const long p = static_cast<long>(rng.below(static_cast<std::uint64_t>(mass_[type])));
        const int a = cluster_of_[type][p];

        // Stage B: cluster b ~ <x_b|V|x_a>; a self-draw is rejected, which
        // leaves unordered pairs distributed as <x_a|V|x_b>.
        Vector xa(k_);
        for (int i = 0; i < k_; ++i) xa[i] = comp_[a][i];
        const Vector w = v_.mat() * xa;
        const int b = sample_by_affinity(w, rng);
        if (a != b) return {a, b};
    }
    return sample_pair_direct(rng);  // pathological rejection rate; exact fallback
}

void MergeEngine::merge(int a, int b) {
    if (a == b || dead_[a] || dead_[b]) throw validation_error("MergeEngine: bad merge pair");
    q_ += 2.0 * comp_bilinear(v_.mat(), comp_[a], comp_[b]);

    const auto size_of = [&](int s) {
        long t = 0;
        for (int i = 0; i < k_; ++i) t += comp_[s][i];
        return t;
    };
    int into = a, from = b;
    if (size_of(from) > size_of(into)) std::swap(into, from);
    else if (size_of(from) == size_of(into) && from < into) std::swap(into, from);

    for (int i = 0; i < k_; ++i) {
        for (int p : members_[from][i]) cluster_of_[i][p] = into;
        auto& dst = members_[into][i];
        auto& src = members_[from][i];
        dst.insert(dst.end(), src.begin(), src.end());
        src.clear();
        src.shrink_to_fit();
        comp_[into][i] += comp_[from][i];
    }
    dead_[from] = 1;
    --alive_;
    ++events_;
}

ClusterState MergeEngine::state() const {
    ClusterState st;
    for (int s = 0; s < slots(); ++s)
        if (!dead_[s]) ++st.counts[comp_[s]];
    return st;
}

double total_rate(const ClusterState& state, const WeightMatrix& v, long n) {
    if (n <= 0) throw validation_error("total_rate: n must be positive");
    const int k = v.dim();
    Vector m = Vector::Zero(k);
    double q = 0.0;
    for (const auto& [x, c] : state.counts) {
        if (static_cast<int>(x.size()) != k) throw validation_error("total_rate: bad composition");
        for (int i = 0; i < k; ++i) m[i] += static_cast<double>(c) * x[i];
        q += static_cast<double>(c) * comp_bilinear(v.mat(), x, x);
    }
    const double mvm = m.dot(v.mat() * m);
    const double identity = (mvm - q) / (2.0 * static_cast<double>(n));
    if (identity >= 0.0) return identity;

    // Cancellation pushed the identity negative; fall back to the direct
    // pairwise sum and insist the two agree to rounding.
    double direct = 0.0;
    for (auto it = state.counts.begin(); it != state.counts.end(); ++it) {
        const double ci = static_cast<double>(it->second);
        direct += 0.5 * ci * (ci - 1.0) * comp_bilinear(v.mat(), it->first, it->first);
        auto jt = it;
        for (++jt; jt != state.counts.end(); ++jt)
            direct += ci * static_cast<double>(jt->second) *
                      comp_bilinear(v.mat(), it->first, jt->first);
    }
    direct /= static_cast<double>(n);
    if (std::abs(direct - identity) > 1e-6 * std::max(1.0, std::abs(direct)))
        throw convergence_error("total_rate: identity and direct sums disagree");
    return direct;
}

namespace {

// One trajectory on RNG stream (cfg.seed, stream). Config is assumed valid.
SimTrajectory run_one(const SimConfig& cfg, std::uint64_t stream) {
    const int k = cfg.v.dim();
    std::vector<long> counts(k);
    for (int i = 0; i < k; ++i)
        counts[i] = std::llround(cfg.alpha[i] * static_cast<double>(cfg.n));

    MergeEngine eng(cfg.v, counts, cfg.n);
    Rng rng = Rng::stream(cfg.seed, stream);

    SimTrajectory traj;
    traj.n = cfg.n;
    traj.seed = cfg.seed;
    traj.initial_counts = counts;

    double t = 0.0;
    size_t ri = 0;
    while (eng.alive() > 1) {
        const double rate = eng.total_rate();
        if (rate <= 0.0) break;
        const double t_next = t + rng.exponential(rate);
        if (t_next > cfg.t_max) {
            t = cfg.t_max;
            break;
        }
        // Records strictly before the event time see the pre-event state; a
        // record at the event time sees the merged state (right continuity).
        while (ri < cfg.record_times.size() && cfg.record_times[ri] < t_next)
            traj.snapshots.push_back({cfg.record_times[ri++], eng.state()});
        const auto [a, b] = eng.sample_pair(rng);
        eng.merge(a, b);
        t = t_next;
    }
    while (ri < cfg.record_times.size())
        traj.snapshots.push_back({cfg.record_times[ri++], eng.state()});

    traj.final_time = t;
    traj.events = eng.events();
    return traj;
}

void validate_config(const SimConfig& cfg) {
    require_mass_vector(cfg.alpha, cfg.v.dim(), "simulate: alpha");
    if (cfg.n <= 0) throw validation_error("simulate: n must be positive");
    if (!(cfg.t_max >= 0.0)) throw validation_error("simulate: t_max must be >= 0");
    double prev = -1.0;
    for (double t : cfg.record_times) {
        if (!(t >= 0.0) || t > cfg.t_max)
            throw validation_error("simulate: record times must lie in [0, t_max]");
        if (t <= prev) throw validation_error("simulate: record times must be increasing");
        prev = t;
    }
}

}  // namespace

SimTrajectory simulate(const SimConfig& cfg) {
    validate_config(cfg);
    return run_one(cfg, 0);
}

double empirical_density(const SimTrajectory& traj, const Composition& x, double t) {
    if (traj.snapshots.empty()) throw validation_error("empirical_density: no snapshots");
    if (t < traj.snapshots.front().t - 1e-12)
        throw validation_error("empirical_density: t precedes the first record time");
    if (t > traj.snapshots.back().t + 1e-12)
        throw validation_error("empirical_density: t beyond the last recorded time");

    const Snapshot* last = &traj.snapshots.front();
    for (const auto& s : traj.snapshots) {
        if (s.t <= t + 1e-12) last = &s;
        else break;
    }
    const auto it = last->state.counts.find(x.parts());
    const long c = (it == last->state.counts.end()) ? 0 : it->second;
    return static_cast<double>(c) / static_cast<double>(traj.n);
}

EnsembleResult simulate_ensemble(const SimConfig& cfg, int replicas,
                                 const std::vector<std::pair<Composition, double>>& queries,
                                 int threads) {
    if (replicas < 2) throw validation_error("simulate_ensemble: need at least 2 replicas");
    validate_config(cfg);
    const int q = static_cast<int>(queries.size());
    Matrix samples(replicas, q);

    parallel_for(replicas, resolve_threads(threads), [&](int r) {
        const SimTrajectory traj = run_one(cfg, static_cast<std::uint64_t>(r));
        for (int c = 0; c < q; ++c)
            samples(r, c) = empirical_density(traj, queries[c].first, queries[c].second);
    });

    EnsembleResult out;
    out.replicas = replicas;
    out.mean.resize(q);
    out.se.resize(q);
    for (int c = 0; c < q; ++c) {
        const double mean = samples.col(c).mean();
        double ss = 0.0;
        for (int r = 0; r < replicas; ++r) ss += (samples(r, c) - mean) * (samples(r, c) - mean);
        out.mean[c] = mean;
        out.se[c] = std::sqrt(ss / (replicas - 1.0) / replicas);
    }
    return out;
}

}  // namespace vmcoal
