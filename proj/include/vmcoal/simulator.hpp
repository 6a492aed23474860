#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "vmcoal/compositions.hpp"
#include "vmcoal/linalg.hpp"
#include "vmcoal/rng.hpp"

namespace vmcoal {

// Multiset of clusters keyed by composition.
struct ClusterState {
    std::map<std::vector<int>, long> counts;

    std::vector<long> mass(int k) const;  // per-type particle totals
    long clusters() const;
};

struct SimConfig {
    WeightMatrix v;
    MassVector alpha;
    long n = 1000;              // scale parameter; initial counts are alpha_i * n
    double t_max = 1.0;
    std::uint64_t seed = 1;
    std::vector<double> record_times;  // sorted, within [0, t_max]
};

struct Snapshot {
    double t;
    ClusterState state;
};

struct SimTrajectory {
    long n = 0;
    std::uint64_t seed = 0;
    std::vector<long> initial_counts;
    std::vector<Snapshot> snapshots;  // one per record time
    double final_time = 0.0;
    long events = 0;
};

// Pairwise merge dynamics: cluster pair {a,b} merges at rate <x_a|V|x_b>/n.
// Direct stochastic simulation; holding times from the aggregate-rate
// identity, pairs from two-stage type-mass-weighted sampling.
class MergeEngine {
  public:
    MergeEngine(const WeightMatrix& v, const std::vector<long>& type_counts, long n);

    int alive() const { return alive_; }
    long events() const { return events_; }
    double total_rate() const;  // (<m|V|m> - sum_c <x_c|V|x_c>) / (2n)

    // Slot ids of a merge pair, distribution proportional to <x_a|V|x_b>.
    std::pair<int, int> sample_pair(Rng& rng);
    void merge(int a, int b);

    const std::vector<int>& cluster(int slot) const { return comp_[slot]; }
    bool is_alive(int slot) const { return !dead_[slot]; }
    int slots() const { return static_cast<int>(comp_.size()); }
    ClusterState state() const;

  private:
    std::pair<int, int> sample_pair_direct(Rng& rng);
    int sample_by_affinity(const Vector& w, Rng& rng);  // cluster ~ <x|V-col weights>

    WeightMatrix v_;  // owned: engines outlive any caller-side temporary
    long n_;
    int k_;
    std::vector<std::vector<int>> comp_;                 // slot -> composition
    std::vector<std::vector<std::vector<int>>> members_; // slot -> type -> particle ids
    std::vector<std::vector<int>> cluster_of_;           // type -> particle -> slot
    std::vector<char> dead_;
    std::vector<double> mass_;       // per-type totals (constant)
    Vector vm_;                      // V * m
    std::vector<double> stage_a_cum_; // cumulative m_i (V m)_i
    double mvm_;                     // <m|V|m>
    double q_;                       // sum_c <x_c|V|x_c>, updated per merge
    int alive_ = 0;
    long events_ = 0;
};

// Aggregate rate of a cluster state; recomputes by direct pair summation
// (and cross-checks) if the identity form cancels to a negative value.
double total_rate(const ClusterState& state, const WeightMatrix& v, long n);

SimTrajectory simulate(const SimConfig& cfg);

// Count of clusters with composition x at the last snapshot <= t, over n.
double empirical_density(const SimTrajectory& traj, const Composition& x, double t);

// Per-query ensemble mean and standard error of empirical_density across
// replicas; replica r uses the RNG stream (cfg.seed, r).
struct EnsembleResult {
    std::vector<double> mean;
    std::vector<double> se;
    int replicas = 0;
};
EnsembleResult simulate_ensemble(const SimConfig& cfg, int replicas,
                                 const std::vector<std::pair<Composition, double>>& queries,
                                 int threads = 1);

}  // namespace vmcoal
