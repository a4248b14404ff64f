#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "dprfs/common.hpp"
#include "dprfs/conjugate.hpp"
#include "dprfs/dp_prior.hpp"
#include "dprfs/point_pattern.hpp"

namespace dprfs {

using ClusterId = std::int64_t;

/// Sentinel cluster id meaning "open a new cluster".
inline constexpr ClusterId kNewCluster = -1;

/// Everything the collapsed sampler conditions on: the conjugate prior, the
/// DP concentration, and (optionally) a Gamma hyperprior for resampling it.
struct Hyperparams {
    GammaParams rate_prior;
    NiwParams feature_prior;
    double concentration = 1.0;
    std::optional<GammaParams> concentration_hyperprior;

    RfsPrior rfs_prior() const { return RfsPrior{rate_prior, feature_prior}; }
};

/// Per-cluster sufficient statistics. member_count (n_k, in sets) is the
/// number of patterns assigned, which equals stats.num_sets by construction.
struct ClusterStats {
    SetSufficientStats stats;

    explicit ClusterStats(int dim) : stats(dim) {}

    long member_count() const { return stats.num_sets; }
};

/// Full sampler state: assignment vector, live cluster table, concentration.
/// Cluster ids are opaque and never reused within a chain.
struct GibbsState {
    std::vector<ClusterId> assignments;
    std::map<ClusterId, ClusterStats> clusters;
    double concentration = 1.0;
    ClusterId next_id = 0;

    int live_clusters() const { return static_cast<int>(clusters.size()); }
};

/// One unnormalized log weight of the conditional assignment distribution.
struct AssignmentOption {
    ClusterId cluster = kNewCluster;
    double log_weight = 0.0;
};

/// Per-sweep record: live cluster count, assignment snapshot, concentration,
/// and the collapsed log-likelihood of the data given the partition.
struct SweepRecord {
    int sweep = 0;
    int num_clusters = 0;
    std::vector<ClusterId> assignments;
    double concentration = 0.0;
    double log_likelihood = 0.0;
};

struct ChainTrace {
    int num_sweeps = 0;
    int burn_in = 0;
    std::vector<SweepRecord> records; // records[0] is the initial state

    /// Records with sweep > burn_in.
    std::vector<const SweepRecord *> post_burn_in() const;
};

struct ChainConfig {
    int num_sweeps = 500;
    std::optional<int> burn_in;       // default: num_sweeps / 10
    std::uint64_t seed = 0;
    bool resample_concentration = true;
};

/// Unnormalized log weights for reassigning `pattern`, which must already be
/// removed from the state: log n_k + log predictive under cluster k for each
/// live cluster (ascending id), then log eta + prior predictive for NEW.
std::vector<AssignmentOption> assignment_log_weights(const GibbsState &state,
                                                     const PointPattern &pattern,
                                                     const Hyperparams &hyper);

/// Draw an index from unnormalized log weights by max-shift exponentiation
/// and inverse CDF over the list order.
size_t sample_from_log_weights(const std::vector<AssignmentOption> &options,
                               Rng &rng);

/// One full scan: each assignment resampled once in index order, with
/// per-datum downdate and immediate removal of emptied clusters.
void gibbs_sweep(GibbsState &state, const std::vector<PointPattern> &data,
                 const Hyperparams &hyper, Rng &rng);

/// Collapsed log-likelihood of the data given the partition (mixture
/// parameters integrated out): sum over clusters of the sequential
/// predictive fold of their members.
double data_log_likelihood(const GibbsState &state,
                           const std::vector<PointPattern> &data,
                           const Hyperparams &hyper);

/// Run a chain from the all-in-one-cluster initialization, recording one
/// trace record per sweep plus the initial state.
ChainTrace run_chain(const std::vector<PointPattern> &data,
                     const Hyperparams &hyper, const ChainConfig &config);

/// Mode of the live-cluster count over post-burn-in records (smallest value
/// on ties).
int k_mode(const ChainTrace &trace);

struct ClusterSummary {
    ClusterId id = 0;
    long members = 0;
    long points = 0;
    double mean_rate = 0.0;      // posterior mean alpha_N / beta_N
    Vec mean_location;           // posterior mean mu_N
    double predictive_cov_norm = 0.0;
    bool degenerate = false;     // flagged, not dropped
};

struct PosteriorSummary {
    int k_mode = 0;
    int final_k = 0;
    double final_concentration = 0.0;
    double degenerate_threshold = 0.0;
    std::vector<ClusterSummary> clusters; // final sweep, descending member count
};

struct SummaryConfig {
    /// Clusters whose posterior predictive covariance spectral norm exceeds
    /// threshold_scale times the data covariance spectral norm are flagged.
    double threshold_scale = 1e6;
};

/// Summarize a finished chain: K mode over post-burn-in sweeps and, for the
/// final sweep's partition, per-cluster posterior means with degeneracy flags.
PosteriorSummary summarize(const ChainTrace &trace,
                           const std::vector<PointPattern> &data,
                           const Hyperparams &hyper,
                           const SummaryConfig &config = {});

/// Data-driven defaults: Gamma(1, 1) rate prior; NIW with the pooled point
/// mean and covariance, mean_scale 0.01, dof d + 2; concentration 1 with a
/// Gamma(1, 1) hyperprior.
Hyperparams default_hyperparams(const std::vector<PointPattern> &data);

} // namespace dprfs
