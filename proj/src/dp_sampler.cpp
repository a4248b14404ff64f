#include "dprfs/dp_sampler.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

namespace dprfs {

namespace {

int data_dim(const std::vector<PointPattern> &data) {
    if (data.empty())
        throw InputError("data must be nonempty");
    const int d = data.front().dim();
    for (const PointPattern &pattern : data)
        if (pattern.dim() != d)
            throw InputError("data patterns must share one dimension");
    return d;
}

/// Pooled mean and covariance of every point across all patterns. Falls back
/// to identity covariance when there are fewer than two points.
void pooled_moments(const std::vector<PointPattern> &data, int d, Vec &mean,
                    Mat &cov) {
    long m = 0;
    Vec sum = Vec::Zero(d);
    Mat scatter = Mat::Zero(d, d);
    for (const PointPattern &pattern : data)
        for (const Vec &x : pattern.points()) {
            sum += x;
            scatter += x * x.transpose();
            ++m;
        }
    if (m == 0) {
        mean = Vec::Zero(d);
        cov = Mat::Identity(d, d);
        return;
    }
    mean = sum / static_cast<double>(m);
    if (m < 2) {
        cov = Mat::Identity(d, d);
        return;
    }
    cov = scatter / static_cast<double>(m) - mean * mean.transpose();
    // Guard against rank deficiency from degenerate data.
    cov += 1e-9 * cov.trace() / d * Mat::Identity(d, d);
    Eigen::LLT<Mat> llt(cov);
    if (llt.info() != Eigen::Success)
        cov = Mat::Identity(d, d);
}

double spectral_norm(const Mat &m) {
    Eigen::SelfAdjointEigenSolver<Mat> solver(m);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

} // namespace

std::vector<const SweepRecord *> ChainTrace::post_burn_in() const {
    std::vector<const SweepRecord *> out;
    for (const SweepRecord &record : records)
        if (record.sweep > burn_in)
            out.push_back(&record);
    return out;
}

std::vector<AssignmentOption> assignment_log_weights(const GibbsState &state,
                                                     const PointPattern &pattern,
                                                     const Hyperparams &hyper) {
    const RfsPrior prior = hyper.rfs_prior();

    std::vector<AssignmentOption> options;
    options.reserve(state.clusters.size() + 1);
    for (const auto &[id, cluster] : state.clusters) {
        if (cluster.member_count() < 1)
            throw std::logic_error(
                "assignment_log_weights: empty cluster still live");
        options.push_back(
            {id, std::log(static_cast<double>(cluster.member_count())) +
                     log_predictive_set(prior, cluster.stats, pattern)});
    }
    SetSufficientStats empty(prior.feature_prior.dim());
    options.push_back({kNewCluster,
                       std::log(state.concentration) +
                           log_predictive_set(prior, empty, pattern)});
    return options;
}

size_t sample_from_log_weights(const std::vector<AssignmentOption> &options,
                               Rng &rng) {
    if (options.empty())
        throw std::logic_error("sample_from_log_weights: no options");

    double max_log = options.front().log_weight;
    for (const AssignmentOption &option : options)
        max_log = std::max(max_log, option.log_weight);
    if (!std::isfinite(max_log))
        throw NumericalError("sample_from_log_weights: non-finite weights");

    double total = 0.0;
    for (const AssignmentOption &option : options)
        total += std::exp(option.log_weight - max_log);

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double u = unit(rng) * total;
    double cumulative = 0.0;
    for (size_t i = 0; i < options.size(); ++i) {
        cumulative += std::exp(options[i].log_weight - max_log);
        if (u <= cumulative)
            return i;
    }
    return options.size() - 1;
}

void gibbs_sweep(GibbsState &state, const std::vector<PointPattern> &data,
                 const Hyperparams &hyper, Rng &rng) {
    const int d = hyper.feature_prior.dim();
    for (size_t i = 0; i < data.size(); ++i) {
        // Downdate: remove the pattern and drop its cluster if emptied, so
        // NEW is always a distinct option.
        const ClusterId current = state.assignments[i];
        auto it = state.clusters.find(current);
        assert(it != state.clusters.end());
        stats_remove_inplace(it->second.stats, data[i]);
        if (it->second.member_count() == 0)
            state.clusters.erase(it);

        const std::vector<AssignmentOption> options =
            assignment_log_weights(state, data[i], hyper);
        const AssignmentOption &chosen = options[sample_from_log_weights(options, rng)];

        ClusterId target = chosen.cluster;
        if (target == kNewCluster) {
            target = state.next_id++;
            state.clusters.emplace(target, ClusterStats(d));
        }
        stats_add_inplace(state.clusters.at(target).stats, data[i]);
        state.assignments[i] = target;
    }
}

double data_log_likelihood(const GibbsState &state,
                           const std::vector<PointPattern> &data,
                           const Hyperparams &hyper) {
    const RfsPrior prior = hyper.rfs_prior();
    const int d = hyper.feature_prior.dim();

    std::map<ClusterId, SetSufficientStats> folded;
    double log_likelihood = 0.0;
    for (size_t i = 0; i < data.size(); ++i) {
        auto [it, inserted] =
            folded.try_emplace(state.assignments[i], SetSufficientStats(d));
        log_likelihood += log_predictive_set(prior, it->second, data[i]);
        stats_add_inplace(it->second, data[i]);
    }
    return log_likelihood;
}

ChainTrace run_chain(const std::vector<PointPattern> &data,
                     const Hyperparams &hyper, const ChainConfig &config) {
    const int d = data_dim(data);
    if (d != hyper.feature_prior.dim())
        throw InputError("run_chain: prior dimension does not match data");
    if (config.num_sweeps < 0)
        throw InputError("run_chain: num_sweeps must be nonnegative");

    Rng rng(config.seed);
    const int n = static_cast<int>(data.size());

    // All patterns start in a single cluster.
    GibbsState state;
    state.concentration = hyper.concentration;
    ClusterStats initial(d);
    for (const PointPattern &pattern : data)
        stats_add_inplace(initial.stats, pattern);
    const ClusterId first = state.next_id++;
    state.clusters.emplace(first, std::move(initial));
    state.assignments.assign(static_cast<size_t>(n), first);

    ChainTrace trace;
    trace.num_sweeps = config.num_sweeps;
    trace.burn_in = config.burn_in.value_or(config.num_sweeps / 10);

    const auto record = [&](int sweep) {
        const double log_likelihood = data_log_likelihood(state, data, hyper);
        if (!std::isfinite(log_likelihood))
            throw NumericalError("run_chain: non-finite log-likelihood");
        trace.records.push_back({sweep, state.live_clusters(), state.assignments,
                                 state.concentration, log_likelihood});
    };
    record(0);

    for (int sweep = 1; sweep <= config.num_sweeps; ++sweep) {
        gibbs_sweep(state, data, hyper, rng);
        if (config.resample_concentration)
            state.concentration =
                sample_concentration(state.concentration, state.live_clusters(),
                                     n, hyper.concentration_hyperprior, rng);
        record(sweep);
    }
    return trace;
}

int k_mode(const ChainTrace &trace) {
    std::map<int, int> counts;
    for (const SweepRecord *record : trace.post_burn_in())
        counts[record->num_clusters] += 1;
    if (counts.empty()) {
        // Only the initial record exists (e.g. zero sweeps).
        if (trace.records.empty())
            throw InputError("k_mode: empty trace");
        return trace.records.front().num_clusters;
    }
    int best_k = 0;
    int best_count = -1;
    for (const auto &[k, count] : counts)
        if (count > best_count) {
            best_k = k;
            best_count = count;
        }
    return best_k;
}

PosteriorSummary summarize(const ChainTrace &trace,
                           const std::vector<PointPattern> &data,
                           const Hyperparams &hyper,
                           const SummaryConfig &config) {
    if (trace.records.empty())
        throw InputError("summarize: empty trace");
    const int d = data_dim(data);

    const SweepRecord &final = trace.records.back();
    if (final.assignments.size() != data.size())
        throw InputError("summarize: trace does not match data");

    PosteriorSummary summary;
    summary.k_mode = k_mode(trace);
    summary.final_k = final.num_clusters;
    summary.final_concentration = final.concentration;

    Vec data_mean;
    Mat data_cov;
    pooled_moments(data, d, data_mean, data_cov);
    summary.degenerate_threshold = config.threshold_scale * spectral_norm(data_cov);

    std::map<ClusterId, SetSufficientStats> folded;
    for (size_t i = 0; i < data.size(); ++i) {
        auto [it, inserted] =
            folded.try_emplace(final.assignments[i], SetSufficientStats(d));
        stats_add_inplace(it->second, data[i]);
    }

    for (const auto &[id, stats] : folded) {
        const GammaParams rate_post = gamma_posterior(hyper.rate_prior, stats);
        const NiwParams feature_post = niw_posterior(hyper.feature_prior, stats);

        ClusterSummary cluster;
        cluster.id = id;
        cluster.members = stats.num_sets;
        cluster.points = stats.total_points;
        cluster.mean_rate = rate_post.mean();
        cluster.mean_location = feature_post.mean_loc;

        const double dof = feature_post.dof - d + 1.0;
        if (dof <= 2.0) {
            cluster.predictive_cov_norm =
                std::numeric_limits<double>::infinity();
            cluster.degenerate = true;
        } else {
            const Mat predictive_cov =
                feature_post.scale_matrix *
                ((feature_post.mean_scale + 1.0) /
                 (feature_post.mean_scale * (dof - 2.0)));
            cluster.predictive_cov_norm = spectral_norm(predictive_cov);
            cluster.degenerate =
                cluster.predictive_cov_norm > summary.degenerate_threshold;
        }
        summary.clusters.push_back(std::move(cluster));
    }
    std::sort(summary.clusters.begin(), summary.clusters.end(),
              [](const ClusterSummary &a, const ClusterSummary &b) {
                  if (a.members != b.members)
                      return a.members > b.members;
                  return a.id < b.id;
              });
    return summary;
}

Hyperparams default_hyperparams(const std::vector<PointPattern> &data) {
    const int d = data_dim(data);
    Vec mean;
    Mat cov;
    pooled_moments(data, d, mean, cov);

    Hyperparams hyper;
    hyper.rate_prior = GammaParams{1.0, 1.0};
    hyper.feature_prior =
        NiwParams{mean, 0.01, static_cast<double>(d) + 2.0, cov};
    hyper.concentration = 1.0;
    hyper.concentration_hyperprior = GammaParams{1.0, 1.0};
    return hyper;
}

} // namespace dprfs
