#include "dprfs/baselines.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

namespace dprfs {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

struct CholeskyComponent {
    Eigen::LLT<Mat> llt;
    double log_det = 0.0;
};

CholeskyComponent factor(const Mat &cov) {
    CholeskyComponent c{Eigen::LLT<Mat>(cov), 0.0};
    if (c.llt.info() != Eigen::Success)
        throw NumericalError("fit_gmm_em: covariance factorization failed");
    for (int i = 0; i < cov.rows(); ++i)
        c.log_det += 2.0 * std::log(c.llt.matrixLLT()(i, i));
    return c;
}

double log_normal(const Vec &x, const Vec &mean, const CholeskyComponent &c) {
    Vec diff = x - mean;
    c.llt.matrixL().solveInPlace(diff);
    return -0.5 * (x.size() * kLog2Pi + c.log_det + diff.squaredNorm());
}

/// k-means++ seeding: first center uniform, later ones proportional to the
/// squared distance to the nearest chosen center.
std::vector<Vec> kmeanspp_seeds(const std::vector<Vec> &points, int k, Rng &rng) {
    const size_t n = points.size();
    std::vector<Vec> centers;
    centers.reserve(static_cast<size_t>(k));

    std::uniform_int_distribution<size_t> uniform_index(0, n - 1);
    centers.push_back(points[uniform_index(rng)]);

    std::vector<double> dist2(n);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    while (centers.size() < static_cast<size_t>(k)) {
        double total = 0.0;
        for (size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (const Vec &c : centers)
                best = std::min(best, (points[i] - c).squaredNorm());
            dist2[i] = best;
            total += best;
        }
        size_t chosen = 0;
        if (total > 0.0) {
            const double u = unit(rng) * total;
            double cumulative = 0.0;
            for (size_t i = 0; i < n; ++i) {
                cumulative += dist2[i];
                if (u <= cumulative) {
                    chosen = i;
                    break;
                }
            }
        } else {
            chosen = uniform_index(rng); // all points coincide with a center
        }
        centers.push_back(points[chosen]);
    }
    return centers;
}

struct EmRun {
    GmmModel model;
    Mat responsibilities;
    std::vector<double> log_likelihoods;
    int regularized = 0;
};

EmRun run_em_once(const std::vector<Vec> &points, int k, const GmmConfig &config,
                  const Mat &data_cov, double ridge, Rng &rng) {
    const int n = static_cast<int>(points.size());
    const int d = static_cast<int>(points.front().size());

    EmRun run;
    run.model.weights.assign(static_cast<size_t>(k), 1.0 / k);
    const std::vector<Vec> seeds = kmeanspp_seeds(points, k, rng);
    for (int j = 0; j < k; ++j)
        run.model.components.push_back({seeds[static_cast<size_t>(j)], data_cov});
    run.responsibilities.resize(n, k);

    double previous = -std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < config.max_iters; ++iter) {
        // E step in log space.
        std::vector<CholeskyComponent> factors;
        factors.reserve(static_cast<size_t>(k));
        for (const GaussianParams &component : run.model.components)
            factors.push_back(factor(component.covariance));

        double log_likelihood = 0.0;
        for (int i = 0; i < n; ++i) {
            Vec logs(k);
            for (int j = 0; j < k; ++j)
                logs(j) =
                    std::log(run.model.weights[static_cast<size_t>(j)]) +
                    log_normal(points[static_cast<size_t>(i)],
                               run.model.components[static_cast<size_t>(j)].mean,
                               factors[static_cast<size_t>(j)]);
            const double max_log = logs.maxCoeff();
            const double lse = max_log + std::log((logs.array() - max_log).exp().sum());
            log_likelihood += lse;
            run.responsibilities.row(i) = (logs.array() - lse).exp();
        }
        run.log_likelihoods.push_back(log_likelihood);

        const bool converged =
            iter > 0 && std::abs(log_likelihood - previous) <=
                            config.tol * std::abs(previous);
        previous = log_likelihood;

        // M step.
        for (int j = 0; j < k; ++j) {
            const double nk = run.responsibilities.col(j).sum();
            GaussianParams &component = run.model.components[static_cast<size_t>(j)];
            run.model.weights[static_cast<size_t>(j)] = nk / n;
            if (nk < 1e-10) {
                // Collapsed to nothing: keep the mean, reset to a ridge ball.
                component.covariance = ridge * Mat::Identity(d, d);
                ++run.regularized;
                continue;
            }
            Vec mean = Vec::Zero(d);
            for (int i = 0; i < n; ++i)
                mean += run.responsibilities(i, j) * points[static_cast<size_t>(i)];
            mean /= nk;

            Mat cov = Mat::Zero(d, d);
            for (int i = 0; i < n; ++i) {
                const Vec diff = points[static_cast<size_t>(i)] - mean;
                cov += run.responsibilities(i, j) * diff * diff.transpose();
            }
            cov /= nk;

            Eigen::LLT<Mat> llt(cov);
            if (llt.info() != Eigen::Success) {
                cov += ridge * Mat::Identity(d, d);
                ++run.regularized;
            }
            component.mean = mean;
            component.covariance = cov;
        }
        if (converged)
            break;
    }
    return run;
}

} // namespace

GmmFit fit_gmm_em(const std::vector<Vec> &points, int k, const GmmConfig &config) {
    if (k < 1)
        throw InputError("fit_gmm_em: k must be >= 1");
    if (points.size() < static_cast<size_t>(k))
        throw InputError("fit_gmm_em: fewer points than components");
    const int d = static_cast<int>(points.front().size());
    for (const Vec &x : points)
        if (x.size() != d)
            throw InputError("fit_gmm_em: mixed point dimensions");

    const int n = static_cast<int>(points.size());
    Vec data_mean = Vec::Zero(d);
    for (const Vec &x : points)
        data_mean += x;
    data_mean /= n;
    Mat data_cov = Mat::Zero(d, d);
    for (const Vec &x : points) {
        const Vec diff = x - data_mean;
        data_cov += diff * diff.transpose();
    }
    data_cov /= std::max(1, n - 1);
    const double data_variance = std::max(data_cov.trace() / d, 1e-12);
    data_cov += 1e-9 * data_variance * Mat::Identity(d, d);
    const double ridge = 1e-6 * data_variance;

    GmmFit best;
    double best_final = -std::numeric_limits<double>::infinity();
    const int restarts = std::max(1, config.restarts);
    for (int r = 0; r < restarts; ++r) {
        Rng rng(config.seed + static_cast<std::uint64_t>(r));
        EmRun run = run_em_once(points, k, config, data_cov, ridge, rng);
        if (run.log_likelihoods.back() > best_final) {
            best_final = run.log_likelihoods.back();
            best = GmmFit{std::move(run.model), std::move(run.responsibilities),
                          std::move(run.log_likelihoods), run.regularized};
        }
    }
    return best;
}

std::vector<Vec> pool_patterns(const std::vector<PointPattern> &data) {
    int d = 0;
    for (const PointPattern &pattern : data) {
        if (d == 0)
            d = pattern.dim();
        else if (pattern.dim() != d)
            throw InputError("pool_patterns: mixed pattern dimensions");
    }
    std::vector<Vec> points;
    for (const PointPattern &pattern : data)
        for (const Vec &x : pattern.points())
            points.push_back(x);
    return points;
}

namespace {

/// One-point NIW fold, shared by the predictive chain and the state updates.
SetSufficientStats singleton_stats(const Vec &x) {
    SetSufficientStats stats(static_cast<int>(x.size()));
    stats.num_sets = 1;
    stats.total_points = 1;
    stats.point_sum = x;
    stats.point_scatter = x * x.transpose();
    return stats;
}

} // namespace

ChainTrace fit_dpgmm_collapsed(const std::vector<Vec> &points,
                               const DpgmmHyper &hyper,
                               const ChainConfig &config) {
    if (points.empty())
        throw InputError("fit_dpgmm_collapsed: points must be nonempty");
    const int d = hyper.feature_prior.dim();
    for (const Vec &x : points)
        if (x.size() != d)
            throw InputError("fit_dpgmm_collapsed: dimension mismatch");
    if (config.num_sweeps < 0)
        throw InputError("fit_dpgmm_collapsed: num_sweeps must be nonnegative");

    Rng rng(config.seed);
    const int n = static_cast<int>(points.size());
    const SetSufficientStats empty(d);

    GibbsState state;
    state.concentration = hyper.concentration;
    ClusterStats initial(d);
    for (const Vec &x : points)
        stats_add_inplace(initial.stats, PointPattern({x}));
    const ClusterId first = state.next_id++;
    state.clusters.emplace(first, std::move(initial));
    state.assignments.assign(static_cast<size_t>(n), first);

    const auto predictive = [&](const SetSufficientStats &stats, const Vec &x) {
        return student_t_log_density(x, niw_posterior(hyper.feature_prior, stats));
    };

    ChainTrace trace;
    trace.num_sweeps = config.num_sweeps;
    trace.burn_in = config.burn_in.value_or(config.num_sweeps / 10);

    const auto record = [&](int sweep) {
        std::map<ClusterId, SetSufficientStats> folded;
        double log_likelihood = 0.0;
        for (int i = 0; i < n; ++i) {
            auto [it, inserted] =
                folded.try_emplace(state.assignments[static_cast<size_t>(i)],
                                   SetSufficientStats(d));
            log_likelihood += predictive(it->second, points[static_cast<size_t>(i)]);
            stats_add_inplace(it->second, PointPattern({points[static_cast<size_t>(i)]}));
        }
        if (!std::isfinite(log_likelihood))
            throw NumericalError("fit_dpgmm_collapsed: non-finite log-likelihood");
        trace.records.push_back({sweep, state.live_clusters(), state.assignments,
                                 state.concentration, log_likelihood});
    };
    record(0);

    for (int sweep = 1; sweep <= config.num_sweeps; ++sweep) {
        for (int i = 0; i < n; ++i) {
            const PointPattern singleton({points[static_cast<size_t>(i)]});
            const ClusterId current = state.assignments[static_cast<size_t>(i)];
            auto it = state.clusters.find(current);
            assert(it != state.clusters.end());
            stats_remove_inplace(it->second.stats, singleton);
            if (it->second.member_count() == 0)
                state.clusters.erase(it);

            std::vector<AssignmentOption> options;
            options.reserve(state.clusters.size() + 1);
            for (const auto &[id, cluster] : state.clusters)
                options.push_back(
                    {id, std::log(static_cast<double>(cluster.member_count())) +
                             predictive(cluster.stats, points[static_cast<size_t>(i)])});
            options.push_back({kNewCluster,
                               std::log(state.concentration) +
                                   predictive(empty, points[static_cast<size_t>(i)])});

            const AssignmentOption &chosen =
                options[sample_from_log_weights(options, rng)];
            ClusterId target = chosen.cluster;
            if (target == kNewCluster) {
                target = state.next_id++;
                state.clusters.emplace(target, ClusterStats(d));
            }
            stats_add_inplace(state.clusters.at(target).stats, singleton);
            state.assignments[static_cast<size_t>(i)] = target;
        }
        if (config.resample_concentration)
            state.concentration =
                sample_concentration(state.concentration, state.live_clusters(),
                                     n, hyper.concentration_hyperprior, rng);
        record(sweep);
    }
    return trace;
}

DpgmmHyper default_dpgmm_hyper(const std::vector<Vec> &points) {
    if (points.empty())
        throw InputError("default_dpgmm_hyper: points must be nonempty");
    const int d = static_cast<int>(points.front().size());

    Vec mean = Vec::Zero(d);
    for (const Vec &x : points)
        mean += x;
    mean /= static_cast<double>(points.size());
    Mat cov = Mat::Zero(d, d);
    for (const Vec &x : points) {
        const Vec diff = x - mean;
        cov += diff * diff.transpose();
    }
    if (points.size() > 1)
        cov /= static_cast<double>(points.size());
    else
        cov = Mat::Identity(d, d);
    cov += 1e-9 * std::max(cov.trace() / d, 1.0) * Mat::Identity(d, d);
    Eigen::LLT<Mat> llt(cov);
    if (llt.info() != Eigen::Success)
        cov = Mat::Identity(d, d);

    DpgmmHyper hyper;
    hyper.feature_prior = NiwParams{mean, 0.01, static_cast<double>(d) + 2.0, cov};
    hyper.concentration = 1.0;
    hyper.concentration_hyperprior = GammaParams{1.0, 1.0};
    return hyper;
}

} // namespace dprfs
