#pragma once

#include "dprfs/common.hpp"
#include "dprfs/point_pattern.hpp"

namespace dprfs {

/// Gamma(shape, rate) prior/posterior over the Poisson rate.
struct GammaParams {
    double shape = 1.0; // alpha
    double rate = 1.0;  // beta

    double mean() const { return shape / rate; }
};

/// Normal-Inverse-Wishart prior/posterior over the Gaussian feature
/// parameters: mean | cov ~ N(mean_loc, cov / mean_scale),
/// cov ~ InvWishart(scale_matrix, dof).
struct NiwParams {
    Vec mean_loc;       // mu0
    double mean_scale;  // kappa0 > 0
    double dof;         // nu0 > d - 1
    Mat scale_matrix;   // Lambda0, SPD

    int dim() const { return static_cast<int>(mean_loc.size()); }
    void validate() const;
};

/// The conjugate prior for a Poisson RFS with Gaussian features:
/// Gamma over the rate times NIW over the feature parameters.
struct RfsPrior {
    GammaParams rate_prior;
    NiwParams feature_prior;
};

/// Sufficient statistics of a collection of point patterns. Supports O(1)
/// up/downdates so the collapsed sampler can condition on all-but-one set.
struct SetSufficientStats {
    long num_sets = 0;     // N, number of patterns folded in
    long total_points = 0; // sum of cardinalities
    Vec point_sum;         // sum of points
    Mat point_scatter;     // sum of x x^T

    explicit SetSufficientStats(int dim)
        : point_sum(Vec::Zero(dim)), point_scatter(Mat::Zero(dim, dim)) {}

    int dim() const { return static_cast<int>(point_sum.size()); }
    bool empty() const { return num_sets == 0; }
};

/// Fold one pattern into the statistics.
SetSufficientStats stats_add(const SetSufficientStats &stats,
                             const PointPattern &pattern);

/// Inverse of stats_add; the pattern must have been added before.
SetSufficientStats stats_remove(const SetSufficientStats &stats,
                                const PointPattern &pattern);

/// In-place variants used on the sampler hot path.
void stats_add_inplace(SetSufficientStats &stats, const PointPattern &pattern);
void stats_remove_inplace(SetSufficientStats &stats,
                          const PointPattern &pattern);

/// Rate posterior: Gamma(alpha + total_points, beta + num_sets).
GammaParams gamma_posterior(const GammaParams &prior,
                            const SetSufficientStats &stats);

/// Standard NIW conjugate update from pooled point statistics. With zero
/// points the prior is returned unchanged.
NiwParams niw_posterior(const NiwParams &prior, const SetSufficientStats &stats);

/// Log of the cardinality bracket of the set predictive:
/// Gamma(alpha_N + n) beta_N^alpha_N / (Gamma(alpha_N) (beta_N + 1)^(alpha_N + n)).
double log_predictive_cardinality(const GammaParams &post, int n);

/// Single-point predictive under an NIW posterior: multivariate Student-t
/// with dof nu - d + 1, location mu, scale Lambda (kappa + 1) / (kappa (nu - d + 1)).
double student_t_log_density(const Vec &x, const NiwParams &post);

/// Log marginal of all points of a pattern under the NIW posterior, computed
/// as a chain of one-point Student-t predictives. Order-invariant; 0 for the
/// empty pattern.
double log_marginal_points(const NiwParams &post, const PointPattern &pattern);

/// Predictive likelihood of an unseen pattern given the patterns summarized
/// in `stats`: cardinality bracket times point marginal, both under the
/// updated posteriors. With empty stats this is the new-cluster likelihood.
double log_predictive_set(const RfsPrior &prior, const SetSufficientStats &stats,
                          const PointPattern &pattern);

} // namespace dprfs
