#pragma once

#include <vector>

#include "dprfs/common.hpp"
#include "dprfs/conjugate.hpp"
#include "dprfs/dp_sampler.hpp"
#include "dprfs/point_pattern.hpp"

namespace dprfs {

/// Finite Gaussian mixture: weights on the simplex and one Gaussian per
/// component.
struct GmmModel {
    std::vector<double> weights;
    std::vector<GaussianParams> components;

    int num_components() const { return static_cast<int>(weights.size()); }
};

struct GmmConfig {
    int max_iters = 200;
    double tol = 1e-8; // relative log-likelihood change
    std::uint64_t seed = 0;
    int restarts = 5;
};

struct GmmFit {
    GmmModel model;
    Mat responsibilities;                  // N x K, rows sum to 1
    std::vector<double> log_likelihoods;   // one entry per EM iteration
    int regularized_components = 0;        // ridge applications in the best run
};

/// EM for a K-component GMM with k-means++ seeding and multiple restarts;
/// the best restart by final log-likelihood wins. Collapsing components are
/// regularized with a ridge of 1e-6 times the data variance and reported.
GmmFit fit_gmm_em(const std::vector<Vec> &points, int k, const GmmConfig &config);

/// Hyperparameters for the vector-valued DP-GMM baseline (iGMM-style).
struct DpgmmHyper {
    NiwParams feature_prior;
    double concentration = 1.0;
    std::optional<GammaParams> concentration_hyperprior;
};

/// Collapsed Gibbs for a DP Gaussian mixture over individual vectors, with
/// CRP prior and Student-t predictives. Trace semantics match run_chain, with
/// assignments indexed by point.
ChainTrace fit_dpgmm_collapsed(const std::vector<Vec> &points,
                               const DpgmmHyper &hyper,
                               const ChainConfig &config);

/// NIW prior with pooled data moments, matching the DP-RFS defaults.
DpgmmHyper default_dpgmm_hyper(const std::vector<Vec> &points);

/// Concatenate the points of all patterns in input order; empty patterns
/// contribute nothing.
std::vector<Vec> pool_patterns(const std::vector<PointPattern> &data);

} // namespace dprfs
