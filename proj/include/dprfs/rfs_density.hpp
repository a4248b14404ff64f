#pragma once

#include "dprfs/common.hpp"
#include "dprfs/point_pattern.hpp"

namespace dprfs {

/// log N(x | mean, covariance). Throws InputError on dimension mismatch or a
/// covariance that is not symmetric positive-definite.
double gaussian_log_density(const Vec &x, const GaussianParams &params);

/// log Poisson(n | rate) = n log(rate) - rate - log n!
double log_cardinality_pmf(int n, double rate);

/// Log density of a point pattern under a Poisson RFS with unit hyper-volume:
/// -rate + |X| log(rate) + sum_i log f(x_i). Permutation-invariant in X; the
/// empty pattern evaluates to -rate exactly.
double log_poisson_rfs_density(const PointPattern &pattern,
                               const PoissonRfsParams &params);

/// Draw a pattern: cardinality n ~ Poisson(rate), then n i.i.d. Gaussian
/// points.
PointPattern sample_poisson_rfs(const PoissonRfsParams &params, Rng &rng);

/// Draw one point from a Gaussian via the Cholesky factor of the covariance.
Vec sample_gaussian(const GaussianParams &params, Rng &rng);

} // namespace dprfs
