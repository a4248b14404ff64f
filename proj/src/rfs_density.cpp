#include "dprfs/rfs_density.hpp"

#include <cmath>
#include <numbers>

namespace dprfs {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

void check_rate(double rate) {
    if (!(rate > 0.0) || !std::isfinite(rate))
        throw InputError("rate must be positive and finite");
}

} // namespace

double gaussian_log_density(const Vec &x, const GaussianParams &params) {
    const int d = params.dim();
    if (x.size() != d)
        throw InputError("gaussian_log_density: dimension mismatch");
    if (params.covariance.rows() != d || params.covariance.cols() != d)
        throw InputError("gaussian_log_density: covariance shape mismatch");

    Eigen::LLT<Mat> llt(params.covariance);
    if (llt.info() != Eigen::Success)
        throw InputError("gaussian_log_density: covariance not SPD");

    // log det from the Cholesky diagonal; quadratic form via triangular solve.
    const Mat &L = llt.matrixLLT();
    double log_det = 0.0;
    for (int i = 0; i < d; ++i)
        log_det += 2.0 * std::log(L(i, i));

    Vec diff = x - params.mean;
    llt.matrixL().solveInPlace(diff);
    const double quad = diff.squaredNorm();

    return -0.5 * (d * kLog2Pi + log_det + quad);
}

double log_cardinality_pmf(int n, double rate) {
    check_rate(rate);
    if (n < 0)
        throw InputError("log_cardinality_pmf: n must be nonnegative");
    return n * std::log(rate) - rate - std::lgamma(n + 1.0);
}

double log_poisson_rfs_density(const PointPattern &pattern,
                               const PoissonRfsParams &params) {
    check_rate(params.rate);
    if (!pattern.empty() && pattern.dim() != params.feature.dim())
        throw InputError("log_poisson_rfs_density: dimension mismatch");

    double log_density = -params.rate + pattern.size() * std::log(params.rate);
    for (const Vec &x : pattern.points())
        log_density += gaussian_log_density(x, params.feature);
    return log_density;
}

Vec sample_gaussian(const GaussianParams &params, Rng &rng) {
    const int d = params.dim();
    Eigen::LLT<Mat> llt(params.covariance);
    if (llt.info() != Eigen::Success)
        throw InputError("sample_gaussian: covariance not SPD");

    std::normal_distribution<double> unit(0.0, 1.0);
    Vec z(d);
    for (int i = 0; i < d; ++i)
        z(i) = unit(rng);
    return params.mean + llt.matrixL() * z;
}

PointPattern sample_poisson_rfs(const PoissonRfsParams &params, Rng &rng) {
    check_rate(params.rate);
    std::poisson_distribution<int> cardinality(params.rate);
    const int n = cardinality(rng);

    PointPattern pattern(params.feature.dim());
    for (int i = 0; i < n; ++i)
        pattern.add_point(sample_gaussian(params.feature, rng));
    return pattern;
}

} // namespace dprfs
