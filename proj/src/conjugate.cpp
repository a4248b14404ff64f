#include "dprfs/conjugate.hpp"

#include <cmath>

namespace dprfs {

namespace {

constexpr double kLogPi = 1.1447298858494001741;

void check_dim(const SetSufficientStats &stats, const PointPattern &pattern) {
    if (!pattern.empty() && pattern.dim() != stats.dim())
        throw InputError("sufficient stats: pattern dimension mismatch");
}

} // namespace

void NiwParams::validate() const {
    const int d = dim();
    if (d < 1)
        throw InputError("NiwParams: dimension must be >= 1");
    if (!(mean_scale > 0.0))
        throw InputError("NiwParams: mean_scale must be positive");
    if (!(dof > d - 1.0))
        throw InputError("NiwParams: dof must exceed dim - 1");
    if (scale_matrix.rows() != d || scale_matrix.cols() != d)
        throw InputError("NiwParams: scale matrix shape mismatch");
    Eigen::LLT<Mat> llt(scale_matrix);
    if (llt.info() != Eigen::Success)
        throw InputError("NiwParams: scale matrix not SPD");
}

void stats_add_inplace(SetSufficientStats &stats, const PointPattern &pattern) {
    check_dim(stats, pattern);
    stats.num_sets += 1;
    stats.total_points += pattern.size();
    for (const Vec &x : pattern.points()) {
        stats.point_sum += x;
        stats.point_scatter += x * x.transpose();
    }
}

void stats_remove_inplace(SetSufficientStats &stats,
                          const PointPattern &pattern) {
    check_dim(stats, pattern);
    if (stats.num_sets < 1)
        throw std::logic_error("stats_remove: no sets to remove");
    stats.num_sets -= 1;
    stats.total_points -= pattern.size();
    for (const Vec &x : pattern.points()) {
        stats.point_sum -= x;
        stats.point_scatter -= x * x.transpose();
    }
}

SetSufficientStats stats_add(const SetSufficientStats &stats,
                             const PointPattern &pattern) {
    SetSufficientStats out = stats;
    stats_add_inplace(out, pattern);
    return out;
}

SetSufficientStats stats_remove(const SetSufficientStats &stats,
                                const PointPattern &pattern) {
    SetSufficientStats out = stats;
    stats_remove_inplace(out, pattern);
    return out;
}

GammaParams gamma_posterior(const GammaParams &prior,
                            const SetSufficientStats &stats) {
    return GammaParams{prior.shape + static_cast<double>(stats.total_points),
                       prior.rate + static_cast<double>(stats.num_sets)};
}

NiwParams niw_posterior(const NiwParams &prior, const SetSufficientStats &stats) {
    const double m = static_cast<double>(stats.total_points);
    if (m == 0.0)
        return prior;

    NiwParams post = prior;
    post.mean_scale = prior.mean_scale + m;
    post.dof = prior.dof + m;
    post.mean_loc = (prior.mean_scale * prior.mean_loc + stats.point_sum) /
                    post.mean_scale;

    const Vec mean = stats.point_sum / m;
    const Vec shift = mean - prior.mean_loc;
    post.scale_matrix =
        prior.scale_matrix + stats.point_scatter -
        stats.point_sum * stats.point_sum.transpose() / m +
        (prior.mean_scale * m / post.mean_scale) * shift * shift.transpose();
    return post;
}

double log_predictive_cardinality(const GammaParams &post, int n) {
    if (n < 0)
        throw InputError("log_predictive_cardinality: n must be nonnegative");
    return std::lgamma(post.shape + n) - std::lgamma(post.shape) +
           post.shape * std::log(post.rate) -
           (post.shape + n) * std::log(post.rate + 1.0);
}

double student_t_log_density(const Vec &x, const NiwParams &post) {
    const int d = post.dim();
    if (x.size() != d)
        throw InputError("student_t_log_density: dimension mismatch");

    const double dof = post.dof - d + 1.0;
    const double scale_factor = (post.mean_scale + 1.0) / (post.mean_scale * dof);

    Eigen::LLT<Mat> llt(post.scale_matrix);
    if (llt.info() != Eigen::Success)
        throw InputError("student_t_log_density: scale matrix not SPD");
    const Mat &L = llt.matrixLLT();
    double log_det_lambda = 0.0;
    for (int i = 0; i < d; ++i)
        log_det_lambda += 2.0 * std::log(L(i, i));
    // log det of Lambda * scale_factor
    const double log_det = log_det_lambda + d * std::log(scale_factor);

    Vec diff = x - post.mean_loc;
    llt.matrixL().solveInPlace(diff);
    const double quad = diff.squaredNorm() / scale_factor;

    return std::lgamma(0.5 * (dof + d)) - std::lgamma(0.5 * dof) -
           0.5 * d * (std::log(dof) + kLogPi) - 0.5 * log_det -
           0.5 * (dof + d) * std::log1p(quad / dof);
}

double log_marginal_points(const NiwParams &post, const PointPattern &pattern) {
    if (pattern.empty())
        return 0.0;
    if (pattern.dim() != post.dim())
        throw InputError("log_marginal_points: dimension mismatch");

    // Chain rule: each point is predicted from the posterior with all
    // previous points of the pattern folded in.
    NiwParams running = post;
    double log_marginal = 0.0;
    for (const Vec &x : pattern.points()) {
        log_marginal += student_t_log_density(x, running);
        const double kappa = running.mean_scale;
        const Vec diff = x - running.mean_loc;
        running.scale_matrix += (kappa / (kappa + 1.0)) * diff * diff.transpose();
        running.mean_loc = (kappa * running.mean_loc + x) / (kappa + 1.0);
        running.mean_scale = kappa + 1.0;
        running.dof += 1.0;
    }
    return log_marginal;
}

double log_predictive_set(const RfsPrior &prior, const SetSufficientStats &stats,
                          const PointPattern &pattern) {
    const GammaParams rate_post = gamma_posterior(prior.rate_prior, stats);
    const NiwParams feature_post = niw_posterior(prior.feature_prior, stats);
    return log_predictive_cardinality(rate_post, pattern.size()) +
           log_marginal_points(feature_post, pattern);
}

} // namespace dprfs
