#pragma once

#include <optional>
#include <vector>

#include "dprfs/common.hpp"
#include "dprfs/conjugate.hpp"

namespace dprfs {

/// Draw a Beta(a, b) variate from two gamma draws.
double sample_beta(double a, double b, Rng &rng);

/// Stick-breaking weights: v_k ~ Beta(1, eta), pi_k = v_k prod_{s<k}(1 - v_s),
/// truncated at T sticks. The residual 1 - sum pi_k equals prod (1 - v_s).
std::vector<double> sample_gem_weights(double eta, int truncation, Rng &rng);

/// Polya urn: the m-th draw is new from the base with probability
/// eta / (m - 1 + eta), otherwise a uniformly chosen previous value.
template <typename BaseSampler>
auto polya_urn_sample(int draws, double eta, BaseSampler &&base, Rng &rng)
    -> std::vector<decltype(base(rng))> {
    if (draws < 1)
        throw InputError("polya_urn_sample: draws must be >= 1");
    if (!(eta > 0.0))
        throw InputError("polya_urn_sample: eta must be positive");

    std::vector<decltype(base(rng))> values;
    values.reserve(static_cast<size_t>(draws));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int m = 1; m <= draws; ++m) {
        const double p_new = eta / (m - 1 + eta);
        if (m == 1 || unit(rng) < p_new) {
            values.push_back(base(rng));
        } else {
            std::uniform_int_distribution<size_t> pick(0, values.size() - 1);
            values.push_back(values[pick(rng)]);
        }
    }
    return values;
}

/// Resample the DP concentration given K live clusters and N observations via
/// the auxiliary-variable scheme: x ~ Beta(eta + 1, N), then eta from a
/// two-component gamma mixture with mixing odds
/// (a + K - 1) / (N (b - log x)). Identity when no hyperprior is given.
double sample_concentration(double eta, int num_clusters, int num_observations,
                            const std::optional<GammaParams> &hyperprior,
                            Rng &rng);

} // namespace dprfs
