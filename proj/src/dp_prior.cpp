#include "dprfs/dp_prior.hpp"

#include <cmath>

namespace dprfs {

double sample_beta(double a, double b, Rng &rng) {
    std::gamma_distribution<double> ga(a, 1.0);
    std::gamma_distribution<double> gb(b, 1.0);
    const double x = ga(rng);
    const double y = gb(rng);
    return x / (x + y);
}

std::vector<double> sample_gem_weights(double eta, int truncation, Rng &rng) {
    if (truncation < 1)
        throw InputError("sample_gem_weights: truncation must be >= 1");
    if (!(eta > 0.0))
        throw InputError("sample_gem_weights: eta must be positive");

    std::vector<double> weights(static_cast<size_t>(truncation));
    double remaining = 1.0;
    for (int k = 0; k < truncation; ++k) {
        const double v = sample_beta(1.0, eta, rng);
        weights[static_cast<size_t>(k)] = v * remaining;
        remaining *= (1.0 - v);
    }
    return weights;
}

double sample_concentration(double eta, int num_clusters, int num_observations,
                            const std::optional<GammaParams> &hyperprior,
                            Rng &rng) {
    if (!hyperprior)
        return eta;
    if (num_clusters < 1 || num_observations < 1)
        throw InputError("sample_concentration: K and N must be >= 1");

    const double a = hyperprior->shape;
    const double b = hyperprior->rate;
    const double k = static_cast<double>(num_clusters);
    const double n = static_cast<double>(num_observations);

    const double x = sample_beta(eta + 1.0, n, rng);
    const double rate = b - std::log(x);

    const double odds = (a + k - 1.0) / (n * rate);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double shape = (unit(rng) < odds / (1.0 + odds)) ? a + k : a + k - 1.0;

    std::gamma_distribution<double> gamma(shape, 1.0 / rate);
    return gamma(rng);
}

} // namespace dprfs
