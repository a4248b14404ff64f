#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "dprfs/common.hpp"
#include "dprfs/point_pattern.hpp"

namespace dprfs {

/// Configuration of the five-component star benchmark: a dominant
/// large-variance component at the center and four sparse components at the
/// corners. Every field is configurable; the defaults put the corners inside
/// the dominant component's footprint so that only the cardinality separates
/// them from center-generated data.
struct StarConfig {
    static constexpr int kComponents = 5;

    int num_observations = 200;
    std::array<double, kComponents> component_weights{0.2, 0.2, 0.2, 0.2, 0.2};
    std::array<double, kComponents> component_rates{100.0, 0.5, 0.5, 0.5, 0.5};
    std::vector<Vec> component_means;        // kComponents d-vectors
    std::vector<Mat> component_covariances;  // kComponents SPD matrices
    std::uint64_t seed = 42;

    /// Star defaults in 2-D: center N(0, 25 I) with rate 100, corners
    /// N((+-10, +-10), I) with rate 0.5.
    static StarConfig defaults();

    int dim() const;
    void validate() const;
};

struct StarDataset {
    std::vector<PointPattern> data;
    std::vector<int> labels; // generating component per observation
};

/// Draw the benchmark: each observation picks a component by weight, then a
/// pattern from that component's Poisson RFS.
StarDataset generate_star(const StarConfig &config);

/// JSON Lines dataset: first line {"meta": {...}} with the full generating
/// config, then one {"label": k, "points": [[...], ...]} record per
/// observation. Labels may be absent (label -1 or datasets without truth).
void write_dataset(const std::string &path, const std::vector<PointPattern> &data,
                   const std::vector<int> &labels, const StarConfig &config);

struct LoadedDataset {
    std::vector<PointPattern> data;
    std::vector<int> labels; // empty when the file carries no labels
    StarConfig config;
    bool has_labels = false;
};

/// Parse a dataset file; throws InputError with the offending line number on
/// malformed input or inconsistent dimensions.
LoadedDataset read_dataset(const std::string &path);

} // namespace dprfs
