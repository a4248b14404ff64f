#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "dprfs/common.hpp"
#include "dprfs/dp_sampler.hpp"
#include "dprfs/synth.hpp"

namespace dprfs {

/// Live-cluster count per recorded sweep.
std::vector<std::pair<int, int>> k_trace(const ChainTrace &trace);

/// Exact optimal one-to-one matching between predicted clusters and truth
/// labels, maximizing the total matched count over the contingency table.
struct PartitionMatching {
    std::vector<std::pair<std::int64_t, int>> pairs; // (pred cluster, truth label)
    long matched = 0;                                // observations covered
    double accuracy = 0.0;                           // matched / N
};

PartitionMatching best_matching(const std::vector<std::int64_t> &pred,
                                const std::vector<int> &truth);

/// Matched fraction under the optimal matching; invariant to relabeling of
/// either argument.
double partition_accuracy(const std::vector<std::int64_t> &pred,
                          const std::vector<int> &truth);

struct RateReportEntry {
    int component = 0;
    double true_rate = 0.0;
    std::optional<std::int64_t> matched_cluster;
    std::optional<double> estimated_rate;
    bool degenerate = false;
};

struct RateReport {
    std::vector<RateReportEntry> entries;          // one per truth component
    std::vector<std::int64_t> unmatched_clusters;  // inferred but unmatched
    std::vector<std::int64_t> flagged_clusters;    // degenerate flags
};

/// Pair each truth component with its matched cluster's posterior mean rate.
/// Unmatched components are reported as such, never dropped.
RateReport rate_report(const PosteriorSummary &summary, const StarConfig &truth,
                       const PartitionMatching &matching);

} // namespace dprfs
