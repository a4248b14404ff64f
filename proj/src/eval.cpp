#include "dprfs/eval.hpp"

#include <algorithm>
#include <map>

namespace dprfs {

std::vector<std::pair<int, int>> k_trace(const ChainTrace &trace) {
    if (trace.records.empty())
        throw InputError("k_trace: empty trace");
    std::vector<std::pair<int, int>> out;
    out.reserve(trace.records.size());
    for (const SweepRecord &record : trace.records)
        out.emplace_back(record.sweep, record.num_clusters);
    return out;
}

PartitionMatching best_matching(const std::vector<std::int64_t> &pred,
                                const std::vector<int> &truth) {
    if (pred.size() != truth.size())
        throw InputError("best_matching: length mismatch");
    if (pred.empty())
        throw InputError("best_matching: empty partitions");

    std::map<std::int64_t, int> pred_index;
    std::map<int, int> truth_index;
    for (std::int64_t p : pred)
        pred_index.emplace(p, static_cast<int>(pred_index.size()));
    for (int t : truth)
        truth_index.emplace(t, static_cast<int>(truth_index.size()));

    const int rows = static_cast<int>(pred_index.size());
    const int cols = static_cast<int>(truth_index.size());
    std::vector<std::vector<long>> table(
        static_cast<size_t>(rows), std::vector<long>(static_cast<size_t>(cols), 0));
    for (size_t i = 0; i < pred.size(); ++i)
        table[static_cast<size_t>(pred_index.at(pred[i]))]
             [static_cast<size_t>(truth_index.at(truth[i]))] += 1;

    // Exact assignment by bitmask DP over the smaller side; the tables here
    // are tiny (K at most a few dozen clusters would already be unusual).
    const bool transpose = rows > cols;
    const int small = transpose ? cols : rows;
    const int large = transpose ? rows : cols;
    if (small > 24)
        throw InputError("best_matching: contingency table too large");

    const auto cell = [&](int s, int l) {
        return transpose ? table[static_cast<size_t>(l)][static_cast<size_t>(s)]
                         : table[static_cast<size_t>(s)][static_cast<size_t>(l)];
    };

    const size_t masks = size_t{1} << small;
    std::vector<long> best(masks, -1);
    std::vector<int> pick(masks, -2);   // small-index matched per layer, -1 = skip
    std::vector<size_t> parent(masks, 0);
    best[0] = 0;

    // Process large-side items one at a time; mask = set of small-side items
    // already matched. Each large item matches at most one small item.
    for (int l = 0; l < large; ++l) {
        std::vector<long> next(masks, -1);
        std::vector<int> next_pick(masks, -2);
        std::vector<size_t> next_parent(masks, 0);
        for (size_t mask = 0; mask < masks; ++mask) {
            if (best[mask] < 0)
                continue;
            if (next[mask] < best[mask]) { // leave l unmatched
                next[mask] = best[mask];
                next_pick[mask] = -1;
                next_parent[mask] = mask;
            }
            for (int s = 0; s < small; ++s) {
                if (mask & (size_t{1} << s))
                    continue;
                const size_t to = mask | (size_t{1} << s);
                const long value = best[mask] + cell(s, l);
                if (value > next[to]) {
                    next[to] = value;
                    next_pick[to] = s;
                    next_parent[to] = mask;
                }
            }
        }
        best = std::move(next);
        // Record the decisions for this layer for backtracking.
        pick.insert(pick.end(), next_pick.begin(), next_pick.end());
        parent.insert(parent.end(), next_parent.begin(), next_parent.end());
    }

    size_t final_mask = 0;
    long final_value = -1;
    for (size_t mask = 0; mask < masks; ++mask)
        if (best[mask] > final_value) {
            final_value = best[mask];
            final_mask = mask;
        }

    // Backtrack through the per-layer decision tables.
    std::vector<std::pair<int, int>> small_large_pairs; // (small idx, large idx)
    size_t mask = final_mask;
    for (int l = large - 1; l >= 0; --l) {
        const size_t offset = masks * static_cast<size_t>(l + 1);
        const int s = pick[offset + mask];
        const size_t prev = parent[offset + mask];
        if (s >= 0)
            small_large_pairs.emplace_back(s, l);
        mask = prev;
    }

    std::vector<std::int64_t> pred_of(static_cast<size_t>(rows));
    for (const auto &[id, index] : pred_index)
        pred_of[static_cast<size_t>(index)] = id;
    std::vector<int> truth_of(static_cast<size_t>(cols));
    for (const auto &[label, index] : truth_index)
        truth_of[static_cast<size_t>(index)] = label;

    PartitionMatching matching;
    matching.matched = final_value;
    matching.accuracy = static_cast<double>(final_value) /
                        static_cast<double>(pred.size());
    for (const auto &[s, l] : small_large_pairs) {
        const int row = transpose ? l : s;
        const int col = transpose ? s : l;
        matching.pairs.emplace_back(pred_of[static_cast<size_t>(row)],
                                    truth_of[static_cast<size_t>(col)]);
    }
    std::sort(matching.pairs.begin(), matching.pairs.end(),
              [](const auto &a, const auto &b) { return a.second < b.second; });
    return matching;
}

double partition_accuracy(const std::vector<std::int64_t> &pred,
                          const std::vector<int> &truth) {
    return best_matching(pred, truth).accuracy;
}

RateReport rate_report(const PosteriorSummary &summary, const StarConfig &truth,
                       const PartitionMatching &matching) {
    if (summary.clusters.empty())
        throw InputError("rate_report: empty summary");

    std::map<int, std::int64_t> cluster_of_component;
    for (const auto &[cluster, label] : matching.pairs)
        cluster_of_component[label] = cluster;

    std::map<std::int64_t, const ClusterSummary *> by_id;
    for (const ClusterSummary &cluster : summary.clusters)
        by_id[cluster.id] = &cluster;

    RateReport report;
    for (int k = 0; k < StarConfig::kComponents; ++k) {
        RateReportEntry entry;
        entry.component = k;
        entry.true_rate = truth.component_rates[static_cast<size_t>(k)];
        auto it = cluster_of_component.find(k);
        if (it != cluster_of_component.end() && by_id.count(it->second)) {
            const ClusterSummary &cluster = *by_id.at(it->second);
            entry.matched_cluster = it->second;
            entry.estimated_rate = cluster.mean_rate;
            entry.degenerate = cluster.degenerate;
        }
        report.entries.push_back(entry);
    }

    for (const ClusterSummary &cluster : summary.clusters) {
        bool matched = false;
        for (const auto &[label, id] : cluster_of_component)
            if (id == cluster.id)
                matched = true;
        if (!matched)
            report.unmatched_clusters.push_back(cluster.id);
        if (cluster.degenerate)
            report.flagged_clusters.push_back(cluster.id);
    }
    return report;
}

} // namespace dprfs
