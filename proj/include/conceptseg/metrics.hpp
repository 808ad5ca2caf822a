#pragma once

#include <algorithm>
#include <cstdlib>
#include <map>
#include <stdexcept>
#include <vector>

#include "conceptseg/detect.hpp"

namespace conceptseg {

struct F1Result {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Boundary F1 with a +-tolerance index window. Matching is greedy one-to-one
/// in ascending truth order; each truth boundary takes the nearest unmatched
/// prediction (ties toward the smaller prediction). Both sets empty scores 1,
/// exactly one empty scores 0.
inline F1Result boundary_f1(const std::vector<Index>& predicted, const std::vector<Index>& truth,
                            Index tolerance) {
    if (tolerance < 0) throw std::invalid_argument("boundary_f1: tolerance must be >= 0");
    std::vector<Index> pred = predicted;
    std::vector<Index> ref = truth;
    std::sort(pred.begin(), pred.end());
    std::sort(ref.begin(), ref.end());

    std::vector<bool> used(pred.size(), false);
    std::size_t matches = 0;
    for (Index t : ref) {
        std::size_t best = pred.size();
        Index best_dist = tolerance + 1;
        for (std::size_t i = 0; i < pred.size(); ++i) {
            if (used[i]) continue;
            const Index dist = std::abs(pred[i] - t);
            if (dist < best_dist) {  // strict: the earlier of equally near wins
                best_dist = dist;
                best = i;
            }
        }
        if (best != pred.size()) {
            used[best] = true;
            ++matches;
        }
    }

    F1Result out;
    const bool pred_empty = pred.empty();
    const bool ref_empty = ref.empty();
    out.precision = pred_empty ? (ref_empty ? 1.0 : 0.0)
                               : static_cast<double>(matches) / static_cast<double>(pred.size());
    out.recall = ref_empty ? (pred_empty ? 1.0 : 0.0)
                           : static_cast<double>(matches) / static_cast<double>(ref.size());
    out.f1 = (out.precision + out.recall > 0.0)
                 ? 2.0 * out.precision * out.recall / (out.precision + out.recall)
                 : 0.0;
    return out;
}

/// One label per window: windows inside segment i get label i.
inline std::vector<int> segment_labels(const Segmentation& seg, Index n) {
    std::vector<int> labels(static_cast<std::size_t>(n), 0);
    int label = 0;
    for (const Segment& s : seg.segments) {
        if (s.first < 0 || s.last >= n || s.first > s.last)
            throw std::invalid_argument("segment_labels: segmentation does not fit n windows");
        for (Index j = s.first; j <= s.last; ++j) labels[static_cast<std::size_t>(j)] = label;
        ++label;
    }
    return labels;
}

/// Pair-counting Adjusted Rand Index between two labelings of equal length.
/// 1 means identical up to relabeling; ~0 is chance level. Defined as 1 when
/// both partitions are trivial (max index equals expected index).
inline double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("adjusted_rand_index: length mismatch");
    const std::size_t n = a.size();
    if (n == 0) throw std::invalid_argument("adjusted_rand_index: empty labelings");

    std::map<std::pair<int, int>, long> contingency;
    std::map<int, long> row_sums, col_sums;
    for (std::size_t i = 0; i < n; ++i) {
        ++contingency[{a[i], b[i]}];
        ++row_sums[a[i]];
        ++col_sums[b[i]];
    }
    // x(x-1) is even, so every comb2 is an exact integer-valued double; the
    // ARI is formed with cleared denominators so small cases come out exact.
    auto comb2 = [](long x) { return 0.5 * static_cast<double>(x) * static_cast<double>(x - 1); };

    double index = 0.0;
    for (const auto& kv : contingency) index += comb2(kv.second);
    double sum_a = 0.0, sum_b = 0.0;
    for (const auto& kv : row_sums) sum_a += comb2(kv.second);
    for (const auto& kv : col_sums) sum_b += comb2(kv.second);

    const double total_pairs = comb2(static_cast<long>(n));
    if (total_pairs == 0.0) return 1.0;  // single point: trivially identical

    // (index - expected) / (max - expected), multiplied through by total_pairs
    const double numerator = index * total_pairs - sum_a * sum_b;
    const double denominator = 0.5 * (sum_a + sum_b) * total_pairs - sum_a * sum_b;
    if (denominator == 0.0) return 1.0;  // both partitions trivial
    return numerator / denominator;
}

}  // namespace conceptseg
