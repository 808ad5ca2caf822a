#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "conceptseg/selfexpr.hpp"

namespace conceptseg {

/// Per-gap transition scores; y[j] scores the gap between windows j and j+1.
struct BoundaryScores {
    Vector y;  // length n-1, entries >= 0
};

struct PeakConfig {
    Index min_distance = 2;      // minimum index gap between kept peaks
    double threshold_k = 2.0;    // peaks must exceed mean(y) + k * std(y)
};

struct Segment {
    Index first = 0;  // inclusive window range
    Index last = 0;
};

struct Segmentation {
    std::vector<Index> boundaries;       // cut j separates windows j and j+1
    std::vector<Segment> segments;       // tile [0, n-1]
    std::vector<Index> time_boundaries;  // filled by map_to_time
};

/// Column means of |Theta_s R|: the mean absolute change between the
/// self-representation coefficients of consecutive windows.
inline BoundaryScores boundary_scores(const SelfExprMatrix& theta, const Matrix& r) {
    if (theta.theta.cols() != r.rows())
        throw std::invalid_argument("boundary_scores: shape mismatch");
    const Matrix b = (theta.theta * r).cwiseAbs();
    BoundaryScores scores;
    scores.y = b.colwise().mean().transpose();
    return scores;
}

namespace detail {

inline std::vector<Segment> segments_from_boundaries(const std::vector<Index>& boundaries,
                                                     Index n) {
    std::vector<Segment> segments;
    Index first = 0;
    for (Index b : boundaries) {
        segments.push_back({first, b});
        first = b + 1;
    }
    segments.push_back({first, n - 1});
    return segments;
}

}  // namespace detail

/// Peak finding over the boundary scores. A gap j is a boundary when y[j] is
/// a strict local maximum (y[j] > y[j-1] and y[j] >= y[j+1], one-sided at the
/// edges), exceeds mean(y) + threshold_k * std(y) (population std), and
/// survives greedy minimum-distance suppression by descending score (ties
/// break toward the smaller index).
inline Segmentation find_peaks(const BoundaryScores& scores, const PeakConfig& cfg) {
    const Index len = scores.y.size();
    if (len < 1) throw std::invalid_argument("find_peaks: empty score vector");
    if (cfg.min_distance < 1) throw std::invalid_argument("find_peaks: min_distance must be >= 1");

    const Vector& y = scores.y;
    const double mean = y.mean();
    const double sd = std::sqrt((y.array() - mean).square().sum() / static_cast<double>(len));
    const double threshold = mean + cfg.threshold_k * sd;

    std::vector<Index> candidates;
    for (Index j = 0; j < len; ++j) {
        const bool left_ok = (j == 0) || y[j] > y[j - 1];
        const bool right_ok = (j == len - 1) || y[j] >= y[j + 1];
        if (left_ok && right_ok && y[j] > threshold) candidates.push_back(j);
    }
    std::sort(candidates.begin(), candidates.end(), [&](Index a, Index b) {
        if (y[a] != y[b]) return y[a] > y[b];
        return a < b;
    });

    std::vector<Index> kept;
    for (Index j : candidates) {
        const bool clear = std::none_of(kept.begin(), kept.end(), [&](Index k) {
            return std::abs(k - j) < cfg.min_distance;
        });
        if (clear) kept.push_back(j);
    }
    std::sort(kept.begin(), kept.end());

    Segmentation seg;
    seg.boundaries = std::move(kept);
    seg.segments = detail::segments_from_boundaries(seg.boundaries, len + 1);
    return seg;
}

/// Maps window-gap boundaries to time coordinates: the midpoint of the end
/// of window j and the start of window j+1, rounded down. With overlapping
/// windows the change time is ambiguous inside the overlap; the midpoint is
/// the neutral pick.
inline Segmentation map_to_time(Segmentation seg, const std::vector<Index>& window_starts,
                                Index window_len) {
    seg.time_boundaries.clear();
    seg.time_boundaries.reserve(seg.boundaries.size());
    for (Index j : seg.boundaries) {
        if (j + 1 >= static_cast<Index>(window_starts.size()))
            throw std::invalid_argument("map_to_time: boundary index out of range");
        const Index end_j = window_starts[static_cast<std::size_t>(j)] + window_len;
        const Index start_next = window_starts[static_cast<std::size_t>(j) + 1];
        seg.time_boundaries.push_back((end_j + start_next) / 2);
    }
    return seg;
}

}  // namespace conceptseg
