#pragma once

#include <stdexcept>
#include <vector>

#include "conceptseg/series.hpp"

namespace conceptseg {

struct WindowConfig {
    Index window_len = 20;
    Index stride = 10;
    NormalizeMode normalize = NormalizeMode::zscore_per_channel;
};

/// Sliding-window view of a series. Column j is window j flattened
/// time-major, channel-minor: entry (tau * d + ch) holds
/// series(start_j + tau, ch). m = window_len * d rows, one column per window.
struct WindowMatrix {
    Matrix data;                       // m x n
    std::vector<Index> window_starts;  // size n, strictly increasing by stride
    Index window_len = 0;
    Index channels = 0;

    Index dim() const { return data.rows(); }    // m
    Index count() const { return data.cols(); }  // n
};

inline WindowMatrix make_windows(const SeriesMatrix& series, const WindowConfig& cfg) {
    const Index t = series.steps();
    const Index d = series.channels();
    if (cfg.window_len < 1 || cfg.window_len > t)
        throw std::invalid_argument("window_len must be in [1, T]");
    if (cfg.stride < 1) throw std::invalid_argument("stride must be >= 1");

    const Index n = (t - cfg.window_len) / cfg.stride + 1;
    WindowMatrix w;
    w.window_len = cfg.window_len;
    w.channels = d;
    w.data.resize(cfg.window_len * d, n);
    w.window_starts.reserve(static_cast<std::size_t>(n));
    for (Index j = 0; j < n; ++j) {
        const Index start = j * cfg.stride;
        w.window_starts.push_back(start);
        for (Index tau = 0; tau < cfg.window_len; ++tau)
            for (Index ch = 0; ch < d; ++ch)
                w.data(tau * d + ch, j) = series.values(start + tau, ch);
    }
    return w;
}

}  // namespace conceptseg
