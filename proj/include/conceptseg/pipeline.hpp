#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "conceptseg/detect.hpp"
#include "conceptseg/metrics.hpp"
#include "conceptseg/synth.hpp"
#include "conceptseg/train.hpp"
#include "conceptseg/version.hpp"

namespace conceptseg {

struct RunConfig {
    WindowConfig window;
    Hyperparams hp;
    PeakConfig peak;
};

struct RunMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double ari = 0.0;

    bool operator==(const RunMetrics&) const = default;
};

/// Everything one segmentation run produces, in serializable form.
struct RunResult {
    int schema_version = kSchemaVersion;
    std::string version = kVersion;
    std::uint64_t seed = 0;
    std::vector<Index> boundaries_window;
    std::vector<Index> boundaries_time;
    std::vector<double> scores;  // y, length n-1
    std::vector<EpochLoss> loss_history;
    LossTerms final_losses;
    RunConfig config;
    std::optional<RunMetrics> metrics;
};

/// run_segment also hands back the trained model and the window layout so
/// callers can dump theta or inspect latents.
struct SegmentOutput {
    RunResult result;
    TrainReport report;
    WindowMatrix windows;
};

/// One concept label per window. The window's majority label wins; ties go
/// to the tied label whose last occurrence inside the window is latest (the
/// newer regime on a straddled boundary).
inline std::vector<int> window_majority_labels(const std::vector<int>& step_labels,
                                               const std::vector<Index>& window_starts,
                                               Index window_len) {
    std::vector<int> out;
    out.reserve(window_starts.size());
    for (Index start : window_starts) {
        if (start + window_len > static_cast<Index>(step_labels.size()))
            throw std::invalid_argument("window_majority_labels: labels shorter than windows");
        std::map<int, std::pair<Index, Index>> stats;  // label -> (count, last index)
        for (Index t = start; t < start + window_len; ++t) {
            auto& entry = stats[step_labels[static_cast<std::size_t>(t)]];
            ++entry.first;
            entry.second = t;
        }
        int best_label = 0;
        Index best_count = -1, best_last = -1;
        for (const auto& kv : stats) {
            const auto [count, last] = kv.second;
            if (count > best_count || (count == best_count && last > best_last)) {
                best_label = kv.first;
                best_count = count;
                best_last = last;
            }
        }
        out.push_back(best_label);
    }
    return out;
}

inline std::vector<Index> boundaries_from_labels(const std::vector<int>& labels) {
    std::vector<Index> boundaries;
    for (std::size_t j = 0; j + 1 < labels.size(); ++j)
        if (labels[j + 1] != labels[j]) boundaries.push_back(static_cast<Index>(j));
    return boundaries;
}

/// Scores a predicted segmentation against per-window truth labels:
/// boundary F1 at the given window tolerance plus ARI between predicted
/// segment indices and the truth concept labels.
inline RunMetrics evaluate_segmentation(const Segmentation& seg,
                                        const std::vector<int>& truth_window_labels,
                                        Index tolerance) {
    const Index n = static_cast<Index>(truth_window_labels.size());
    const F1Result f1 =
        boundary_f1(seg.boundaries, boundaries_from_labels(truth_window_labels), tolerance);
    RunMetrics metrics;
    metrics.precision = f1.precision;
    metrics.recall = f1.recall;
    metrics.f1 = f1.f1;
    metrics.ari = adjusted_rand_index(segment_labels(seg, n), truth_window_labels);
    return metrics;
}

/// The full pipeline: normalize, window, fit, score, find peaks, map to time
/// coordinates. Pass per-time-step truth labels to get metrics in the result.
inline SegmentOutput run_segment(const SeriesMatrix& series, const RunConfig& cfg,
                                 const std::vector<int>* truth_step_labels = nullptr,
                                 Index tolerance = 2) {
    SegmentOutput out;
    const SeriesMatrix normalized = normalize(series, cfg.window.normalize);
    out.windows = make_windows(normalized, cfg.window);
    if (out.windows.count() < 2)
        throw std::invalid_argument("run_segment: need at least 2 windows; "
                                    "shorten window_len or provide a longer series");

    out.report = fit(out.windows.data, cfg.hp);

    const Matrix r = difference_matrix(out.windows.count());
    const BoundaryScores scores = boundary_scores(out.report.theta, r);
    Segmentation seg = find_peaks(scores, cfg.peak);
    seg = map_to_time(std::move(seg), out.windows.window_starts, out.windows.window_len);

    RunResult& res = out.result;
    res.seed = cfg.hp.seed;
    res.config = cfg;
    res.boundaries_window = seg.boundaries;
    res.boundaries_time = seg.time_boundaries;
    res.scores.assign(scores.y.data(), scores.y.data() + scores.y.size());
    res.loss_history = out.report.loss_history;
    if (!res.loss_history.empty()) {
        const EpochLoss& last = res.loss_history.back();
        res.final_losses = {last.recon, last.l1, last.selfexpr, last.smooth};
    }
    if (truth_step_labels != nullptr) {
        const std::vector<int> window_labels = window_majority_labels(
            *truth_step_labels, out.windows.window_starts, out.windows.window_len);
        res.metrics = evaluate_segmentation(seg, window_labels, tolerance);
    }
    return out;
}

// ---------------------------------------------------------------------------
// JSON wire formats
// ---------------------------------------------------------------------------

inline nlohmann::json to_json(const RunConfig& cfg) {
    return {
        {"window_len", cfg.window.window_len},
        {"stride", cfg.window.stride},
        {"normalize", cfg.window.normalize == NormalizeMode::zscore_per_channel ? "zscore" : "none"},
        {"lambda1", cfg.hp.lambda1},
        {"lambda2", cfg.hp.lambda2},
        {"lambda3", cfg.hp.lambda3},
        {"learning_rate", cfg.hp.learning_rate},
        {"epochs", cfg.hp.epochs},
        {"pretrain_epochs", cfg.hp.pretrain_epochs},
        {"latent_dim", cfg.hp.latent_dim},
        {"hidden", cfg.hp.hidden},
        {"activation", cfg.hp.activation == Activation::tanh ? "tanh" : "relu"},
        {"l12_epsilon", cfg.hp.l12_epsilon},
        {"zero_diagonal", cfg.hp.zero_diagonal},
        {"peak_threshold_k", cfg.peak.threshold_k},
        {"peak_min_distance", cfg.peak.min_distance},
    };
}

inline RunConfig run_config_from_json(const nlohmann::json& j) {
    RunConfig cfg;
    cfg.window.window_len = j.at("window_len").get<Index>();
    cfg.window.stride = j.at("stride").get<Index>();
    cfg.window.normalize = j.at("normalize").get<std::string>() == "zscore"
                               ? NormalizeMode::zscore_per_channel
                               : NormalizeMode::none;
    cfg.hp.lambda1 = j.at("lambda1").get<double>();
    cfg.hp.lambda2 = j.at("lambda2").get<double>();
    cfg.hp.lambda3 = j.at("lambda3").get<double>();
    cfg.hp.learning_rate = j.at("learning_rate").get<double>();
    cfg.hp.epochs = j.at("epochs").get<int>();
    cfg.hp.pretrain_epochs = j.at("pretrain_epochs").get<int>();
    cfg.hp.latent_dim = j.at("latent_dim").get<Index>();
    cfg.hp.hidden = j.at("hidden").get<std::vector<Index>>();
    cfg.hp.activation =
        j.at("activation").get<std::string>() == "tanh" ? Activation::tanh : Activation::relu;
    cfg.hp.l12_epsilon = j.at("l12_epsilon").get<double>();
    cfg.hp.zero_diagonal = j.at("zero_diagonal").get<bool>();
    cfg.peak.threshold_k = j.at("peak_threshold_k").get<double>();
    cfg.peak.min_distance = j.at("peak_min_distance").get<Index>();
    return cfg;
}

inline nlohmann::json to_json(const RunResult& res) {
    nlohmann::json j;
    j["schema_version"] = res.schema_version;
    j["version"] = res.version;
    j["seed"] = res.seed;
    j["boundaries_window"] = res.boundaries_window;
    j["boundaries_time"] = res.boundaries_time;
    j["scores"] = res.scores;
    nlohmann::json history = nlohmann::json::array();
    for (const EpochLoss& e : res.loss_history)
        history.push_back({{"total", e.total},
                           {"recon", e.recon},
                           {"l1", e.l1},
                           {"selfexpr", e.selfexpr},
                           {"smooth", e.smooth}});
    j["loss_history"] = std::move(history);
    j["final_losses"] = {{"recon", res.final_losses.recon},
                         {"l1", res.final_losses.l1},
                         {"selfexpr", res.final_losses.selfexpr},
                         {"smooth", res.final_losses.smooth}};
    j["config"] = to_json(res.config);
    if (res.metrics) {
        j["metrics"] = {{"precision", res.metrics->precision},
                        {"recall", res.metrics->recall},
                        {"f1", res.metrics->f1},
                        {"ari", res.metrics->ari}};
    }
    return j;
}

inline RunResult run_result_from_json(const nlohmann::json& j) {
    RunResult res;
    res.schema_version = j.at("schema_version").get<int>();
    res.version = j.at("version").get<std::string>();
    res.seed = j.at("seed").get<std::uint64_t>();
    res.boundaries_window = j.at("boundaries_window").get<std::vector<Index>>();
    res.boundaries_time = j.at("boundaries_time").get<std::vector<Index>>();
    res.scores = j.at("scores").get<std::vector<double>>();
    for (const auto& e : j.at("loss_history"))
        res.loss_history.push_back({e.at("total").get<double>(), e.at("recon").get<double>(),
                                    e.at("l1").get<double>(), e.at("selfexpr").get<double>(),
                                    e.at("smooth").get<double>()});
    const auto& fl = j.at("final_losses");
    res.final_losses = {fl.at("recon").get<double>(), fl.at("l1").get<double>(),
                        fl.at("selfexpr").get<double>(), fl.at("smooth").get<double>()};
    res.config = run_config_from_json(j.at("config"));
    if (j.contains("metrics")) {
        const auto& m = j.at("metrics");
        res.metrics = RunMetrics{m.at("precision").get<double>(), m.at("recall").get<double>(),
                                 m.at("f1").get<double>(), m.at("ari").get<double>()};
    }
    return res;
}

inline nlohmann::json truth_to_json(const SynthResult& truth, std::uint64_t seed) {
    return {
        {"schema_version", kSchemaVersion},
        {"seed", seed},
        {"labels", truth.concept_labels},
        {"boundaries_time", truth.true_boundaries},
        {"concept_sequence", truth.concept_sequence},
    };
}

inline std::vector<int> truth_labels_from_json(const nlohmann::json& j) {
    return j.at("labels").get<std::vector<int>>();
}

// Equality for round-trip checks; compares everything the wire format carries.

inline bool operator==(const EpochLoss& a, const EpochLoss& b) {
    return a.total == b.total && a.recon == b.recon && a.l1 == b.l1 && a.selfexpr == b.selfexpr &&
           a.smooth == b.smooth;
}

inline bool operator==(const LossTerms& a, const LossTerms& b) {
    return a.recon == b.recon && a.l1 == b.l1 && a.selfexpr == b.selfexpr && a.smooth == b.smooth;
}

inline bool operator==(const RunConfig& a, const RunConfig& b) {
    return a.window.window_len == b.window.window_len && a.window.stride == b.window.stride &&
           a.window.normalize == b.window.normalize && a.hp.lambda1 == b.hp.lambda1 &&
           a.hp.lambda2 == b.hp.lambda2 && a.hp.lambda3 == b.hp.lambda3 &&
           a.hp.learning_rate == b.hp.learning_rate && a.hp.epochs == b.hp.epochs &&
           a.hp.pretrain_epochs == b.hp.pretrain_epochs && a.hp.latent_dim == b.hp.latent_dim &&
           a.hp.hidden == b.hp.hidden && a.hp.activation == b.hp.activation &&
           a.hp.l12_epsilon == b.hp.l12_epsilon && a.hp.zero_diagonal == b.hp.zero_diagonal &&
           a.peak.threshold_k == b.peak.threshold_k && a.peak.min_distance == b.peak.min_distance;
}

inline bool operator==(const RunResult& a, const RunResult& b) {
    return a.schema_version == b.schema_version && a.version == b.version && a.seed == b.seed &&
           a.boundaries_window == b.boundaries_window && a.boundaries_time == b.boundaries_time &&
           a.scores == b.scores && a.loss_history == b.loss_history &&
           a.final_losses == b.final_losses && a.config == b.config && a.metrics == b.metrics;
}

}  // namespace conceptseg
