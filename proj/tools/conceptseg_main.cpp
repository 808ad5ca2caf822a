// Command line front end: synthesize benchmark series, segment a CSV series
// into behavior regimes, and score predictions against ground truth.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "conceptseg/conceptseg.hpp"

namespace {

using namespace conceptseg;

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_text_file(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << body;
    if (!out) throw std::runtime_error("failed writing output file: " + path);
}

std::string matrix_csv(const Matrix& m) {
    std::string body;
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            if (j > 0) body += ',';
            body += format_double(m(i, j));
        }
        body += '\n';
    }
    return body;
}

nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open JSON file: " + path);
    nlohmann::json j;
    in >> j;
    return j;
}

struct SegmentArgs {
    std::string input;
    std::string out;
    std::string truth;
    std::string dump_theta;
    std::string dump_scores;
    bool has_header = false;
    std::string normalize = "zscore";
    Index tolerance = 2;
    RunConfig cfg;
};

int run_segment_cmd(const SegmentArgs& args) {
    RunConfig cfg = args.cfg;
    cfg.window.normalize =
        args.normalize == "none" ? NormalizeMode::none : NormalizeMode::zscore_per_channel;

    const SeriesMatrix series = load_csv(args.input, args.has_header);

    std::vector<int> truth_labels;
    const std::vector<int>* truth_ptr = nullptr;
    if (!args.truth.empty()) {
        truth_labels = truth_labels_from_json(load_json_file(args.truth));
        truth_ptr = &truth_labels;
    }

    SegmentOutput output = run_segment(series, cfg, truth_ptr, args.tolerance);
    write_text_file(args.out, to_json(output.result).dump(2) + "\n");

    if (!args.dump_theta.empty()) write_text_file(args.dump_theta, matrix_csv(output.report.theta.theta));
    if (!args.dump_scores.empty()) {
        std::string body;
        for (double v : output.result.scores) body += format_double(v) + "\n";
        write_text_file(args.dump_scores, body);
    }

    std::cerr << "segmented " << output.windows.count() << " windows into "
              << output.result.boundaries_window.size() + 1 << " segments\n";
    return 0;
}

struct SynthArgs {
    std::string out = "synth.csv";
    std::string truth_out;
    SynthSpec spec;
};

int run_synth_cmd(const SynthArgs& args) {
    const SynthResult result = generate(args.spec);

    std::string body;
    for (Index t = 0; t < result.series.steps(); ++t) {
        for (Index c = 0; c < result.series.channels(); ++c) {
            if (c > 0) body += ',';
            body += format_double(result.series.values(t, c));
        }
        body += '\n';
    }
    write_text_file(args.out, body);

    std::string truth_path = args.truth_out;
    if (truth_path.empty()) {
        truth_path = args.out;
        if (truth_path.size() > 4 && truth_path.substr(truth_path.size() - 4) == ".csv")
            truth_path.resize(truth_path.size() - 4);
        truth_path += ".truth.json";
    }
    write_text_file(truth_path, truth_to_json(result, args.spec.seed).dump(2) + "\n");

    std::cerr << "wrote " << result.series.steps() << " steps x " << result.series.channels()
              << " channels to " << args.out << " (truth: " << truth_path << ")\n";
    return 0;
}

struct EvalArgs {
    std::string pred;
    std::string truth;
    Index tolerance = 2;
};

int run_eval_cmd(const EvalArgs& args) {
    const RunResult pred = run_result_from_json(load_json_file(args.pred));
    const std::vector<int> step_labels = truth_labels_from_json(load_json_file(args.truth));

    // Rebuild the window layout the prediction was computed on.
    const Index n = static_cast<Index>(pred.scores.size()) + 1;
    std::vector<Index> window_starts;
    window_starts.reserve(static_cast<std::size_t>(n));
    for (Index j = 0; j < n; ++j) window_starts.push_back(j * pred.config.window.stride);
    const Index last_end = window_starts.back() + pred.config.window.window_len;
    if (last_end > static_cast<Index>(step_labels.size()))
        throw std::runtime_error("truth labels shorter than the series the prediction was run on");

    const std::vector<int> window_labels =
        window_majority_labels(step_labels, window_starts, pred.config.window.window_len);

    Segmentation seg;
    seg.boundaries = pred.boundaries_window;
    seg.segments = detail::segments_from_boundaries(seg.boundaries, n);
    const RunMetrics metrics = evaluate_segmentation(seg, window_labels, args.tolerance);

    nlohmann::json j = {{"precision", metrics.precision},
                        {"recall", metrics.recall},
                        {"f1", metrics.f1},
                        {"ari", metrics.ari}};
    std::cout << j.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Concept segmentation of co-evolving multivariate time series"};
    app.require_subcommand(1);

    SegmentArgs seg;
    CLI::App* segment = app.add_subcommand("segment", "Segment a CSV series into regimes");
    segment->add_option("--input", seg.input, "Input CSV (rows = time steps)")->required();
    segment->add_option("--out", seg.out, "Output JSON path")->required();
    segment->add_flag("--has-header", seg.has_header, "First CSV row is a header");
    segment->add_option("--normalize", seg.normalize, "zscore|none")
        ->check(CLI::IsMember({"zscore", "none"}))
        ->capture_default_str();
    segment->add_option("--window", seg.cfg.window.window_len, "Window length (time steps)")
        ->capture_default_str();
    segment->add_option("--stride", seg.cfg.window.stride, "Window stride")->capture_default_str();
    segment->add_option("--latent", seg.cfg.hp.latent_dim, "Latent dimension")
        ->capture_default_str();
    segment->add_option("--hidden", seg.cfg.hp.hidden, "Hidden layer widths")
        ->capture_default_str();
    segment->add_option("--activation", seg.cfg.hp.activation, "tanh|relu")
        ->transform(CLI::CheckedTransformer(
            std::map<std::string, Activation>{{"tanh", Activation::tanh},
                                              {"relu", Activation::relu}}))
        ->default_str("tanh");
    segment->add_option("--lambda1", seg.cfg.hp.lambda1, "l1 sparsity weight")
        ->capture_default_str();
    segment->add_option("--lambda2", seg.cfg.hp.lambda2, "Self-expression weight")
        ->capture_default_str();
    segment->add_option("--lambda3", seg.cfg.hp.lambda3, "Smoothness weight")
        ->capture_default_str();
    segment->add_option("--lr", seg.cfg.hp.learning_rate, "Adam learning rate")
        ->capture_default_str();
    segment->add_option("--epochs", seg.cfg.hp.epochs, "Joint training epochs")
        ->capture_default_str();
    segment->add_option("--pretrain-epochs", seg.cfg.hp.pretrain_epochs, "Warmup epochs")
        ->capture_default_str();
    segment->add_option("--seed", seg.cfg.hp.seed, "Random seed")->capture_default_str();
    segment->add_option("--epsilon", seg.cfg.hp.l12_epsilon, "l1,2 subgradient guard")
        ->capture_default_str();
    segment->add_option("--peak-k", seg.cfg.peak.threshold_k, "Peak threshold (mean + k*std)")
        ->capture_default_str();
    segment->add_option("--peak-min-distance", seg.cfg.peak.min_distance,
                        "Minimum index gap between peaks")
        ->capture_default_str();
    segment->add_option("--truth", seg.truth, "Truth JSON; adds metrics to the output");
    segment->add_option("--tolerance", seg.tolerance, "Boundary match tolerance (windows)")
        ->capture_default_str();
    segment->add_option("--dump-theta", seg.dump_theta, "Write the coefficient matrix as CSV");
    segment->add_option("--dump-scores", seg.dump_scores, "Write boundary scores as CSV");

    SynthArgs syn;
    CLI::App* synth = app.add_subcommand("synth", "Generate a benchmark series with planted regimes");
    synth->add_option("--out", syn.out, "Output CSV path")->capture_default_str();
    synth->add_option("--truth-out", syn.truth_out, "Truth JSON path (default: <out>.truth.json)");
    synth->add_option("--concepts", syn.spec.num_concepts, "Number of distinct concepts")
        ->capture_default_str();
    synth->add_option("--segments", syn.spec.num_segments, "Number of regime segments")
        ->capture_default_str();
    synth->add_option("--seg-min", syn.spec.segment_len_range[0], "Min segment length")
        ->capture_default_str();
    synth->add_option("--seg-max", syn.spec.segment_len_range[1], "Max segment length")
        ->capture_default_str();
    synth->add_option("--channels", syn.spec.channels, "Number of channels")
        ->capture_default_str();
    synth->add_option("--sines", syn.spec.sines_per_concept, "Sinusoids per concept")
        ->capture_default_str();
    synth->add_option("--freq-min", syn.spec.freq_range[0], "Min frequency (cycles/step)")
        ->capture_default_str();
    synth->add_option("--freq-max", syn.spec.freq_range[1], "Max frequency (cycles/step)")
        ->capture_default_str();
    synth->add_option("--noise", syn.spec.noise_std, "Gaussian noise std")->capture_default_str();
    synth->add_option("--seed", syn.spec.seed, "Random seed")->capture_default_str();

    EvalArgs ev;
    CLI::App* eval = app.add_subcommand("eval", "Score a prediction against truth labels");
    eval->add_option("--pred", ev.pred, "Prediction JSON from segment")->required();
    eval->add_option("--truth", ev.truth, "Truth JSON from synth")->required();
    eval->add_option("--tolerance", ev.tolerance, "Boundary match tolerance (windows)")
        ->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (segment->parsed()) return run_segment_cmd(seg);
        if (synth->parsed()) return run_synth_cmd(syn);
        if (eval->parsed()) return run_eval_cmd(ev);
    } catch (const DivergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
