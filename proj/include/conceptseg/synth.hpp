#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "conceptseg/series.hpp"

namespace conceptseg {

/// Planted-regime generator spec. Each concept is a fixed random mixture of
/// shared sinusoids; regimes switch concepts at random segment lengths.
struct SynthSpec {
    int num_concepts = 3;
    int num_segments = 4;
    std::array<Index, 2> segment_len_range = {120, 160};  // time steps, inclusive
    Index channels = 5;
    int sines_per_concept = 2;
    std::array<double, 2> freq_range = {0.02, 0.25};  // cycles per step
    double noise_std = 0.05;
    std::uint64_t seed = 0;
};

struct SynthResult {
    SeriesMatrix series;
    std::vector<int> concept_labels;     // one per time step
    std::vector<Index> true_boundaries;  // first time index of each new regime
    std::vector<int> concept_sequence;   // concept id per segment
};

namespace detail {

inline void validate(const SynthSpec& spec) {
    if (spec.num_concepts < 2) throw std::invalid_argument("synth: num_concepts must be >= 2");
    if (spec.num_segments < 1) throw std::invalid_argument("synth: num_segments must be >= 1");
    if (spec.segment_len_range[0] < 1 || spec.segment_len_range[0] > spec.segment_len_range[1])
        throw std::invalid_argument("synth: invalid segment_len_range");
    if (spec.channels < 1) throw std::invalid_argument("synth: channels must be >= 1");
    if (spec.sines_per_concept < 1)
        throw std::invalid_argument("synth: sines_per_concept must be >= 1");
    if (spec.freq_range[0] <= 0.0 || spec.freq_range[0] > spec.freq_range[1])
        throw std::invalid_argument("synth: invalid freq_range");
    if (spec.freq_range[1] > 0.5)
        throw std::invalid_argument("synth: freq_max exceeds the 0.5 cycles/step aliasing limit");
    if (spec.noise_std < 0.0) throw std::invalid_argument("synth: noise_std must be >= 0");
}

}  // namespace detail

/// Draws concept parameters, a regime sequence with distinct consecutive
/// concepts, then emits series(t) = M_c * sin(2 pi f t + phi) + noise.
/// Frequency draws colliding within 1e-6 across any two sinusoids are
/// rejected so regimes stay distinguishable. Deterministic per seed.
inline SynthResult generate(const SynthSpec& spec) {
    detail::validate(spec);
    Rng rng(spec.seed);

    // per-concept parameters: frequencies, phases, mixing matrix
    const int total_sines = spec.num_concepts * spec.sines_per_concept;
    std::vector<double> freqs;
    freqs.reserve(static_cast<std::size_t>(total_sines));
    for (int i = 0; i < total_sines; ++i) {
        double f = 0.0;
        bool distinct = false;
        for (int attempt = 0; attempt < 100000 && !distinct; ++attempt) {
            f = rng.uniform(spec.freq_range[0], spec.freq_range[1]);
            distinct = true;
            for (double g : freqs)
                if (std::abs(f - g) < 1e-6) distinct = false;
        }
        if (!distinct)
            throw std::invalid_argument("synth: freq_range too narrow for distinct frequencies");
        freqs.push_back(f);
    }
    std::vector<double> phases(static_cast<std::size_t>(total_sines));
    for (double& p : phases) p = rng.uniform(0.0, 6.283185307179586);
    std::vector<Matrix> mixing(static_cast<std::size_t>(spec.num_concepts));
    for (Matrix& m : mixing) {
        m.resize(spec.channels, spec.sines_per_concept);
        for (Index i = 0; i < m.rows(); ++i)
            for (Index j = 0; j < m.cols(); ++j) m(i, j) = rng.uniform(-1.0, 1.0);
    }

    // regime sequence: consecutive concepts always distinct
    SynthResult out;
    out.concept_sequence.reserve(static_cast<std::size_t>(spec.num_segments));
    for (int s = 0; s < spec.num_segments; ++s) {
        if (s == 0) {
            out.concept_sequence.push_back(
                static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(spec.num_concepts))));
        } else {
            // draw from the concepts minus the previous one; no rejection loop
            const int prev = out.concept_sequence.back();
            int c = static_cast<int>(
                rng.uniform_index(static_cast<std::uint64_t>(spec.num_concepts - 1)));
            if (c >= prev) ++c;
            out.concept_sequence.push_back(c);
        }
    }

    std::vector<Index> lengths(static_cast<std::size_t>(spec.num_segments));
    const Index span = spec.segment_len_range[1] - spec.segment_len_range[0] + 1;
    for (Index& len : lengths)
        len = spec.segment_len_range[0] +
              static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(span)));

    Index total_steps = 0;
    for (Index len : lengths) total_steps += len;

    out.series.values.resize(total_steps, spec.channels);
    out.series.channel_names.reserve(static_cast<std::size_t>(spec.channels));
    for (Index c = 0; c < spec.channels; ++c)
        out.series.channel_names.push_back("c" + std::to_string(c));
    out.concept_labels.resize(static_cast<std::size_t>(total_steps));

    Index t = 0;
    for (int s = 0; s < spec.num_segments; ++s) {
        if (s > 0) out.true_boundaries.push_back(t);
        const int concept_id = out.concept_sequence[static_cast<std::size_t>(s)];
        const Matrix& m = mixing[static_cast<std::size_t>(concept_id)];
        const int base = concept_id * spec.sines_per_concept;
        for (Index step = 0; step < lengths[static_cast<std::size_t>(s)]; ++step, ++t) {
            out.concept_labels[static_cast<std::size_t>(t)] = concept_id;
            for (Index ch = 0; ch < spec.channels; ++ch) {
                double v = 0.0;
                for (int i = 0; i < spec.sines_per_concept; ++i) {
                    const double f = freqs[static_cast<std::size_t>(base + i)];
                    const double phi = phases[static_cast<std::size_t>(base + i)];
                    v += m(ch, i) * std::sin(6.283185307179586 * f * static_cast<double>(t) + phi);
                }
                if (spec.noise_std > 0.0) v += spec.noise_std * rng.normal();
                out.series.values(t, ch) = v;
            }
        }
    }
    return out;
}

}  // namespace conceptseg
