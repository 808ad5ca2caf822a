#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "conceptseg/common.hpp"

namespace conceptseg {

enum class Activation { tanh, relu };

struct MlpLayer {
    Matrix weight;  // out x in
    Vector bias;    // out
};

/// A small fully connected network. The activation is applied after every
/// layer; a caller that wants a linear final layer (the decoder) asks for it
/// at forward time.
struct MlpParams {
    std::vector<MlpLayer> layers;
    Activation activation = Activation::tanh;

    Index input_dim() const { return layers.front().weight.cols(); }
    Index output_dim() const { return layers.back().weight.rows(); }
};

/// Latent codes, one column per window.
using LatentMatrix = Matrix;

/// Per-layer values cached by the forward pass for backpropagation.
struct ForwardTape {
    Matrix input;
    std::vector<Matrix> preacts;
    std::vector<Matrix> acts;  // acts.back() is the forward output
    bool linear_last = false;
};

/// Xavier-uniform weights (|w| <= sqrt(6 / (fan_in + fan_out))), zero biases.
/// The fill order is pinned so a seed always produces the same parameters.
inline MlpParams init_params(const std::vector<Index>& layer_dims, Activation activation,
                             std::uint64_t seed) {
    if (layer_dims.size() < 2)
        throw std::invalid_argument("init_params: need at least input and output dims");
    for (Index dim : layer_dims)
        if (dim < 1) throw std::invalid_argument("init_params: layer dims must be positive");

    Rng rng(seed);
    MlpParams params;
    params.activation = activation;
    for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l) {
        const Index fan_in = layer_dims[l];
        const Index fan_out = layer_dims[l + 1];
        const double a = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        MlpLayer layer;
        layer.weight.resize(fan_out, fan_in);
        for (Index i = 0; i < fan_out; ++i)
            for (Index j = 0; j < fan_in; ++j) layer.weight(i, j) = rng.uniform(-a, a);
        layer.bias = Vector::Zero(fan_out);
        params.layers.push_back(std::move(layer));
    }
    return params;
}

namespace detail {

inline Matrix apply_activation(const Matrix& preact, Activation activation) {
    if (activation == Activation::tanh) return preact.array().tanh().matrix();
    return preact.array().max(0.0).matrix();
}

/// Derivative of the activation at the recorded pre-activation. relu uses 0
/// at the kink.
inline Matrix activation_deriv(const Matrix& preact, const Matrix& act, Activation activation) {
    if (activation == Activation::tanh) return (1.0 - act.array().square()).matrix();
    return (preact.array() > 0.0).cast<double>().matrix();
}

}  // namespace detail

/// Columnwise forward pass over a batch. With linear_last the final layer
/// skips the activation (decoder output is unbounded).
inline std::pair<Matrix, ForwardTape> forward(const MlpParams& params, const Matrix& input,
                                              bool linear_last) {
    if (input.rows() != params.input_dim())
        throw std::invalid_argument("forward: input dim mismatch");

    ForwardTape tape;
    tape.input = input;
    tape.linear_last = linear_last;
    const Matrix* x = &tape.input;
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        const MlpLayer& layer = params.layers[l];
        Matrix pre = layer.weight * (*x);
        pre.colwise() += layer.bias;
        const bool last = l + 1 == params.layers.size();
        Matrix act = (last && linear_last) ? pre : detail::apply_activation(pre, params.activation);
        tape.preacts.push_back(std::move(pre));
        tape.acts.push_back(std::move(act));
        x = &tape.acts.back();
    }
    return {tape.acts.back(), tape};
}

inline std::pair<LatentMatrix, ForwardTape> encode(const MlpParams& params, const Matrix& w) {
    return forward(params, w, /*linear_last=*/false);
}

inline std::pair<Matrix, ForwardTape> decode(const MlpParams& params, const LatentMatrix& z_hat) {
    return forward(params, z_hat, /*linear_last=*/true);
}

/// Backpropagates upstream_grad (shape of the forward output) through the
/// taped pass. Returns gradients in MlpParams shape plus the gradient with
/// respect to the input batch.
inline std::pair<MlpParams, Matrix> backward(const MlpParams& params, const ForwardTape& tape,
                                             const Matrix& upstream_grad) {
    const std::size_t n_layers = params.layers.size();
    if (tape.acts.size() != n_layers)
        throw std::invalid_argument("backward: tape does not match params");
    if (upstream_grad.rows() != tape.acts.back().rows() ||
        upstream_grad.cols() != tape.acts.back().cols())
        throw std::invalid_argument("backward: upstream_grad shape mismatch");

    MlpParams grads;
    grads.activation = params.activation;
    grads.layers.resize(n_layers);

    Matrix delta;  // gradient w.r.t. the current layer's pre-activation
    if (tape.linear_last) {
        delta = upstream_grad;
    } else {
        delta = upstream_grad.cwiseProduct(
            detail::activation_deriv(tape.preacts.back(), tape.acts.back(), params.activation));
    }

    for (std::size_t l = n_layers; l-- > 0;) {
        const Matrix& layer_input = (l == 0) ? tape.input : tape.acts[l - 1];
        grads.layers[l].weight = delta * layer_input.transpose();
        grads.layers[l].bias = delta.rowwise().sum();
        Matrix input_grad = params.layers[l].weight.transpose() * delta;
        if (l == 0) return {std::move(grads), std::move(input_grad)};
        delta = input_grad.cwiseProduct(
            detail::activation_deriv(tape.preacts[l - 1], tape.acts[l - 1], params.activation));
    }
    // not reached: the loop returns at l == 0
    return {std::move(grads), Matrix()};
}

}  // namespace conceptseg
