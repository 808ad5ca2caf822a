#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "conceptseg/loss.hpp"
#include "conceptseg/window.hpp"

namespace conceptseg {

struct EpochLoss {
    double total = 0.0;
    double recon = 0.0;
    double l1 = 0.0;
    double selfexpr = 0.0;
    double smooth = 0.0;
};

struct TrainReport {
    std::vector<EpochLoss> loss_history;  // pretrain epochs first, then joint
    MlpParams encoder;
    MlpParams decoder;
    SelfExprMatrix theta;
    bool converged = false;
};

/// Training aborted on a non-finite loss. epoch is 1-based across both
/// phases (pretraining epochs count first).
struct DivergenceError : std::runtime_error {
    explicit DivergenceError(int epoch_index)
        : std::runtime_error("training diverged: non-finite loss at epoch " +
                             std::to_string(epoch_index)),
          epoch(epoch_index) {}
    int epoch;
};

namespace detail {

/// Adam state for one parameter tensor (beta1 = 0.9, beta2 = 0.999,
/// eps = 1e-8), full-batch.
class AdamState {
public:
    template <typename Param, typename Grad>
    void update(Param& param, const Grad& grad, double lr, long step) {
        constexpr double beta1 = 0.9;
        constexpr double beta2 = 0.999;
        constexpr double eps = 1e-8;
        if (m_.size() == 0) {
            m_ = Matrix::Zero(param.rows(), param.cols());
            v_ = Matrix::Zero(param.rows(), param.cols());
        }
        m_ = beta1 * m_ + (1.0 - beta1) * grad;
        v_ = (beta2 * v_.array() + (1.0 - beta2) * grad.array().square()).matrix();
        const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step));
        const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step));
        param.array() -= lr * (m_.array() / bc1) / ((v_.array() / bc2).sqrt() + eps);
    }

private:
    Matrix m_, v_;
};

/// One optimizer slot per tensor: encoder layers, decoder layers, theta.
struct AdamSlots {
    std::vector<AdamState> enc_w, enc_b, dec_w, dec_b;
    AdamState theta;

    AdamSlots(std::size_t enc_layers, std::size_t dec_layers)
        : enc_w(enc_layers), enc_b(enc_layers), dec_w(dec_layers), dec_b(dec_layers) {}

    void apply(MlpParams& enc, const MlpParams& enc_grads, MlpParams& dec,
               const MlpParams& dec_grads, double lr, long step) {
        for (std::size_t l = 0; l < enc.layers.size(); ++l) {
            enc_w[l].update(enc.layers[l].weight, enc_grads.layers[l].weight, lr, step);
            enc_b[l].update(enc.layers[l].bias, enc_grads.layers[l].bias, lr, step);
        }
        for (std::size_t l = 0; l < dec.layers.size(); ++l) {
            dec_w[l].update(dec.layers[l].weight, dec_grads.layers[l].weight, lr, step);
            dec_b[l].update(dec.layers[l].bias, dec_grads.layers[l].bias, lr, step);
        }
    }
};

inline std::vector<Index> encoder_dims(Index input_dim, const Hyperparams& hp) {
    std::vector<Index> dims;
    dims.push_back(input_dim);
    dims.insert(dims.end(), hp.hidden.begin(), hp.hidden.end());
    dims.push_back(hp.latent_dim);
    return dims;
}

}  // namespace detail

/// Trains encoder, self-representation coefficients, and decoder on the
/// window matrix. Optional warmup trains the plain autoencoder first
/// (reconstruction only, theta frozen at zero and the self-expression
/// product bypassed, since decoding Z * 0 would carry no signal); the joint
/// phase then optimizes the full objective with a fresh optimizer.
/// Deterministic for a fixed seed.
inline TrainReport fit(const Matrix& w, const Hyperparams& hp) {
    const Index n = w.cols();
    const Index m = w.rows();
    if (n < 2) throw std::invalid_argument("fit: need at least 2 windows");
    if (hp.epochs < 1) throw std::invalid_argument("fit: epochs must be >= 1");
    if (hp.pretrain_epochs < 0) throw std::invalid_argument("fit: pretrain_epochs must be >= 0");
    if (hp.lambda1 < 0 || hp.lambda2 < 0 || hp.lambda3 < 0)
        throw std::invalid_argument("fit: lambda weights must be >= 0");
    if (hp.learning_rate <= 0) throw std::invalid_argument("fit: learning_rate must be > 0");

    std::vector<Index> enc_dims = detail::encoder_dims(m, hp);
    std::vector<Index> dec_dims(enc_dims.rbegin(), enc_dims.rend());

    TrainReport report;
    report.encoder = init_params(enc_dims, hp.activation, sub_seed(hp.seed, 1));
    report.decoder = init_params(dec_dims, hp.activation, sub_seed(hp.seed, 2));
    report.theta = SelfExprMatrix{Matrix::Zero(n, n), hp.zero_diagonal};
    report.loss_history.reserve(static_cast<std::size_t>(hp.pretrain_epochs + hp.epochs));

    const Matrix r = difference_matrix(n);
    int epoch_index = 0;

    {
        detail::AdamSlots adam(report.encoder.layers.size(), report.decoder.layers.size());
        for (int e = 1; e <= hp.pretrain_epochs; ++e) {
            ++epoch_index;
            auto [z, enc_tape] = encode(report.encoder, w);
            auto [w_hat, dec_tape] = decode(report.decoder, z);
            const Matrix err = w_hat - w;
            const double recon = 0.5 * err.squaredNorm();
            if (!std::isfinite(recon)) throw DivergenceError(epoch_index);
            report.loss_history.push_back({recon, recon, 0.0, 0.0, 0.0});

            auto [dec_grads, d_z] = backward(report.decoder, dec_tape, err);
            auto [enc_grads, d_in] = backward(report.encoder, enc_tape, d_z);
            (void)d_in;
            adam.apply(report.encoder, enc_grads, report.decoder, dec_grads, hp.learning_rate, e);
        }
    }

    detail::AdamSlots adam(report.encoder.layers.size(), report.decoder.layers.size());
    for (int e = 1; e <= hp.epochs; ++e) {
        ++epoch_index;
        auto [terms, grads] =
            loss_and_gradients(w, report.encoder, report.theta, report.decoder, hp, r);
        const double total = terms.total();
        if (!std::isfinite(total)) throw DivergenceError(epoch_index);
        report.loss_history.push_back({total, terms.recon, terms.l1, terms.selfexpr, terms.smooth});

        adam.apply(report.encoder, grads.encoder, report.decoder, grads.decoder, hp.learning_rate,
                   e);
        adam.theta.update(report.theta.theta, grads.theta, hp.learning_rate, e);
        project_zero_diagonal(report.theta);
    }

    if (report.loss_history.size() >= 2) {
        const double last = report.loss_history.back().total;
        const double prev = report.loss_history[report.loss_history.size() - 2].total;
        const double denom = std::max(std::abs(prev), 1e-12);
        report.converged = std::abs(last - prev) / denom < 1e-6;
    }
    return report;
}

inline TrainReport fit(const WindowMatrix& w, const Hyperparams& hp) { return fit(w.data, hp); }

}  // namespace conceptseg
