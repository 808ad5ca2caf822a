#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "conceptseg/mlp.hpp"
#include "conceptseg/selfexpr.hpp"

namespace conceptseg {

struct Hyperparams {
    double lambda1 = 0.1;  // l1 sparsity of theta
    double lambda2 = 1.0;  // self-expression residual
    double lambda3 = 0.5;  // temporal smoothness
    double learning_rate = 1e-3;
    int epochs = 500;
    int pretrain_epochs = 100;
    std::uint64_t seed = 0;
    Index latent_dim = 16;
    std::vector<Index> hidden = {32};
    Activation activation = Activation::tanh;
    double l12_epsilon = 1e-8;
    bool zero_diagonal = true;
};

/// The four addends of the joint objective, lambda multipliers applied.
struct LossTerms {
    double recon = 0.0;
    double l1 = 0.0;
    double selfexpr = 0.0;
    double smooth = 0.0;

    double total() const { return recon + l1 + selfexpr + smooth; }
};

struct LossGradients {
    MlpParams encoder;
    Matrix theta;
    MlpParams decoder;
};

/// Value and gradients of the joint loss
///
///   1/2 ||W - What||_F^2 + lambda1 ||Theta||_1
///     + lambda2 ||Z - Z Theta||_F^2 + lambda3 ||Theta R||_{1,2}
///
/// with Z = encode(W) and What = decode(Z Theta). The caller passes the
/// difference matrix R so training can reuse one instance.
inline std::pair<LossTerms, LossGradients> loss_and_gradients(
    const Matrix& w, const MlpParams& enc, const SelfExprMatrix& theta, const MlpParams& dec,
    const Hyperparams& hp, const Matrix& r) {
    const Index n = w.cols();
    if (theta.order() != n)
        throw std::invalid_argument("loss: theta order must equal window count");

    auto [z, enc_tape] = encode(enc, w);
    const Matrix z_hat = self_expression(z, theta);
    auto [w_hat, dec_tape] = decode(dec, z_hat);
    if (w_hat.rows() != w.rows())
        throw std::invalid_argument("loss: decoder output dim must equal window dim");

    const Matrix err = w_hat - w;
    const Matrix resid = z - z_hat;  // Z - Z Theta
    const ValueGrad l1 = l1_value_and_subgrad(theta);
    const ValueGrad smooth = smoothness_term(theta, r, hp.l12_epsilon);

    LossTerms terms;
    terms.recon = 0.5 * err.squaredNorm();
    terms.l1 = hp.lambda1 * l1.value;
    terms.selfexpr = hp.lambda2 * resid.squaredNorm();
    terms.smooth = hp.lambda3 * smooth.value;

    LossGradients grads;
    auto [dec_grads, d_z_hat] = backward(dec, dec_tape, err);
    grads.decoder = std::move(dec_grads);

    grads.theta = z.transpose() * d_z_hat + hp.lambda1 * l1.grad -
                  2.0 * hp.lambda2 * (z.transpose() * resid) + hp.lambda3 * smooth.grad;
    if (theta.zero_diagonal) grads.theta.diagonal().setZero();

    // dL/dZ: the reconstruction path through Z Theta plus the lambda2 term,
    // whose derivative is 2 lambda2 (Z - Z Theta)(I - Theta)^T.
    Matrix d_z = d_z_hat * theta.theta.transpose() +
                 2.0 * hp.lambda2 * (resid - resid * theta.theta.transpose());
    auto [enc_grads, d_input] = backward(enc, enc_tape, d_z);
    (void)d_input;
    grads.encoder = std::move(enc_grads);

    return {terms, std::move(grads)};
}

inline LossTerms total_loss(const Matrix& w, const MlpParams& enc, const SelfExprMatrix& theta,
                            const MlpParams& dec, const Hyperparams& hp) {
    auto [z, enc_tape] = encode(enc, w);
    (void)enc_tape;
    const Matrix z_hat = self_expression(z, theta);
    auto [w_hat, dec_tape] = decode(dec, z_hat);
    (void)dec_tape;
    if (w_hat.rows() != w.rows())
        throw std::invalid_argument("loss: decoder output dim must equal window dim");

    LossTerms terms;
    terms.recon = 0.5 * (w_hat - w).squaredNorm();
    terms.l1 = hp.lambda1 * l1_value_and_subgrad(theta).value;
    terms.selfexpr = hp.lambda2 * (z - z_hat).squaredNorm();
    terms.smooth =
        hp.lambda3 * smoothness_term(theta, difference_matrix(w.cols()), hp.l12_epsilon).value;
    return terms;
}

inline LossGradients loss_gradients(const Matrix& w, const MlpParams& enc,
                                    const SelfExprMatrix& theta, const MlpParams& dec,
                                    const Hyperparams& hp) {
    return loss_and_gradients(w, enc, theta, dec, hp, difference_matrix(w.cols())).second;
}

}  // namespace conceptseg
