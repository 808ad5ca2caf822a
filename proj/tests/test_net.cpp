#include <catch_amalgamated.hpp>

#include "conceptseg/mlp.hpp"
#include "conceptseg/train.hpp"
#include "helpers.hpp"

using namespace conceptseg;

TEST_CASE("init_params is deterministic and Xavier-bounded") {
    const std::vector<Index> dims = {4, 3, 2};
    const MlpParams a = init_params(dims, Activation::tanh, 99);
    const MlpParams b = init_params(dims, Activation::tanh, 99);

    REQUIRE(a.layers.size() == 2);
    CHECK(a.layers[0].weight.rows() == 3);
    CHECK(a.layers[0].weight.cols() == 4);
    CHECK(a.layers[1].weight.rows() == 2);
    CHECK(a.layers[1].weight.cols() == 3);

    for (std::size_t l = 0; l < a.layers.size(); ++l) {
        CHECK(a.layers[l].weight == b.layers[l].weight);
        CHECK(a.layers[l].bias == b.layers[l].bias);
        CHECK(a.layers[l].bias.cwiseAbs().maxCoeff() == 0.0);
        const double bound =
            std::sqrt(6.0 / static_cast<double>(a.layers[l].weight.rows() + a.layers[l].weight.cols()));
        CHECK(a.layers[l].weight.cwiseAbs().maxCoeff() <= bound);
    }

    const MlpParams c = init_params(dims, Activation::tanh, 100);
    CHECK(a.layers[0].weight != c.layers[0].weight);

    CHECK_THROWS_AS(init_params({4}, Activation::tanh, 0), std::invalid_argument);
    CHECK_THROWS_AS(init_params({4, 0}, Activation::tanh, 0), std::invalid_argument);
}

TEST_CASE("encode basics") {
    SECTION("all-zero net maps to zero latents") {
        MlpParams p;
        p.layers.push_back({Matrix::Zero(3, 5), Vector::Zero(3)});
        const Matrix w = Matrix::Random(5, 4);
        const auto [z, tape] = encode(p, w);
        CHECK(z == Matrix::Zero(3, 4));
    }
    SECTION("identity single layer applies tanh elementwise") {
        MlpParams p;
        p.layers.push_back({Matrix::Identity(4, 4), Vector::Zero(4)});
        const Matrix w = Matrix::Random(4, 3);
        const auto [z, tape] = encode(p, w);
        CHECK((z - w.array().tanh().matrix()).cwiseAbs().maxCoeff() == 0.0);
    }
    SECTION("duplicated input columns give duplicated latents") {
        const MlpParams p = init_params({5, 4, 2}, Activation::tanh, 3);
        Matrix w(5, 2);
        w.col(0) = Vector::Random(5);
        w.col(1) = w.col(0);
        const auto [z, tape] = encode(p, w);
        CHECK(z.col(0) == z.col(1));
    }
    SECTION("dimension mismatch throws") {
        const MlpParams p = init_params({5, 2}, Activation::tanh, 3);
        CHECK_THROWS_AS(encode(p, Matrix::Random(4, 2)), std::invalid_argument);
    }
}

TEST_CASE("decode basics") {
    SECTION("all-zero decoder reconstructs zero") {
        MlpParams p;
        p.layers.push_back({Matrix::Zero(5, 3), Vector::Zero(5)});
        const auto [out, tape] = decode(p, Matrix::Random(3, 4));
        CHECK(out == Matrix::Zero(5, 4));
    }
    SECTION("single linear layer is G z + b") {
        MlpParams p;
        Rng rng(11);
        const Matrix g = helpers::random_matrix(5, 3, rng);
        const Vector b = helpers::random_matrix(5, 1, rng);
        p.layers.push_back({g, b});
        const Matrix z = helpers::random_matrix(3, 4, rng);
        const auto [out, tape] = decode(p, z);
        const Matrix expected = (g * z).colwise() + b;
        CHECK((out - expected).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("forward passes are columnwise independent") {
    Rng rng(21);
    const MlpParams p = init_params({6, 5, 3}, Activation::tanh, 17);
    const Matrix w = helpers::random_matrix(6, 7, rng);
    const auto [z, tape] = encode(p, w);

    // permute columns, encode, and compare against permuted latents
    std::vector<Index> perm = {3, 0, 6, 1, 5, 2, 4};
    Matrix wp(6, 7), zp_expected(3, 7);
    for (Index j = 0; j < 7; ++j) {
        wp.col(j) = w.col(perm[static_cast<std::size_t>(j)]);
        zp_expected.col(j) = z.col(perm[static_cast<std::size_t>(j)]);
    }
    const auto [zp, tape_p] = encode(p, wp);
    CHECK(zp == zp_expected);
}

TEST_CASE("backward matches closed forms") {
    SECTION("zero upstream gives zero gradients") {
        const MlpParams p = init_params({4, 3, 2}, Activation::tanh, 5);
        const Matrix w = Matrix::Random(4, 6);
        const auto [z, tape] = encode(p, w);
        const auto [grads, input_grad] = backward(p, tape, Matrix::Zero(2, 6));
        for (const auto& layer : grads.layers) {
            CHECK(layer.weight.cwiseAbs().maxCoeff() == 0.0);
            CHECK(layer.bias.cwiseAbs().maxCoeff() == 0.0);
        }
        CHECK(input_grad.cwiseAbs().maxCoeff() == 0.0);
    }
    SECTION("linear single layer: weight grad is upstream * input^T") {
        Rng rng(31);
        MlpParams p;
        p.layers.push_back({helpers::random_matrix(3, 4, rng), helpers::random_matrix(3, 1, rng)});
        const Matrix x = helpers::random_matrix(4, 5, rng);
        const auto [out, tape] = decode(p, x);  // linear last layer
        const Matrix upstream = helpers::random_matrix(3, 5, rng);
        const auto [grads, input_grad] = backward(p, tape, upstream);
        CHECK((grads.layers[0].weight - upstream * x.transpose()).cwiseAbs().maxCoeff() < 1e-14);
        CHECK((grads.layers[0].bias - upstream.rowwise().sum()).cwiseAbs().maxCoeff() < 1e-14);
        CHECK((input_grad - p.layers[0].weight.transpose() * upstream).cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("backward matches central finite differences on random nets") {
    Rng rng(41);
    for (int trial = 0; trial < 8; ++trial) {
        // up to 3 layers, widths <= 8
        const int n_layers = 1 + static_cast<int>(rng.uniform_index(3));
        std::vector<Index> dims;
        for (int l = 0; l <= n_layers; ++l) dims.push_back(2 + static_cast<Index>(rng.uniform_index(7)));
        const bool linear_last = trial % 2 == 0;

        MlpParams p = init_params(dims, Activation::tanh, 1000 + static_cast<std::uint64_t>(trial));
        const Index n = 3;
        Matrix input = helpers::random_matrix(dims.front(), n, rng);
        const Matrix upstream = helpers::random_matrix(dims.back(), n, rng);

        // loss(theta) = <upstream, forward(input)>
        auto loss = [&]() {
            return (forward(p, input, linear_last).first.array() * upstream.array()).sum();
        };

        const auto [out, tape] = forward(p, input, linear_last);
        const auto [grads, input_grad] = backward(p, tape, upstream);

        for (std::size_t l = 0; l < p.layers.size(); ++l) {
            const Matrix fd_w = helpers::finite_diff(p.layers[l].weight, loss);
            REQUIRE(helpers::max_rel_error(grads.layers[l].weight, fd_w) < 1e-4);
            const Vector fd_b = helpers::finite_diff(p.layers[l].bias, loss);
            REQUIRE(helpers::max_rel_error(grads.layers[l].bias, fd_b) < 1e-4);
        }
        const Matrix fd_in = helpers::finite_diff(input, loss);
        REQUIRE(helpers::max_rel_error(input_grad, fd_in) < 1e-4);
    }
}

TEST_CASE("backward finite differences with relu away from kinks") {
    Rng rng(51);
    MlpParams p = init_params({5, 6, 4}, Activation::relu, 77);
    const Index n = 4;
    Matrix input = helpers::random_matrix(5, n, rng);
    const Matrix upstream = helpers::random_matrix(4, n, rng);

    // nudge pre-activations away from zero so finite differences stay clean
    auto far_from_kink = [&]() {
        const auto [out, tape] = forward(p, input, true);
        double closest = 1.0;
        for (std::size_t l = 0; l + 1 < tape.preacts.size(); ++l)
            closest = std::min(closest, tape.preacts[l].cwiseAbs().minCoeff());
        return closest > 1e-3;
    };
    while (!far_from_kink()) input = helpers::random_matrix(5, n, rng);

    auto loss = [&]() { return (forward(p, input, true).first.array() * upstream.array()).sum(); };
    const auto [out, tape] = forward(p, input, true);
    const auto [grads, input_grad] = backward(p, tape, upstream);
    for (std::size_t l = 0; l < p.layers.size(); ++l) {
        const Matrix fd_w = helpers::finite_diff(p.layers[l].weight, loss);
        REQUIRE(helpers::max_rel_error(grads.layers[l].weight, fd_w) < 1e-4);
    }
}

TEST_CASE("shape mismatch in backward throws") {
    const MlpParams p = init_params({4, 2}, Activation::tanh, 5);
    const auto [z, tape] = encode(p, Matrix::Random(4, 3));
    CHECK_THROWS_AS(backward(p, tape, Matrix::Zero(2, 5)), std::invalid_argument);
}

TEST_CASE("autoencoder trains to near-identity on a tiny fixture") {
    // Widths >= input dim, so the identity map is representable; the loss
    // value itself is the oracle.
    Rng rng(61);
    const Matrix w = helpers::random_matrix(3, 5, rng, -0.6, 0.6);

    Hyperparams hp;
    hp.hidden = {6};
    hp.latent_dim = 3;
    hp.learning_rate = 5e-3;
    hp.pretrain_epochs = 4000;  // plain autoencoder phase only
    hp.epochs = 1;
    hp.lambda1 = hp.lambda2 = hp.lambda3 = 0.0;
    hp.seed = 8;

    const TrainReport report = fit(w, hp);
    // last pretraining epoch reached a near-zero reconstruction loss
    const EpochLoss last_pretrain = report.loss_history[static_cast<std::size_t>(hp.pretrain_epochs) - 1];
    CHECK(last_pretrain.recon < 1e-3);
    // and the trained encoder/decoder pair still reconstructs the fixture
    const auto [z, et] = encode(report.encoder, w);
    const auto [rec, dt] = decode(report.decoder, z);
    CHECK(0.5 * (rec - w).squaredNorm() < 5e-3);
}
