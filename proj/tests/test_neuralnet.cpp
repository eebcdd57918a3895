#include "linrecover/errors.hpp"
#include "linrecover/neuralnet.hpp"
#include "linrecover/pca.hpp"
#include "linrecover/random.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace linrecover;

namespace {

MlpNetwork random_net(std::vector<Index> sizes, std::vector<Activation> acts, std::uint64_t seed) {
    MlpNetwork net = make_network(std::move(sizes), std::move(acts), seed);
    // Nonzero biases so bias gradients are exercised.
    const Matrix noise = oracle::random_matrix(64, 1, seed + 999);
    Index n = 0;
    for (auto& b : net.biases) {
        for (Index i = 0; i < b.size(); ++i) b(i) = 0.2 * noise(n++ % 64, 0);
    }
    return net;
}

} // namespace

TEST_CASE("forward") {
    SUBCASE("zero parameters give zero output") {
        MlpNetwork net = make_network({3, 4, 2}, {Activation::tanh, Activation::linear}, 1);
        for (auto& w : net.weights) w.setZero();
        CHECK(forward(net, oracle::random_matrix(5, 3, 2)).isZero(0.0));
    }
    SUBCASE("identity layer") {
        MlpNetwork net = make_network({3, 3}, {Activation::linear}, 1);
        net.weights[0] = Matrix::Identity(3, 3);
        const Matrix x = oracle::random_matrix(4, 3, 3);
        CHECK(forward(net, x) == x);
    }
    SUBCASE("matches a scalar re-evaluation") {
        for (Activation a : {Activation::linear, Activation::logistic, Activation::tanh, Activation::relu}) {
            const MlpNetwork net = random_net({4, 5, 3}, {a, Activation::logistic}, 7);
            const Matrix x = oracle::random_matrix(6, 4, 8);
            CHECK((forward(net, x) - oracle::naive_forward(net, x)).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
    SUBCASE("row order independent") {
        const MlpNetwork net = random_net({3, 4, 2}, {Activation::tanh, Activation::linear}, 4);
        const Matrix x = oracle::random_matrix(5, 3, 5);
        const Matrix full = forward(net, x);
        for (Index i = 0; i < x.rows(); ++i) {
            CHECK(forward(net, x.row(i)) == full.row(i));
        }
    }
    SUBCASE("errors") {
        const MlpNetwork net = make_network({3, 2}, {Activation::linear}, 1);
        CHECK_THROWS_AS(forward(net, Matrix::Zero(2, 4)), InvalidArgument);
        MlpNetwork huge = net;
        huge.weights[0].setConstant(1e308);
        CHECK_THROWS_AS(forward(huge, Matrix::Constant(1, 3, 1e308)), NumericError);
    }
}

TEST_CASE("param_count") {
    CHECK(param_count(make_network({3, 6, 2}, {Activation::tanh, Activation::linear}, 0)) == 38);
    CHECK(param_count(make_network({1, 1, 1}, {Activation::tanh, Activation::linear}, 0)) == 4);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        std::vector<Index> sizes;
        for (int l = 0; l < 2 + static_cast<int>(seed % 3); ++l) {
            sizes.push_back(1 + static_cast<Index>((seed * 7 + static_cast<std::uint64_t>(l) * 3) % 9));
        }
        const MlpNetwork net = make_network(sizes, std::vector<Activation>(sizes.size() - 1, Activation::tanh), seed);
        std::size_t stored = 0;
        for (std::size_t l = 0; l < net.depth(); ++l) {
            stored += static_cast<std::size_t>(net.weights[l].size() + net.biases[l].size());
        }
        CHECK(param_count(net) == stored);
    }
    // One hidden layer: k h + h + h kbar + kbar = h k_lin + h + k_lin - k with kbar = k_lin - k.
    for (Index k = 1; k <= 4; ++k) {
        for (Index h = 1; h <= 6; ++h) {
            const Index k_lin = k + 3;
            const MlpNetwork net = make_network({k, h, k_lin - k}, {Activation::tanh, Activation::linear}, 0);
            CHECK(param_count(net) == static_cast<std::size_t>(h * k_lin + h + k_lin - k));
        }
    }
}

TEST_CASE("initialization bounds") {
    const MlpNetwork net = make_network({16, 4, 2}, {Activation::tanh, Activation::linear}, 3);
    CHECK(net.weights[0].cwiseAbs().maxCoeff() <= 0.25);
    CHECK(net.weights[1].cwiseAbs().maxCoeff() <= 0.5);
    CHECK(net.biases[0].isZero(0.0));
    CHECK(make_network({16, 4, 2}, {Activation::tanh, Activation::linear}, 3).weights[0] == net.weights[0]);
}

TEST_CASE("kl_bernoulli") {
    CHECK(kl_bernoulli(0.05, 0.05) == doctest::Approx(0.0));
    CHECK(std::abs(kl_bernoulli(0.05, 0.5) - 0.494632) < 1e-5);
    const double at_clamp = 0.05 * std::log(0.05 / 1e-8) + 0.95 * std::log(0.95 / (1.0 - 1e-8));
    CHECK(kl_bernoulli(0.05, 0.0) == doctest::Approx(at_clamp));
    CHECK(std::isfinite(kl_bernoulli(0.05, -3.0)));
    CHECK_THROWS_AS(kl_bernoulli(0.0, 0.5), InvalidArgument);
    CHECK_THROWS_AS(kl_bernoulli(1.0, 0.5), InvalidArgument);
}

TEST_CASE("sparse_loss") {
    const Matrix x = oracle::random_matrix(9, 4, 1);
    const Matrix y = oracle::random_matrix(9, 4, 2);
    SUBCASE("reduces to MSE without penalties") {
        const MlpNetwork net = random_net({4, 2, 4}, {Activation::logistic, Activation::linear}, 3);
        CHECK(sparse_loss(net, x, y, {}) == doctest::Approx(mse(y, forward(net, x))).epsilon(1e-14));
    }
    SUBCASE("zero-weight logistic bottleneck has rate 0.5") {
        MlpNetwork net = make_network({4, 3, 4}, {Activation::logistic, Activation::linear}, 3);
        for (auto& w : net.weights) w.setZero();
        LossConfig cfg{0.0, 1.0, 0.05};
        const double expected = mse(y, Matrix::Zero(9, 4)) + 3.0 * kl_bernoulli(0.05, 0.5);
        CHECK(sparse_loss(net, x, y, cfg) == doctest::Approx(expected).epsilon(1e-14));
    }
    SUBCASE("matches an independent evaluator") {
        const MlpNetwork net = random_net({4, 5, 2, 5, 4},
                                          {Activation::tanh, Activation::logistic, Activation::relu, Activation::linear}, 5);
        const LossConfig cfg{0.01, 0.5, 0.1};
        CHECK(std::abs(sparse_loss(net, x, y, cfg) - oracle::naive_sparse_loss(net, x, y, cfg)) < 1e-10);
        CHECK(bottleneck_layer(net) == std::optional<std::size_t>{2});
    }
}

TEST_CASE("gradients") {
    SUBCASE("finite differences, every activation and penalty") {
        const std::vector<Activation> kinds{Activation::linear, Activation::logistic, Activation::tanh, Activation::relu};
        for (std::uint64_t seed = 0; seed < 8; ++seed) {
            const Activation a = kinds[seed % 4];
            const MlpNetwork net = random_net({4, 6, 3, 4}, {a, Activation::logistic, kinds[(seed + 1) % 4]}, seed);
            const Matrix x = oracle::random_matrix(7, 4, seed + 10);
            const Matrix y = oracle::random_matrix(7, 4, seed + 20);
            const LossConfig cfg{0.03, 0.7, 0.05};
            const Gradients g = gradients(net, x, y, cfg);
            const Gradients fd = oracle::finite_difference_gradients(net, x, y, cfg);
            CHECK(oracle::max_relative_error(g, fd) < 1e-4);
        }
    }
    SUBCASE("linear network closed form") {
        MlpNetwork net = make_network({3, 2}, {Activation::linear}, 4);
        const Matrix x = oracle::random_matrix(6, 3, 5);
        const Matrix y = oracle::random_matrix(6, 2, 6);
        const Gradients g = gradients(net, x, y, {});
        const Matrix residual = forward(net, x) - y;
        const Matrix expected_w = 2.0 / 12.0 * residual.transpose() * x;
        CHECK((g.weights[0] - expected_w).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((g.biases[0] - 2.0 / 12.0 * residual.colwise().sum().transpose()).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("zero target and zero init give zero output-bias gradient") {
        MlpNetwork net = make_network({3, 4, 2}, {Activation::tanh, Activation::linear}, 4);
        for (auto& w : net.weights) w.setZero();
        const Gradients g = gradients(net, oracle::random_matrix(5, 3, 1), Matrix::Zero(5, 2), {});
        CHECK(g.biases[1].isZero(0.0));
    }
}

TEST_CASE("train") {
    const Matrix x = oracle::random_matrix(40, 3, 1);
    Matrix w_true(3, 2);
    w_true << 0.5, -1.0, 2.0, 0.3, -0.7, 1.1;
    const Matrix y = x * w_true;
    const Matrix xv = oracle::random_matrix(10, 3, 2);
    const Matrix yv = xv * w_true;

    SUBCASE("zero learning rate leaves parameters unchanged") {
        MlpNetwork net = make_network({3, 2}, {Activation::linear}, 1);
        const MlpNetwork before = net;
        TrainConfig cfg;
        cfg.max_epochs = 1;
        cfg.learning_rate = 0.0;
        const TrainReport r = train(net, x, y, xv, yv, cfg);
        CHECK(r.epochs_run == 1);
        CHECK(r.train_loss_curve.size() == 1);
        CHECK(net.weights[0] == before.weights[0]);
    }
    SUBCASE("loss decreases on a linearly solvable target") {
        MlpNetwork net = make_network({3, 2}, {Activation::linear}, 1);
        TrainConfig cfg;
        cfg.max_epochs = 20;
        cfg.learning_rate = 0.05;
        cfg.lambda_l2 = 0.0;
        const TrainReport r = train(net, x, y, xv, yv, cfg);
        REQUIRE(r.train_loss_curve.size() >= 5);
        CHECK(r.train_loss_curve[0] < r.initial_train_loss);
        for (std::size_t i = 1; i < 5; ++i) {
            CHECK(r.train_loss_curve[i] < r.train_loss_curve[i - 1]);
        }
    }
    SUBCASE("seeded training is reproducible and keeps the best validation parameters") {
        TrainConfig cfg;
        cfg.max_epochs = 30;
        cfg.seed = 9;
        MlpNetwork a = make_network({3, 4, 2}, {Activation::tanh, Activation::linear}, 2);
        MlpNetwork b = a;
        const TrainReport ra = train(a, x, y, xv, yv, cfg);
        const TrainReport rb = train(b, x, y, xv, yv, cfg);
        CHECK(ra.train_loss_curve == rb.train_loss_curve);
        CHECK(a.weights[0] == b.weights[0]);
        CHECK(ra.epochs_run <= cfg.max_epochs);
        CHECK(ra.val_loss_curve.size() == ra.epochs_run);
        const double best = *std::min_element(ra.val_loss_curve.begin(), ra.val_loss_curve.end());
        CHECK(mse(yv, forward(a, xv)) == doctest::Approx(std::min(best, ra.initial_val_loss)));
    }
    SUBCASE("early stopping triggers on a stalled validation loss") {
        TrainConfig cfg;
        cfg.max_epochs = 500;
        cfg.patience = 3;
        cfg.learning_rate = 0.0;
        MlpNetwork net = make_network({3, 2}, {Activation::linear}, 1);
        const TrainReport r = train(net, x, y, xv, yv, cfg);
        CHECK(r.stopped_early);
        CHECK(r.epochs_run == 3);
    }
    SUBCASE("divergence is reported with the epoch") {
        TrainConfig cfg;
        cfg.max_epochs = 200;
        cfg.learning_rate = 1e6;
        cfg.patience = 1000;
        MlpNetwork net = make_network({3, 2}, {Activation::linear}, 1);
        CHECK_THROWS_AS(train(net, x, y * 1e100, xv, yv * 1e100, cfg), TrainingDivergence);
    }
    SUBCASE("config validation") {
        TrainConfig cfg;
        cfg.max_epochs = 0;
        MlpNetwork net = make_network({3, 2}, {Activation::linear}, 1);
        CHECK_THROWS_AS(train(net, x, y, xv, yv, cfg), InvalidArgument);
    }
}

TEST_CASE("linear autoencoder approaches PCA") {
    const Matrix base = oracle::random_matrix(30, 5, 21);
    Matrix mix = Matrix::Identity(5, 5);
    mix.diagonal() << 3.0, 2.0, 0.5, 0.3, 0.2;
    const Matrix xc = oracle::centered(base * mix);
    const PcaModel pca = fit_pca(xc);
    MlpNetwork ae = make_network({5, 2, 5}, {Activation::linear, Activation::linear}, 4);
    TrainConfig cfg;
    cfg.max_epochs = 3000;
    cfg.learning_rate = 0.02;
    cfg.batch_size = 30;
    cfg.lambda_l2 = 0.0;
    cfg.gamma_sparsity = 0.0;
    cfg.patience = 3000;
    train(ae, xc, xc, Matrix(0, 5), Matrix(0, 5), cfg);
    const double vex = variance_explained(xc, forward(ae, xc));
    CHECK(std::abs(vex - pca.cumulative_vex(1)) < 0.5);
}

TEST_CASE("pretrain_stacked") {
    const Matrix x = oracle::centered(oracle::random_matrix(60, 4, 5));
    TrainConfig cfg;
    cfg.max_epochs = 30;
    cfg.seed = 3;
    SUBCASE("one hidden layer equals a single sparse autoencoder fit") {
        const MlpNetwork stack = pretrain_stacked({4, 3, 4}, {Activation::logistic, Activation::linear}, x, Matrix(0, 4), cfg);
        MlpNetwork sub = make_network({4, 3, 4}, {Activation::logistic, Activation::linear}, derive_seed(cfg.seed, 1));
        TrainConfig sub_cfg = cfg;
        sub_cfg.seed = derive_seed(cfg.seed, 1000);
        train(sub, x, x, Matrix(0, 4), Matrix(0, 4), sub_cfg);
        CHECK(stack.weights[0] == sub.weights[0]);
        CHECK(stack.biases[0] == sub.biases[0]);
    }
    SUBCASE("stacked shapes are constructible") {
        const MlpNetwork stack = pretrain_stacked({3, 11, 21, 50},
                                                  {Activation::logistic, Activation::logistic, Activation::linear},
                                                  oracle::random_matrix(40, 3, 1), Matrix(0, 3), cfg);
        CHECK(stack.layer_sizes == std::vector<Index>{3, 11, 21, 50});
        CHECK(param_count(stack) == 3 * 11 + 11 + 11 * 21 + 21 + 21 * 50 + 50);
    }
}
