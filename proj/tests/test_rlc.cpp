#include "linrecover/errors.hpp"
#include "linrecover/rlc.hpp"
#include "linrecover/synthgen.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace linrecover;

namespace {

// Low-rank linear structure plus a nonlinear function of the leading factors.
Matrix low_rank_nonlinear(Index m, std::uint64_t seed) {
    const Matrix f = oracle::random_matrix(m, 3, seed);
    const Matrix mix = oracle::random_matrix(3, 10, seed + 1);
    Matrix x = f * mix;
    x.col(7) += (f.col(0).array().square() - 1.0).matrix();
    x.col(8) += f.col(1).array().sin().matrix() * 2.0;
    x.col(9) += 0.05 * oracle::random_matrix(m, 1, seed + 2);
    return x.array() + 3.0;
}

RlcConfig small_config(Index k, double tau, std::uint64_t seed) {
    RlcConfig cfg;
    cfg.k = k;
    cfg.tau = tau;
    cfg.hidden = 5;
    cfg.train.max_epochs = 200;
    cfg.train.seed = seed;
    return cfg;
}

} // namespace

TEST_CASE("fsca-rlc degenerates to FSCA when tau is already reached") {
    const Matrix x = low_rank_nonlinear(80, 1);
    const auto [xc, stats] = center_columns(x);
    const SelectionModel fsca = fsca_select(xc, 3);
    RlcConfig cfg = small_config(3, fsca.vex() - 1.0, 1);
    const RlcModel model = fit_fsca_rlc(x, cfg, 20.0, 3);
    CHECK(model.k_bar == 0);
    CHECK_FALSE(model.recovery_net.has_value());
    const Matrix xhat = rlc_reconstruct(model, x);
    const Matrix linear = undo_centering(select_columns(xc, fsca.indices) * fsca.coefficients, stats);
    CHECK((xhat - linear).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(rlc_reconstruct(model, x).rows() == x.rows());
}

TEST_CASE("zero network reduces to the linear encoder") {
    const Matrix x = low_rank_nonlinear(120, 2);
    const Matrix held_out = low_rank_nonlinear(40, 99);
    for (EncoderKind kind : {EncoderKind::selection, EncoderKind::pca}) {
        const RlcConfig cfg = small_config(2, 99.9, 5);
        const RlcModel fitted = kind == EncoderKind::selection ? fit_fsca_rlc(x, cfg, 20.0, 1)
                                                               : fit_pca_rlc(x, cfg, 20.0, 1);
        REQUIRE(fitted.k_bar > 0);
        const RlcModel zeroed = with_zero_network(fitted);
        for (const Matrix* rows : {&x, &held_out}) {
            const Matrix xc = apply_centering(*rows, fitted.column_means);
            const double linear = variance_explained(
                xc, apply_centering(rlc_linear_reconstruct(fitted, *rows), fitted.column_means));
            const double zero = variance_explained(
                xc, apply_centering(rlc_reconstruct(zeroed, *rows), fitted.column_means));
            CHECK(std::abs(zero - linear) < 1e-9);
        }
        // Additive decomposition.
        const Matrix xc = apply_centering(x, fitted.column_means);
        const Matrix diff = rlc_reconstruct(fitted, x) - rlc_linear_reconstruct(fitted, x);
        const Matrix net_part = rlc_recovered_scores(fitted, rlc_encode(fitted, xc)) *
                                fitted.residual_loadings.transpose();
        CHECK((diff - net_part).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("untrained network option gives the linear reconstruction") {
    const Matrix x = low_rank_nonlinear(60, 3);
    RlcConfig cfg = small_config(2, 99.9, 2);
    cfg.train_network = false;
    const RlcModel model = fit_fsca_rlc(x, cfg, 20.0, 1);
    REQUIRE(model.recovery_net.has_value());
    CHECK((rlc_reconstruct(model, x) - rlc_linear_reconstruct(model, x)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("structural identities of the fitted model") {
    const Matrix x = low_rank_nonlinear(100, 4);
    const RlcModel model = fit_fsca_rlc(x, small_config(2, 99.9, 4), 20.0, 2);
    REQUIRE(model.recovery_net.has_value());
    CHECK(model.k_bar == model.k_lin - model.k);
    CHECK(model.recovery_net->layer_sizes == std::vector<Index>{2, 5, model.k_bar});
    CHECK(param_count(*model.recovery_net) ==
          static_cast<std::size_t>(model.hidden * model.k_lin + model.hidden + model.k_lin - model.k));
    const Matrix gram = model.residual_loadings.transpose() * model.residual_loadings;
    CHECK((gram - Matrix::Identity(model.k_bar, model.k_bar)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("pca-rlc residual components are the discarded principal components") {
    const Matrix x = low_rank_nonlinear(90, 5);
    const auto [xc, stats] = center_columns(x);
    const PcaModel pca = fit_pca(xc);
    const RlcModel model = fit_pca_rlc(x, small_config(2, 99.9, 6), 20.0, 4);
    REQUIRE(model.k_bar > 0);
    for (Index j = 0; j < model.k_bar; ++j) {
        const double overlap = std::abs(model.residual_loadings.col(j).dot(pca.loadings.col(2 + j)));
        CHECK(overlap == doctest::Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("pca-rlc with k = k_lin is the PCA reconstruction") {
    const Matrix x = low_rank_nonlinear(70, 6);
    const auto [xc, stats] = center_columns(x);
    const PcaModel pca = fit_pca(xc);
    const Index k_lin = components_for_threshold(pca, 95.0);
    const RlcModel model = fit_pca_rlc(x, small_config(k_lin, 95.0, 1), 20.0, 4);
    CHECK(model.k_bar == 0);
    const Matrix expected = pca_reconstruct(pca, pca_scores(pca, xc, k_lin));
    CHECK((apply_centering(rlc_reconstruct(model, x), stats) - expected).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("trained recovery network improves on the linear baseline") {
    const Matrix x = low_rank_nonlinear(200, 7);
    RlcConfig cfg = small_config(3, 99.9, 8);
    cfg.train.max_epochs = 1000;
    cfg.train.learning_rate = 0.1;
    cfg.train.patience = 20;
    for (EncoderKind kind : {EncoderKind::selection, EncoderKind::pca}) {
        const RlcModel model = kind == EncoderKind::selection ? fit_fsca_rlc(x, cfg, 20.0, 2)
                                                              : fit_pca_rlc(x, cfg, 20.0, 2);
        REQUIRE(model.k_bar > 0);
        const Matrix xc = apply_centering(x, model.column_means);
        const double linear = variance_explained(
            xc, apply_centering(rlc_linear_reconstruct(model, x), model.column_means));
        const double full =
            variance_explained(xc, apply_centering(rlc_reconstruct(model, x), model.column_means));
        CHECK(model.report.best_epoch > 0);
        CHECK(full > linear);
    }
}

TEST_CASE("tau monotonicity of k_lin") {
    const Matrix x = low_rank_nonlinear(80, 9);
    Index previous = 0;
    for (double tau : {50.0, 80.0, 90.0, 95.0, 99.0, 99.9, 100.0}) {
        RlcConfig cfg = small_config(1, tau, 1);
        cfg.train.max_epochs = 1;
        const RlcModel model = fit_fsca_rlc(x, cfg, 20.0, 1);
        CHECK(model.k_lin >= previous);
        previous = model.k_lin;
    }
}

TEST_CASE("rlc argument errors") {
    const Matrix x = low_rank_nonlinear(40, 1);
    CHECK_THROWS_AS(fit_fsca_rlc(x, small_config(0, 99.0, 1), 20.0, 1), InvalidArgument);
    CHECK_THROWS_AS(fit_fsca_rlc(x, small_config(11, 99.0, 1), 20.0, 1), InvalidArgument);
    CHECK_THROWS_AS(fit_fsca_rlc(x, small_config(2, 0.0, 1), 20.0, 1), InvalidArgument);
    CHECK_THROWS_AS(fit_fsca_rlc(x, small_config(2, 101.0, 1), 20.0, 1), InvalidArgument);
    RlcConfig no_hidden = small_config(2, 99.0, 1);
    no_hidden.hidden = 0;
    CHECK_THROWS_AS(fit_fsca_rlc(x, no_hidden, 20.0, 1), InvalidArgument);
    const RlcModel model = fit_fsca_rlc(x, small_config(2, 99.0, 1), 20.0, 1);
    CHECK_THROWS_AS(rlc_reconstruct(model, Matrix::Zero(3, 9)), InvalidArgument);
}

TEST_CASE("fsca-sde") {
    const Matrix x = low_rank_nonlinear(80, 11);
    SUBCASE("requires hidden layers") {
        SdeConfig cfg;
        cfg.hidden_sizes.clear();
        CHECK_THROWS_AS(fit_fsca_sde(x, cfg, 20.0, 1), InvalidArgument);
    }
    SUBCASE("shapes and forward cross-check") {
        SdeConfig cfg;
        cfg.k = 3;
        cfg.hidden_sizes = {11, 21};
        cfg.train.max_epochs = 20;
        const SdeModel model = fit_fsca_sde(x, cfg, 20.0, 1);
        CHECK(model.decoder_net.layer_sizes == std::vector<Index>{3, 11, 21, 10});
        const Matrix xhat = sde_reconstruct(model, x);
        CHECK(xhat.rows() == x.rows());
        CHECK(xhat.cols() == x.cols());
        const Matrix xc = apply_centering(x, model.column_means);
        Matrix codes = select_columns(xc, model.selection.indices);
        codes = (codes.array().rowwise() / model.input_scale.array()).matrix();
        Matrix expected = oracle::naive_forward(model.decoder_net, codes);
        expected = (expected.array().rowwise() * model.output_scale.array()).matrix();
        CHECK((apply_centering(xhat, model.column_means) - expected).cwiseAbs().maxCoeff() < 1e-10);
        CHECK_THROWS_AS(sde_reconstruct(model, Matrix::Zero(2, 4)), InvalidArgument);
    }
    SUBCASE("linear decoder converges toward least squares") {
        SdeConfig cfg;
        cfg.k = 3;
        cfg.hidden_sizes = {10};
        cfg.hidden_activation = Activation::linear;
        cfg.pretrain = false;
        cfg.train.max_epochs = 1500;
        cfg.train.patience = 50;
        cfg.train.lambda_l2 = 0.0;
        cfg.train.learning_rate = 0.01;
        const SdeModel model = fit_fsca_sde(x, cfg, 20.0, 2);
        const Matrix xc = apply_centering(x, model.column_means);
        const double sde = variance_explained(xc, apply_centering(sde_reconstruct(model, x), model.column_means));
        const double ls = subset_variance_explained(xc, model.selection.indices);
        CHECK(std::abs(sde - ls) < 0.5);
    }
}

TEST_CASE("layer-wise pretraining is not worse than random init in most trials") {
    int wins = 0;
    for (std::uint64_t trial = 0; trial < 10; ++trial) {
        SynthConfig s;
        s.m = 200;
        s.v = 20;
        s.sigma2 = 0.01;
        s.seed = 500 + trial;
        const Matrix x = generate_xsynthetic(s);
        SdeConfig cfg;
        cfg.k = 3;
        cfg.hidden_sizes = {11, 21};
        cfg.train.max_epochs = 300;
        cfg.train.learning_rate = 0.3;
        cfg.train.batch_size = 8;
        cfg.train.patience = 50;
        cfg.train.gamma_sparsity = 0.01;
        cfg.train.seed = trial;
        auto vex_of = [&](bool pretrain) {
            cfg.pretrain = pretrain;
            const SdeModel model = fit_fsca_sde(x, cfg, 20.0, trial);
            const Matrix xc = apply_centering(x, model.column_means);
            return variance_explained(xc, apply_centering(sde_reconstruct(model, x), model.column_means));
        };
        const double pre = vex_of(true);
        const double raw = vex_of(false);
        MESSAGE("trial " << trial << ": pretrained " << pre << ", random init " << raw);
        wins += pre >= raw ? 1 : 0;
    }
    CHECK(wins >= 7);
}
