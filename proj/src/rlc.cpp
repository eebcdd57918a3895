#include "linrecover/rlc.hpp"

#include "linrecover/errors.hpp"
#include "linrecover/random.hpp"

#include <cmath>
#include <string>

namespace linrecover {

namespace {

// Root-mean-square of each (centered) column; degenerate columns get scale 1.
RowVector column_scale(const Matrix& m) {
    RowVector s = (m.colwise().squaredNorm() / static_cast<double>(std::max<Index>(m.rows(), 1)))
                      .array()
                      .sqrt()
                      .matrix();
    for (Index j = 0; j < s.size(); ++j) {
        if (!(s(j) > 1e-12)) {
            s(j) = 1.0;
        }
    }
    return s;
}

Matrix divide_columns(const Matrix& m, const RowVector& s) {
    return (m.array().rowwise() / s.array()).matrix();
}

Matrix multiply_columns(const Matrix& m, const RowVector& s) {
    return (m.array().rowwise() * s.array()).matrix();
}

void check_split(const RowSplit& split, Index m, const char* what) {
    if (split.train.empty()) {
        throw InvalidArgument(std::string(what) + ": split has no training rows");
    }
    for (const auto* part : {&split.train, &split.val}) {
        for (Index r : *part) {
            if (r < 0 || r >= m) {
                throw InvalidArgument(std::string(what) + ": split row " + std::to_string(r) +
                                      " outside the data");
            }
        }
    }
}

RlcModel fit_rlc(const Matrix& x, const RlcConfig& cfg, const RowSplit& split, EncoderKind kind) {
    const char* what = kind == EncoderKind::selection ? "fit_fsca_rlc" : "fit_pca_rlc";
    require_finite(x, what);
    if (cfg.k < 1 || cfg.k > x.cols()) {
        throw InvalidArgument(std::string(what) + ": k=" + std::to_string(cfg.k) +
                              " outside [1, " + std::to_string(x.cols()) + "]");
    }
    if (!(cfg.tau > 0.0 && cfg.tau <= 100.0)) {
        throw InvalidArgument(std::string(what) + ": tau must lie in (0, 100]");
    }
    if (cfg.hidden < 1) {
        throw InvalidArgument(std::string(what) + ": hidden width must be >= 1");
    }
    check_split(split, x.rows(), what);

    RlcModel model;
    model.encoder = kind;
    model.k = cfg.k;
    model.tau = cfg.tau;
    model.hidden = cfg.hidden;

    auto [xc, stats] = center_columns(x);
    model.column_means = std::move(stats);
    const PcaModel pca = fit_pca(xc);
    model.k_lin = components_for_threshold(pca, cfg.tau);

    Matrix codes;
    if (kind == EncoderKind::selection) {
        model.selection = fsca_select(xc, cfg.k);
        model.linear_coeffs = model.selection.coefficients;
        codes = select_columns(xc, model.selection.indices);
    } else {
        if (cfg.k > pca.rank()) {
            throw InvalidArgument("fit_pca_rlc: k=" + std::to_string(cfg.k) +
                                  " exceeds data rank " + std::to_string(pca.rank()));
        }
        model.pca_loadings = pca.loadings.leftCols(cfg.k);
        model.linear_coeffs = model.pca_loadings.transpose();
        codes = xc * model.pca_loadings;
    }
    model.input_scale = column_scale(codes);

    const Index v = x.cols();
    model.k_bar = std::max<Index>(model.k_lin - cfg.k, 0);
    if (model.k_bar == 0) {
        model.residual_loadings = Matrix::Zero(v, 0);
        model.target_scale = RowVector::Zero(0);
        return model;
    }

    const Matrix residual = xc - codes * model.linear_coeffs;
    const PcaModel residual_pca = fit_pca(residual);
    // The residual has rank >= rank(X) - k >= k_lin - k, so this only bites on
    // numerically rank-deficient data.
    model.k_bar = std::min(model.k_bar, residual_pca.rank());
    if (model.k_bar == 0) {
        model.residual_loadings = Matrix::Zero(v, 0);
        model.target_scale = RowVector::Zero(0);
        return model;
    }
    model.residual_loadings = residual_pca.loadings.leftCols(model.k_bar);
    const Matrix targets = residual * model.residual_loadings;
    model.target_scale = column_scale(targets);

    MlpNetwork net = make_network({cfg.k, cfg.hidden, model.k_bar},
                                  {Activation::tanh, Activation::linear},
                                  derive_seed(cfg.train.seed, 1));
    const std::size_t theta = param_count(net);
    const auto h = static_cast<std::size_t>(cfg.hidden);
    const auto k = static_cast<std::size_t>(cfg.k);
    const auto k_bar = static_cast<std::size_t>(model.k_bar);
    if (theta != k * h + h + h * k_bar + k_bar ||
        (model.k_bar == model.k_lin - cfg.k &&
         theta != h * static_cast<std::size_t>(model.k_lin) + h +
                      static_cast<std::size_t>(model.k_lin) - k)) {
        throw NumericError(std::string(what) + ": recovery network parameter count mismatch");
    }

    if (!cfg.train_network) {
        net.weights.back().setZero();
        net.biases.back().setZero();
        model.recovery_net = std::move(net);
        return model;
    }

    const Matrix inputs = divide_columns(codes, model.input_scale);
    const Matrix scaled_targets = divide_columns(targets, model.target_scale);
    TrainConfig train_cfg = cfg.train;
    train_cfg.gamma_sparsity = 0.0;
    model.report = train(net, select_rows(inputs, split.train), select_rows(scaled_targets, split.train),
                         select_rows(inputs, split.val), select_rows(scaled_targets, split.val),
                         train_cfg);
    model.recovery_net = std::move(net);
    return model;
}

} // namespace

RlcModel fit_fsca_rlc(const Matrix& x, const RlcConfig& cfg, const RowSplit& split) {
    return fit_rlc(x, cfg, split, EncoderKind::selection);
}

RlcModel fit_fsca_rlc(const Matrix& x, const RlcConfig& cfg, double val_fraction,
                      std::uint64_t split_seed) {
    return fit_rlc(x, cfg, carve_validation(x.rows(), val_fraction, split_seed),
                   EncoderKind::selection);
}

RlcModel fit_pca_rlc(const Matrix& x, const RlcConfig& cfg, const RowSplit& split) {
    return fit_rlc(x, cfg, split, EncoderKind::pca);
}

RlcModel fit_pca_rlc(const Matrix& x, const RlcConfig& cfg, double val_fraction,
                     std::uint64_t split_seed) {
    return fit_rlc(x, cfg, carve_validation(x.rows(), val_fraction, split_seed),
                   EncoderKind::pca);
}

Matrix rlc_encode(const RlcModel& model, const Matrix& xc) {
    if (xc.cols() != model.width()) {
        throw InvalidArgument("rlc: input width " + std::to_string(xc.cols()) +
                              " does not match model width " + std::to_string(model.width()));
    }
    if (model.encoder == EncoderKind::selection) {
        return select_columns(xc, model.selection.indices);
    }
    return xc * model.pca_loadings;
}

Matrix rlc_recovered_scores(const RlcModel& model, const Matrix& codes) {
    if (!model.recovery_net) {
        return Matrix::Zero(codes.rows(), 0);
    }
    return multiply_columns(forward(*model.recovery_net, divide_columns(codes, model.input_scale)),
                            model.target_scale);
}

Matrix rlc_linear_reconstruct(const RlcModel& model, const Matrix& x_new) {
    const Matrix xc = apply_centering(x_new, model.column_means);
    return undo_centering(rlc_encode(model, xc) * model.linear_coeffs, model.column_means);
}

Matrix rlc_reconstruct(const RlcModel& model, const Matrix& x_new) {
    const Matrix xc = apply_centering(x_new, model.column_means);
    const Matrix codes = rlc_encode(model, xc);
    Matrix xhat = codes * model.linear_coeffs;
    if (model.recovery_net) {
        xhat += rlc_recovered_scores(model, codes) * model.residual_loadings.transpose();
    }
    return undo_centering(xhat, model.column_means);
}

RlcModel with_zero_network(RlcModel model) {
    if (model.recovery_net) {
        model.recovery_net->weights.back().setZero();
        model.recovery_net->biases.back().setZero();
    }
    return model;
}

SdeModel fit_fsca_sde(const Matrix& x, const SdeConfig& cfg, const RowSplit& split) {
    require_finite(x, "fit_fsca_sde");
    if (cfg.hidden_sizes.empty()) {
        throw InvalidArgument("fit_fsca_sde: at least one hidden layer is required");
    }
    if (cfg.k < 1 || cfg.k > x.cols()) {
        throw InvalidArgument("fit_fsca_sde: k=" + std::to_string(cfg.k) + " outside [1, " +
                              std::to_string(x.cols()) + "]");
    }
    check_split(split, x.rows(), "fit_fsca_sde");

    SdeModel model;
    auto [xc, stats] = center_columns(x);
    model.column_means = std::move(stats);
    model.selection = fsca_select(xc, cfg.k);
    const Matrix codes = select_columns(xc, model.selection.indices);
    model.input_scale = column_scale(codes);
    model.output_scale = column_scale(xc);
    const Matrix inputs = divide_columns(codes, model.input_scale);
    const Matrix targets = divide_columns(xc, model.output_scale);

    std::vector<Index> sizes{cfg.k};
    sizes.insert(sizes.end(), cfg.hidden_sizes.begin(), cfg.hidden_sizes.end());
    sizes.push_back(x.cols());
    std::vector<Activation> acts(cfg.hidden_sizes.size(), cfg.hidden_activation);
    acts.push_back(Activation::linear);

    const Matrix in_train = select_rows(inputs, split.train);
    const Matrix in_val = select_rows(inputs, split.val);
    if (cfg.pretrain) {
        model.decoder_net = pretrain_stacked(sizes, acts, in_train, in_val, cfg.train);
    } else {
        model.decoder_net = make_network(sizes, acts, derive_seed(cfg.train.seed, 0));
    }
    TrainConfig fine = cfg.train;
    fine.gamma_sparsity = 0.0;
    fine.seed = derive_seed(cfg.train.seed, 77);
    model.report = train(model.decoder_net, in_train, select_rows(targets, split.train), in_val,
                         select_rows(targets, split.val), fine);
    return model;
}

SdeModel fit_fsca_sde(const Matrix& x, const SdeConfig& cfg, double val_fraction,
                      std::uint64_t split_seed) {
    return fit_fsca_sde(x, cfg, carve_validation(x.rows(), val_fraction, split_seed));
}

Matrix sde_reconstruct(const SdeModel& model, const Matrix& x_new) {
    if (x_new.cols() != model.column_means.means.size()) {
        throw InvalidArgument("sde_reconstruct: input width " + std::to_string(x_new.cols()) +
                              " does not match model width " +
                              std::to_string(model.column_means.means.size()));
    }
    const Matrix xc = apply_centering(x_new, model.column_means);
    const Matrix codes = divide_columns(select_columns(xc, model.selection.indices), model.input_scale);
    const Matrix out = multiply_columns(forward(model.decoder_net, codes), model.output_scale);
    return undo_centering(out, model.column_means);
}

} // namespace linrecover
