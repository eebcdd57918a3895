#pragma once

// Recovery of linear components: a linear encoder (selected variables or PCA
// scores) and least-squares decoder, plus a small network that predicts the
// leading principal scores of the linear-reconstruction residual from the
// code. Also the stacked deep decoder baseline fed by selected variables.

#include "linrecover/matrix_core.hpp"
#include "linrecover/neuralnet.hpp"
#include "linrecover/pca.hpp"
#include "linrecover/selection.hpp"
#include "linrecover/split.hpp"

#include <optional>
#include <vector>

namespace linrecover {

enum class EncoderKind { selection, pca };

struct RlcConfig {
    Index k = 3;
    double tau = 99.0;        // percent variance used to choose k_lin
    Index hidden = 6;         // h in the recovery network [k, h, k_bar]
    TrainConfig train;        // sparsity weight is ignored for the recovery network
    bool train_network = true; // false leaves the network with a zero output layer
};

struct RlcModel {
    EncoderKind encoder = EncoderKind::selection;
    SelectionModel selection;   // selection encoder
    Matrix pca_loadings;        // v x k, PCA encoder
    Index k = 0;
    double tau = 0.0;
    Index k_lin = 0;
    Index k_bar = 0;
    Index hidden = 0;
    Matrix linear_coeffs;       // B, k x v
    Matrix residual_loadings;   // P_r, v x k_bar
    std::optional<MlpNetwork> recovery_net; // [k, h, k_bar], absent when k_bar = 0
    RowVector input_scale;      // code columns are divided by this before the network
    RowVector target_scale;     // network outputs are multiplied by this
    ColumnStats column_means;
    TrainReport report;

    Index width() const { return column_means.means.size(); }
};

/// FSCA encoder. X is the fitting data (train + val rows); `split` says which
/// of its rows train the network and which drive early stopping.
RlcModel fit_fsca_rlc(const Matrix& x, const RlcConfig& cfg, const RowSplit& split);
/// Same with the validation rows carved from X by carve_validation().
RlcModel fit_fsca_rlc(const Matrix& x, const RlcConfig& cfg, double val_fraction,
                      std::uint64_t split_seed);

/// PCA encoder: the recovered components are PCs k+1..k_lin of X.
RlcModel fit_pca_rlc(const Matrix& x, const RlcConfig& cfg, const RowSplit& split);
RlcModel fit_pca_rlc(const Matrix& x, const RlcConfig& cfg, double val_fraction,
                     std::uint64_t split_seed);

/// Code T_k of already-centered rows.
Matrix rlc_encode(const RlcModel& model, const Matrix& xc);

/// Network contribution in residual-score units, unscaled back to data units.
Matrix rlc_recovered_scores(const RlcModel& model, const Matrix& codes);

/// T_k B + means.
Matrix rlc_linear_reconstruct(const RlcModel& model, const Matrix& x_new);

/// T_k B + N(T_k) P_r^T + means.
Matrix rlc_reconstruct(const RlcModel& model, const Matrix& x_new);

/// Copy whose network output layer is zeroed (reconstruction = linear part).
RlcModel with_zero_network(RlcModel model);

struct SdeConfig {
    Index k = 3;
    std::vector<Index> hidden_sizes{11, 21};
    Activation hidden_activation = Activation::logistic;
    TrainConfig train;
    bool pretrain = true;
};

struct SdeModel {
    SelectionModel selection;
    MlpNetwork decoder_net; // [k, hidden..., v]
    RowVector input_scale;
    RowVector output_scale;
    ColumnStats column_means;
    TrainReport report;
};

/// FSCA selects k variables; a stacked network decodes them to all v columns,
/// pre-trained layer-wise as sparse autoencoders and then fine-tuned on MSE.
SdeModel fit_fsca_sde(const Matrix& x, const SdeConfig& cfg, const RowSplit& split);
SdeModel fit_fsca_sde(const Matrix& x, const SdeConfig& cfg, double val_fraction,
                      std::uint64_t split_seed);

Matrix sde_reconstruct(const SdeModel& model, const Matrix& x_new);

} // namespace linrecover
