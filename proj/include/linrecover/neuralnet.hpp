#pragma once

// Small fully connected networks trained by minibatch gradient descent on a
// mean-squared-error loss with optional L2 weight decay and a KL sparsity
// penalty on the bottleneck layer.

#include "linrecover/matrix_core.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace linrecover {

enum class Activation { linear, logistic, tanh, relu };

std::string_view to_string(Activation a);
Activation activation_from_string(std::string_view name);

/// Samples are rows: layer l computes A_l = f_l(A_{l-1} W_l^T + 1 b_l^T).
struct MlpNetwork {
    std::vector<Index> layer_sizes;       // n_0 .. n_L
    std::vector<Matrix> weights;          // W_l, n_l x n_{l-1}, l = 1..L
    std::vector<Vector> biases;           // b_l, length n_l
    std::vector<Activation> activations;  // f_l, one per non-input layer

    std::size_t depth() const { return weights.size(); }
    Index input_width() const { return layer_sizes.front(); }
    Index output_width() const { return layer_sizes.back(); }

    /// Throws InvalidArgument if the containers disagree with layer_sizes.
    void validate() const;
};

/// Weights uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)], biases zero.
MlpNetwork make_network(std::vector<Index> layer_sizes, std::vector<Activation> activations,
                        std::uint64_t seed);

/// Throws NumericError if any intermediate value is non-finite.
Matrix forward(const MlpNetwork& net, const Matrix& x);

/// Total number of stored weights and biases.
std::size_t param_count(const MlpNetwork& net);

/// Index (1-based layer number) of the narrowest hidden layer, first on ties;
/// nullopt when the network has no hidden layer.
std::optional<std::size_t> bottleneck_layer(const MlpNetwork& net);

inline constexpr double kKlClamp = 1e-8;

/// KL(rho || rho_hat) between Bernoulli distributions, natural log.
/// rho_hat is clamped into [1e-8, 1 - 1e-8]; rho must lie in (0, 1).
double kl_bernoulli(double rho, double rho_hat);

struct LossConfig {
    double lambda_l2 = 0.0;
    double gamma_sparsity = 0.0;
    double rho_target = 0.05;
};

/// ||Y - N(X)||^2 / (m n_L) + (lambda/2) sum_{l<L} ||W_l||^2
///   + gamma sum_i KL(rho || rho_hat_i), rho_hat_i the batch-mean activation
///   of bottleneck unit i.
double sparse_loss(const MlpNetwork& net, const Matrix& x, const Matrix& y, const LossConfig& cfg);

struct Gradients {
    std::vector<Matrix> weights;
    std::vector<Vector> biases;
};

/// Exact gradient of sparse_loss with respect to every parameter.
Gradients gradients(const MlpNetwork& net, const Matrix& x, const Matrix& y, const LossConfig& cfg);

struct TrainConfig {
    std::size_t max_epochs = 1000;
    double learning_rate = 0.05;
    std::size_t batch_size = 16;
    std::size_t patience = 6;
    double lambda_l2 = 1e-4;
    double gamma_sparsity = 1.0;
    double rho_target = 0.05;
    std::uint64_t seed = 0;

    LossConfig loss() const { return {lambda_l2, gamma_sparsity, rho_target}; }
    void validate() const;
};

struct TrainReport {
    std::size_t epochs_run = 0;
    std::vector<double> train_loss_curve; // regularized loss on the training rows
    std::vector<double> val_loss_curve;   // unregularized MSE on the validation rows
    bool stopped_early = false;
    std::size_t best_epoch = 0;           // 0 = initial parameters were never beaten
    double initial_train_loss = 0.0;
    double initial_val_loss = 0.0;
};

/// Minibatch gradient descent with early stopping on validation MSE.
///
/// Training stops after `patience` epochs without a new best validation MSE,
/// or at max_epochs; the network is left at the best parameters seen
/// (including the initial ones). With an empty validation set the training
/// MSE is monitored instead. Throws TrainingDivergence on a non-finite loss.
TrainReport train(MlpNetwork& net, const Matrix& x_train, const Matrix& y_train,
                  const Matrix& x_val, const Matrix& y_val, const TrainConfig& cfg);

/// Greedy layer-wise pre-training of a stack.
///
/// Hidden layer l is fitted as the hidden layer of a one-hidden-layer sparse
/// autoencoder [n_{l-1}, n_l, n_{l-1}] on the codes of layer l-1; the output
/// layer keeps its random initialization. Fine-tune the result with train().
MlpNetwork pretrain_stacked(const std::vector<Index>& layer_sizes,
                            const std::vector<Activation>& activations, const Matrix& x_train,
                            const Matrix& x_val, const TrainConfig& cfg);

} // namespace linrecover
