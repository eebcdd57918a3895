#include "linrecover/neuralnet.hpp"

#include "linrecover/errors.hpp"
#include "linrecover/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace linrecover {

namespace {

Matrix activate(Activation a, const Matrix& z) {
    switch (a) {
    case Activation::linear:
        return z;
    case Activation::logistic:
        return (1.0 + (-z.array()).exp()).inverse().matrix();
    case Activation::tanh:
        return z.array().tanh().matrix();
    case Activation::relu:
        return z.array().max(0.0).matrix();
    }
    return z;
}

// f'(z), written in terms of the activation output where that is cheaper.
Matrix activation_derivative(Activation a, const Matrix& z, const Matrix& out) {
    switch (a) {
    case Activation::linear:
        return Matrix::Ones(z.rows(), z.cols());
    case Activation::logistic:
        return (out.array() * (1.0 - out.array())).matrix();
    case Activation::tanh:
        return (1.0 - out.array().square()).matrix();
    case Activation::relu:
        return (z.array() > 0.0).cast<double>().matrix();
    }
    return Matrix::Ones(z.rows(), z.cols());
}

struct Trace {
    std::vector<Matrix> pre;  // Z_l, l = 1..L stored at l-1
    std::vector<Matrix> post; // A_l, l = 0..L
};

Trace run_forward(const MlpNetwork& net, const Matrix& x) {
    if (x.cols() != net.input_width()) {
        throw InvalidArgument("forward: input width " + std::to_string(x.cols()) +
                              " does not match network input " +
                              std::to_string(net.input_width()));
    }
    Trace t;
    t.post.reserve(net.depth() + 1);
    t.pre.reserve(net.depth());
    t.post.push_back(x);
    for (std::size_t l = 0; l < net.depth(); ++l) {
        Matrix z = t.post.back() * net.weights[l].transpose();
        z.rowwise() += net.biases[l].transpose();
        Matrix a = activate(net.activations[l], z);
        if (!a.allFinite()) {
            throw NumericError("forward: non-finite activation in layer " + std::to_string(l + 1));
        }
        t.pre.push_back(std::move(z));
        t.post.push_back(std::move(a));
    }
    return t;
}

void require_rows_match(const Matrix& x, const Matrix& y, const MlpNetwork& net, const char* what) {
    if (x.rows() != y.rows()) {
        throw InvalidArgument(std::string(what) + ": X has " + std::to_string(x.rows()) +
                              " rows, Y has " + std::to_string(y.rows()));
    }
    if (y.cols() != net.output_width()) {
        throw InvalidArgument(std::string(what) + ": target width " + std::to_string(y.cols()) +
                              " does not match network output " +
                              std::to_string(net.output_width()));
    }
    if (x.rows() == 0) {
        throw InvalidArgument(std::string(what) + ": empty batch");
    }
}

double clamp_rate(double r) {
    return std::clamp(r, kKlClamp, 1.0 - kKlClamp);
}

double output_mse(const Matrix& out, const Matrix& y) {
    return (out - y).squaredNorm() / static_cast<double>(y.size());
}

double penalty_terms(const MlpNetwork& net, const Trace& t, const LossConfig& cfg) {
    double loss = 0.0;
    if (cfg.lambda_l2 != 0.0) {
        double sq = 0.0;
        for (std::size_t l = 0; l + 1 < net.depth(); ++l) {
            sq += net.weights[l].squaredNorm();
        }
        loss += 0.5 * cfg.lambda_l2 * sq;
    }
    if (cfg.gamma_sparsity != 0.0) {
        if (const auto b = bottleneck_layer(net)) {
            const RowVector rates = t.post[*b].colwise().mean();
            double kl = 0.0;
            for (Index i = 0; i < rates.size(); ++i) {
                kl += kl_bernoulli(cfg.rho_target, rates(i));
            }
            loss += cfg.gamma_sparsity * kl;
        }
    }
    return loss;
}

} // namespace

std::string_view to_string(Activation a) {
    switch (a) {
    case Activation::linear:
        return "linear";
    case Activation::logistic:
        return "logistic";
    case Activation::tanh:
        return "tanh";
    case Activation::relu:
        return "relu";
    }
    return "linear";
}

Activation activation_from_string(std::string_view name) {
    if (name == "linear") return Activation::linear;
    if (name == "logistic") return Activation::logistic;
    if (name == "tanh") return Activation::tanh;
    if (name == "relu") return Activation::relu;
    throw InvalidArgument("unknown activation '" + std::string(name) + "'");
}

void MlpNetwork::validate() const {
    if (layer_sizes.size() < 2) {
        throw InvalidArgument("network needs at least an input and an output layer");
    }
    const std::size_t depth = layer_sizes.size() - 1;
    if (weights.size() != depth || biases.size() != depth || activations.size() != depth) {
        throw InvalidArgument("network parameter lists do not match layer count");
    }
    for (std::size_t l = 0; l < depth; ++l) {
        if (layer_sizes[l] < 1 || layer_sizes[l + 1] < 1) {
            throw InvalidArgument("network layer sizes must be positive");
        }
        if (weights[l].rows() != layer_sizes[l + 1] || weights[l].cols() != layer_sizes[l] ||
            biases[l].size() != layer_sizes[l + 1]) {
            throw InvalidArgument("network layer " + std::to_string(l + 1) +
                                  " has inconsistent parameter shapes");
        }
        if (!weights[l].allFinite() || !biases[l].allFinite()) {
            throw NumericError("network layer " + std::to_string(l + 1) +
                               " has non-finite parameters");
        }
    }
}

MlpNetwork make_network(std::vector<Index> layer_sizes, std::vector<Activation> activations,
                        std::uint64_t seed) {
    MlpNetwork net;
    net.layer_sizes = std::move(layer_sizes);
    net.activations = std::move(activations);
    if (net.layer_sizes.size() < 2 || net.activations.size() != net.layer_sizes.size() - 1) {
        throw InvalidArgument("make_network: need one activation per non-input layer");
    }
    Rng rng(seed);
    for (std::size_t l = 0; l + 1 < net.layer_sizes.size(); ++l) {
        const Index fan_in = net.layer_sizes[l];
        const Index fan_out = net.layer_sizes[l + 1];
        if (fan_in < 1 || fan_out < 1) {
            throw InvalidArgument("make_network: layer sizes must be positive");
        }
        const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        Matrix w(fan_out, fan_in);
        for (Index i = 0; i < fan_out; ++i) {
            for (Index j = 0; j < fan_in; ++j) {
                w(i, j) = rng.uniform(-bound, bound);
            }
        }
        net.weights.push_back(std::move(w));
        net.biases.push_back(Vector::Zero(fan_out));
    }
    return net;
}

Matrix forward(const MlpNetwork& net, const Matrix& x) {
    return std::move(run_forward(net, x).post.back());
}

std::size_t param_count(const MlpNetwork& net) {
    std::size_t n = 0;
    for (std::size_t l = 0; l + 1 < net.layer_sizes.size(); ++l) {
        n += static_cast<std::size_t>(net.layer_sizes[l] * net.layer_sizes[l + 1] +
                                      net.layer_sizes[l + 1]);
    }
    return n;
}

std::optional<std::size_t> bottleneck_layer(const MlpNetwork& net) {
    std::optional<std::size_t> best;
    for (std::size_t l = 1; l + 1 < net.layer_sizes.size(); ++l) {
        if (!best || net.layer_sizes[l] < net.layer_sizes[*best]) {
            best = l;
        }
    }
    return best;
}

double kl_bernoulli(double rho, double rho_hat) {
    if (!(rho > 0.0 && rho < 1.0)) {
        throw InvalidArgument("kl_bernoulli: rho must lie in (0, 1)");
    }
    const double r = clamp_rate(rho_hat);
    return rho * std::log(rho / r) + (1.0 - rho) * std::log((1.0 - rho) / (1.0 - r));
}

double sparse_loss(const MlpNetwork& net, const Matrix& x, const Matrix& y, const LossConfig& cfg) {
    require_rows_match(x, y, net, "sparse_loss");
    const Trace t = run_forward(net, x);
    return output_mse(t.post.back(), y) + penalty_terms(net, t, cfg);
}

Gradients gradients(const MlpNetwork& net, const Matrix& x, const Matrix& y, const LossConfig& cfg) {
    require_rows_match(x, y, net, "gradients");
    const Trace t = run_forward(net, x);
    const std::size_t depth = net.depth();
    const double m = static_cast<double>(x.rows());

    Gradients g;
    g.weights.resize(depth);
    g.biases.resize(depth);

    const std::optional<std::size_t> bottleneck =
        cfg.gamma_sparsity != 0.0 ? bottleneck_layer(net) : std::nullopt;

    Matrix d_out = (2.0 / static_cast<double>(y.size())) * (t.post.back() - y);
    for (std::size_t l = depth; l-- > 0;) {
        // d_out holds dLoss/dA_{l+1}.
        if (bottleneck && *bottleneck == l + 1) {
            const RowVector rates = t.post[l + 1].colwise().mean();
            RowVector dkl(rates.size());
            for (Index i = 0; i < rates.size(); ++i) {
                const double r = rates(i);
                const bool clamped = r < kKlClamp || r > 1.0 - kKlClamp;
                dkl(i) = clamped ? 0.0
                                 : cfg.gamma_sparsity *
                                       (-cfg.rho_target / r + (1.0 - cfg.rho_target) / (1.0 - r));
            }
            d_out.rowwise() += dkl / m;
        }
        const Matrix dz =
            (d_out.array() *
             activation_derivative(net.activations[l], t.pre[l], t.post[l + 1]).array())
                .matrix();
        g.weights[l] = dz.transpose() * t.post[l];
        if (cfg.lambda_l2 != 0.0 && l + 1 < depth) {
            g.weights[l] += cfg.lambda_l2 * net.weights[l];
        }
        g.biases[l] = dz.colwise().sum().transpose();
        if (l > 0) {
            d_out = dz * net.weights[l];
        }
    }
    return g;
}

void TrainConfig::validate() const {
    if (max_epochs < 1) throw InvalidArgument("TrainConfig: max_epochs must be >= 1");
    if (patience < 1) throw InvalidArgument("TrainConfig: patience must be >= 1");
    if (batch_size < 1) throw InvalidArgument("TrainConfig: batch_size must be >= 1");
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
        throw InvalidArgument("TrainConfig: learning_rate must be finite and >= 0");
    }
    if (!(lambda_l2 >= 0.0) || !(gamma_sparsity >= 0.0)) {
        throw InvalidArgument("TrainConfig: lambda_l2 and gamma_sparsity must be >= 0");
    }
    if (!(rho_target > 0.0 && rho_target < 1.0)) {
        throw InvalidArgument("TrainConfig: rho_target must lie in (0, 1)");
    }
}

TrainReport train(MlpNetwork& net, const Matrix& x_train, const Matrix& y_train,
                  const Matrix& x_val, const Matrix& y_val, const TrainConfig& cfg) {
    cfg.validate();
    net.validate();
    require_rows_match(x_train, y_train, net, "train");
    const bool has_val = x_val.rows() > 0;
    if (has_val) {
        require_rows_match(x_val, y_val, net, "train (validation)");
    }
    const LossConfig loss_cfg = cfg.loss();

    auto monitor = [&](const MlpNetwork& n) {
        return has_val ? output_mse(forward(n, x_val), y_val)
                       : output_mse(forward(n, x_train), y_train);
    };

    TrainReport report;
    report.initial_train_loss = sparse_loss(net, x_train, y_train, loss_cfg);
    report.initial_val_loss = monitor(net);
    if (!std::isfinite(report.initial_train_loss) || !std::isfinite(report.initial_val_loss)) {
        throw TrainingDivergence(0, "non-finite initial loss");
    }

    MlpNetwork best = net;
    double best_val = report.initial_val_loss;
    std::size_t since_best = 0;

    const Index m = x_train.rows();
    std::vector<Index> order(static_cast<std::size_t>(m));
    std::iota(order.begin(), order.end(), Index{0});
    Rng rng(cfg.seed);
    const auto batch = static_cast<Index>(cfg.batch_size);

    for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        rng.shuffle(std::span<Index>(order));
        try {
            for (Index start = 0; start < m; start += batch) {
                const Index count = std::min(batch, m - start);
                const std::span<const Index> rows(order.data() + start,
                                                  static_cast<std::size_t>(count));
                const Gradients g =
                    gradients(net, select_rows(x_train, rows), select_rows(y_train, rows), loss_cfg);
                for (std::size_t l = 0; l < net.depth(); ++l) {
                    net.weights[l] -= cfg.learning_rate * g.weights[l];
                    net.biases[l] -= cfg.learning_rate * g.biases[l];
                }
            }
        } catch (const NumericError& e) {
            throw TrainingDivergence(epoch, e.what());
        }

        double train_loss = 0.0;
        double val_loss = 0.0;
        try {
            train_loss = sparse_loss(net, x_train, y_train, loss_cfg);
            val_loss = monitor(net);
        } catch (const NumericError& e) {
            throw TrainingDivergence(epoch, e.what());
        }
        if (!std::isfinite(train_loss) || !std::isfinite(val_loss)) {
            throw TrainingDivergence(epoch, "non-finite loss");
        }
        report.train_loss_curve.push_back(train_loss);
        report.val_loss_curve.push_back(val_loss);
        report.epochs_run = epoch;

        if (val_loss < best_val) {
            best_val = val_loss;
            best = net;
            report.best_epoch = epoch;
            since_best = 0;
        } else if (++since_best >= cfg.patience) {
            report.stopped_early = epoch < cfg.max_epochs;
            break;
        }
    }
    net = std::move(best);
    return report;
}

MlpNetwork pretrain_stacked(const std::vector<Index>& layer_sizes,
                            const std::vector<Activation>& activations, const Matrix& x_train,
                            const Matrix& x_val, const TrainConfig& cfg) {
    MlpNetwork stack = make_network(layer_sizes, activations, derive_seed(cfg.seed, 0));
    if (x_train.cols() != stack.input_width()) {
        throw InvalidArgument("pretrain_stacked: data width does not match input layer");
    }
    Matrix codes_train = x_train;
    Matrix codes_val = x_val;
    for (std::size_t l = 0; l + 1 < stack.depth(); ++l) {
        const Index in = layer_sizes[l];
        const Index hidden = layer_sizes[l + 1];
        MlpNetwork sub = make_network({in, hidden, in}, {activations[l], Activation::linear},
                                      derive_seed(cfg.seed, l + 1));
        TrainConfig sub_cfg = cfg;
        sub_cfg.seed = derive_seed(cfg.seed, 1000 + l);
        train(sub, codes_train, codes_train, codes_val, codes_val, sub_cfg);
        stack.weights[l] = sub.weights[0];
        stack.biases[l] = sub.biases[0];

        MlpNetwork encoder;
        encoder.layer_sizes = {in, hidden};
        encoder.weights = {sub.weights[0]};
        encoder.biases = {sub.biases[0]};
        encoder.activations = {activations[l]};
        codes_train = forward(encoder, codes_train);
        if (codes_val.rows() > 0) {
            codes_val = forward(encoder, codes_val);
        }
    }
    return stack;
}

} // namespace linrecover
