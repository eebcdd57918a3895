#include "linrecover/bench.hpp"
#include "linrecover/errors.hpp"
#include "linrecover/matrix_core.hpp"
#include "linrecover/neuralnet.hpp"
#include "linrecover/pca.hpp"
#include "linrecover/rlc.hpp"
#include "linrecover/selection.hpp"
#include "linrecover/serialize.hpp"
#include "linrecover/split.hpp"
#include "linrecover/synthgen.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace pybind11::literals;
using namespace linrecover;

namespace {

py::object json_to_py(const std::string& text) {
    return py::module_::import("json").attr("loads")(text);
}

std::string py_to_json(const py::object& obj) {
    return py::module_::import("json").attr("dumps")(obj).cast<std::string>();
}

} // namespace

PYBIND11_MODULE(_linrecover, m) {
    m.doc() = "Variable selection and recovery-of-linear-components autoencoding";

    py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
    py::register_exception<TrainingDivergence>(m, "TrainingDivergence", PyExc_ArithmeticError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);

    m.def("variance_explained", &variance_explained, "x"_a, "xhat"_a);
    m.def("mse", &mse, "x"_a, "xhat"_a);
    m.def(
        "reconstruction_metrics",
        [](const Matrix& x, const Matrix& xhat) {
            const ReconstructionMetrics r = reconstruction_metrics(x, xhat);
            return py::dict("v_ex"_a = r.v_ex, "m_se"_a = r.m_se, "alpha"_a = r.alpha);
        },
        "x"_a, "xhat"_a);
    m.def(
        "center_columns",
        [](const Matrix& x) {
            auto [xc, stats] = center_columns(x);
            return py::make_tuple(xc, RowVector(stats.means));
        },
        "x"_a, "Returns (centered, column_means).");

    py::class_<PcaModel>(m, "PcaModel")
        .def_readonly("loadings", &PcaModel::loadings)
        .def_readonly("component_variances", &PcaModel::component_variances)
        .def_readonly("cumulative_vex", &PcaModel::cumulative_vex)
        .def_property_readonly("rank", &PcaModel::rank);
    m.def("fit_pca", &fit_pca, "xc"_a);
    m.def("pca_scores", &pca_scores, "model"_a, "xc"_a, "k"_a);
    m.def("pca_reconstruct", &pca_reconstruct, "model"_a, "scores"_a);
    m.def("components_for_threshold", &components_for_threshold, "model"_a, "tau"_a);

    py::class_<SelectionModel>(m, "SelectionModel")
        .def_readonly("indices", &SelectionModel::indices)
        .def_readonly("vex_profile", &SelectionModel::vex_profile)
        .def_readonly("coefficients", &SelectionModel::coefficients)
        .def_readonly("refinement_passes", &SelectionModel::refinement_passes)
        .def_property_readonly("k", &SelectionModel::k)
        .def_property_readonly("vex", &SelectionModel::vex);
    m.def("fsca_select", &fsca_select, "xc"_a, "k"_a);
    m.def("spbr_refine", &spbr_refine, "xc"_a, "model"_a);
    m.def("mpbr_refine", &mpbr_refine, "xc"_a, "model"_a, "max_passes"_a = 100);
    m.def("subset_variance_explained", &subset_variance_explained, "xc"_a, "indices"_a);

    py::enum_<Activation>(m, "Activation")
        .value("linear", Activation::linear)
        .value("logistic", Activation::logistic)
        .value("tanh", Activation::tanh)
        .value("relu", Activation::relu);

    py::class_<MlpNetwork>(m, "MlpNetwork")
        .def_readonly("layer_sizes", &MlpNetwork::layer_sizes)
        .def_readonly("weights", &MlpNetwork::weights)
        .def_readonly("biases", &MlpNetwork::biases)
        .def_readonly("activations", &MlpNetwork::activations);
    m.def("make_network", &make_network, "layer_sizes"_a, "activations"_a, "seed"_a);
    m.def("forward", &forward, "net"_a, "x"_a);
    m.def("param_count", &param_count, "net"_a);

    py::class_<TrainConfig>(m, "TrainConfig")
        .def(py::init<>())
        .def_readwrite("max_epochs", &TrainConfig::max_epochs)
        .def_readwrite("learning_rate", &TrainConfig::learning_rate)
        .def_readwrite("batch_size", &TrainConfig::batch_size)
        .def_readwrite("patience", &TrainConfig::patience)
        .def_readwrite("lambda_l2", &TrainConfig::lambda_l2)
        .def_readwrite("gamma_sparsity", &TrainConfig::gamma_sparsity)
        .def_readwrite("rho_target", &TrainConfig::rho_target)
        .def_readwrite("seed", &TrainConfig::seed);

    py::class_<TrainReport>(m, "TrainReport")
        .def_readonly("epochs_run", &TrainReport::epochs_run)
        .def_readonly("train_loss_curve", &TrainReport::train_loss_curve)
        .def_readonly("val_loss_curve", &TrainReport::val_loss_curve)
        .def_readonly("stopped_early", &TrainReport::stopped_early)
        .def_readonly("best_epoch", &TrainReport::best_epoch);
    m.def(
        "train",
        [](MlpNetwork net, const Matrix& x_train, const Matrix& y_train, const Matrix& x_val,
           const Matrix& y_val, const TrainConfig& cfg) {
            TrainReport report = train(net, x_train, y_train, x_val, y_val, cfg);
            return py::make_tuple(net, report);
        },
        "net"_a, "x_train"_a, "y_train"_a, "x_val"_a, "y_val"_a, "cfg"_a,
        "Returns (trained_network, report); the input network is not modified.");

    py::class_<SynthConfig>(m, "SynthConfig")
        .def(py::init<>())
        .def_readwrite("m", &SynthConfig::m)
        .def_readwrite("v", &SynthConfig::v)
        .def_readwrite("sigma2", &SynthConfig::sigma2)
        .def_readwrite("seed", &SynthConfig::seed);
    m.def(
        "generate_xsynthetic",
        [](Index rows, Index cols, double sigma2, std::uint64_t seed) {
            return generate_xsynthetic(SynthConfig{rows, cols, sigma2, seed});
        },
        "m"_a = 500, "v"_a = 50, "sigma2"_a = 0.0, "seed"_a = 0);

    py::class_<RowSplit>(m, "RowSplit")
        .def_readonly("train", &RowSplit::train)
        .def_readonly("val", &RowSplit::val)
        .def_readonly("test", &RowSplit::test);
    m.def("split_rows", &split_rows, "m"_a, "train_fraction"_a, "val_fraction_of_train"_a, "seed"_a);

    py::class_<RlcConfig>(m, "RlcConfig")
        .def(py::init<>())
        .def_readwrite("k", &RlcConfig::k)
        .def_readwrite("tau", &RlcConfig::tau)
        .def_readwrite("hidden", &RlcConfig::hidden)
        .def_readwrite("train", &RlcConfig::train)
        .def_readwrite("train_network", &RlcConfig::train_network);
    py::class_<RlcModel>(m, "RlcModel")
        .def_readonly("selection", &RlcModel::selection)
        .def_readonly("k", &RlcModel::k)
        .def_readonly("k_lin", &RlcModel::k_lin)
        .def_readonly("k_bar", &RlcModel::k_bar)
        .def_readonly("linear_coeffs", &RlcModel::linear_coeffs)
        .def_readonly("residual_loadings", &RlcModel::residual_loadings)
        .def_readonly("recovery_net", &RlcModel::recovery_net)
        .def_readonly("report", &RlcModel::report)
        .def("to_json", [](const RlcModel& model) { return json_to_py(rlc_to_json(model).dump()); });
    m.def("fit_fsca_rlc",
          py::overload_cast<const Matrix&, const RlcConfig&, double, std::uint64_t>(&fit_fsca_rlc), "x"_a,
          "cfg"_a, "val_fraction"_a = 20.0, "split_seed"_a = 0);
    m.def("fit_pca_rlc",
          py::overload_cast<const Matrix&, const RlcConfig&, double, std::uint64_t>(&fit_pca_rlc), "x"_a,
          "cfg"_a, "val_fraction"_a = 20.0, "split_seed"_a = 0);
    m.def("rlc_reconstruct", &rlc_reconstruct, "model"_a, "x"_a);
    m.def("rlc_linear_reconstruct", &rlc_linear_reconstruct, "model"_a, "x"_a);
    m.def("rlc_from_json", [](const py::object& doc) { return rlc_from_json(nlohmann::json::parse(py_to_json(doc))); });

    py::class_<SdeConfig>(m, "SdeConfig")
        .def(py::init<>())
        .def_readwrite("k", &SdeConfig::k)
        .def_readwrite("hidden_sizes", &SdeConfig::hidden_sizes)
        .def_readwrite("hidden_activation", &SdeConfig::hidden_activation)
        .def_readwrite("train", &SdeConfig::train)
        .def_readwrite("pretrain", &SdeConfig::pretrain);
    py::class_<SdeModel>(m, "SdeModel")
        .def_readonly("selection", &SdeModel::selection)
        .def_readonly("decoder_net", &SdeModel::decoder_net)
        .def_readonly("report", &SdeModel::report);
    m.def("fit_fsca_sde",
          py::overload_cast<const Matrix&, const SdeConfig&, double, std::uint64_t>(&fit_fsca_sde), "x"_a,
          "cfg"_a, "val_fraction"_a = 20.0, "split_seed"_a = 0);
    m.def("sde_reconstruct", &sde_reconstruct, "model"_a, "x"_a);

    m.def(
        "run_experiment",
        [](const py::object& config, std::size_t threads, const std::string& out_dir) {
            const ExperimentConfig cfg = experiment_config_from_json(nlohmann::json::parse(py_to_json(config)));
            RunReport report;
            {
                py::gil_scoped_release release;
                report = run_experiment(cfg, threads);
                if (!out_dir.empty()) {
                    emit_report(report, out_dir);
                }
            }
            return json_to_py(aggregate_to_json(report).dump());
        },
        "config"_a, "threads"_a = 1, "out_dir"_a = "",
        "Runs a benchmark from a config dict and returns the aggregate document.");
}
