#include "linrecover/serialize.hpp"

#include "linrecover/errors.hpp"

#include <fstream>

namespace linrecover {

using nlohmann::json;

namespace {

json vector_to_json(const Eigen::Ref<const Vector>& v) {
    return json(std::vector<double>(v.data(), v.data() + v.size()));
}

Vector vector_from_json(const json& j) {
    const auto values = j.get<std::vector<double>>();
    return Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
}

json indices_to_json(const std::vector<Index>& idx) {
    return json(std::vector<long long>(idx.begin(), idx.end()));
}

std::vector<Index> indices_from_json(const json& j) {
    const auto values = j.get<std::vector<long long>>();
    return {values.begin(), values.end()};
}

void check_version(const json& j, const char* kind) {
    if (!j.contains("format_version") || j.at("format_version").get<int>() != kFormatVersion) {
        throw IoError(std::string(kind) + ": unsupported or missing format_version");
    }
}

json report_to_json(const TrainReport& r) {
    return {{"epochs_run", r.epochs_run},
            {"best_epoch", r.best_epoch},
            {"stopped_early", r.stopped_early},
            {"initial_train_loss", r.initial_train_loss},
            {"initial_val_loss", r.initial_val_loss},
            {"train_loss_curve", r.train_loss_curve},
            {"val_loss_curve", r.val_loss_curve}};
}

TrainReport report_from_json(const json& j) {
    TrainReport r;
    r.epochs_run = j.at("epochs_run").get<std::size_t>();
    r.best_epoch = j.at("best_epoch").get<std::size_t>();
    r.stopped_early = j.at("stopped_early").get<bool>();
    r.initial_train_loss = j.at("initial_train_loss").get<double>();
    r.initial_val_loss = j.at("initial_val_loss").get<double>();
    r.train_loss_curve = j.at("train_loss_curve").get<std::vector<double>>();
    r.val_loss_curve = j.at("val_loss_curve").get<std::vector<double>>();
    return r;
}

template <typename F>
auto wrap_parse(const char* kind, F&& f) {
    try {
        return f();
    } catch (const json::exception& e) {
        throw IoError(std::string(kind) + ": malformed document: " + e.what());
    }
}

} // namespace

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        rows.push_back(vector_to_json(m.row(i).transpose()));
    }
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(rows)}};
}

Matrix matrix_from_json(const json& j) {
    return wrap_parse("matrix", [&] {
        const Index rows = j.at("rows").get<Index>();
        const Index cols = j.at("cols").get<Index>();
        const json& data = j.at("data");
        if (rows < 0 || cols < 0 || static_cast<Index>(data.size()) != rows) {
            throw IoError("matrix: row count does not match data");
        }
        Matrix m(rows, cols);
        for (Index i = 0; i < rows; ++i) {
            const Vector row = vector_from_json(data.at(static_cast<std::size_t>(i)));
            if (row.size() != cols) {
                throw IoError("matrix: ragged row " + std::to_string(i));
            }
            m.row(i) = row.transpose();
        }
        return m;
    });
}

json network_to_json(const MlpNetwork& net) {
    json layers = json::array();
    for (std::size_t l = 0; l < net.depth(); ++l) {
        layers.push_back({{"activation", std::string(to_string(net.activations[l]))},
                          {"weights", matrix_to_json(net.weights[l])},
                          {"biases", vector_to_json(net.biases[l])}});
    }
    return {{"format_version", kFormatVersion},
            {"kind", "mlp"},
            {"layer_sizes", indices_to_json(net.layer_sizes)},
            {"layers", std::move(layers)}};
}

MlpNetwork network_from_json(const json& j) {
    return wrap_parse("network", [&] {
        check_version(j, "network");
        MlpNetwork net;
        net.layer_sizes = indices_from_json(j.at("layer_sizes"));
        for (const json& layer : j.at("layers")) {
            net.activations.push_back(activation_from_string(layer.at("activation").get<std::string>()));
            net.weights.push_back(matrix_from_json(layer.at("weights")));
            net.biases.push_back(vector_from_json(layer.at("biases")));
        }
        net.validate();
        return net;
    });
}

json selection_to_json(const SelectionModel& model) {
    return {{"format_version", kFormatVersion},
            {"kind", "selection"},
            {"indices", indices_to_json(model.indices)},
            {"vex_profile", model.vex_profile},
            {"refinement_passes", model.refinement_passes},
            {"coefficients", matrix_to_json(model.coefficients)}};
}

SelectionModel selection_from_json(const json& j) {
    return wrap_parse("selection", [&] {
        check_version(j, "selection");
        SelectionModel m;
        m.indices = indices_from_json(j.at("indices"));
        m.vex_profile = j.at("vex_profile").get<std::vector<double>>();
        m.refinement_passes = j.value("refinement_passes", std::size_t{0});
        m.coefficients = matrix_from_json(j.at("coefficients"));
        return m;
    });
}

json rlc_to_json(const RlcModel& model) {
    json doc = {{"format_version", kFormatVersion},
                {"kind", "rlc"},
                {"encoder", model.encoder == EncoderKind::selection ? "selection" : "pca"},
                {"k", model.k},
                {"tau", model.tau},
                {"k_lin", model.k_lin},
                {"k_bar", model.k_bar},
                {"hidden", model.hidden},
                {"linear_coeffs", matrix_to_json(model.linear_coeffs)},
                {"residual_loadings", matrix_to_json(model.residual_loadings)},
                {"input_scale", vector_to_json(model.input_scale.transpose())},
                {"target_scale", vector_to_json(model.target_scale.transpose())},
                {"column_means", vector_to_json(model.column_means.means.transpose())},
                {"train_report", report_to_json(model.report)}};
    if (model.encoder == EncoderKind::selection) {
        doc["selection"] = selection_to_json(model.selection);
    } else {
        doc["pca_loadings"] = matrix_to_json(model.pca_loadings);
    }
    doc["recovery_net"] = model.recovery_net ? network_to_json(*model.recovery_net) : json(nullptr);
    return doc;
}

RlcModel rlc_from_json(const json& j) {
    return wrap_parse("rlc", [&] {
        check_version(j, "rlc");
        RlcModel m;
        const auto encoder = j.at("encoder").get<std::string>();
        if (encoder == "selection") {
            m.encoder = EncoderKind::selection;
            m.selection = selection_from_json(j.at("selection"));
        } else if (encoder == "pca") {
            m.encoder = EncoderKind::pca;
            m.pca_loadings = matrix_from_json(j.at("pca_loadings"));
        } else {
            throw IoError("rlc: unknown encoder '" + encoder + "'");
        }
        m.k = j.at("k").get<Index>();
        m.tau = j.at("tau").get<double>();
        m.k_lin = j.at("k_lin").get<Index>();
        m.k_bar = j.at("k_bar").get<Index>();
        m.hidden = j.at("hidden").get<Index>();
        m.linear_coeffs = matrix_from_json(j.at("linear_coeffs"));
        m.residual_loadings = matrix_from_json(j.at("residual_loadings"));
        m.input_scale = vector_from_json(j.at("input_scale")).transpose();
        m.target_scale = vector_from_json(j.at("target_scale")).transpose();
        m.column_means.means = vector_from_json(j.at("column_means")).transpose();
        m.report = report_from_json(j.at("train_report"));
        if (!j.at("recovery_net").is_null()) {
            m.recovery_net = network_from_json(j.at("recovery_net"));
        }
        return m;
    });
}

json sde_to_json(const SdeModel& model) {
    return {{"format_version", kFormatVersion},
            {"kind", "sde"},
            {"selection", selection_to_json(model.selection)},
            {"decoder_net", network_to_json(model.decoder_net)},
            {"input_scale", vector_to_json(model.input_scale.transpose())},
            {"output_scale", vector_to_json(model.output_scale.transpose())},
            {"column_means", vector_to_json(model.column_means.means.transpose())},
            {"train_report", report_to_json(model.report)}};
}

SdeModel sde_from_json(const json& j) {
    return wrap_parse("sde", [&] {
        check_version(j, "sde");
        SdeModel m;
        m.selection = selection_from_json(j.at("selection"));
        m.decoder_net = network_from_json(j.at("decoder_net"));
        m.input_scale = vector_from_json(j.at("input_scale")).transpose();
        m.output_scale = vector_from_json(j.at("output_scale")).transpose();
        m.column_means.means = vector_from_json(j.at("column_means")).transpose();
        m.report = report_from_json(j.at("train_report"));
        return m;
    });
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

void write_json_file(const std::filesystem::path& path, const json& doc) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << doc.dump(2) << '\n';
    if (!out) {
        throw IoError("write failed for " + path.string());
    }
}

} // namespace linrecover
