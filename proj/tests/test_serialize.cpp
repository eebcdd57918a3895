#include "linrecover/errors.hpp"
#include "linrecover/serialize.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace linrecover;

namespace {

Matrix sample_data(Index m) {
    const Matrix f = oracle::random_matrix(m, 2, 3);
    Matrix x = f * oracle::random_matrix(2, 6, 4);
    x.col(5) += f.col(0).array().cube().matrix();
    return x;
}

} // namespace

TEST_CASE("matrix round trip is exact") {
    const Matrix m = oracle::random_matrix(4, 3, 1) * 1e-7;
    const Matrix back = matrix_from_json(nlohmann::json::parse(matrix_to_json(m).dump()));
    CHECK(back == m);
    const Matrix empty(0, 3);
    CHECK(matrix_from_json(matrix_to_json(empty)).cols() == 3);
}

TEST_CASE("malformed matrices are rejected") {
    CHECK_THROWS_AS(matrix_from_json(nlohmann::json::parse(R"({"rows":2,"cols":2,"data":[[1,2]]})")),
                    IoError);
    CHECK_THROWS_AS(matrix_from_json(nlohmann::json::parse(R"({"rows":1,"cols":2,"data":[[1,"a"]]})")),
                    IoError);
    CHECK_THROWS_AS(matrix_from_json(nlohmann::json::parse(R"([1,2])")), IoError);
}

TEST_CASE("network round trip preserves outputs") {
    const MlpNetwork net = make_network({3, 4, 2}, {Activation::tanh, Activation::linear}, 9);
    const MlpNetwork back = network_from_json(nlohmann::json::parse(network_to_json(net).dump()));
    const Matrix x = oracle::random_matrix(5, 3, 2);
    CHECK(forward(back, x) == forward(net, x));
    CHECK(back.activations == net.activations);
}

TEST_CASE("selection round trip") {
    const Matrix xc = oracle::centered(sample_data(30));
    const SelectionModel model = fsca_select(xc, 3);
    const SelectionModel back = selection_from_json(nlohmann::json::parse(selection_to_json(model).dump()));
    CHECK(back.indices == model.indices);
    CHECK(back.vex_profile == model.vex_profile);
    CHECK(back.coefficients == model.coefficients);
}

TEST_CASE("rlc and sde round trips reproduce reconstructions") {
    const Matrix x = sample_data(60);
    RlcConfig cfg;
    cfg.k = 1;
    cfg.tau = 99.99;
    cfg.hidden = 3;
    cfg.train.max_epochs = 10;
    for (EncoderKind kind : {EncoderKind::selection, EncoderKind::pca}) {
        const RlcModel model =
            kind == EncoderKind::selection ? fit_fsca_rlc(x, cfg, 20.0, 1) : fit_pca_rlc(x, cfg, 20.0, 1);
        const RlcModel back = rlc_from_json(nlohmann::json::parse(rlc_to_json(model).dump()));
        CHECK(back.encoder == model.encoder);
        CHECK(back.k_bar == model.k_bar);
        CHECK(rlc_reconstruct(back, x) == rlc_reconstruct(model, x));
    }
    SdeConfig sde;
    sde.k = 2;
    sde.hidden_sizes = {4};
    sde.train.max_epochs = 5;
    const SdeModel model = fit_fsca_sde(x, sde, 20.0, 1);
    const SdeModel back = sde_from_json(nlohmann::json::parse(sde_to_json(model).dump()));
    CHECK(sde_reconstruct(back, x) == sde_reconstruct(model, x));
}

TEST_CASE("file helpers") {
    const auto dir = std::filesystem::temp_directory_path() / "linrecover_serialize_test";
    std::filesystem::create_directories(dir);
    const auto path = dir / "doc.json";
    write_json_file(path, nlohmann::json{{"a", 1}});
    CHECK(read_json_file(path)["a"] == 1);
    CHECK_THROWS_AS(read_json_file(dir / "missing.json"), IoError);
    std::ofstream(dir / "bad.json") << "{not json";
    CHECK_THROWS_AS(read_json_file(dir / "bad.json"), IoError);
    CHECK_THROWS_AS(rlc_from_json(nlohmann::json{{"format_version", 1}}), IoError);
    std::filesystem::remove_all(dir);
}
