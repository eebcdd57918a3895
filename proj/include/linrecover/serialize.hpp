#pragma once

// JSON documents for trained networks and fitted models. Matrices are stored
// as arrays of rows.

#include "linrecover/neuralnet.hpp"
#include "linrecover/rlc.hpp"
#include "linrecover/selection.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>

namespace linrecover {

inline constexpr int kFormatVersion = 1;

nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);

nlohmann::json network_to_json(const MlpNetwork& net);
MlpNetwork network_from_json(const nlohmann::json& j);

nlohmann::json selection_to_json(const SelectionModel& model);
SelectionModel selection_from_json(const nlohmann::json& j);

nlohmann::json rlc_to_json(const RlcModel& model);
RlcModel rlc_from_json(const nlohmann::json& j);

nlohmann::json sde_to_json(const SdeModel& model);
SdeModel sde_from_json(const nlohmann::json& j);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& doc);

} // namespace linrecover
