#pragma once

#include <filesystem>

#include <json.hpp>

#include "gfa/inference.hpp"
#include "gfa/synthetic.hpp"

namespace gfa {

/// Everything `fit` writes to model.json.
struct ModelFile {
    FitConfig config;
    bool centered = true;
    PreprocessRecord preprocess;
    ViewPartition partition;
    Index n_samples = 0;
    FitResult result;
};

nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);
nlohmann::json binary_to_json(const BinaryMatrix& m);
BinaryMatrix binary_from_json(const nlohmann::json& j);

nlohmann::json to_json(const FitConfig& config);
FitConfig fit_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ModelFile& model);
ModelFile model_from_json(const nlohmann::json& j);

nlohmann::json to_json(const GroundTruth& truth);
GroundTruth truth_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ActivityMatrix& activity, const std::vector<Index>& order);

nlohmann::json read_json(const std::filesystem::path& path);
/// Two-space indented, trailing newline. Doubles use the shortest
/// round-trip representation.
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace gfa
