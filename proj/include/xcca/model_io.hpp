#pragma once

#include "xcca/kcca.hpp"

#include <filesystem>
#include "json.hpp"

namespace xcca {

// model.ccam layout:
//   "CCAM1\n"                  6 bytes
//   header length              u64 little-endian
//   header                     UTF-8 JSON object (see model_header)
//   A                          MXB block (p x k)
//   B                          MXB block (q x k)
void save_model(const CcaModel& model, const std::filesystem::path& path);
CcaModel load_model(const std::filesystem::path& path);

/// The JSON header stored in a model file: lambda, k, dims, train_corrs,
/// comp_regress and both sets of normalization stats.
nlohmann::json model_header(const CcaModel& model);

nlohmann::json to_json(const NormStats& stats);
NormStats norm_stats_from_json(const nlohmann::json& j);

}  // namespace xcca
