#include "xcca/model_io.hpp"

#include "xcca/matrix_io.hpp"

#include <array>
#include <cstring>
#include <fstream>
#include <string>

namespace xcca {
namespace {

constexpr std::array<char, 6> kMagic = {'C', 'C', 'A', 'M', '1', '\n'};

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

Vector to_vector(const std::vector<double>& v) {
  Vector out(static_cast<Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Index>(i)) = v[i];
  return out;
}

}  // namespace

nlohmann::json to_json(const NormStats& stats) {
  return {{"means", to_std(stats.means)}, {"stds", to_std(stats.stds)}};
}

NormStats norm_stats_from_json(const nlohmann::json& j) {
  NormStats stats{to_vector(j.at("means").get<std::vector<double>>()),
                  to_vector(j.at("stds").get<std::vector<double>>())};
  if (stats.means.size() != stats.stds.size()) throw ValidationError("model: stats length mismatch");
  return stats;
}

nlohmann::json model_header(const CcaModel& model) {
  nlohmann::json regress = nlohmann::json::array();
  for (const auto& r : model.comp_regress) regress.push_back({r.intercept, r.slope});
  return {
      {"format", "ccam"},
      {"version", 1},
      {"lambda", model.lambda},
      {"time_shift", model.time_shift},
      {"k", model.num_components()},
      {"feature_dim", model.feature_dim()},
      {"brain_dim", model.brain_dim()},
      {"train_corrs", to_std(model.train_corrs)},
      {"comp_regress", regress},
      {"feature_stats", to_json(model.feature_stats)},
      {"brain_stats", to_json(model.brain_stats)},
  };
}

void save_model(const CcaModel& model, const std::filesystem::path& path) {
  const std::string header = model_header(model).dump();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  out.write(kMagic.data(), kMagic.size());
  const auto len = static_cast<std::uint64_t>(header.size());
  char len_bytes[sizeof(len)];
  std::memcpy(len_bytes, &len, sizeof(len));
  out.write(len_bytes, sizeof(len));
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  write_mxb(out, model.features_weights);
  write_mxb(out, model.brain_weights);
  out.flush();
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

CcaModel load_model(const std::filesystem::path& path) {
  const std::string what = path.string();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError(what + ": cannot open model file");
  std::array<char, 6> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) throw IngestError(what + ": not a model file");
  std::uint64_t len = 0;
  char len_bytes[sizeof(len)];
  if (!in.read(len_bytes, sizeof(len))) throw IngestError(what + ": truncated model header");
  std::memcpy(&len, len_bytes, sizeof(len));
  if (len > (std::uint64_t{1} << 32)) throw IngestError(what + ": model header too large");
  std::string header(static_cast<std::size_t>(len), '\0');
  if (!in.read(header.data(), static_cast<std::streamsize>(len))) throw IngestError(what + ": truncated model header");

  CcaModel model;
  try {
    const auto j = nlohmann::json::parse(header);
    model.lambda = j.at("lambda").get<double>();
    model.time_shift = j.value("time_shift", 0);
    model.train_corrs = to_vector(j.at("train_corrs").get<std::vector<double>>());
    for (const auto& r : j.at("comp_regress")) model.comp_regress.push_back({r.at(0).get<double>(), r.at(1).get<double>()});
    model.feature_stats = norm_stats_from_json(j.at("feature_stats"));
    model.brain_stats = norm_stats_from_json(j.at("brain_stats"));
    model.features_weights = read_mxb(in, what + " (A)");
    model.brain_weights = read_mxb(in, what + " (B)");
    const auto k = j.at("k").get<Index>();
    if (model.features_weights.cols() != k || model.brain_weights.cols() != k ||
        model.train_corrs.size() != k || static_cast<Index>(model.comp_regress.size()) != k ||
        model.features_weights.rows() != j.at("feature_dim").get<Index>() ||
        model.brain_weights.rows() != j.at("brain_dim").get<Index>() ||
        model.feature_stats.size() != model.feature_dim() || model.brain_stats.size() != model.brain_dim()) {
      throw IngestError(what + ": inconsistent model dimensions");
    }
  } catch (const nlohmann::json::exception& e) {
    throw IngestError(what + ": bad model header: " + e.what());
  }
  return model;
}

}  // namespace xcca
