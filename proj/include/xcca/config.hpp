#pragma once

#include "xcca/classify.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace xcca {

/// Flat key -> raw value map.
using ConfigMap = std::map<std::string, std::string>;

/// Parses `key = value` lines. '#' starts a comment; blank lines are ignored.
/// Relative paths are not resolved here.
ConfigMap parse_config_text(std::string_view text, std::string_view what);

/// Reads a config file. Values of path-valued keys are resolved against the
/// file's directory.
ConfigMap load_config_file(const std::filesystem::path& path);

/// Applies "key=value" overrides on top of `base` (overrides win).
ConfigMap apply_overrides(ConfigMap base, const std::vector<std::string>& overrides);

enum class SplitMode { kSegment, kRow };

struct ExperimentConfig {
  std::vector<std::filesystem::path> train_features;
  std::vector<std::filesystem::path> train_brain;
  std::vector<std::filesystem::path> train_labels;
  std::vector<std::filesystem::path> test_features;
  std::vector<std::filesystem::path> test_brain;
  std::vector<std::filesystem::path> test_labels;
  std::optional<std::filesystem::path> model_path;
  std::filesystem::path output_dir = ".";

  std::vector<double> lambda_grid{1e-2};
  std::vector<int> ts_grid{-2};
  std::vector<Index> k_grid{10};
  std::optional<double> lambda;
  std::optional<int> ts;
  std::optional<Index> k;

  double fps = 5.0;
  double tr_seconds = 3.0;
  bool group_frames = false;

  std::size_t n_permutations = 300;
  std::uint64_t master_seed = 0;
  bool independent_phases = false;
  bool dump_null = false;
  int threads = 0;

  SplitMode split = SplitMode::kSegment;
  Index validation_segments = 1;
  double validation_fraction = 0.2;

  double svm_c = 1.0;
  int svm_epochs = 200;
  BalanceMode balance = BalanceMode::kWeights;
  double feature_train_fraction = 0.75;
  bool denormalize = false;

  double fit_lambda() const { return lambda.value_or(lambda_grid.front()); }
  int fit_ts() const { return ts.value_or(ts_grid.front()); }
  Index fit_k() const;
  std::filesystem::path resolved_model_path() const;

  /// Builds a config from raw values, rejecting unknown keys and malformed
  /// values with a message naming the field.
  static ExperimentConfig from_map(const ConfigMap& map);
};

enum class Command { kFit, kGridsearch, kEvaluate, kPermtest, kReconstruct, kClassify };

/// Checks the fields `command` needs, including that input files exist.
void validate_for(const ExperimentConfig& cfg, Command command);

}  // namespace xcca
