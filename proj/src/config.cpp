#include "xcca/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace xcca {
namespace {

const std::set<std::string>& path_list_keys() {
  static const std::set<std::string> keys = {"train_features", "train_brain", "train_labels",
                                             "test_features",  "test_brain",  "test_labels"};
  return keys;
}

const std::set<std::string>& path_keys() {
  static const std::set<std::string> keys = {"model", "output_dir"};
  return keys;
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = [] {
    std::set<std::string> k = {"lambda_grid", "ts_grid", "k_grid", "lambda", "ts", "k", "fps", "tr_seconds",
                               "group_frames", "n_permutations", "master_seed", "independent_phases", "dump_null",
                               "threads", "split", "validation_segments", "validation_fraction", "svm_c",
                               "svm_epochs", "balance", "feature_train_fraction", "denormalize"};
    k.insert(path_list_keys().begin(), path_list_keys().end());
    k.insert(path_keys().begin(), path_keys().end());
    return k;
  }();
  return keys;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(value);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

[[noreturn]] void bad_field(const std::string& key, const std::string& value, const std::string& why) {
  throw ValidationError("config field '" + key + "': " + why + " (value '" + value + "')");
}

double parse_real(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) bad_field(key, text, "expected a finite number");
  return v;
}

template <typename Int>
Int parse_int(const std::string& key, const std::string& text) {
  Int v = 0;
  std::string_view s = text;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) bad_field(key, text, "expected an integer");
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  bad_field(key, text, "expected true or false");
}

template <typename T, typename Parse>
std::vector<T> parse_list(const std::string& key, const std::string& value, Parse parse) {
  std::vector<T> out;
  for (const auto& item : split_list(value)) out.push_back(parse(key, item));
  if (out.empty()) bad_field(key, value, "list must not be empty");
  return out;
}

std::vector<std::filesystem::path> parse_paths(const std::string& value) {
  std::vector<std::filesystem::path> out;
  for (const auto& item : split_list(value)) out.emplace_back(item);
  return out;
}

void require_files(const std::string& key, const std::vector<std::filesystem::path>& paths) {
  for (const auto& p : paths) {
    if (!std::filesystem::is_regular_file(p)) {
      throw ValidationError("config field '" + key + "': file not found: " + p.string());
    }
  }
}

void require_pairing(const std::string& prefix, const std::vector<std::filesystem::path>& features,
                     const std::vector<std::filesystem::path>& brain,
                     const std::vector<std::filesystem::path>& labels) {
  if (brain.empty()) throw ValidationError("config field '" + prefix + "_brain': required");
  if (features.empty()) throw ValidationError("config field '" + prefix + "_features': required");
  if (features.size() != 1 && features.size() != brain.size()) {
    throw ValidationError("config field '" + prefix + "_features': needs 1 or " + std::to_string(brain.size()) +
                          " entries, got " + std::to_string(features.size()));
  }
  if (!labels.empty() && labels.size() != 1 && labels.size() != brain.size()) {
    throw ValidationError("config field '" + prefix + "_labels': needs 1 or " + std::to_string(brain.size()) +
                          " entries, got " + std::to_string(labels.size()));
  }
  require_files(prefix + "_features", features);
  require_files(prefix + "_brain", brain);
  require_files(prefix + "_labels", labels);
}

}  // namespace

ConfigMap parse_config_text(std::string_view text, std::string_view what) {
  ConfigMap map;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ValidationError(std::string(what) + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(std::string_view(body).substr(0, eq));
    if (key.empty()) throw ValidationError(std::string(what) + ":" + std::to_string(line_no) + ": empty key");
    map[key] = trim(std::string_view(body).substr(eq + 1));
  }
  return map;
}

ConfigMap load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(path.string() + ": cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  ConfigMap map = parse_config_text(buf.str(), path.string());
  const auto base = path.parent_path();
  const auto resolve = [&](const std::string& item) {
    const std::filesystem::path p(item);
    return (p.is_absolute() || base.empty() ? p : base / p).string();
  };
  for (auto& [key, value] : map) {
    if (path_list_keys().count(key)) {
      std::string joined;
      for (const auto& item : split_list(value)) joined += (joined.empty() ? "" : ",") + resolve(item);
      value = joined;
    } else if (path_keys().count(key)) {
      value = resolve(value);
    }
  }
  return map;
}

ConfigMap apply_overrides(ConfigMap base, const std::vector<std::string>& overrides) {
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos || eq == 0) throw ValidationError("override '" + o + "': expected key=value");
    base[trim(std::string_view(o).substr(0, eq))] = trim(std::string_view(o).substr(eq + 1));
  }
  return base;
}

Index ExperimentConfig::fit_k() const {
  if (k) return *k;
  return *std::max_element(k_grid.begin(), k_grid.end());
}

std::filesystem::path ExperimentConfig::resolved_model_path() const {
  return model_path.value_or(output_dir / "model.ccam");
}

ExperimentConfig ExperimentConfig::from_map(const ConfigMap& map) {
  ExperimentConfig cfg;
  for (const auto& [key, value] : map) {
    if (!known_keys().count(key)) throw ValidationError("config field '" + key + "': unknown key");
    if (key == "train_features") cfg.train_features = parse_paths(value);
    else if (key == "train_brain") cfg.train_brain = parse_paths(value);
    else if (key == "train_labels") cfg.train_labels = parse_paths(value);
    else if (key == "test_features") cfg.test_features = parse_paths(value);
    else if (key == "test_brain") cfg.test_brain = parse_paths(value);
    else if (key == "test_labels") cfg.test_labels = parse_paths(value);
    else if (key == "model") cfg.model_path = value;
    else if (key == "output_dir") cfg.output_dir = value;
    else if (key == "lambda_grid") cfg.lambda_grid = parse_list<double>(key, value, parse_real);
    else if (key == "ts_grid") cfg.ts_grid = parse_list<int>(key, value, parse_int<int>);
    else if (key == "k_grid") cfg.k_grid = parse_list<Index>(key, value, parse_int<Index>);
    else if (key == "lambda") cfg.lambda = parse_real(key, value);
    else if (key == "ts") cfg.ts = parse_int<int>(key, value);
    else if (key == "k") cfg.k = parse_int<Index>(key, value);
    else if (key == "fps") cfg.fps = parse_real(key, value);
    else if (key == "tr_seconds") cfg.tr_seconds = parse_real(key, value);
    else if (key == "group_frames") cfg.group_frames = parse_bool(key, value);
    else if (key == "n_permutations") cfg.n_permutations = parse_int<std::size_t>(key, value);
    else if (key == "master_seed") cfg.master_seed = parse_int<std::uint64_t>(key, value);
    else if (key == "independent_phases") cfg.independent_phases = parse_bool(key, value);
    else if (key == "dump_null") cfg.dump_null = parse_bool(key, value);
    else if (key == "threads") cfg.threads = parse_int<int>(key, value);
    else if (key == "split") {
      if (value == "segment") cfg.split = SplitMode::kSegment;
      else if (value == "row") cfg.split = SplitMode::kRow;
      else bad_field(key, value, "expected 'segment' or 'row'");
    } else if (key == "validation_segments") cfg.validation_segments = parse_int<Index>(key, value);
    else if (key == "validation_fraction") cfg.validation_fraction = parse_real(key, value);
    else if (key == "svm_c") cfg.svm_c = parse_real(key, value);
    else if (key == "svm_epochs") cfg.svm_epochs = parse_int<int>(key, value);
    else if (key == "balance") {
      if (value == "weights") cfg.balance = BalanceMode::kWeights;
      else if (value == "subsample") cfg.balance = BalanceMode::kSubsample;
      else bad_field(key, value, "expected 'weights' or 'subsample'");
    } else if (key == "feature_train_fraction") cfg.feature_train_fraction = parse_real(key, value);
    else if (key == "denormalize") cfg.denormalize = parse_bool(key, value);
  }

  const auto field = [&](const char* key) {
    const auto it = map.find(key);
    return it == map.end() ? std::string() : it->second;
  };
  for (double l : cfg.lambda_grid) {
    if (l < 0.0) bad_field("lambda_grid", field("lambda_grid"), "values must be >= 0");
  }
  if (cfg.lambda && *cfg.lambda < 0.0) bad_field("lambda", field("lambda"), "must be >= 0");
  for (Index k : cfg.k_grid) {
    if (k < 1) bad_field("k_grid", field("k_grid"), "values must be >= 1");
  }
  if (cfg.k && *cfg.k < 1) bad_field("k", field("k"), "must be >= 1");
  if (!(cfg.fps > 0.0)) bad_field("fps", field("fps"), "must be positive");
  if (!(cfg.tr_seconds > 0.0)) bad_field("tr_seconds", field("tr_seconds"), "must be positive");
  if (cfg.n_permutations < 1) bad_field("n_permutations", field("n_permutations"), "must be >= 1");
  if (cfg.threads < 0) bad_field("threads", field("threads"), "must be >= 0");
  if (cfg.validation_segments < 1) bad_field("validation_segments", field("validation_segments"), "must be >= 1");
  if (!(cfg.validation_fraction > 0.0 && cfg.validation_fraction < 1.0)) {
    bad_field("validation_fraction", field("validation_fraction"), "must be in (0, 1)");
  }
  if (!(cfg.svm_c > 0.0)) bad_field("svm_c", field("svm_c"), "must be positive");
  if (cfg.svm_epochs < 1) bad_field("svm_epochs", field("svm_epochs"), "must be >= 1");
  if (!(cfg.feature_train_fraction > 0.0 && cfg.feature_train_fraction < 1.0)) {
    bad_field("feature_train_fraction", field("feature_train_fraction"), "must be in (0, 1)");
  }
  if (cfg.group_frames) AlignmentConfig{0, cfg.fps, cfg.tr_seconds}.grouping_factor();
  return cfg;
}

void validate_for(const ExperimentConfig& cfg, Command command) {
  switch (command) {
    case Command::kFit:
    case Command::kGridsearch:
      require_pairing("train", cfg.train_features, cfg.train_brain, cfg.train_labels);
      break;
    case Command::kEvaluate:
    case Command::kPermtest:
      require_pairing("test", cfg.test_features, cfg.test_brain, cfg.test_labels);
      break;
    case Command::kReconstruct:
      if (cfg.test_brain.empty()) throw ValidationError("config field 'test_brain': required");
      require_files("test_brain", cfg.test_brain);
      if (!cfg.test_features.empty()) require_pairing("test", cfg.test_features, cfg.test_brain, cfg.test_labels);
      break;
    case Command::kClassify:
      require_pairing("train", cfg.train_features, cfg.train_brain, cfg.train_labels);
      require_pairing("test", cfg.test_features, cfg.test_brain, cfg.test_labels);
      if (cfg.train_labels.empty()) throw ValidationError("config field 'train_labels': required for classify");
      if (cfg.test_labels.empty()) throw ValidationError("config field 'test_labels': required for classify");
      break;
  }
  if (command != Command::kFit && command != Command::kGridsearch) {
    const auto model = cfg.resolved_model_path();
    if (!std::filesystem::is_regular_file(model)) {
      throw ValidationError("config field 'model': file not found: " + model.string());
    }
  }
}

}  // namespace xcca
