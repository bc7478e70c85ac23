#include "doctest.h"

#include "xcca/config.hpp"

#include <filesystem>
#include <fstream>

using namespace xcca;
namespace fs = std::filesystem;

TEST_CASE("config grammar") {
  const ConfigMap map = parse_config_text("# comment\n\nlambda_grid = 1e-3, 1e-2 # trailing\n ts_grid=-3,-2\n", "t");
  CHECK(map.at("lambda_grid") == "1e-3, 1e-2");
  CHECK(map.at("ts_grid") == "-3,-2");
  CHECK_THROWS_WITH_AS(parse_config_text("lambda\n", "t"), doctest::Contains("t:1"), ValidationError);

  const ExperimentConfig cfg = ExperimentConfig::from_map(map);
  CHECK(cfg.lambda_grid == std::vector<double>{1e-3, 1e-2});
  CHECK(cfg.ts_grid == std::vector<int>{-3, -2});
  CHECK(cfg.fit_lambda() == 1e-3);
  CHECK(cfg.fit_ts() == -3);
  CHECK(cfg.fit_k() == 10);
}

TEST_CASE("defaults and typed fields") {
  const ExperimentConfig cfg = ExperimentConfig::from_map(
      {{"k_grid", "1,5,3"}, {"split", "row"}, {"balance", "subsample"}, {"group_frames", "true"}, {"lambda", "0"}});
  CHECK(cfg.fit_k() == 5);
  CHECK(cfg.split == SplitMode::kRow);
  CHECK(cfg.balance == BalanceMode::kSubsample);
  CHECK(cfg.group_frames);
  CHECK(cfg.fit_lambda() == 0.0);
  CHECK(cfg.n_permutations == 300);
  CHECK(cfg.resolved_model_path() == fs::path(".") / "model.ccam");
}

TEST_CASE("malformed fields are named") {
  const auto rejects = [](const std::string& key, const std::string& value) {
    CHECK_THROWS_WITH_AS(ExperimentConfig::from_map({{key, value}}), doctest::Contains(("'" + key + "'").c_str()),
                         ValidationError);
  };
  rejects("lambda_grid", "");
  rejects("lambda_grid", "0.1,abc");
  rejects("lambda_grid", "-1");
  rejects("ts_grid", "1.5");
  rejects("k_grid", "0");
  rejects("fps", "0");
  rejects("n_permutations", "0");
  rejects("master_seed", "-1");
  rejects("split", "random");
  rejects("balance", "none");
  rejects("validation_fraction", "1");
  rejects("svm_c", "-2");
  rejects("group_frames", "maybe");
  rejects("no_such_key", "1");
}

TEST_CASE("overrides win and paths resolve against the config file") {
  const fs::path dir = fs::temp_directory_path() / "xcca_cfg_test";
  fs::create_directories(dir / "data");
  std::ofstream(dir / "data" / "f.csv") << "1\n2\n3\n";
  std::ofstream(dir / "exp.conf") << "train_features = data/f.csv\ntrain_brain = data/f.csv, /abs/b.csv\n"
                                     "output_dir = out\nlambda_grid = 1\n";
  ConfigMap map = load_config_file(dir / "exp.conf");
  CHECK(fs::path(map.at("output_dir")) == dir / "out");
  CHECK(map.at("train_brain") == (dir / "data/f.csv").string() + ",/abs/b.csv");
  map = apply_overrides(map, {"lambda_grid=2,3", "threads = 4"});
  const ExperimentConfig cfg = ExperimentConfig::from_map(map);
  CHECK(cfg.lambda_grid == std::vector<double>{2, 3});
  CHECK(cfg.threads == 4);
  CHECK_THROWS_WITH_AS(validate_for(cfg, Command::kFit), doctest::Contains("'train_brain'"), ValidationError);
  CHECK_THROWS_AS(apply_overrides({}, {"novalue"}), ValidationError);
}

TEST_CASE("classification needs labels") {
  const fs::path dir = fs::temp_directory_path() / "xcca_cfg_test2";
  fs::create_directories(dir);
  std::ofstream(dir / "m.csv") << "1\n2\n3\n";
  ExperimentConfig cfg;
  cfg.train_features = cfg.train_brain = cfg.test_features = cfg.test_brain = {dir / "m.csv"};
  cfg.model_path = dir / "m.csv";
  CHECK_THROWS_WITH_AS(validate_for(cfg, Command::kClassify), doctest::Contains("train_labels"), ValidationError);
  CHECK_NOTHROW(validate_for(cfg, Command::kEvaluate));
  cfg.model_path = dir / "none.ccam";
  CHECK_THROWS_WITH_AS(validate_for(cfg, Command::kEvaluate), doctest::Contains("'model'"), ValidationError);
}
