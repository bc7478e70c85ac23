#include "xcca/commands.hpp"

#include "xcca/classify.hpp"
#include "xcca/kcca.hpp"
#include "xcca/matrix_io.hpp"
#include "xcca/model_io.hpp"
#include "xcca/parallel.hpp"
#include "xcca/significance.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace xcca {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

/// Runs `body`, prefixing any error message with `stage` while keeping its type.
template <typename F>
auto in_stage(const std::string& stage, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const IngestError& e) {
    throw IngestError(stage + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(stage + ": " + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError(stage + ": " + e.what());
  }
}

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::vector<double> as_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

/// Files of one command, written only after every output has been computed.
class OutputSet {
 public:
  void text(fs::path path, std::string content) { files_.emplace_back(std::move(path), std::move(content)); }
  void json(const fs::path& path, const nlohmann::json& j) { text(path, j.dump(2) + "\n"); }
  void matrix(fs::path path, Matrix m) { matrices_.emplace_back(std::move(path), std::move(m)); }
  void model(fs::path path, CcaModel m) { models_.emplace_back(std::move(path), std::move(m)); }

  void commit() const {
    for (const auto& [path, content] : files_) {
      ensure_parent(path);
      std::ofstream out(path, std::ios::binary | std::ios::trunc);
      if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
      out << content;
      if (!out.flush()) throw std::runtime_error(path.string() + ": write failed");
    }
    for (const auto& [path, m] : matrices_) {
      ensure_parent(path);
      save_matrix(m, path);
    }
    for (const auto& [path, m] : models_) {
      ensure_parent(path);
      save_model(m, path);
    }
  }

 private:
  static void ensure_parent(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
  }

  std::vector<std::pair<fs::path, std::string>> files_;
  std::vector<std::pair<fs::path, Matrix>> matrices_;
  std::vector<std::pair<fs::path, CcaModel>> models_;
};

nlohmann::json meta(const std::string& command, int threads, std::chrono::system_clock::time_point started,
                    Clock::time_point t0) {
  const std::time_t tt = std::chrono::system_clock::to_time_t(started);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char stamp[32];
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return {{"command", command},
          {"started_utc", stamp},
          {"elapsed_seconds", std::chrono::duration<double>(Clock::now() - t0).count()},
          {"threads", threads}};
}

/// Common tail of every command: report + metadata + extra outputs.
nlohmann::json finish(const std::string& command, const fs::path& output_dir, nlohmann::json report,
                      OutputSet outputs, int threads, std::chrono::system_clock::time_point started,
                      Clock::time_point t0) {
  report["command"] = command;
  outputs.json(output_dir / (command + ".json"), report);
  outputs.json(output_dir / (command + ".meta.json"), meta(command, threads, started, t0));
  outputs.commit();
  return report;
}

void check_dims(const PairedDataset& ds, const CcaModel& model) {
  if (ds.features.cols() != model.feature_dim()) {
    throw ValidationError("features have " + std::to_string(ds.features.cols()) + " columns, model expects " +
                          std::to_string(model.feature_dim()));
  }
  if (ds.brain.cols() != model.brain_dim()) {
    throw ValidationError("brain data has " + std::to_string(ds.brain.cols()) + " columns, model expects " +
                          std::to_string(model.brain_dim()));
  }
}

CcaModel load_model_for(const ExperimentConfig& cfg) {
  return in_stage("load model", [&] { return load_model(cfg.resolved_model_path()); });
}

PairedDataset load_test(const ExperimentConfig& cfg, const CcaModel& model) {
  const PairedDataset raw =
      in_stage("load test data", [&] { return load_paired(cfg.test_features, cfg.test_brain, cfg.test_labels, cfg); });
  in_stage("check test data", [&] { check_dims(raw, model); });
  return in_stage("prepare test data",
                  [&] { return prepare(raw, model.feature_stats, model.brain_stats, model.time_shift); });
}

nlohmann::json model_summary(const CcaModel& model) {
  return {{"lambda", model.lambda},
          {"ts", model.time_shift},
          {"k", model.num_components()},
          {"train_corrs", as_std(model.train_corrs)}};
}

/// Mean and population std of each column across rows.
std::pair<Vector, Vector> spread(const Matrix& per_segment) {
  const Vector mean = per_segment.colwise().mean().transpose();
  Vector sd(per_segment.cols());
  for (Index c = 0; c < per_segment.cols(); ++c) {
    sd(c) = std::sqrt((per_segment.col(c).array() - mean(c)).square().mean());
  }
  return {mean, sd};
}

std::string labels_csv(const std::vector<int>& labels) {
  std::string out = "label\n";
  for (int y : labels) out += y > 0 ? "+1\n" : "-1\n";
  return out;
}

}  // namespace

PairedDataset load_paired(const std::vector<fs::path>& features, const std::vector<fs::path>& brain,
                          const std::vector<fs::path>& labels, const ExperimentConfig& cfg) {
  if (brain.empty()) throw ValidationError("no brain files");
  if (features.size() != 1 && features.size() != brain.size()) {
    throw ValidationError("features list must have 1 or " + std::to_string(brain.size()) + " entries");
  }
  if (!labels.empty() && labels.size() != 1 && labels.size() != brain.size()) {
    throw ValidationError("labels list must have 1 or " + std::to_string(brain.size()) + " entries");
  }
  const Index group = cfg.group_frames ? AlignmentConfig{0, cfg.fps, cfg.tr_seconds}.grouping_factor() : 1;
  std::map<fs::path, Matrix> feature_cache;
  std::map<fs::path, std::vector<int>> label_cache;
  std::vector<PairedDataset> segments;
  for (std::size_t i = 0; i < brain.size(); ++i) {
    const fs::path& fpath = features.size() == 1 ? features[0] : features[i];
    auto it = feature_cache.find(fpath);
    if (it == feature_cache.end()) {
      Matrix f = load_matrix(fpath);
      if (group > 1) f = group_average(f, group);
      it = feature_cache.emplace(fpath, std::move(f)).first;
    }
    Matrix b = load_matrix(brain[i]);
    if (it->second.rows() != b.rows()) {
      throw ValidationError("segment " + std::to_string(i + 1) + ": " + fpath.string() + " has " +
                            std::to_string(it->second.rows()) + " rows" + (group > 1 ? " after grouping" : "") +
                            ", " + brain[i].string() + " has " + std::to_string(b.rows()));
    }
    std::vector<int> y;
    if (!labels.empty()) {
      const fs::path& lpath = labels.size() == 1 ? labels[0] : labels[i];
      auto lit = label_cache.find(lpath);
      if (lit == label_cache.end()) lit = label_cache.emplace(lpath, load_labels(lpath)).first;
      y = lit->second;
      if (static_cast<Index>(y.size()) != b.rows()) {
        throw ValidationError("segment " + std::to_string(i + 1) + ": " + lpath.string() + " has " +
                              std::to_string(y.size()) + " labels for " + std::to_string(b.rows()) + " rows");
      }
    }
    segments.push_back(make_dataset(it->second, std::move(b), std::move(y)));
  }
  return concat_time(segments);
}

PairedDataset prepare(const PairedDataset& raw, const NormStats& fstats, const NormStats& bstats, int ts) {
  return apply_time_shift(normalize(raw, fstats, bstats), ts);
}

ValidationSplit split_for_validation(const PairedDataset& raw, const ExperimentConfig& cfg) {
  ValidationSplit out;
  if (cfg.split == SplitMode::kSegment) {
    const Index n = raw.segment_count();
    if (cfg.validation_segments >= n) {
      throw ValidationError("degenerate validation split: " + std::to_string(n) + " segment(s), " +
                            std::to_string(cfg.validation_segments) +
                            " held out; use more training files or split = row");
    }
    std::vector<Index> train, val;
    for (Index s = 0; s < n; ++s) (s < n - cfg.validation_segments ? train : val).push_back(s);
    out.train = select_segments(raw, train);
    out.validation = select_segments(raw, val);
    return out;
  }
  std::vector<PairedDataset> train, val;
  for (Index s = 0; s < raw.segment_count(); ++s) {
    const PairedDataset seg = segment(raw, s);
    const Index n_val = static_cast<Index>(std::llround(cfg.validation_fraction * static_cast<double>(seg.rows())));
    const Index n_train = seg.rows() - n_val;
    if (n_val < 1 || n_train < 1) {
      throw ValidationError("degenerate validation split: segment " + std::to_string(s + 1) + " has " +
                            std::to_string(seg.rows()) + " rows");
    }
    std::vector<Index> head(static_cast<std::size_t>(n_train)), tail(static_cast<std::size_t>(n_val));
    for (Index r = 0; r < n_train; ++r) head[static_cast<std::size_t>(r)] = r;
    for (Index r = 0; r < n_val; ++r) tail[static_cast<std::size_t>(r)] = n_train + r;
    const auto slice = [&](const std::vector<Index>& rows) {
      std::vector<int> y;
      if (seg.has_labels()) {
        for (Index r : rows) y.push_back(seg.labels[static_cast<std::size_t>(r)]);
      }
      return make_dataset(take_rows(seg.features, rows), take_rows(seg.brain, rows), std::move(y));
    };
    train.push_back(slice(head));
    val.push_back(slice(tail));
  }
  out.train = concat_time(train);
  out.validation = concat_time(val);
  return out;
}

nlohmann::json cmd_synth(const SynthCommand& command, const fs::path& output_dir) {
  const auto started = std::chrono::system_clock::now();
  const auto t0 = Clock::now();
  const SynthSpec& spec = command.spec;
  spec.validate();
  if (command.test_segments < 1 || command.test_segments >= spec.n_segments) {
    throw ValidationError("synth: test_segments must be in [1, n_segments - 1]");
  }
  const SynthResult result = generate(spec);
  const PairedDataset& ds = result.dataset;

  OutputSet outputs;
  outputs.matrix(output_dir / "features.mxb", ds.features);
  outputs.matrix(output_dir / "brain.mxb", ds.brain);
  if (ds.has_labels()) outputs.text(output_dir / "labels.csv", labels_csv(ds.labels));
  std::vector<std::string> train_f, train_b, train_l, test_f, test_b, test_l;
  for (Index s = 0; s < ds.segment_count(); ++s) {
    char name[32];
    std::snprintf(name, sizeof(name), "seg%02lld", static_cast<long long>(s + 1));
    const PairedDataset seg = segment(ds, s);
    const bool is_test = s >= spec.n_segments - command.test_segments;
    const std::string base = std::string("segments/") + name;
    outputs.matrix(output_dir / (base + "_features.mxb"), seg.features);
    outputs.matrix(output_dir / (base + "_brain.mxb"), seg.brain);
    (is_test ? test_f : train_f).push_back(base + "_features.mxb");
    (is_test ? test_b : train_b).push_back(base + "_brain.mxb");
    if (seg.has_labels()) {
      outputs.text(output_dir / (base + "_labels.csv"), labels_csv(seg.labels));
      (is_test ? test_l : train_l).push_back(base + "_labels.csv");
    }
  }

  const auto list = [](const std::vector<std::string>& v) {
    std::string out;
    for (const auto& s : v) out += (out.empty() ? "" : ",") + s;
    return out;
  };
  std::ostringstream conf;
  conf << "# synthetic bundle, seed " << spec.seed << ", planted lag " << spec.lag << "\n";
  conf << "train_features = " << list(train_f) << "\n";
  conf << "train_brain = " << list(train_b) << "\n";
  if (!train_l.empty()) conf << "train_labels = " << list(train_l) << "\n";
  conf << "test_features = " << list(test_f) << "\n";
  conf << "test_brain = " << list(test_b) << "\n";
  if (!test_l.empty()) conf << "test_labels = " << list(test_l) << "\n";
  conf << "output_dir = out\n";
  conf << "lambda_grid = 1e-2\n";
  conf << "ts_grid = -3,-2,-1,0,1,2,3\n";
  conf << "ts = " << spec.lag << "\n";
  std::string ks;
  for (Index k = 1; k <= spec.k_latent; ++k) ks += (k > 1 ? "," : "") + std::to_string(k);
  conf << "k_grid = " << ks << "\n";
  conf << "master_seed = " << spec.seed << "\n";
  outputs.text(output_dir / "experiment.conf", conf.str());

  nlohmann::json truth = to_json(result.truth);
  truth["spec"] = to_json(spec);
  outputs.json(output_dir / "truth.json", truth);

  nlohmann::json report = {{"spec", to_json(spec)},
                           {"rows", ds.rows()},
                           {"segments", ds.segment_count()},
                           {"train_segments", spec.n_segments - command.test_segments},
                           {"test_segments", command.test_segments},
                           {"config", "experiment.conf"},
                           {"files", {"features.mxb", "brain.mxb", "truth.json", "segments/"}}};
  return finish("synth", output_dir, std::move(report), std::move(outputs), 1, started, t0);
}

nlohmann::json cmd_fit(const ExperimentConfig& cfg) {
  const auto started = std::chrono::system_clock::now();
  const auto t0 = Clock::now();
  validate_for(cfg, Command::kFit);
  const PairedDataset raw = in_stage(
      "load training data", [&] { return load_paired(cfg.train_features, cfg.train_brain, cfg.train_labels, cfg); });
  const NormStats fstats = zscore_fit(raw.features);
  const NormStats bstats = zscore_fit(raw.brain);
  const PairedDataset ds = in_stage("align", [&] { return prepare(raw, fstats, bstats, cfg.fit_ts()); });
  CcaModel model = in_stage("fit", [&] { return fit_kcca(ds.features, ds.brain, cfg.fit_lambda(), cfg.fit_k()); });
  model.feature_stats = fstats;
  model.brain_stats = bstats;
  model.time_shift = cfg.fit_ts();

  nlohmann::json report = {{"model", model_summary(model)},
                           {"rows", ds.rows()},
                           {"segments", ds.segment_count()},
                           {"feature_dim", model.feature_dim()},
                           {"brain_dim", model.brain_dim()},
                           {"train_corrs", as_std(model.train_corrs)}};
  OutputSet outputs;
  outputs.model(cfg.resolved_model_path(), model);
  return finish("fit", cfg.output_dir, std::move(report), std::move(outputs), 1, started, t0);
}

nlohmann::json cmd_gridsearch(const ExperimentConfig& cfg) {
  const auto started = std::chrono::system_clock::now();
  const auto t0 = Clock::now();
  validate_for(cfg, Command::kGridsearch);
  const int threads = resolve_threads(cfg.threads);
  const PairedDataset raw = in_stage(
      "load training data", [&] { return load_paired(cfg.train_features, cfg.train_brain, cfg.train_labels, cfg); });
  const ValidationSplit split = in_stage("split", [&] { return split_for_validation(raw, cfg); });
  const NormStats fstats = zscore_fit(split.train.features);
  const NormStats bstats = zscore_fit(split.train.brain);
  const PairedDataset train_n = normalize(split.train, fstats, bstats);
  const PairedDataset val_n = normalize(split.validation, fstats, bstats);
  const Index k = *std::max_element(cfg.k_grid.begin(), cfg.k_grid.end());

  struct Cell {
    double lambda;
    int ts;
    Vector train_corrs;
    Vector val_corrs;
  };
  std::vector<Cell> cells;
  for (double lambda : cfg.lambda_grid) {
    for (int ts : cfg.ts_grid) cells.push_back({lambda, ts, {}, {}});
  }
  parallel_for(cells.size(), threads, [&](std::size_t i) {
    Cell& cell = cells[i];
    const std::string where = "gridsearch cell lambda=" + format_double(cell.lambda) + " ts=" + std::to_string(cell.ts);
    in_stage(where, [&] {
      const PairedDataset tr = apply_time_shift(train_n, cell.ts);
      const PairedDataset va = apply_time_shift(val_n, cell.ts);
      if (va.rows() < 3) throw ValidationError("degenerate validation split: fewer than 3 validation rows");
      const CcaModel model = fit_kcca(tr.features, tr.brain, cell.lambda, k);
      cell.train_corrs = model.train_corrs;
      cell.val_corrs = evaluate_correlations(model, va.features, va.brain);
    });
  });

  std::ostringstream csv;
  csv << "lambda,ts,component,train_corr,validation_corr\n";
  nlohmann::json table = nlohmann::json::array();
  std::size_t best = 0;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const Cell& cell = cells[i];
    for (Index c = 0; c < k; ++c) {
      csv << format_double(cell.lambda) << ',' << cell.ts << ',' << c + 1 << ',' << format_double(cell.train_corrs(c))
          << ',' << format_double(cell.val_corrs(c)) << '\n';
    }
    table.push_back({{"lambda", cell.lambda},
                     {"ts", cell.ts},
                     {"train_corrs", as_std(cell.train_corrs)},
                     {"validation_corrs", as_std(cell.val_corrs)}});
    if (cell.val_corrs(0) > cells[best].val_corrs(0)) best = i;
  }
  // Mean validation correlation of the first k components, per cell and k.
  nlohmann::json by_k = nlohmann::json::array();
  for (Index kk : cfg.k_grid) {
    std::vector<double> means;
    for (const Cell& cell : cells) means.push_back(cell.val_corrs.head(kk).mean());
    by_k.push_back({{"k", kk}, {"mean_validation_corr", means}});
  }

  nlohmann::json report = {
      {"split", cfg.split == SplitMode::kSegment ? "segment" : "row"},
      {"train_rows", split.train.rows()},
      {"validation_rows", split.validation.rows()},
      {"k", k},
      {"cells", table},
      {"by_k", by_k},
      {"best", {{"lambda", cells[best].lambda}, {"ts", cells[best].ts}, {"validation_corr", cells[best].val_corrs(0)}}},
      {"table", "gridsearch.csv"}};
  OutputSet outputs;
  outputs.text(cfg.output_dir / "gridsearch.csv", csv.str());
  return finish("gridsearch", cfg.output_dir, std::move(report), std::move(outputs), threads, started, t0);
}

nlohmann::json cmd_evaluate(const ExperimentConfig& cfg) {
  const auto started = std::chrono::system_clock::now();
  const auto t0 = Clock::now();
  validate_for(cfg, Command::kEvaluate);
  const CcaModel model = load_model_for(cfg);
  const PairedDataset ds = load_test(cfg, model);
  const Vector pooled = in_stage("evaluate", [&] { return evaluate_correlations(model, ds.features, ds.brain); });

  Matrix per_segment(ds.segment_count(), model.num_components());
  nlohmann::json segments = nlohmann::json::array();
  for (Index s = 0; s < ds.segment_count(); ++s) {
    const PairedDataset seg = segment(ds, s);
    per_segment.row(s) =
        in_stage("evaluate segment " + std::to_string(s + 1),
                 [&] { return evaluate_correlations(model, seg.features, seg.brain); })
            .transpose();
    segments.push_back({{"rows", seg.rows()}, {"corrs", as_std(per_segment.row(s).transpose())}});
  }
  const auto [mean, sd] = spread(per_segment);
  nlohmann::json report = {{"model", model_summary(model)},
                           {"rows", ds.rows()},
                           {"test_corrs", as_std(pooled)},
                           {"segments", segments},
                           {"segment_mean", as_std(mean)},
                           {"segment_std", as_std(sd)}};
  return finish("evaluate", cfg.output_dir, std::move(report), OutputSet{}, 1, started, t0);
}

nlohmann::json cmd_permtest(const ExperimentConfig& cfg) {
  const auto started = std::chrono::system_clock::now();
  const auto t0 = Clock::now();
  validate_for(cfg, Command::kPermtest);
  const int threads = resolve_threads(cfg.threads);
  const CcaModel model = load_model_for(cfg);
  const PairedDataset ds = load_test(cfg, model);
  PermutationOptions options;
  options.scramble.independent_phases = cfg.independent_phases;
  options.threads = threads;
  const PermutationReport perm = in_stage("permtest", [&] {
    return permutation_test(model, ds.features, ds.brain, cfg.n_permutations, cfg.master_seed, options);
  });
  nlohmann::json report = to_json(perm);
  report["model"] = model_summary(model);
  report["rows"] = ds.rows();
  report["independent_phases"] = cfg.independent_phases;
  OutputSet outputs;
  if (cfg.dump_null) {
    outputs.matrix(cfg.output_dir / "null_samples.mxb", perm.null_samples);
    report["null_samples"] = "null_samples.mxb";
  }
  return finish("permtest", cfg.output_dir, std::move(report), std::move(outputs), threads, started, t0);
}

nlohmann::json cmd_reconstruct(const ExperimentConfig& cfg) {
  const auto started = std::chrono::system_clock::now();
  const auto t0 = Clock::now();
  validate_for(cfg, Command::kReconstruct);
  const CcaModel model = load_model_for(cfg);
  nlohmann::json report = {{"model", model_summary(model)}};
  Matrix recon;
  if (!cfg.test_features.empty()) {
    const PairedDataset ds = load_test(cfg, model);
    recon = in_stage("reconstruct", [&] { return reconstruct_features(model, ds.brain); });
    Vector col_corr(recon.cols());
    for (Index j = 0; j < recon.cols(); ++j) col_corr(j) = pearson(recon.col(j), ds.features.col(j));
    report["rows"] = ds.rows();
    report["aligned"] = true;
    report["column_corrs"] = as_std(col_corr);
    report["mean_column_corr"] = col_corr.mean();
    report["mse_zscored"] = (recon - ds.features).squaredNorm() / static_cast<double>(recon.size());
  } else {
    std::vector<Matrix> parts;
    Index rows = 0;
    for (const auto& path : cfg.test_brain) {
      Matrix b = in_stage("load " + path.string(), [&] { return load_matrix(path); });
      if (b.cols() != model.brain_dim()) {
        throw ValidationError(path.string() + ": " + std::to_string(b.cols()) + " columns, model expects " +
                              std::to_string(model.brain_dim()));
      }
      rows += b.rows();
      parts.push_back(zscore_apply(b, model.brain_stats));
    }
    Matrix brain(rows, model.brain_dim());
    Index at = 0;
    for (const auto& part : parts) {
      brain.middleRows(at, part.rows()) = part;
      at += part.rows();
    }
    recon = in_stage("reconstruct", [&] { return reconstruct_features(model, brain); });
    report["rows"] = rows;
    report["aligned"] = false;
    // Row i estimates the features at row i + ts of the stimulus timeline.
    report["feature_row_offset"] = model.time_shift;
  }
  if (cfg.denormalize) recon = zscore_invert(recon, model.feature_stats);
  report["denormalized"] = cfg.denormalize;
  report["output"] = "reconstructed.mxb";
  OutputSet outputs;
  outputs.matrix(cfg.output_dir / "reconstructed.mxb", recon);
  return finish("reconstruct", cfg.output_dir, std::move(report), std::move(outputs), 1, started, t0);
}

nlohmann::json cmd_classify(const ExperimentConfig& cfg) {
  const auto started = std::chrono::system_clock::now();
  const auto t0 = Clock::now();
  validate_for(cfg, Command::kClassify);
  const int threads = resolve_threads(cfg.threads);
  const CcaModel model = load_model_for(cfg);
  const PairedDataset raw_train = in_stage(
      "load training data", [&] { return load_paired(cfg.train_features, cfg.train_brain, cfg.train_labels, cfg); });
  in_stage("check training data", [&] { check_dims(raw_train, model); });
  const PairedDataset train = prepare(raw_train, model.feature_stats, model.brain_stats, model.time_shift);
  const PairedDataset test = load_test(cfg, model);

  ThreeWayOptions options;
  options.svm.c = cfg.svm_c;
  options.svm.epochs = cfg.svm_epochs;
  options.svm.seed = cfg.master_seed;
  options.balance = cfg.balance;
  options.feature_train_fraction = cfg.feature_train_fraction;
  options.threads = threads;
  const ThreeWayReport three = in_stage("classify", [&] { return run_three_way(train, test, model, cfg.k_grid, options); });
  nlohmann::json report = to_json(three);
  report["model"] = model_summary(model);
  report["train_rows"] = train.rows();
  report["test_rows"] = test.rows();
  report["svm"] = {{"c", cfg.svm_c},
                   {"epochs", cfg.svm_epochs},
                   {"balance", cfg.balance == BalanceMode::kWeights ? "weights" : "subsample"}};
  return finish("classify", cfg.output_dir, std::move(report), OutputSet{}, threads, started, t0);
}

}  // namespace xcca
