#pragma once

#include "xcca/dataset.hpp"
#include "xcca/kcca.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>
#include "json.hpp"

namespace xcca {

struct SvmParams {
  double c = 1.0;
  int epochs = 200;
  std::uint64_t seed = 0;
  /// Inverse-frequency class weights n / (2 n_y); all ones when false.
  bool balanced = true;
};

/// Linear max-margin classifier: decision(x) = w.x + b.
struct ClassifierModel {
  Vector w;
  double b = 0.0;
  double weight_pos = 1.0;
  double weight_neg = 1.0;
  SvmParams hyper;

  Vector decision(const Matrix& x) const;
};

struct Confusion {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
};

struct Metrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  Confusion confusion;
};

/// Minimizes (1/2)||w||^2 + C sum_i cw(y_i) max(0, 1 - y_i (w.x_i + b)).
///
/// w follows averaged stochastic subgradient steps (rate 1/(mu t) with
/// mu = 1/(C n), seed-driven shuffling, averaging over the second half of the
/// epochs); the unregularized bias is set after every epoch, and once more for
/// the averaged w, by exact minimization of the objective along b.
ClassifierModel train_svm(const Matrix& x, const std::vector<int>& labels, const SvmParams& params = {});

/// sign(w.x + b), with 0 mapped to +1.
std::vector<int> predict(const ClassifierModel& model, const Matrix& x);

/// Positive class is +1. 0/0 ratios are reported as 0.
Metrics compute_metrics(const std::vector<int>& pred, const std::vector<int>& truth);

/// Indices of a class-balanced subset: every minority row plus an equal-size
/// random draw of majority rows, returned in ascending order.
std::vector<Index> balanced_subsample(const std::vector<int>& labels, std::uint64_t seed);

/// Parses one label per line: +1/-1/1 or face/full-body (face -> +1).
/// A first line that is not a label token is treated as a header.
std::vector<int> parse_labels(std::string_view text, std::string_view what);
std::vector<int> load_labels(const std::filesystem::path& path);
void save_labels(const std::vector<int>& labels, const std::filesystem::path& path);

enum class BalanceMode { kWeights, kSubsample };

struct ThreeWayOptions {
  SvmParams svm;
  BalanceMode balance = BalanceMode::kWeights;
  double feature_train_fraction = 0.75;
  int threads = 1;
};

/// Metrics pooled over all test rows plus per-segment values and their spread.
struct ConditionResult {
  Metrics pooled;
  std::vector<double> segment_accuracy;
  std::vector<double> segment_f1;
  double accuracy_mean = 0.0;
  double accuracy_std = 0.0;
  double f1_mean = 0.0;
  double f1_std = 0.0;
};

struct ThreeWayReport {
  ConditionResult brain_only;
  std::vector<Index> k_grid;
  std::vector<ConditionResult> reconstructed;  // one per k
  ConditionResult features_only;
};

/// Trains and tests a linear SVM on (1) the raw brain view, (2) features
/// reconstructed from the brain view with the first k components of `model`
/// for each k, and (3) the true features under a random row split. Both
/// datasets must be normalized with the model's stats and carry labels.
ThreeWayReport run_three_way(const PairedDataset& train, const PairedDataset& test, const CcaModel& model,
                             const std::vector<Index>& k_grid, const ThreeWayOptions& options = {});

nlohmann::json to_json(const Metrics& m);
nlohmann::json to_json(const ThreeWayReport& report);

}  // namespace xcca
