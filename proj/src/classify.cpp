#include "xcca/classify.hpp"

#include "xcca/parallel.hpp"
#include "xcca/random.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>

namespace xcca {
namespace {

struct ClassCounts {
  std::size_t pos = 0;
  std::size_t neg = 0;
};

ClassCounts count_classes(const std::vector<int>& labels) {
  ClassCounts counts;
  for (int y : labels) {
    if (y == 1) {
      ++counts.pos;
    } else if (y == -1) {
      ++counts.neg;
    } else {
      throw ValidationError("labels must be +1 or -1, got " + std::to_string(y));
    }
  }
  return counts;
}

/// argmin_b sum_i c_i max(0, 1 - y_i (s_i + b)). The objective is convex and
/// piecewise linear with breakpoints at y_i - s_i; its slope rises by c_i at
/// every breakpoint. A flat optimal interval resolves to its midpoint.
double optimal_bias(const Vector& scores, const std::vector<int>& labels, double weight_pos, double weight_neg) {
  struct Breakpoint {
    double at;
    double weight;
  };
  std::vector<Breakpoint> points;
  points.reserve(labels.size());
  double slope = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double c = labels[i] > 0 ? weight_pos : weight_neg;
    points.push_back({static_cast<double>(labels[i]) - scores(static_cast<Index>(i)), c});
    if (labels[i] > 0) slope -= c;
    total += c;
  }
  std::sort(points.begin(), points.end(), [](const Breakpoint& l, const Breakpoint& r) { return l.at < r.at; });
  const double tol = 1e-12 * total;
  for (std::size_t j = 0; j < points.size(); ++j) {
    slope += points[j].weight;
    if (slope > tol) return points[j].at;
    if (slope >= -tol) {
      const double next = j + 1 < points.size() ? points[j + 1].at : points[j].at;
      return 0.5 * (points[j].at + next);
    }
  }
  return points.empty() ? 0.0 : points.back().at;
}

double population_std(const std::vector<double>& v, double mean) {
  if (v.empty()) return 0.0;
  double acc = 0.0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return std::sqrt(acc / static_cast<double>(v.size()));
}

double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::vector<int> pick(const std::vector<int>& labels, const std::vector<Index>& rows) {
  std::vector<int> out;
  out.reserve(rows.size());
  for (Index r : rows) out.push_back(labels[static_cast<std::size_t>(r)]);
  return out;
}

/// Trains on (x, labels) under the configured balancing, evaluates on the test
/// rows, and breaks the evaluation down by `test_groups` (one group id per row).
ConditionResult run_condition(const Matrix& x_train, const std::vector<int>& y_train, const Matrix& x_test,
                              const std::vector<int>& y_test, const std::vector<Index>& test_groups,
                              Index n_groups, const ThreeWayOptions& options) {
  ClassifierModel clf;
  if (options.balance == BalanceMode::kSubsample) {
    const auto rows = balanced_subsample(y_train, options.svm.seed);
    SvmParams params = options.svm;
    params.balanced = false;
    clf = train_svm(take_rows(x_train, rows), pick(y_train, rows), params);
  } else {
    clf = train_svm(x_train, y_train, options.svm);
  }
  const auto pred = predict(clf, x_test);

  ConditionResult result;
  result.pooled = compute_metrics(pred, y_test);
  for (Index g = 0; g < n_groups; ++g) {
    std::vector<int> gp, gt;
    for (std::size_t i = 0; i < pred.size(); ++i) {
      if (test_groups[i] == g) {
        gp.push_back(pred[i]);
        gt.push_back(y_test[i]);
      }
    }
    if (gp.empty()) continue;
    const Metrics m = compute_metrics(gp, gt);
    result.segment_accuracy.push_back(m.accuracy);
    result.segment_f1.push_back(m.f1);
  }
  result.accuracy_mean = mean_of(result.segment_accuracy);
  result.accuracy_std = population_std(result.segment_accuracy, result.accuracy_mean);
  result.f1_mean = mean_of(result.segment_f1);
  result.f1_std = population_std(result.segment_f1, result.f1_mean);
  return result;
}

std::vector<Index> segment_ids(const PairedDataset& ds) {
  std::vector<Index> ids(static_cast<std::size_t>(ds.rows()));
  for (Index s = 0; s < ds.segment_count(); ++s) {
    for (Index r = ds.segment_begin(s); r < ds.segment_end(s); ++r) ids[static_cast<std::size_t>(r)] = s;
  }
  return ids;
}

}  // namespace

Vector ClassifierModel::decision(const Matrix& x) const {
  if (x.cols() != w.size()) {
    throw ValidationError("classifier: input has " + std::to_string(x.cols()) + " columns, model expects " +
                          std::to_string(w.size()));
  }
  return (x * w).array() + b;
}

ClassifierModel train_svm(const Matrix& x, const std::vector<int>& labels, const SvmParams& params) {
  const Index n = x.rows();
  if (static_cast<Index>(labels.size()) != n) {
    throw ValidationError("train_svm: " + std::to_string(labels.size()) + " labels for " + std::to_string(n) + " rows");
  }
  if (!(params.c > 0.0)) throw ValidationError("train_svm: C must be positive");
  if (params.epochs < 1) throw ValidationError("train_svm: epochs must be >= 1");
  const ClassCounts counts = count_classes(labels);
  if (counts.pos == 0 || counts.neg == 0) throw ValidationError("train_svm: training set has a single class");

  ClassifierModel model;
  model.hyper = params;
  if (params.balanced) {
    model.weight_pos = static_cast<double>(n) / (2.0 * static_cast<double>(counts.pos));
    model.weight_neg = static_cast<double>(n) / (2.0 * static_cast<double>(counts.neg));
  }

  const double mu = 1.0 / (params.c * static_cast<double>(n));
  Vector w = Vector::Zero(x.cols());
  Vector w_avg = Vector::Zero(x.cols());
  double b = 0.0;
  std::size_t averaged = 0;
  std::size_t step = 0;
  const int average_from = params.epochs / 2;

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  Rng rng(params.seed);
  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (Index i : order) {
      ++step;
      const double eta = 1.0 / (mu * static_cast<double>(step));
      const int y = labels[static_cast<std::size_t>(i)];
      const double margin = y * (x.row(i).dot(w) + b);
      w *= 1.0 - 1.0 / static_cast<double>(step);
      if (margin < 1.0) {
        const double c = y > 0 ? model.weight_pos : model.weight_neg;
        // Stochastic subgradient of the objective divided by C n.
        w += (eta * c * y) * x.row(i).transpose();
      }
      if (epoch >= average_from) {
        ++averaged;
        w_avg += (w - w_avg) / static_cast<double>(averaged);
      }
    }
    b = optimal_bias(x * w, labels, model.weight_pos, model.weight_neg);
  }
  model.w = w_avg;
  model.b = optimal_bias(x * w_avg, labels, model.weight_pos, model.weight_neg);
  if (!model.w.allFinite() || !std::isfinite(model.b)) throw NumericalError("train_svm: non-finite weights");
  return model;
}

std::vector<int> predict(const ClassifierModel& model, const Matrix& x) {
  const Vector d = model.decision(x);
  std::vector<int> out(static_cast<std::size_t>(d.size()));
  for (Index i = 0; i < d.size(); ++i) out[static_cast<std::size_t>(i)] = d(i) >= 0.0 ? 1 : -1;
  return out;
}

Metrics compute_metrics(const std::vector<int>& pred, const std::vector<int>& truth) {
  if (pred.size() != truth.size()) throw ValidationError("compute_metrics: length mismatch");
  if (pred.empty()) throw ValidationError("compute_metrics: empty input");
  Metrics m;
  auto& c = m.confusion;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const bool p = pred[i] > 0;
    const bool t = truth[i] > 0;
    if (p && t) ++c.tp;
    else if (p && !t) ++c.fp;
    else if (!p && !t) ++c.tn;
    else ++c.fn;
  }
  const auto ratio = [](std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
  };
  m.accuracy = ratio(c.tp + c.tn, c.tp + c.fp + c.tn + c.fn);
  m.precision = ratio(c.tp, c.tp + c.fp);
  m.recall = ratio(c.tp, c.tp + c.fn);
  m.f1 = (m.precision + m.recall) > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
  return m;
}

std::vector<Index> balanced_subsample(const std::vector<int>& labels, std::uint64_t seed) {
  std::vector<Index> pos, neg;
  for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] > 0 ? pos : neg).push_back(static_cast<Index>(i));
  if (pos.empty() || neg.empty()) throw ValidationError("balanced_subsample: need both classes");
  auto& minority = pos.size() <= neg.size() ? pos : neg;
  auto& majority = pos.size() <= neg.size() ? neg : pos;
  Rng rng(seed);
  std::shuffle(majority.begin(), majority.end(), rng);
  std::vector<Index> out(minority);
  out.insert(out.end(), majority.begin(), majority.begin() + static_cast<std::ptrdiff_t>(minority.size()));
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> parse_labels(std::string_view text, std::string_view what) {
  std::vector<int> labels;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.pop_back();
    const auto start = line.find_first_not_of(" \t");
    if (start == std::string::npos) continue;
    const std::string token = line.substr(start);
    if (token == "+1" || token == "1" || token == "face") {
      labels.push_back(1);
    } else if (token == "-1" || token == "full-body") {
      labels.push_back(-1);
    } else if (labels.empty() && line_no == 1) {
      continue;  // header
    } else {
      throw IngestError(std::string(what) + ": bad label '" + token + "' on line " + std::to_string(line_no));
    }
  }
  if (labels.empty()) throw IngestError(std::string(what) + ": no labels");
  return labels;
}

std::vector<int> load_labels(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IngestError(path.string() + ": cannot open labels file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_labels(buf.str(), path.string());
}

void save_labels(const std::vector<int>& labels, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  for (int y : labels) out << (y > 0 ? "+1" : "-1") << '\n';
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

ThreeWayReport run_three_way(const PairedDataset& train, const PairedDataset& test, const CcaModel& model,
                             const std::vector<Index>& k_grid, const ThreeWayOptions& options) {
  if (!train.has_labels()) throw ValidationError("run_three_way: training set has no labels");
  if (!test.has_labels()) throw ValidationError("run_three_way: test set has no labels");
  train.validate();
  test.validate();
  if (k_grid.empty()) throw ValidationError("run_three_way: empty k grid");
  for (Index k : k_grid) {
    if (k < 1 || k > model.num_components()) {
      throw ValidationError("run_three_way: k = " + std::to_string(k) + " outside [1, " +
                            std::to_string(model.num_components()) + "]");
    }
  }
  if (!(options.feature_train_fraction > 0.0 && options.feature_train_fraction < 1.0)) {
    throw ValidationError("run_three_way: feature_train_fraction must be in (0, 1)");
  }

  const auto test_groups = segment_ids(test);
  const Index n_groups = test.segment_count();

  ThreeWayReport report;
  report.k_grid = k_grid;
  report.brain_only = run_condition(train.brain, train.labels, test.brain, test.labels, test_groups, n_groups, options);

  report.reconstructed.resize(k_grid.size());
  parallel_for(k_grid.size(), options.threads, [&](std::size_t i) {
    const CcaModel sub = model.truncated(k_grid[i]);
    report.reconstructed[i] = run_condition(reconstruct_features(sub, train.brain), train.labels,
                                            reconstruct_features(sub, test.brain), test.labels, test_groups,
                                            n_groups, options);
  });

  // Features only: random row split over every labeled row of both sets.
  const PairedDataset all = concat_time({train, test});
  const auto all_groups = segment_ids(all);
  std::vector<Index> rows(static_cast<std::size_t>(all.rows()));
  std::iota(rows.begin(), rows.end(), Index{0});
  Rng rng(derive_seed(options.svm.seed, 0xFEA7));
  std::shuffle(rows.begin(), rows.end(), rng);
  const auto n_train = static_cast<std::size_t>(
      std::llround(options.feature_train_fraction * static_cast<double>(rows.size())));
  std::vector<Index> tr(rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<Index> te(rows.begin() + static_cast<std::ptrdiff_t>(n_train), rows.end());
  std::sort(tr.begin(), tr.end());
  std::sort(te.begin(), te.end());
  if (tr.empty() || te.empty()) throw ValidationError("run_three_way: feature split leaves an empty side");
  std::vector<Index> te_groups;
  for (Index r : te) te_groups.push_back(all_groups[static_cast<std::size_t>(r)]);
  report.features_only = run_condition(take_rows(all.features, tr), pick(all.labels, tr),
                                       take_rows(all.features, te), pick(all.labels, te), te_groups,
                                       all.segment_count(), options);
  return report;
}

nlohmann::json to_json(const Metrics& m) {
  return {{"accuracy", m.accuracy},
          {"precision", m.precision},
          {"recall", m.recall},
          {"f1", m.f1},
          {"confusion", {{"tp", m.confusion.tp}, {"fp", m.confusion.fp}, {"tn", m.confusion.tn}, {"fn", m.confusion.fn}}}};
}

namespace {

nlohmann::json condition_json(const ConditionResult& r) {
  return {{"pooled", to_json(r.pooled)},
          {"segment_accuracy", r.segment_accuracy},
          {"segment_f1", r.segment_f1},
          {"accuracy_mean", r.accuracy_mean},
          {"accuracy_std", r.accuracy_std},
          {"f1_mean", r.f1_mean},
          {"f1_std", r.f1_std}};
}

}  // namespace

nlohmann::json to_json(const ThreeWayReport& report) {
  nlohmann::json recon = nlohmann::json::array();
  std::vector<double> acc, acc_std, f1, f1_std;
  for (std::size_t i = 0; i < report.k_grid.size(); ++i) {
    const auto& r = report.reconstructed[i];
    auto entry = condition_json(r);
    entry["k"] = report.k_grid[i];
    recon.push_back(entry);
    acc.push_back(r.pooled.accuracy);
    acc_std.push_back(r.accuracy_std);
    f1.push_back(r.pooled.f1);
    f1_std.push_back(r.f1_std);
  }
  return {{"brain_only", condition_json(report.brain_only)},
          {"features_only", condition_json(report.features_only)},
          {"reconstructed", recon},
          {"curves",
           {{"k", report.k_grid},
            {"accuracy", acc},
            {"accuracy_std", acc_std},
            {"f1", f1},
            {"f1_std", f1_std},
            {"brain_only_accuracy", report.brain_only.pooled.accuracy},
            {"features_only_accuracy", report.features_only.pooled.accuracy}}}};
}

}  // namespace xcca
