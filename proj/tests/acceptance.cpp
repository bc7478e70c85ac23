// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.

#include "oracles.hpp"

#include "xcca/classify.hpp"
#include "xcca/commands.hpp"
#include "xcca/kcca.hpp"
#include "xcca/random.hpp"
#include "xcca/significance.hpp"
#include "xcca/synth.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

using namespace xcca;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double time_limit_s;  // 0 = none
  std::function<Outcome()> run;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), f, a, b, c);
  return buf;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "xcca_acceptance" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Normalized {
  Matrix x;
  Matrix y;
};

/// z-scores `test` (and `train`) with the training stats.
std::pair<Normalized, Normalized> zscored(const PairedDataset& train, const PairedDataset& test) {
  const NormStats fs_ = zscore_fit(train.features);
  const NormStats bs = zscore_fit(train.brain);
  return {{zscore_apply(train.features, fs_), zscore_apply(train.brain, bs)},
          {zscore_apply(test.features, fs_), zscore_apply(test.brain, bs)}};
}

Outcome oracle_equivalence() {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed);
    const Matrix z = oracle::random_matrix(100, 2, rng);
    const Matrix x = oracle::standardized(z * oracle::random_matrix(2, 6, rng) + oracle::random_matrix(100, 6, rng));
    const Matrix y = oracle::standardized(z * oracle::random_matrix(2, 8, rng) + oracle::random_matrix(100, 8, rng));
    const Vector got = fit_kcca(x, y, 0.0, 6).train_corrs;
    const Vector want = oracle::primal_cca_corrs(x, y);
    worst = std::max(worst, (got - want.head(6)).cwiseAbs().maxCoeff());
  }
  return {worst < 1e-6, fmt("max |rho - oracle| = %.3g over 20 instances", worst)};
}

Outcome planted_recovery() {
  int ok = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    SynthSpec spec;
    spec.seed = seed;
    SynthSpec held_spec = spec;
    held_spec.t = 2000;
    const SynthResult train = generate(spec);
    const SynthResult held = generate_holdout(held_spec, derive_seed(seed, 0x401D));
    const auto [tr, te] = zscored(train.dataset, held.dataset);
    const CcaModel model = fit_kcca(tr.x, tr.y, 1e-2, 3);
    const Vector rho = evaluate_correlations(model, te.x, te.y);
    double dev = 0.0;
    for (Index c = 0; c < 3; ++c) dev = std::max(dev, std::abs(rho(c) - spec.target_corrs[static_cast<std::size_t>(c)]));
    worst = std::max(worst, dev);
    ok += dev <= 0.1;
  }
  return {ok >= 18, fmt("%.0f/20 seeds within 0.1 of targets (worst deviation %.3f)", ok, worst)};
}

Outcome planted_lag() {
  int ok = 0;
  std::string picks;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const fs::path dir = scratch("lag");
    SynthCommand cmd;
    cmd.spec.t = 80;
    cmd.spec.lag = -2;
    cmd.spec.seed = seed;
    cmd.spec.n_segments = 6;
    cmd.test_segments = 1;
    cmd_synth(cmd, dir);
    ExperimentConfig cfg = ExperimentConfig::from_map(load_config_file(dir / "experiment.conf"));
    cfg.lambda_grid = {1e-2};
    cfg.ts_grid = {-3, -2, -1, 0, 1, 2, 3};
    cfg.k_grid = {3};
    cfg.threads = 1;
    const int best = cmd_gridsearch(cfg).at("best").at("ts").get<int>();
    ok += best == -2;
    picks += std::to_string(best) + " ";
  }
  return {ok >= 18, fmt("%.0f/20 seeds select ts = -2", ok) + " (picks: " + picks + ")"};
}

Outcome permutation_floor() {
  SynthSpec spec;
  spec.seed = 11;
  const SynthResult train = generate(spec);
  const SynthResult test = generate_holdout(spec, 12);
  const auto [tr, te] = zscored(train.dataset, test.dataset);
  const CcaModel model = fit_kcca(tr.x, tr.y, 1e-2, 3);
  const PermutationReport report = permutation_test(model, te.x, te.y, 300, 2024, {{}, 1});
  const double p_min = report.p_values.minCoeff();
  return {p_min == 1.0 / 301.0, fmt("min p = %.17g, 1/301 = %.17g", p_min, 1.0 / 301.0)};
}

Outcome surrogate_fidelity() {
  std::mt19937_64 rng(55);
  std::uniform_int_distribution<Index> rows(3, 160), cols(1, 4);
  double worst_power = 0.0, worst_mean = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Matrix m = (oracle::random_matrix(rows(rng), cols(rng), rng).array() * 3.0 + 1.5).matrix();
    const Matrix s = phase_scramble(m, derive_seed(9, static_cast<std::uint64_t>(i)));
    worst_mean = std::max(worst_mean, (s.colwise().mean() - m.colwise().mean()).cwiseAbs().maxCoeff());
    for (Index j = 0; j < m.cols(); ++j) {
      const auto a = oracle::power_spectrum(m.col(j));
      const auto b = oracle::power_spectrum(s.col(j));
      const double scale = *std::max_element(a.begin(), a.end());
      for (std::size_t f = 0; f < a.size(); ++f) worst_power = std::max(worst_power, std::abs(a[f] - b[f]) / scale);
    }
  }
  return {worst_power < 1e-9 && worst_mean < 1e-10,
          fmt("max relative power error %.3g, max mean error %.3g", worst_power, worst_mean)};
}

Outcome null_calibration() {
  int hits = 0;
  const int draws = 200;
  for (int d = 0; d < draws; ++d) {
    // Features and brain come from unrelated draws, so no cross-view signal exists.
    SynthSpec fspec;
    fspec.t = 200;
    fspec.p = 20;
    fspec.q = 20;
    fspec.seed = derive_seed(1000, static_cast<std::uint64_t>(2 * d));
    SynthSpec bspec = fspec;
    bspec.seed = derive_seed(1000, static_cast<std::uint64_t>(2 * d + 1));
    PairedDataset train = generate(fspec).dataset;
    train.brain = generate(bspec).dataset.brain;
    PairedDataset test = generate_holdout(fspec, fspec.seed + 1).dataset;
    test.brain = generate_holdout(bspec, bspec.seed + 1).dataset.brain;
    const auto [tr, te] = zscored(train, test);
    const CcaModel model = fit_kcca(tr.x, tr.y, 1e-2, 1);
    const PermutationReport report =
        permutation_test(model, te.x, te.y, 200, derive_seed(77, static_cast<std::uint64_t>(d)), {{}, 1});
    hits += report.p_values(0) < 0.05;
  }
  const double rate = static_cast<double>(hits) / draws;
  return {rate >= 0.01 && rate <= 0.12, fmt("false-positive rate at 0.05 = %.3f (%.0f/200)", rate, hits)};
}

Outcome classification_ordering() {
  double brain = 0.0, recon = 0.0, feats = 0.0;
  const int seeds = 5;
  for (int s = 0; s < seeds; ++s) {
    SynthSpec spec;
    spec.t = 400;
    spec.q = 2000;
    spec.noise_sigma = 1.0;
    spec.label_latent = 0;
    spec.seed = static_cast<std::uint64_t>(300 + s);
    const SynthResult train = generate(spec);
    const SynthResult test = generate_holdout(spec, derive_seed(spec.seed, 0x7E57));
    const NormStats fstats = zscore_fit(train.dataset.features);
    const NormStats bstats = zscore_fit(train.dataset.brain);
    const PairedDataset tr = normalize(train.dataset, fstats, bstats);
    const PairedDataset te = normalize(test.dataset, fstats, bstats);
    CcaModel model = fit_kcca(tr.features, tr.brain, 1e-2, spec.k_latent);
    ThreeWayOptions options;
    options.svm.seed = spec.seed;
    const ThreeWayReport report = run_three_way(tr, te, model, {spec.k_latent}, options);
    brain += report.brain_only.pooled.accuracy / seeds;
    recon += report.reconstructed.front().pooled.accuracy / seeds;
    feats += report.features_only.pooled.accuracy / seeds;
  }
  const bool pass = feats >= recon && recon >= brain && recon - brain >= 0.10;
  return {pass, fmt("mean accuracy: features %.3f, reconstructed %.3f, brain %.3f", feats, recon, brain)};
}

Outcome penrose() {
  std::mt19937_64 rng(88);
  std::uniform_int_distribution<Index> rows(1, 200), cols(1, 20);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    Index r = rows(rng), c = cols(rng);
    if (i % 2) std::swap(r, c);
    Matrix a = oracle::random_matrix(r, c, rng);
    if (i % 5 == 0 && std::min(r, c) > 1) a.col(0) = a.col(a.cols() - 1);  // rank deficient
    const Matrix p = pseudo_inverse(a);
    worst = std::max({worst, (a * p * a - a).cwiseAbs().maxCoeff(), (p * a * p - p).cwiseAbs().maxCoeff(),
                      ((a * p).transpose() - a * p).cwiseAbs().maxCoeff(),
                      ((p * a).transpose() - p * a).cwiseAbs().maxCoeff()});
  }
  return {worst < 1e-9, fmt("max Penrose residual %.3g over 200 matrices up to 200x20", worst)};
}

Outcome determinism() {
  const fs::path dir = scratch("determinism");
  SynthCommand synth;
  synth.spec.t = 100;
  synth.spec.lag = -2;
  synth.spec.seed = 5;
  synth.spec.n_segments = 5;
  synth.spec.label_latent = 0;
  synth.test_segments = 2;
  const std::string synth_a = cmd_synth(synth, dir).dump();
  const std::string synth_files = slurp(dir / "synth.json") + slurp(dir / "experiment.conf") + slurp(dir / "truth.json");
  const std::string synth_b = cmd_synth(synth, dir).dump();
  bool ok = synth_a == synth_b &&
            synth_files == slurp(dir / "synth.json") + slurp(dir / "experiment.conf") + slurp(dir / "truth.json");
  std::string bad;
  if (!ok) bad += "synth ";

  ExperimentConfig cfg = ExperimentConfig::from_map(load_config_file(dir / "experiment.conf"));
  cfg.n_permutations = 100;
  cfg.k_grid = {1, 2, 3};
  const std::vector<std::pair<const char*, nlohmann::json (*)(const ExperimentConfig&)>> commands = {
      {"fit", cmd_fit},           {"gridsearch", cmd_gridsearch},   {"evaluate", cmd_evaluate},
      {"permtest", cmd_permtest}, {"reconstruct", cmd_reconstruct}, {"classify", cmd_classify}};
  for (const auto& [name, run] : commands) {
    const fs::path report = cfg.output_dir / (std::string(name) + ".json");
    cfg.threads = 1;
    const nlohmann::json a = run(cfg);
    const std::string a_bytes = slurp(report);
    const std::string model_a = slurp(cfg.resolved_model_path());
    const nlohmann::json b = run(cfg);
    const std::string b_bytes = slurp(report);
    cfg.threads = 4;
    const nlohmann::json c = run(cfg);
    const bool same = a_bytes == b_bytes && a == b && a == c && model_a == slurp(cfg.resolved_model_path());
    if (!same) bad += std::string(name) + " ";
    ok = ok && same;
  }
  return {ok, ok ? "synth + 6 pipeline commands byte-identical at 1 thread, value-identical at 4"
                 : "differences in: " + bad};
}

Outcome metrics_identities() {
  std::mt19937_64 rng(10);
  std::uniform_int_distribution<int> len(1, 64);
  std::bernoulli_distribution coin(0.5);
  int violations = 0;
  for (int t = 0; t < 10000; ++t) {
    const int n = len(rng);
    std::vector<int> pred(static_cast<std::size_t>(n)), truth(static_cast<std::size_t>(n));
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
    for (int i = 0; i < n; ++i) {
      pred[static_cast<std::size_t>(i)] = coin(rng) ? 1 : -1;
      truth[static_cast<std::size_t>(i)] = coin(rng) ? 1 : -1;
      const bool p = pred[static_cast<std::size_t>(i)] > 0, g = truth[static_cast<std::size_t>(i)] > 0;
      tp += p && g;
      fp += p && !g;
      tn += !p && !g;
      fn += !p && g;
    }
    const Metrics m = compute_metrics(pred, truth);
    const double precision = tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    const double recall = tp + fn ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    const double f1 = precision + recall > 0 ? 2 * precision * recall / (precision + recall) : 0.0;
    const bool ok = m.confusion.tp == tp && m.confusion.fp == fp && m.confusion.tn == tn && m.confusion.fn == fn &&
                    m.accuracy == static_cast<double>(tp + tn) / n && m.precision == precision &&
                    m.recall == recall && m.f1 == f1;
    violations += !ok;
  }
  return {violations == 0, fmt("%.0f violations in 10000 random pairs", violations)};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "oracle equivalence", 5, oracle_equivalence},
      {2, "planted-correlation recovery", 60, planted_recovery},
      {3, "planted-lag recovery", 120, planted_lag},
      {4, "permutation floor", 0, permutation_floor},
      {5, "surrogate fidelity", 0, surrogate_fidelity},
      {6, "null calibration", 0, null_calibration},
      {7, "classification ordering", 300, classification_ordering},
      {8, "pseudo-inverse Penrose conditions", 0, penrose},
      {9, "determinism", 0, determinism},
      {10, "metrics identities", 0, metrics_identities},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.time_limit_s > 0 && secs > c.time_limit_s) {
      out.pass = false;
      out.detail += fmt(" [over time limit %.0f s]", c.time_limit_s);
    }
    failed += !out.pass;
    std::printf("%s  %2d  %-36s %s (%.2f s)\n", out.pass ? "PASS" : "FAIL", c.id, c.name, out.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
