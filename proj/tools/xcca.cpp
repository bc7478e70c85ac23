#include "xcca/commands.hpp"

#include "CLI11.hpp"

#include <iostream>

namespace {

struct PipelineFlags {
  std::string config;
  std::vector<std::string> sets;
  std::optional<int> threads;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output_dir;
  std::optional<std::string> model;
};

void add_pipeline_flags(CLI::App* sub, PipelineFlags& flags) {
  sub->add_option("-c,--config", flags.config, "Experiment config file (key = value lines)");
  sub->add_option("--set", flags.sets, "Override a config key, key=value (repeatable)");
  sub->add_option("--threads", flags.threads, "Worker threads (default: XCCA_THREADS or 1)");
  sub->add_option("--seed", flags.seed, "Master seed");
  sub->add_option("-o,--output-dir", flags.output_dir, "Output directory");
  sub->add_option("--model", flags.model, "Model file (default: <output_dir>/model.ccam)");
}

xcca::ExperimentConfig build_config(const PipelineFlags& flags) {
  xcca::ConfigMap map = flags.config.empty() ? xcca::ConfigMap{} : xcca::load_config_file(flags.config);
  std::vector<std::string> overrides = flags.sets;
  if (flags.threads) overrides.push_back("threads=" + std::to_string(*flags.threads));
  if (flags.seed) overrides.push_back("master_seed=" + std::to_string(*flags.seed));
  if (flags.output_dir) overrides.push_back("output_dir=" + *flags.output_dir);
  if (flags.model) overrides.push_back("model=" + *flags.model);
  return xcca::ExperimentConfig::from_map(xcca::apply_overrides(std::move(map), overrides));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kernel CCA between stimulus features and brain recordings"};
  app.require_subcommand(1);

  xcca::SynthCommand synth;
  synth.spec.n_segments = 2;
  std::string synth_out = "synth";
  std::optional<xcca::Index> label_latent;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic paired bundle with planted correlations");
  synth_cmd->add_option("-o,--output-dir", synth_out, "Bundle directory")->capture_default_str();
  synth_cmd->add_option("--rows", synth.spec.t, "Rows per segment")->capture_default_str();
  synth_cmd->add_option("--p", synth.spec.p, "Feature dimension")->capture_default_str();
  synth_cmd->add_option("--q", synth.spec.q, "Brain dimension")->capture_default_str();
  synth_cmd->add_option("--k-latent", synth.spec.k_latent, "Number of planted latents")->capture_default_str();
  synth_cmd->add_option("--corrs", synth.spec.target_corrs, "Planted correlations, one per latent")
      ->delimiter(',')
      ->capture_default_str();
  synth_cmd->add_option("--sigma", synth.spec.noise_sigma, "Observation noise std")->capture_default_str();
  synth_cmd->add_option("--lag", synth.spec.lag, "Planted brain lag in rows")->capture_default_str();
  synth_cmd->add_option("--label-latent", label_latent, "Latent (0-based) whose sign gives the labels");
  synth_cmd->add_option("--seed", synth.spec.seed, "Seed")->capture_default_str();
  synth_cmd->add_option("--smoothing", synth.spec.smoothing_window, "Latent smoothing window")->capture_default_str();
  synth_cmd->add_option("--segments", synth.spec.n_segments, "Total segments")->capture_default_str();
  synth_cmd->add_option("--test-segments", synth.test_segments, "Segments listed as test data")->capture_default_str();

  PipelineFlags flags;
  struct Sub {
    const char* name;
    const char* help;
    nlohmann::json (*run)(const xcca::ExperimentConfig&);
  };
  const Sub subs[] = {
      {"fit", "Fit a model on the training files", xcca::cmd_fit},
      {"gridsearch", "Sweep lambda and ts on a train/validation split", xcca::cmd_gridsearch},
      {"evaluate", "Per-component correlations on the test files", xcca::cmd_evaluate},
      {"permtest", "Phase-scrambled permutation test on the test files", xcca::cmd_permtest},
      {"reconstruct", "Reconstruct features from test brain data", xcca::cmd_reconstruct},
      {"classify", "Brain-only vs reconstructed vs features-only classification", xcca::cmd_classify},
  };
  std::vector<std::pair<CLI::App*, const Sub*>> pipeline;
  for (const auto& sub : subs) {
    auto* cmd = app.add_subcommand(sub.name, sub.help);
    add_pipeline_flags(cmd, flags);
    pipeline.emplace_back(cmd, &sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    nlohmann::json report;
    if (synth_cmd->parsed()) {
      synth.spec.label_latent = label_latent;
      report = xcca::cmd_synth(synth, synth_out);
    } else {
      for (const auto& [cmd, sub] : pipeline) {
        if (cmd->parsed()) report = sub->run(build_config(flags));
      }
    }
    std::cout << report.dump(2) << "\n";
    return 0;
  } catch (const xcca::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return 2;
  }
}
