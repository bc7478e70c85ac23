#pragma once

#include "xcca/config.hpp"
#include "xcca/dataset.hpp"
#include "xcca/synth.hpp"

#include <filesystem>
#include <string>
#include "json.hpp"

namespace xcca {

/// Loads one paired segment per brain file. A single features (or labels)
/// file is shared by every segment; otherwise the lists pair up by position.
/// With `group_frames` the features are averaged over groups of
/// round(fps * tr_seconds) rows before pairing.
PairedDataset load_paired(const std::vector<std::filesystem::path>& features,
                          const std::vector<std::filesystem::path>& brain,
                          const std::vector<std::filesystem::path>& labels, const ExperimentConfig& cfg);

/// z-scores with `fstats`/`bstats`, then shifts every segment by ts.
PairedDataset prepare(const PairedDataset& raw, const NormStats& fstats, const NormStats& bstats, int ts);

/// Training split and validation split of the gridsearch, both unshifted and
/// unnormalized.
struct ValidationSplit {
  PairedDataset train;
  PairedDataset validation;
};

/// Segment mode holds out the last `validation_segments` segments; row mode
/// holds out the trailing `validation_fraction` of every segment.
ValidationSplit split_for_validation(const PairedDataset& raw, const ExperimentConfig& cfg);

/// Synthetic bundle options: `spec.n_segments` segments, the last
/// `test_segments` of which are listed as test files in experiment.conf.
struct SynthCommand {
  SynthSpec spec;
  Index test_segments = 1;
};

// Every command computes its report before writing anything and returns it.
// Reports go to <output_dir>/<command>.json; run metadata (time, threads) goes
// to <command>.meta.json so that reports stay byte-identical across runs.
nlohmann::json cmd_synth(const SynthCommand& command, const std::filesystem::path& output_dir);
nlohmann::json cmd_fit(const ExperimentConfig& cfg);
nlohmann::json cmd_gridsearch(const ExperimentConfig& cfg);
nlohmann::json cmd_evaluate(const ExperimentConfig& cfg);
nlohmann::json cmd_permtest(const ExperimentConfig& cfg);
nlohmann::json cmd_reconstruct(const ExperimentConfig& cfg);
nlohmann::json cmd_classify(const ExperimentConfig& cfg);

}  // namespace xcca
