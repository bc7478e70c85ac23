#pragma once

#include "xcca/dataset.hpp"

#include <cstdint>
#include <optional>
#include <vector>
#include "json.hpp"

namespace xcca {

/// Parameters of the planted-latent generator.
///
/// Each segment draws k_latent smoothed latents Z and innovations E, whitened
/// jointly so that their sample covariance is exactly I, and partners
/// Z'_c = r_c Z_c + sqrt(1 - r_c^2) E_c. Features are
/// X = sqrt(p/k) Z W_x + sigma N_x and brain Y(t) = sqrt(q/k) Z'(t + lag) W_y + sigma N_y
/// with W_x (k x p) and W_y (k x q) having orthonormal rows, so every column
/// carries unit signal variance on average. Segments share the loadings.
struct SynthSpec {
  Index t = 500;  // rows per segment
  Index p = 40;
  Index q = 60;
  Index k_latent = 3;
  std::vector<double> target_corrs{0.9, 0.7, 0.5};
  double noise_sigma = 0.5;
  int lag = 0;
  std::optional<Index> label_latent;
  std::uint64_t seed = 0;
  Index smoothing_window = 5;
  Index n_segments = 1;

  void validate() const;
};

struct GroundTruth {
  Matrix latents;          // Z in feature time, one row per dataset row
  Matrix partner_latents;  // Z' as seen by the brain row
  Matrix feature_loadings;  // k x p
  Matrix brain_loadings;    // k x q
  double feature_gain = 1.0;
  double brain_gain = 1.0;
  int lag = 0;
  std::optional<Index> label_latent;
};

struct SynthResult {
  PairedDataset dataset;
  GroundTruth truth;
};

SynthResult generate(const SynthSpec& spec);

/// Fresh latents and noise under `holdout_seed`, with the loadings of `spec.seed`.
SynthResult generate_holdout(const SynthSpec& spec, std::uint64_t holdout_seed);

/// label(t) = sign(Z(t, label_latent)), 0 -> +1.
std::vector<int> generate_labels(const GroundTruth& truth);

/// Smoothed unit-variance noise: moving sum of `window` standard normals / sqrt(window).
Matrix smoothed_noise(Index rows, Index cols, Index window, std::uint64_t seed);

/// k x n with orthonormal rows.
Matrix random_orthonormal_rows(Index k, Index n, std::uint64_t seed);

nlohmann::json to_json(const SynthSpec& spec);
nlohmann::json to_json(const GroundTruth& truth);

}  // namespace xcca
