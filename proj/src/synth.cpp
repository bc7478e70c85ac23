#include "xcca/synth.hpp"

#include "xcca/random.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <cmath>
#include <cstdlib>
#include <string>

namespace xcca {
namespace {

Matrix standard_normal(Index rows, Index cols, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = normal(rng);
  }
  return m;
}

/// Centres the columns and mixes them so their sample covariance is exactly I.
/// Column mixing keeps the temporal smoothness of every series.
Matrix sample_whitened(const Matrix& m) {
  const Matrix centred = m.rowwise() - m.colwise().mean();
  const Matrix cov = centred.transpose() * centred / static_cast<double>(m.rows());
  Eigen::SelfAdjointEigenSolver<Matrix> es(cov);
  if (es.info() != Eigen::Success || !(es.eigenvalues().minCoeff() > 0.0)) {
    throw NumericalError("synth: latent draw is rank deficient; increase t");
  }
  const Matrix inv_sqrt =
      es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
  return centred * inv_sqrt;
}

// Stream ids under a seed.
enum Stream : std::uint64_t { kFeatureLoadings = 1, kBrainLoadings = 2, kLatents = 3 };

SynthResult generate_impl(const SynthSpec& spec, std::uint64_t latent_seed) {
  spec.validate();
  const Index k = spec.k_latent;
  const Index shift = std::abs(spec.lag);
  const Index base = spec.lag < 0 ? shift : 0;
  const Index total = spec.t * spec.n_segments;

  GroundTruth truth;
  truth.feature_loadings = random_orthonormal_rows(k, spec.p, derive_seed(spec.seed, kFeatureLoadings));
  truth.brain_loadings = random_orthonormal_rows(k, spec.q, derive_seed(spec.seed, kBrainLoadings));
  truth.feature_gain = std::sqrt(static_cast<double>(spec.p) / static_cast<double>(k));
  truth.brain_gain = std::sqrt(static_cast<double>(spec.q) / static_cast<double>(k));
  truth.lag = spec.lag;
  truth.label_latent = spec.label_latent;
  truth.latents.resize(total, k);
  truth.partner_latents.resize(total, k);

  PairedDataset ds;
  ds.features.resize(total, spec.p);
  ds.brain.resize(total, spec.q);
  ds.segment_boundaries.clear();

  const std::uint64_t segments_seed = derive_seed(latent_seed, kLatents);
  for (Index s = 0; s < spec.n_segments; ++s) {
    const auto stream = [&](std::uint64_t j) { return derive_seed(segments_seed, static_cast<std::uint64_t>(s) * 4 + j); };
    const Index ext = spec.t + shift;
    Matrix joint(ext, 2 * k);
    joint << smoothed_noise(ext, k, spec.smoothing_window, stream(0)),
        smoothed_noise(ext, k, spec.smoothing_window, stream(1));
    joint = sample_whitened(joint);
    const Matrix z = joint.leftCols(k);
    const Matrix e = joint.rightCols(k);
    Matrix z_partner(ext, k);
    for (Index c = 0; c < k; ++c) {
      const double r = spec.target_corrs[static_cast<std::size_t>(c)];
      z_partner.col(c) = r * z.col(c) + std::sqrt(1.0 - r * r) * e.col(c);
    }
    const Matrix z_rows = z.middleRows(base, spec.t);
    const Matrix zp_rows = z_partner.middleRows(base + spec.lag, spec.t);
    const Index offset = s * spec.t;
    ds.segment_boundaries.push_back(offset);
    truth.latents.middleRows(offset, spec.t) = z_rows;
    truth.partner_latents.middleRows(offset, spec.t) = zp_rows;
    ds.features.middleRows(offset, spec.t) =
        truth.feature_gain * z_rows * truth.feature_loadings + spec.noise_sigma * standard_normal(spec.t, spec.p, stream(2));
    ds.brain.middleRows(offset, spec.t) =
        truth.brain_gain * zp_rows * truth.brain_loadings + spec.noise_sigma * standard_normal(spec.t, spec.q, stream(3));
  }
  ds.feature_stats = NormStats::identity(spec.p);
  ds.brain_stats = NormStats::identity(spec.q);
  if (spec.label_latent) ds.labels = generate_labels(truth);
  ds.validate();
  return {std::move(ds), std::move(truth)};
}

std::vector<double> as_std(const Matrix& m) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(m.size()));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) out.push_back(m(i, j));
  }
  return out;
}

}  // namespace

void SynthSpec::validate() const {
  if (t < 1 || p < 1 || q < 1 || k_latent < 1) throw ValidationError("synth: t, p, q, k_latent must be positive");
  if (k_latent > std::min(p, q)) throw ValidationError("synth: k_latent must not exceed min(p, q)");
  if (static_cast<Index>(target_corrs.size()) != k_latent) {
    throw ValidationError("synth: need one target correlation per latent (" + std::to_string(k_latent) + "), got " +
                          std::to_string(target_corrs.size()));
  }
  for (double r : target_corrs) {
    if (!(r > 0.0 && r <= 1.0)) throw ValidationError("synth: target correlations must lie in (0, 1]");
  }
  if (t <= 10 * k_latent) throw ValidationError("synth: t must exceed 10 * k_latent");
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) throw ValidationError("synth: noise_sigma must be >= 0");
  if (std::abs(lag) >= t) throw ValidationError("synth: |lag| must be smaller than t");
  if (label_latent && (*label_latent < 0 || *label_latent >= k_latent)) {
    throw ValidationError("synth: label_latent out of range");
  }
  if (smoothing_window < 1) throw ValidationError("synth: smoothing_window must be >= 1");
  if (n_segments < 1) throw ValidationError("synth: n_segments must be >= 1");
}

Matrix smoothed_noise(Index rows, Index cols, Index window, std::uint64_t seed) {
  const Matrix raw = standard_normal(rows + window - 1, cols, seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(window));
  Matrix out(rows, cols);
  for (Index i = 0; i < rows; ++i) out.row(i) = raw.middleRows(i, window).colwise().sum() * scale;
  return out;
}

Matrix random_orthonormal_rows(Index k, Index n, std::uint64_t seed) {
  const Matrix g = standard_normal(n, k, seed);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(n, k);
  const Matrix r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  for (Index c = 0; c < k; ++c) {
    if (r(c, c) < 0.0) q.col(c) = -q.col(c);
  }
  return q.transpose();
}

SynthResult generate(const SynthSpec& spec) { return generate_impl(spec, spec.seed); }

SynthResult generate_holdout(const SynthSpec& spec, std::uint64_t holdout_seed) {
  if (holdout_seed == spec.seed) throw ValidationError("synth: holdout seed must differ from the training seed");
  return generate_impl(spec, holdout_seed);
}

std::vector<int> generate_labels(const GroundTruth& truth) {
  if (!truth.label_latent) throw ValidationError("generate_labels: label_latent is not set");
  const Index c = *truth.label_latent;
  if (c < 0 || c >= truth.latents.cols()) throw ValidationError("generate_labels: label_latent out of range");
  std::vector<int> labels(static_cast<std::size_t>(truth.latents.rows()));
  for (Index t = 0; t < truth.latents.rows(); ++t) labels[static_cast<std::size_t>(t)] = truth.latents(t, c) >= 0.0 ? 1 : -1;
  return labels;
}

nlohmann::json to_json(const SynthSpec& spec) {
  nlohmann::json j = {{"t", spec.t},
                      {"p", spec.p},
                      {"q", spec.q},
                      {"k_latent", spec.k_latent},
                      {"target_corrs", spec.target_corrs},
                      {"noise_sigma", spec.noise_sigma},
                      {"lag", spec.lag},
                      {"seed", spec.seed},
                      {"smoothing_window", spec.smoothing_window},
                      {"n_segments", spec.n_segments}};
  j["label_latent"] = spec.label_latent ? nlohmann::json(*spec.label_latent) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json to_json(const GroundTruth& truth) {
  nlohmann::json j = {{"lag", truth.lag},
                      {"feature_gain", truth.feature_gain},
                      {"brain_gain", truth.brain_gain},
                      {"k_latent", truth.latents.cols()},
                      {"rows", truth.latents.rows()},
                      {"feature_loadings", as_std(truth.feature_loadings)},
                      {"brain_loadings", as_std(truth.brain_loadings)}};
  j["label_latent"] = truth.label_latent ? nlohmann::json(*truth.label_latent) : nlohmann::json(nullptr);
  return j;
}

}  // namespace xcca
