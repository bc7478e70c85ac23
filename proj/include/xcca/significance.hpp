#pragma once

#include "xcca/kcca.hpp"

#include <cstdint>
#include "json.hpp"

namespace xcca {

struct PhaseScrambleOptions {
  /// Draw a separate phase vector per column instead of one shared vector.
  bool independent_phases = false;
};

/// Fourier phase-randomized surrogate of every column.
///
/// One phase vector phi of length floor((T-1)/2), uniform in [0, 2pi), is
/// drawn from `seed` and added to the phase of positive-frequency bin f
/// (mirrored with opposite sign on bin T-f). DC and, for even T, the Nyquist
/// bin keep their phase. With shared phases the cross-column covariance is
/// preserved.
Matrix phase_scramble(const Matrix& m, std::uint64_t seed, const PhaseScrambleOptions& options = {});

struct PermutationReport {
  Vector observed;
  Matrix null_samples;  // n x k
  Vector p_values;
  std::size_t n_permutations = 0;
  std::uint64_t master_seed = 0;
};

struct PermutationOptions {
  PhaseScrambleOptions scramble;
  int threads = 1;
};

/// Seed of surrogate i (1-based) under `master_seed`.
std::uint64_t surrogate_seed(std::uint64_t master_seed, std::size_t i);

/// (1 + #{null >= observed}) / (1 + n).
double permutation_p_value(double observed, const Eigen::Ref<const Vector>& null);

/// Scrambles the feature view n times and compares the resulting
/// per-component correlations with the observed ones. Only the features are
/// scrambled; the brain view is left intact.
PermutationReport permutation_test(const CcaModel& model, const Matrix& x_test, const Matrix& y_test, std::size_t n,
                                   std::uint64_t master_seed, const PermutationOptions& options = {});

/// Linear-interpolation quantile (q in [0, 1]) of the values.
double quantile(Vector values, double q);

/// {observed, p_values, n, master_seed, null_quantiles: {p05, p50, p95}}.
nlohmann::json to_json(const PermutationReport& report);

}  // namespace xcca
