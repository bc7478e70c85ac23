#pragma once

#include "xcca/matrix.hpp"

namespace xcca {

/// Columns whose population std falls below this are treated as constant.
inline constexpr double kConstantColumnStd = 1e-12;

/// Per-column z-scoring statistics (population std, divisor N).
struct NormStats {
  Vector means;
  Vector stds;

  Index size() const { return means.size(); }
  bool is_constant(Index j) const { return stds(j) < kConstantColumnStd; }

  /// means = 0, stds = 1.
  static NormStats identity(Index cols);
};

NormStats zscore_fit(const Matrix& m);

/// out(t, j) = (m(t, j) - means[j]) / stds[j]; constant columns map to 0.
Matrix zscore_apply(const Matrix& m, const NormStats& stats);

/// Inverse of zscore_apply for non-constant columns; constant columns map back to their mean.
Matrix zscore_invert(const Matrix& z, const NormStats& stats);

}  // namespace xcca
