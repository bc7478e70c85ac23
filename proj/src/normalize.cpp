#include "xcca/normalize.hpp"

#include <string>

namespace xcca {

NormStats NormStats::identity(Index cols) {
  return NormStats{Vector::Zero(cols), Vector::Ones(cols)};
}

NormStats zscore_fit(const Matrix& m) {
  if (m.rows() < 2) throw ValidationError("zscore_fit: need at least 2 rows, got " + std::to_string(m.rows()));
  NormStats stats;
  stats.means = m.colwise().mean().transpose();
  stats.stds = column_variance(m).array().sqrt();
  return stats;
}

Matrix zscore_apply(const Matrix& m, const NormStats& stats) {
  if (m.cols() != stats.size()) {
    throw ValidationError("zscore_apply: matrix has " + std::to_string(m.cols()) + " columns, stats have " +
                          std::to_string(stats.size()));
  }
  Matrix out(m.rows(), m.cols());
  for (Index j = 0; j < m.cols(); ++j) {
    if (stats.is_constant(j)) {
      out.col(j).setZero();
    } else {
      out.col(j) = (m.col(j).array() - stats.means(j)) / stats.stds(j);
    }
  }
  return out;
}

Matrix zscore_invert(const Matrix& z, const NormStats& stats) {
  if (z.cols() != stats.size()) throw ValidationError("zscore_invert: dimension mismatch");
  Matrix out(z.rows(), z.cols());
  for (Index j = 0; j < z.cols(); ++j) {
    const double scale = stats.is_constant(j) ? 0.0 : stats.stds(j);
    out.col(j) = z.col(j).array() * scale + stats.means(j);
  }
  return out;
}

}  // namespace xcca
