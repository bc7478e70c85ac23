#include "xcca/matrix.hpp"

#include <cmath>

namespace xcca {

void require_finite(const Matrix& m, const std::string& what) {
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (!std::isfinite(m(i, j))) {
        throw IngestError(what + ": non-finite value at row " + std::to_string(i + 1) +
                          ", col " + std::to_string(j + 1));
      }
    }
  }
}

Vector column_variance(const Matrix& m) {
  const Eigen::RowVectorXd mean = m.colwise().mean();
  return ((m.rowwise() - mean).array().square().colwise().sum() / static_cast<double>(m.rows()))
      .transpose();
}

double pearson(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b) {
  if (a.size() != b.size()) throw ValidationError("pearson: length mismatch");
  const double ma = a.mean();
  const double mb = b.mean();
  const Vector da = a.array() - ma;
  const Vector db = b.array() - mb;
  const double saa = da.squaredNorm();
  const double sbb = db.squaredNorm();
  if (saa <= 0.0 || sbb <= 0.0) return 0.0;
  return da.dot(db) / std::sqrt(saa * sbb);
}

Vector column_correlations(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ValidationError("column_correlations: shape mismatch");
  }
  Vector out(a.cols());
  for (Index c = 0; c < a.cols(); ++c) out(c) = pearson(a.col(c), b.col(c));
  return out;
}

Matrix take_rows(const Matrix& m, const std::vector<Index>& rows) {
  Matrix out(static_cast<Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Index>(i)) = m.row(rows[i]);
  return out;
}

}  // namespace xcca
