#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace xcca {

// Rows are time samples, columns are variables.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Malformed or invalid input (bad file, bad config, dimension mismatch).
/// The CLI maps this to exit code 1.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised while reading matrix files; carries the offending location in the message.
class IngestError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Numerical failure inside a fit or solver. The CLI maps this to exit code 2.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws IngestError naming the first non-finite cell (1-based row/col).
void require_finite(const Matrix& m, const std::string& what);

/// Population (divisor N) variance of each column.
Vector column_variance(const Matrix& m);

/// Pearson correlation of two equal-length series. Returns 0 when either
/// series has zero variance.
double pearson(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b);

/// Column-wise Pearson correlation between a and b (same shape).
Vector column_correlations(const Matrix& a, const Matrix& b);

/// Rows of m listed in `rows`, in order.
Matrix take_rows(const Matrix& m, const std::vector<Index>& rows);

}  // namespace xcca
