#pragma once
// Reference implementations used only by tests. They favour directness over
// speed and share no code with the library.

#include "xcca/matrix.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

using xcca::Index;
using xcca::Matrix;
using xcca::Vector;

inline Matrix random_matrix(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = normal(rng);
  }
  return m;
}

/// Column-centred, unit population std.
inline Matrix standardized(const Matrix& m) {
  Matrix out = m.rowwise() - m.colwise().mean();
  for (Index j = 0; j < out.cols(); ++j) out.col(j) /= std::sqrt(out.col(j).squaredNorm() / out.rows());
  return out;
}

inline Matrix inverse_sqrt(const Matrix& s) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(s);
  return es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
}

/// Unregularized primal CCA: singular values of Cxx^-1/2 Cxy Cyy^-1/2.
inline Vector primal_cca_corrs(const Matrix& x, const Matrix& y) {
  const Matrix xc = x.rowwise() - x.colwise().mean();
  const Matrix yc = y.rowwise() - y.colwise().mean();
  const double n = static_cast<double>(x.rows());
  const Matrix cxx = xc.transpose() * xc / n;
  const Matrix cyy = yc.transpose() * yc / n;
  const Matrix cxy = xc.transpose() * yc / n;
  const Matrix m = inverse_sqrt(cxx) * cxy * inverse_sqrt(cyy);
  return Eigen::JacobiSVD<Matrix>(m).singularValues();
}

/// |X_f|^2 of a real series by direct summation.
inline std::vector<double> power_spectrum(const Eigen::Ref<const Vector>& x) {
  const Index t = x.size();
  std::vector<double> power(static_cast<std::size_t>(t));
  for (Index f = 0; f < t; ++f) {
    std::complex<double> acc = 0.0;
    for (Index s = 0; s < t; ++s) {
      const double angle = -2.0 * std::numbers::pi * static_cast<double>(f * s % t) / static_cast<double>(t);
      acc += x(s) * std::polar(1.0, angle);
    }
    power[static_cast<std::size_t>(f)] = std::norm(acc);
  }
  return power;
}

struct SvmSolution {
  Vector w;
  double b = 0.0;
};

/// Weighted soft-margin SVM by SMO on the dual (maximal violating pair):
/// max sum a - 1/2 a'Qa, 0 <= a_i <= C cw_i, y'a = 0.
inline SvmSolution smo_svm(const Matrix& x, const std::vector<int>& y, double c, double w_pos, double w_neg,
                           double tol = 1e-10, long max_iter = 5'000'000) {
  const Index n = x.rows();
  const Matrix gram = x * x.transpose();
  Vector alpha = Vector::Zero(n);
  Vector grad = Vector::Constant(n, -1.0);  // gradient of 1/2 a'Qa - sum a
  Vector upper(n);
  Vector yv(n);
  for (Index i = 0; i < n; ++i) {
    yv(i) = y[static_cast<std::size_t>(i)];
    upper(i) = c * (yv(i) > 0 ? w_pos : w_neg);
  }
  for (long iter = 0; iter < max_iter; ++iter) {
    Index i = -1, j = -1;
    double g_max = -INFINITY, g_min = INFINITY;
    for (Index t = 0; t < n; ++t) {
      const double v = -yv(t) * grad(t);
      const bool up = (yv(t) > 0 && alpha(t) < upper(t)) || (yv(t) < 0 && alpha(t) > 0);
      const bool low = (yv(t) > 0 && alpha(t) > 0) || (yv(t) < 0 && alpha(t) < upper(t));
      if (up && v > g_max) g_max = v, i = t;
      if (low && v < g_min) g_min = v, j = t;
    }
    if (i < 0 || j < 0 || g_max - g_min < tol) break;
    const double quad = std::max(gram(i, i) + gram(j, j) - 2.0 * gram(i, j), 1e-12);
    double step = (g_max - g_min) / quad;
    // Move a_i by y_i * step and a_j by -y_j * step, clipped to the box.
    const auto room = [&](Index t, double dir) { return dir > 0 ? upper(t) - alpha(t) : alpha(t); };
    step = std::min({step, room(i, yv(i)), room(j, -yv(j))});
    alpha(i) += yv(i) * step;
    alpha(j) -= yv(j) * step;
    grad += step * (gram.col(i) - gram.col(j)).cwiseProduct(yv);
  }
  SvmSolution sol;
  sol.w = x.transpose() * alpha.cwiseProduct(yv);
  // b from free vectors, or the midpoint of the feasible interval.
  double sum = 0.0;
  int free = 0;
  double lo = -INFINITY, hi = INFINITY;
  for (Index t = 0; t < n; ++t) {
    const double v = -yv(t) * grad(t);
    if (alpha(t) > 1e-12 && alpha(t) < upper(t) - 1e-12) {
      sum += v;
      ++free;
    }
    const bool up = (yv(t) > 0 && alpha(t) < upper(t)) || (yv(t) < 0 && alpha(t) > 0);
    const bool low = (yv(t) > 0 && alpha(t) > 0) || (yv(t) < 0 && alpha(t) < upper(t));
    if (up) lo = std::max(lo, v);
    if (low) hi = std::min(hi, v);
  }
  sol.b = free > 0 ? sum / free : 0.5 * (lo + hi);
  return sol;
}

inline double svm_primal(const Matrix& x, const std::vector<int>& y, const Vector& w, double b, double c, double w_pos,
                         double w_neg) {
  double loss = 0.0;
  for (Index i = 0; i < x.rows(); ++i) {
    const int yi = y[static_cast<std::size_t>(i)];
    loss += (yi > 0 ? w_pos : w_neg) * std::max(0.0, 1.0 - yi * (x.row(i).dot(w) + b));
  }
  return 0.5 * w.squaredNorm() + c * loss;
}

}  // namespace oracle
