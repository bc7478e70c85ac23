#include "xcca/kcca.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace xcca {
namespace {

constexpr double kRangeCutoff = 1e-12;
constexpr double kPinvCutoff = 1e-12;
constexpr double kDegenerateStd = 1e-12;

Matrix symmetrized(const Matrix& m) { return (m + m.transpose()) * 0.5; }

/// X X^T divided by its largest eigenvalue.
Matrix normalized_gram(const Matrix& data, const char* view) {
  Matrix gram = symmetrized(data * data.transpose());
  // The largest eigenvalue of X X^T equals that of X^T X; use the smaller one.
  const Matrix small = data.cols() < data.rows() ? Matrix(data.transpose() * data) : gram;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetrized(small), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalError(std::string("fit_kcca: eigensolver failed on ") + view);
  const double top = solver.eigenvalues().maxCoeff();
  if (!(top > 0.0) || !std::isfinite(top)) {
    throw NumericalError(std::string("fit_kcca: ") + view + " view has no variance");
  }
  gram /= top;
  return gram;
}

/// For a symmetric PSD block R, returns W (T x r) with W^T R W = I spanning
/// the numerical range of R.
Matrix range_whitener(const Matrix& rh, const char* view) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(rh);
  if (solver.info() != Eigen::Success) throw NumericalError(std::string("fit_kcca: eigensolver failed on ") + view);
  const Vector& ev = solver.eigenvalues();
  const double top = ev.maxCoeff();
  if (!(top > 0.0)) throw NumericalError(std::string("fit_kcca: degenerate ") + view + " block");
  std::vector<Index> keep;
  for (Index i = ev.size() - 1; i >= 0; --i) {
    if (ev(i) > kRangeCutoff * top) keep.push_back(i);
  }
  Matrix w(rh.rows(), static_cast<Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) {
    w.col(static_cast<Index>(j)) = solver.eigenvectors().col(keep[j]) / std::sqrt(ev(keep[j]));
  }
  return w;
}

Index largest_abs_index(const Eigen::Ref<const Vector>& v) {
  Index best = 0;
  v.cwiseAbs().maxCoeff(&best);
  return best;
}

}  // namespace

CcaModel CcaModel::truncated(Index k) const {
  if (k < 1 || k > num_components()) {
    throw ValidationError("CcaModel::truncated: k = " + std::to_string(k) + " outside [1, " +
                          std::to_string(num_components()) + "]");
  }
  CcaModel out = *this;
  out.features_weights = features_weights.leftCols(k);
  out.brain_weights = brain_weights.leftCols(k);
  out.train_corrs = train_corrs.head(k);
  if (!comp_regress.empty()) out.comp_regress.resize(static_cast<std::size_t>(k));
  return out;
}

KccaFit fit_kcca_detailed(const Matrix& x, const Matrix& y, double lambda, Index k) {
  const Index t = x.rows();
  if (y.rows() != t) {
    throw ValidationError("fit_kcca: views have " + std::to_string(t) + " and " + std::to_string(y.rows()) + " rows");
  }
  if (t < 3) throw ValidationError("fit_kcca: need at least 3 samples, got " + std::to_string(t));
  if (k < 1 || k > t - 1) {
    throw ValidationError("fit_kcca: k = " + std::to_string(k) + " outside [1, " + std::to_string(t - 1) + "]");
  }
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ValidationError("fit_kcca: lambda must be finite and >= 0");

  const Matrix kx = normalized_gram(x, "feature");
  const Matrix ky = normalized_gram(y, "brain");
  const Matrix ident = Matrix::Identity(t, t);
  const Matrix rh_x = symmetrized(kx * kx + lambda * ident);
  const Matrix rh_y = symmetrized(ky * ky + lambda * ident);
  // Off-diagonal block of the symmetrized LH: (Kx Ky + (Ky Kx)^T) / 2.
  const Matrix lh_xy = (kx * ky + (ky * kx).transpose()) * 0.5;

  const Matrix wx = range_whitener(rh_x, "feature");
  const Matrix wy = range_whitener(rh_y, "brain");
  const Matrix core = wx.transpose() * lh_xy * wy;

  // Positive eigenpairs of [[0, C], [C^T, 0]] are the singular triplets of C.
  Eigen::BDCSVD<Matrix> svd(core, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw NumericalError("fit_kcca: SVD of the whitened block failed");
  const Index available = svd.singularValues().size();
  if (k > available) {
    throw NumericalError("fit_kcca: only " + std::to_string(available) + " canonical directions available, " +
                         std::to_string(k) + " requested");
  }

  Matrix alpha = wx * svd.matrixU().leftCols(k);
  Matrix beta = wy * svd.matrixV().leftCols(k);
  Vector rho = svd.singularValues().head(k);

  Matrix a = x.transpose() * alpha;
  Matrix b = y.transpose() * beta;
  Matrix u = x * a;
  Matrix v = y * b;
  const Vector var_u = column_variance(u);
  const Vector var_v = column_variance(v);
  for (Index c = 0; c < k; ++c) {
    const double su = std::sqrt(var_u(c));
    const double sv = std::sqrt(var_v(c));
    if (!(su > kDegenerateStd) || !(sv > kDegenerateStd)) {
      throw NumericalError("fit_kcca: component " + std::to_string(c + 1) + " has a zero-variance variate");
    }
    // Canonical sign: largest-magnitude entry of A_c positive, then B_c follows the correlation.
    const double sign_a = a(largest_abs_index(a.col(c)), c) < 0.0 ? -1.0 : 1.0;
    a.col(c) *= sign_a / su;
    u.col(c) *= sign_a / su;
    alpha.col(c) *= sign_a;
    v.col(c) /= sv;
    const double sign_b = pearson(u.col(c), v.col(c)) < 0.0 ? -1.0 : 1.0;
    b.col(c) *= sign_b / sv;
    v.col(c) *= sign_b;
    beta.col(c) *= sign_b;
  }

  const Vector corrs = column_correlations(u, v);
  std::vector<Index> order(static_cast<std::size_t>(k));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index l, Index r) { return corrs(l) > corrs(r); });

  KccaFit fit;
  CcaModel& model = fit.model;
  model.features_weights.resize(x.cols(), k);
  model.brain_weights.resize(y.cols(), k);
  fit.dual_features.resize(t, k);
  fit.dual_brain.resize(t, k);
  fit.eigenvalues.resize(k);
  for (Index c = 0; c < k; ++c) {
    const Index src = order[static_cast<std::size_t>(c)];
    model.features_weights.col(c) = a.col(src);
    model.brain_weights.col(c) = b.col(src);
    fit.dual_features.col(c) = alpha.col(src);
    fit.dual_brain.col(c) = beta.col(src);
    fit.eigenvalues(c) = rho(src);
  }
  // Recomputed from the stored weights so that projecting the training data reproduces them exactly.
  const Matrix u_sorted = x * model.features_weights;
  const Matrix v_sorted = y * model.brain_weights;
  model.train_corrs = column_correlations(u_sorted, v_sorted);
  model.comp_regress = fit_component_regression(u_sorted, v_sorted);
  model.lambda = lambda;
  model.feature_stats = NormStats::identity(x.cols());
  model.brain_stats = NormStats::identity(y.cols());
  return fit;
}

CcaModel fit_kcca(const Matrix& x, const Matrix& y, double lambda, Index k) {
  return fit_kcca_detailed(x, y, lambda, k).model;
}

double kcca_block_residual(const Matrix& x, const Matrix& y, double lambda, const Vector& a, const Vector& b,
                           double rho) {
  const Matrix kx = normalized_gram(x, "feature");
  const Matrix ky = normalized_gram(y, "brain");
  const Index t = x.rows();
  const Matrix ident = Matrix::Identity(t, t);
  const Matrix lh_xy = (kx * ky + (ky * kx).transpose()) * 0.5;
  const Vector top = lh_xy * b - rho * (symmetrized(kx * kx + lambda * ident) * a);
  const Vector bottom = lh_xy.transpose() * a - rho * (symmetrized(ky * ky + lambda * ident) * b);
  const double norm_w = std::sqrt(a.squaredNorm() + b.squaredNorm());
  return std::sqrt(top.squaredNorm() + bottom.squaredNorm()) / norm_w;
}

Matrix project(const CcaModel& model, const Matrix& data, View view) {
  const Matrix& weights = view == View::kFeatures ? model.features_weights : model.brain_weights;
  if (data.cols() != weights.rows()) {
    throw ValidationError(std::string("project: ") + (view == View::kFeatures ? "feature" : "brain") +
                          " data has " + std::to_string(data.cols()) + " columns, model expects " +
                          std::to_string(weights.rows()));
  }
  return data * weights;
}

std::vector<ComponentRegression> fit_component_regression(const Matrix& u, const Matrix& v) {
  if (u.rows() != v.rows() || u.cols() != v.cols()) throw ValidationError("fit_component_regression: shape mismatch");
  if (u.rows() < 1) throw ValidationError("fit_component_regression: no rows");
  std::vector<ComponentRegression> out(static_cast<std::size_t>(u.cols()));
  const double n = static_cast<double>(u.rows());
  for (Index c = 0; c < u.cols(); ++c) {
    const double mu = u.col(c).mean();
    const double mv = v.col(c).mean();
    const Vector dv = v.col(c).array() - mv;
    const double var_v = dv.squaredNorm() / n;
    auto& reg = out[static_cast<std::size_t>(c)];
    if (std::sqrt(var_v) < kDegenerateStd) {
      reg = {mu, 0.0};
      continue;
    }
    const double cov = dv.dot((u.col(c).array() - mu).matrix()) / n;
    reg.slope = cov / var_v;
    reg.intercept = mu - reg.slope * mv;
  }
  return out;
}

Matrix predict_u_from_v(const CcaModel& model, const Matrix& v) {
  if (model.comp_regress.empty()) throw ValidationError("predict_u_from_v: model has no regression coefficients");
  if (static_cast<Index>(model.comp_regress.size()) != v.cols()) {
    throw ValidationError("predict_u_from_v: " + std::to_string(v.cols()) + " columns for " +
                          std::to_string(model.comp_regress.size()) + " coefficients");
  }
  Matrix out(v.rows(), v.cols());
  for (Index c = 0; c < v.cols(); ++c) {
    const auto& reg = model.comp_regress[static_cast<std::size_t>(c)];
    out.col(c) = (reg.slope * v.col(c).array() + reg.intercept).matrix();
  }
  return out;
}

Matrix pseudo_inverse(const Matrix& a) {
  if (a.size() == 0) return Matrix(a.cols(), a.rows());
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  const double cutoff = s.size() > 0 ? kPinvCutoff * s.maxCoeff() : 0.0;
  Vector inv = Vector::Zero(s.size());
  for (Index i = 0; i < s.size(); ++i) {
    if (s(i) > cutoff) inv(i) = 1.0 / s(i);
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

Matrix reconstruct_features(const CcaModel& model, const Matrix& brain) {
  const Matrix v = project(model, brain, View::kBrain);
  return predict_u_from_v(model, v) * pseudo_inverse(model.features_weights);
}

Vector evaluate_correlations(const CcaModel& model, const Matrix& x, const Matrix& y) {
  if (x.rows() != y.rows()) throw ValidationError("evaluate_correlations: row count mismatch");
  if (x.rows() < 3) throw ValidationError("evaluate_correlations: need at least 3 rows, got " + std::to_string(x.rows()));
  return column_correlations(project(model, x, View::kFeatures), project(model, y, View::kBrain));
}

}  // namespace xcca
