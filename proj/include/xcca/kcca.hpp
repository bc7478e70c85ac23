#pragma once

#include "xcca/matrix.hpp"
#include "xcca/normalize.hpp"

#include <vector>

namespace xcca {

/// Affine map from a brain-side variate V_c to its feature-side partner U_c.
struct ComponentRegression {
  double intercept = 0.0;
  double slope = 0.0;

  bool operator==(const ComponentRegression&) const = default;
};

/// Fitted canonical model.
///
/// Column c of `features_weights` (A, p x k) and `brain_weights` (B, q x k)
/// give the training variates U_c = X A_c and V_c = Y B_c. Columns are scaled
/// so that both variates have unit population variance on the training data,
/// signed so that corr(U_c, V_c) >= 0, and ordered by decreasing training
/// correlation.
struct CcaModel {
  Matrix features_weights;
  Matrix brain_weights;
  Vector train_corrs;
  std::vector<ComponentRegression> comp_regress;
  double lambda = 0.0;
  /// Shift the training pairs were aligned with (see apply_time_shift).
  int time_shift = 0;
  NormStats feature_stats;
  NormStats brain_stats;

  Index num_components() const { return features_weights.cols(); }
  Index feature_dim() const { return features_weights.rows(); }
  Index brain_dim() const { return brain_weights.rows(); }

  /// The first k components (k >= 1, k <= num_components()).
  CcaModel truncated(Index k) const;
};

enum class View { kFeatures, kBrain };

/// Internals of a fit, kept for diagnostics and tests. `dual_features` and
/// `dual_brain` hold the eigenvector blocks (alpha, beta) of the block
/// problem in the same column order as the model, before unit-variance
/// rescaling; `eigenvalues` holds the matching generalized eigenvalues.
struct KccaFit {
  CcaModel model;
  Matrix dual_features;
  Matrix dual_brain;
  Vector eigenvalues;
};

/// Regularized linear-kernel CCA in its dual form.
///
/// With Gram matrices Kx = X X^T and Ky = Y Y^T (each divided by its largest
/// eigenvalue) the fit solves
///
///   [ 0      Kx Ky ] [a]       [ Kx Kx + lambda I       0          ] [a]
///   [ Ky Kx    0   ] [b] = rho [       0          Ky Ky + lambda I ] [b]
///
/// keeps the k largest eigenvalues, and maps back to primal weights
/// A = X^T a, B = Y^T b. X and Y must already be z-scored.
KccaFit fit_kcca_detailed(const Matrix& x, const Matrix& y, double lambda, Index k);
CcaModel fit_kcca(const Matrix& x, const Matrix& y, double lambda, Index k);

/// ||LH w - rho RH w|| / ||w|| of the block problem above for w = [a; b].
double kcca_block_residual(const Matrix& x, const Matrix& y, double lambda, const Vector& a, const Vector& b,
                           double rho);

/// X A or Y B.
Matrix project(const CcaModel& model, const Matrix& data, View view);

/// Per-component least squares of U_c on V_c with intercept. A constant V_c
/// yields slope 0 and intercept mean(U_c).
std::vector<ComponentRegression> fit_component_regression(const Matrix& u, const Matrix& v);

/// U_hat(t, c) = a_c + b_c V(t, c).
Matrix predict_u_from_v(const CcaModel& model, const Matrix& v);

/// Moore-Penrose pseudo-inverse via SVD; singular values below
/// 1e-12 * max are treated as zero.
Matrix pseudo_inverse(const Matrix& a);

/// Brain data (z-scored with model.brain_stats) -> reconstructed features in
/// z-scored feature space: predict_u_from_v(Y B) * pinv(A).
Matrix reconstruct_features(const CcaModel& model, const Matrix& brain);

/// Pearson correlation between columns of X A and Y B.
Vector evaluate_correlations(const CcaModel& model, const Matrix& x, const Matrix& y);

}  // namespace xcca
