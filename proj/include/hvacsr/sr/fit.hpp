#pragma once

#include <Eigen/Dense>

#include "hvacsr/core/lag_features.hpp"
#include "hvacsr/sr/expr.hpp"

namespace hvacsr::sr {

/// QR-compressed least-squares data: ||[1 X] b - y||^2 = ||R b - Q'y||^2 + tail.
class LeastSquaresCache {
 public:
  explicit LeastSquaresCache(const FeatureMatrix& data);

  Eigen::Index rows() const { return rows_; }
  Eigen::Index n_features() const { return r_.cols() - 1; }
  const Eigen::MatrixXd& r() const { return r_; }
  const Eigen::VectorXd& qty() const { return qty_; }
  double tail() const { return tail_; }
  double target_mean() const { return target_mean_; }
  double target_std() const { return target_std_; }

  double sse(const Eigen::VectorXd& affine_coefficients) const;
  double mse(const Eigen::VectorXd& affine_coefficients) const { return sse(affine_coefficients) / double(rows_); }

 private:
  Eigen::Index rows_ = 0;
  Eigen::MatrixXd r_;
  Eigen::VectorXd qty_;
  double tail_ = 0.0;
  double target_mean_ = 0.0;
  double target_std_ = 0.0;
};

struct FitResult {
  Expr expr;
  double mse = 0.0;
  bool rank_deficient = false;
  int iterations = 0;
};

/// Least-squares refinement of the structure's constants (Gauss-Newton with
/// Levenberg-Marquardt fallback; minimum-norm steps on rank-deficient bases).
/// The returned mse is never above the input's.
FitResult fit_constants(const Expr& structure, const LeastSquaresCache& cache);
FitResult fit_constants(const Expr& structure, const FeatureMatrix& data);

/// Direct row-by-row mean squared error against the target.
double mean_squared_error(const Expr& expr, const FeatureMatrix& data);

}  // namespace hvacsr::sr
