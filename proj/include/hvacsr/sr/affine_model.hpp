#pragma once

#include <Eigen/Dense>
#include <limits>
#include <string>
#include <vector>

#include "hvacsr/core/lag_features.hpp"
#include "hvacsr/sr/expr.hpp"

namespace hvacsr::sr {

struct AffineTerm {
  FeatureColumn column;
  double coefficient = 0.0;
};

/// intercept + sum(coefficient * feature). Terms keep the feature-matrix column order.
struct AffineModel {
  double intercept = 0.0;
  std::vector<AffineTerm> terms;
  double training_mse = std::numeric_limits<double>::quiet_NaN();
  int complexity = 0;

  double coefficient(std::string_view column_name) const;  // 0 when absent
  bool uses_channel(std::string_view channel) const;
  int max_lag(std::string_view channel) const;  // -1 when the channel is unused
  std::vector<std::string> support() const;

  /// Prediction on every row of a feature matrix; columns are matched by name.
  Eigen::VectorXd predict(const FeatureMatrix& data) const;

  /// "T_in[t+1] = 0.754*T_in[t] - 0.162*T_in[t-60] - 1.000*D[t] + 10.445"
  std::string equation(int decimals = 3) const;
};

/// Dense affine expansion: element 0 is the intercept, element j+1 the coefficient of feature j.
/// When `jacobian` is non-null it receives d(coefficients)/d(constants) in constant order.
Eigen::VectorXd expand_affine(const Expr& expr, Eigen::Index n_features, Eigen::MatrixXd* jacobian = nullptr);

/// Symbolic expansion; exact zero coefficients are pruned. Throws DataError for non-affine trees.
AffineModel to_affine(const Expr& expr, const std::vector<FeatureColumn>& columns);

}  // namespace hvacsr::sr
