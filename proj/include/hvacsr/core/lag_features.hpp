#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "hvacsr/core/series_frame.hpp"

namespace hvacsr {

/// Lag set {0} u {1 if include_minus_one} u {a*k : 1 <= k <= n}.
struct LagSpec {
  int resolution = 12;
  int depth = 8;
  bool include_minus_one = true;

  std::vector<int> lags() const;
  int max_lag() const;
  void validate() const;
};

struct FeatureColumn {
  std::string channel;
  int lag = 0;

  std::string name() const;  // "T_in[t]", "T_in[t-12]"
  friend auto operator<=>(const FeatureColumn&, const FeatureColumn&) = default;
};

FeatureColumn parse_feature_name(std::string_view name);

/// Lagged design matrix with the next-step room temperature as target.
struct FeatureMatrix {
  Eigen::MatrixXd x;
  Eigen::VectorXd target;
  std::vector<FeatureColumn> columns;
  std::vector<std::size_t> source_index;  // frame index t of each row
  std::size_t first_usable = 0;

  Eigen::Index rows() const { return x.rows(); }
  Eigen::Index cols() const { return x.cols(); }
  std::vector<std::string> column_names() const;
  Eigen::Index column_index(std::string_view name) const;  // -1 when absent
};

/// Channel-major, lag-ascending columns; rows with any masked value are dropped.
FeatureMatrix build_lag_features(const SeriesFrame& frame, const LagSpec& spec,
                                 const std::vector<std::string>& channels);

}  // namespace hvacsr
