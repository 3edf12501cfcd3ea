#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <string>

#include "hvacsr/core/error.hpp"

namespace hvacsr::hvac {

/// Continuous piecewise-linear map capacity -> power over ordered knots.
/// Capacities strictly increase; power never decreases.
template <typename Scalar>
class PiecewiseLinear {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  PiecewiseLinear() = default;
  PiecewiseLinear(Vector capacity, Vector power) : capacity_(std::move(capacity)), power_(std::move(power)) {
    if (capacity_.size() != power_.size()) throw DataError("curve knot vectors differ in length");
    if (capacity_.size() < 2) throw DataError("curve needs at least two knots");
    for (Eigen::Index k = 1; k < capacity_.size(); ++k) {
      if (!(capacity_[k] > capacity_[k - 1])) throw DataError("curve knot capacities must strictly increase");
      if (power_[k] < power_[k - 1]) throw DataError("curve power must be non-decreasing in capacity");
    }
  }

  const Vector& capacity() const { return capacity_; }
  const Vector& power() const { return power_; }
  Eigen::Index knots() const { return capacity_.size(); }
  Eigen::Index segments() const { return capacity_.size() - 1; }
  Scalar min_capacity() const { return capacity_[0]; }
  Scalar max_capacity() const { return capacity_[capacity_.size() - 1]; }

  bool strictly_increasing() const {
    for (Eigen::Index k = 1; k < power_.size(); ++k) {
      if (!(power_[k] > power_[k - 1])) return false;
    }
    return true;
  }

  /// Linear interpolation; knots evaluate exactly.
  Scalar evaluate(Scalar q) const {
    if (q < min_capacity() || q > max_capacity()) {
      throw DataError("capacity " + std::to_string(double(q)) + " kW outside curve range");
    }
    const Eigen::Index k = segment_of(q);
    const Scalar q0 = capacity_[k], q1 = capacity_[k + 1];
    if (q == q0) return power_[k];
    if (q == q1) return power_[k + 1];
    const Scalar w = (q - q0) / (q1 - q0);
    return power_[k] + w * (power_[k + 1] - power_[k]);
  }

  /// Smallest capacity whose power equals `d`.
  Scalar inverse(Scalar d) const {
    if (d < power_[0] || d > power_[power_.size() - 1]) {
      throw DataError("power " + std::to_string(double(d)) + " kW outside curve range");
    }
    const Scalar* first = power_.data();
    const Scalar* last = first + power_.size();
    const auto j = static_cast<Eigen::Index>(std::lower_bound(first, last, d) - first);
    if (power_[j] == d || j == 0) return capacity_[j];
    const Scalar d0 = power_[j - 1], d1 = power_[j];
    const Scalar w = (d - d0) / (d1 - d0);
    return capacity_[j - 1] + w * (capacity_[j] - capacity_[j - 1]);
  }

 private:
  Eigen::Index segment_of(Scalar q) const {
    const Scalar* first = capacity_.data();
    const Scalar* last = first + capacity_.size();
    auto it = std::upper_bound(first, last, q);
    auto k = static_cast<Eigen::Index>(it - first) - 1;
    return std::clamp<Eigen::Index>(k, 0, capacity_.size() - 2);
  }

  Vector capacity_;
  Vector power_;
};

using PWLCurve = PiecewiseLinear<double>;

}  // namespace hvacsr::hvac
