#include "hvacsr/core/series_frame.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hvacsr/core/error.hpp"

namespace hvacsr {

SeriesFrame::SeriesFrame(TimeGrid grid) : grid_(grid) {}

void SeriesFrame::set_channel(std::string_view name, Eigen::VectorXd values, std::vector<bool> missing) {
  const auto n = grid_.length();
  if (static_cast<std::size_t>(values.size()) != n) {
    throw DataError("channel '" + std::string(name) + "' has " + std::to_string(values.size()) +
                    " samples, grid has " + std::to_string(n));
  }
  if (missing.empty()) missing.assign(n, false);
  if (missing.size() != n) throw DataError("mask length mismatch for channel '" + std::string(name) + "'");
  for (std::size_t t = 0; t < n; ++t) {
    const auto i = static_cast<Eigen::Index>(t);
    if (std::isnan(values[i])) missing[t] = true;
    if (missing[t]) values[i] = std::numeric_limits<double>::quiet_NaN();
  }
  if (name == channel::kOccupancy) {
    for (std::size_t t = 0; t < n; ++t) {
      const double v = values[static_cast<Eigen::Index>(t)];
      if (!missing[t] && v != 0.0 && v != 1.0) {
        throw DataError("occupancy must be 0 or 1, got " + std::to_string(v) + " at index " + std::to_string(t));
      }
    }
  }
  const auto it = std::find(names_.begin(), names_.end(), name);
  if (it != names_.end()) {
    const auto k = static_cast<std::size_t>(it - names_.begin());
    values_[k] = std::move(values);
    missing_[k] = std::move(missing);
    return;
  }
  names_.emplace_back(name);
  values_.push_back(std::move(values));
  missing_.push_back(std::move(missing));
}

bool SeriesFrame::has_channel(std::string_view name) const {
  return std::find(names_.begin(), names_.end(), name) != names_.end();
}

std::size_t SeriesFrame::index_of(std::string_view name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw DataError("missing channel '" + std::string(name) + "'");
  return static_cast<std::size_t>(it - names_.begin());
}

const Eigen::VectorXd& SeriesFrame::values(std::string_view name) const { return values_[index_of(name)]; }

const std::vector<bool>& SeriesFrame::missing(std::string_view name) const { return missing_[index_of(name)]; }

SeriesFrame SeriesFrame::slice(std::size_t first, std::size_t count) const {
  if (first + count > length()) throw DataError("slice exceeds frame length");
  SeriesFrame out(TimeGrid(grid_.at(first), grid_.step(), count));
  for (std::size_t k = 0; k < names_.size(); ++k) {
    std::vector<bool> m(missing_[k].begin() + static_cast<std::ptrdiff_t>(first),
                        missing_[k].begin() + static_cast<std::ptrdiff_t>(first + count));
    out.set_channel(names_[k], values_[k].segment(static_cast<Eigen::Index>(first), static_cast<Eigen::Index>(count)),
                    std::move(m));
  }
  return out;
}

bool operator==(const SeriesFrame& a, const SeriesFrame& b) {
  if (!(a.grid_ == b.grid_) || a.names_ != b.names_ || a.missing_ != b.missing_) return false;
  for (std::size_t k = 0; k < a.names_.size(); ++k) {
    for (Eigen::Index t = 0; t < a.values_[k].size(); ++t) {
      if (a.missing_[k][static_cast<std::size_t>(t)]) continue;
      if (a.values_[k][t] != b.values_[k][t]) return false;
    }
  }
  return true;
}

SeriesFrame resample(const SeriesFrame& frame, Seconds new_step) {
  const auto old_step = frame.grid().step();
  if (new_step.count() <= 0 || new_step.count() % old_step.count() != 0) {
    throw DataError("resample step " + std::to_string(new_step.count()) + " s is not an integer multiple of " +
                    std::to_string(old_step.count()) + " s");
  }
  const auto factor = static_cast<std::size_t>(new_step.count() / old_step.count());
  const auto n_in = frame.length();
  const auto n_out = (n_in + factor - 1) / factor;
  SeriesFrame out(TimeGrid(frame.grid().start(), new_step, n_out));
  for (const auto& name : frame.channel_names()) {
    const auto& v = frame.values(name);
    const auto& m = frame.missing(name);
    const bool use_max = name == channel::kOccupancy;
    Eigen::VectorXd r(static_cast<Eigen::Index>(n_out));
    std::vector<bool> rm(n_out, false);
    for (std::size_t k = 0; k < n_out; ++k) {
      double acc = use_max ? -std::numeric_limits<double>::infinity() : 0.0;
      std::size_t count = 0;
      for (std::size_t t = k * factor; t < std::min(n_in, (k + 1) * factor); ++t) {
        if (m[t]) continue;
        const double x = v[static_cast<Eigen::Index>(t)];
        acc = use_max ? std::max(acc, x) : acc + x;
        ++count;
      }
      if (count == 0) {
        rm[k] = true;
        r[static_cast<Eigen::Index>(k)] = std::numeric_limits<double>::quiet_NaN();
      } else {
        r[static_cast<Eigen::Index>(k)] = use_max ? acc : acc / static_cast<double>(count);
      }
    }
    out.set_channel(name, std::move(r), std::move(rm));
  }
  return out;
}

}  // namespace hvacsr
