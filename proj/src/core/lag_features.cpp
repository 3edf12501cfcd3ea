#include "hvacsr/core/lag_features.hpp"

#include <algorithm>
#include <charconv>

#include "hvacsr/core/error.hpp"

namespace hvacsr {

std::vector<int> LagSpec::lags() const {
  validate();
  std::vector<int> out{0};
  if (include_minus_one) out.push_back(1);
  for (int k = 1; k <= depth; ++k) out.push_back(resolution * k);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

int LagSpec::max_lag() const { return lags().back(); }

void LagSpec::validate() const {
  if (resolution < 1) throw ConfigError("lag resolution must be a positive step count");
  if (depth < 1) throw ConfigError("lag depth must be a positive count");
}

std::string FeatureColumn::name() const {
  if (lag == 0) return channel + "[t]";
  return channel + "[t-" + std::to_string(lag) + "]";
}

FeatureColumn parse_feature_name(std::string_view name) {
  const auto open = name.find('[');
  if (open == std::string_view::npos || name.back() != ']' || name.substr(open, 2) != "[t") {
    throw DataError("malformed feature name '" + std::string(name) + "'");
  }
  FeatureColumn col{std::string(name.substr(0, open)), 0};
  const auto inner = name.substr(open + 2, name.size() - open - 3);
  if (inner.empty()) return col;
  if (inner.front() != '-') throw DataError("malformed feature lag in '" + std::string(name) + "'");
  auto r = std::from_chars(inner.data() + 1, inner.data() + inner.size(), col.lag);
  if (r.ec != std::errc{} || r.ptr != inner.data() + inner.size() || col.lag < 0) {
    throw DataError("malformed feature lag in '" + std::string(name) + "'");
  }
  return col;
}

std::vector<std::string> FeatureMatrix::column_names() const {
  std::vector<std::string> out;
  out.reserve(columns.size());
  for (const auto& c : columns) out.push_back(c.name());
  return out;
}

Eigen::Index FeatureMatrix::column_index(std::string_view name) const {
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (columns[j].name() == name) return static_cast<Eigen::Index>(j);
  }
  return -1;
}

FeatureMatrix build_lag_features(const SeriesFrame& frame, const LagSpec& spec,
                                 const std::vector<std::string>& channels) {
  const auto lags = spec.lags();
  const auto max_lag = static_cast<std::size_t>(lags.back());
  for (const auto& c : channels) {
    if (!frame.has_channel(c)) throw DataError("feature channel '" + c + "' not present in frame");
  }
  if (!frame.has_channel(channel::kRoomTemp)) throw DataError("frame lacks target channel T_in");
  const std::size_t required = max_lag + 2;
  if (frame.length() < required) {
    throw DataError("insufficient history: need at least " + std::to_string(required) + " samples, have " +
                    std::to_string(frame.length()));
  }

  FeatureMatrix fm;
  for (const auto& c : channels) {
    for (int lag : lags) fm.columns.push_back({c, lag});
  }
  fm.first_usable = max_lag;
  const std::size_t candidate_rows = frame.length() - max_lag - 1;

  std::vector<const Eigen::VectorXd*> vals;
  std::vector<const std::vector<bool>*> masks;
  for (const auto& col : fm.columns) {
    vals.push_back(&frame.values(col.channel));
    masks.push_back(&frame.missing(col.channel));
  }
  const auto& target = frame.values(channel::kRoomTemp);
  const auto& target_mask = frame.missing(channel::kRoomTemp);

  std::vector<std::size_t> keep;
  keep.reserve(candidate_rows);
  for (std::size_t t = max_lag; t + 1 < frame.length(); ++t) {
    bool ok = !target_mask[t + 1];
    for (std::size_t j = 0; ok && j < fm.columns.size(); ++j) {
      ok = !(*masks[j])[t - static_cast<std::size_t>(fm.columns[j].lag)];
    }
    if (ok) keep.push_back(t);
  }

  const auto rows = static_cast<Eigen::Index>(keep.size());
  fm.x.resize(rows, static_cast<Eigen::Index>(fm.columns.size()));
  fm.target.resize(rows);
  fm.source_index = keep;
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto t = keep[static_cast<std::size_t>(r)];
    for (std::size_t j = 0; j < fm.columns.size(); ++j) {
      fm.x(r, static_cast<Eigen::Index>(j)) =
          (*vals[j])[static_cast<Eigen::Index>(t - static_cast<std::size_t>(fm.columns[j].lag))];
    }
    fm.target[r] = target[static_cast<Eigen::Index>(t + 1)];
  }
  return fm;
}

}  // namespace hvacsr
