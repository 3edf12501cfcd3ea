#include "hvacsr/hvac/hvac_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hvacsr::hvac {

std::string to_string(HvacMode mode) { return mode == HvacMode::Heating ? "heating" : "cooling"; }

HvacMode parse_mode(std::string_view text) {
  if (text == "heating") return HvacMode::Heating;
  if (text == "cooling") return HvacMode::Cooling;
  throw ConfigError("mode must be 'heating' or 'cooling', got '" + std::string(text) + "'");
}

namespace {

double range_tolerance(double q_max) { return 1e-12 * std::max(1.0, q_max); }

}  // namespace

HVACModel::HVACModel(std::vector<AmbientLevel> levels, double rated_capacity_kw, double rated_power_kw,
                     double load_min, HvacMode mode)
    : levels_(std::move(levels)),
      q_min_(load_min * rated_capacity_kw),
      q_max_(rated_capacity_kw),
      rated_power_(rated_power_kw),
      load_min_(load_min),
      mode_(mode) {
  if (levels_.empty()) throw DataError("HVAC model needs at least one ambient level");
  if (!(rated_capacity_kw > 0.0)) throw DataError("rated capacity must be positive");
  if (!(rated_power_kw > 0.0)) throw DataError("rated power must be positive");
  if (!(load_min > 0.0 && load_min < 1.0)) throw DataError("load_min must lie in (0, 1)");
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    if (i > 0 && !(levels_[i].t_out_c > levels_[i - 1].t_out_c)) {
      throw DataError("ambient levels must strictly increase");
    }
    const auto& c = levels_[i].curve;
    const double tol = range_tolerance(q_max_);
    if (c.min_capacity() > q_min_ + tol || c.max_capacity() < q_max_ - tol) {
      throw DataError("curve at " + std::to_string(levels_[i].t_out_c) + " C does not cover [q_min, q_max]");
    }
  }
}

std::pair<std::size_t, double> HVACModel::bracket(double t_out) const {
  if (t_out <= levels_.front().t_out_c || levels_.size() == 1) return {0, 0.0};
  if (t_out >= levels_.back().t_out_c) return {levels_.size() - 1, 0.0};
  std::size_t i = 0;
  while (levels_[i + 1].t_out_c <= t_out) ++i;
  const double w = (t_out - levels_[i].t_out_c) / (levels_[i + 1].t_out_c - levels_[i].t_out_c);
  return {i, w};
}

PWLCurve HVACModel::curve_at(double t_out) const {
  const auto [i, w] = bracket(t_out);
  if (w == 0.0) return levels_[i].curve;
  const auto& a = levels_[i].curve;
  const auto& b = levels_[i + 1].curve;
  const double lo = std::max(a.min_capacity(), b.min_capacity());
  const double hi = std::min(a.max_capacity(), b.max_capacity());
  std::vector<double> qs;
  for (const auto* c : {&a, &b}) {
    for (Eigen::Index k = 0; k < c->knots(); ++k) {
      const double q = c->capacity()[k];
      if (q >= lo && q <= hi) qs.push_back(q);
    }
  }
  qs.push_back(lo);
  qs.push_back(hi);
  std::sort(qs.begin(), qs.end());
  qs.erase(std::unique(qs.begin(), qs.end()), qs.end());
  Eigen::VectorXd cap(static_cast<Eigen::Index>(qs.size()));
  Eigen::VectorXd pow(cap.size());
  for (Eigen::Index k = 0; k < cap.size(); ++k) {
    cap[k] = qs[static_cast<std::size_t>(k)];
    pow[k] = (1.0 - w) * a.evaluate(cap[k]) + w * b.evaluate(cap[k]);
  }
  return PWLCurve(cap, pow);
}

double HVACModel::min_on_power(double t_out) const { return capacity_to_power(*this, q_min_, t_out); }

double HVACModel::max_on_power(double t_out) const { return capacity_to_power(*this, q_max_, t_out); }

double capacity_to_power(const HVACModel& model, double q, double t_out) {
  if (q == 0.0) return 0.0;
  const double tol = range_tolerance(model.q_max_);
  if (q < model.q_min_ - tol || std::isnan(q)) {
    throw InfeasibleOperatingPoint("capacity " + std::to_string(q) + " kW is inside the off gap (0, " +
                                   std::to_string(model.q_min_) + ") kW");
  }
  if (q > model.q_max_ + tol) {
    throw InfeasibleOperatingPoint("capacity " + std::to_string(q) + " kW exceeds rated capacity");
  }
  q = std::clamp(q, model.q_min_, model.q_max_);
  const auto [i, w] = model.bracket(t_out);
  const double p0 = model.levels_[i].curve.evaluate(q);
  if (w == 0.0) return p0;
  const double p1 = model.levels_[i + 1].curve.evaluate(q);
  return (1.0 - w) * p0 + w * p1;
}

double power_to_capacity(const HVACModel& model, double d, double t_out) {
  if (d == 0.0) return 0.0;
  const double d_lo = model.min_on_power(t_out);
  const double d_hi = model.max_on_power(t_out);
  const double tol = 1e-12 * std::max(1.0, d_hi);
  if (d < d_lo - tol || std::isnan(d)) {
    throw InfeasibleOperatingPoint("power " + std::to_string(d) + " kW is inside the off gap (0, " +
                                   std::to_string(d_lo) + ") kW");
  }
  if (d > d_hi + tol) throw InfeasibleOperatingPoint("power " + std::to_string(d) + " kW exceeds maximum");
  d = std::clamp(d, d_lo, d_hi);
  const PWLCurve curve = model.curve_at(t_out);
  // Restrict to [q_min, q_max] so flat stretches below q_min are never returned.
  const double q = curve.inverse(d);
  return std::clamp(q, model.q_min(), model.q_max());
}

double StepLinearization::capacity(double d) const {
  if (d == 0.0) return 0.0;
  for (const auto& s : segments) {
    if (d >= s.d_lo && d <= s.d_hi) return s.alpha * d + s.beta;
  }
  throw InfeasibleOperatingPoint("power " + std::to_string(d) + " kW outside the linearized operating range");
}

std::vector<StepLinearization> linearize_for_mpc(const HVACModel& model, const Eigen::VectorXd& t_out) {
  std::vector<StepLinearization> out;
  out.reserve(static_cast<std::size_t>(t_out.size()));
  for (Eigen::Index t = 0; t < t_out.size(); ++t) {
    const PWLCurve curve = model.curve_at(t_out[t]);
    std::vector<double> qs{model.q_min()};
    for (Eigen::Index k = 0; k < curve.knots(); ++k) {
      const double q = curve.capacity()[k];
      if (q > model.q_min() && q < model.q_max()) qs.push_back(q);
    }
    qs.push_back(model.q_max());
    StepLinearization lin;
    lin.d_min = curve.evaluate(model.q_min());
    lin.d_max = curve.evaluate(model.q_max());
    for (std::size_t k = 0; k + 1 < qs.size(); ++k) {
      const double da = curve.evaluate(qs[k]);
      const double db = curve.evaluate(qs[k + 1]);
      if (!(db > da)) continue;
      const double alpha = (qs[k + 1] - qs[k]) / (db - da);
      lin.segments.push_back({da, db, alpha, qs[k] - alpha * da});
    }
    out.push_back(std::move(lin));
  }
  return out;
}

namespace {

std::vector<double> quantile_breaks(const std::vector<double>& sorted_q, int m) {
  std::vector<double> b;
  const double n = static_cast<double>(sorted_q.size() - 1);
  for (int k = 0; k <= m; ++k) {
    const double pos = n * k / m;
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted_q.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    b.push_back(sorted_q[lo] + frac * (sorted_q[hi] - sorted_q[lo]));
  }
  return b;
}

// Pool-adjacent-violators on knot values weighted by basis mass.
void pool_decreasing(Eigen::VectorXd& v, const Eigen::VectorXd& weight) {
  struct Block {
    double sum_wv;
    double sum_w;
    int count;
  };
  std::vector<Block> blocks;
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    const double w = std::max(weight[k], 1e-12);
    blocks.push_back({w * v[k], w, 1});
    while (blocks.size() > 1) {
      auto& last = blocks[blocks.size() - 1];
      auto& prev = blocks[blocks.size() - 2];
      if (prev.sum_wv / prev.sum_w <= last.sum_wv / last.sum_w) break;
      prev.sum_wv += last.sum_wv;
      prev.sum_w += last.sum_w;
      prev.count += last.count;
      blocks.pop_back();
    }
  }
  Eigen::Index k = 0;
  for (const auto& b : blocks) {
    for (int i = 0; i < b.count; ++i) v[k++] = b.sum_wv / b.sum_w;
  }
}

PWLCurve fit_on_breaks(std::span<const CapacityPowerPoint> pts, const std::vector<double>& breaks) {
  const auto nk = static_cast<Eigen::Index>(breaks.size());
  Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(pts.size()), nk);
  Eigen::VectorXd y(static_cast<Eigen::Index>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double q = pts[i].capacity;
    const auto r = static_cast<Eigen::Index>(i);
    y[r] = pts[i].power;
    auto it = std::upper_bound(breaks.begin(), breaks.end(), q);
    auto k = std::clamp<Eigen::Index>(static_cast<Eigen::Index>(it - breaks.begin()) - 1, 0, nk - 2);
    const double w = (q - breaks[static_cast<std::size_t>(k)]) /
                     (breaks[static_cast<std::size_t>(k) + 1] - breaks[static_cast<std::size_t>(k)]);
    basis(r, k) = 1.0 - w;
    basis(r, k + 1) = w;
  }
  Eigen::VectorXd v = basis.completeOrthogonalDecomposition().solve(y);
  pool_decreasing(v, basis.colwise().sum().transpose());
  Eigen::VectorXd cap = Eigen::Map<const Eigen::VectorXd>(breaks.data(), nk);
  return PWLCurve(cap, v);
}

}  // namespace

double pwl_residual(const PWLCurve& curve, std::span<const CapacityPowerPoint> points) {
  double acc = 0.0;
  for (const auto& p : points) {
    const double e = curve.evaluate(p.capacity) - p.power;
    acc += e * e;
  }
  return acc;
}

PWLCurve fit_pwl(std::span<const CapacityPowerPoint> points, int n_segments) {
  if (n_segments < 1) throw DataError("n_segments must be positive");
  if (points.size() < static_cast<std::size_t>(n_segments) + 1) {
    throw DataError("fit_pwl needs at least " + std::to_string(n_segments + 1) + " points, got " +
                    std::to_string(points.size()));
  }
  std::vector<double> qs;
  for (const auto& p : points) qs.push_back(p.capacity);
  std::sort(qs.begin(), qs.end());
  if (std::adjacent_find(qs.begin(), qs.end()) != qs.end()) throw DataError("fit_pwl requires distinct capacities");

  PWLCurve best;
  double best_res = std::numeric_limits<double>::infinity();
  for (int m = 1; m <= n_segments; ++m) {
    PWLCurve c = fit_on_breaks(points, quantile_breaks(qs, m));
    const double res = pwl_residual(c, points);
    if (res <= best_res) {
      best_res = res;
      best = std::move(c);
    }
  }
  // Express the winner on exactly n pieces by splitting its widest pieces; the inserted knots
  // lie on the curve, so the fit is unchanged.
  std::vector<double> knots(best.capacity().data(), best.capacity().data() + best.knots());
  while (knots.size() < static_cast<std::size_t>(n_segments) + 1) {
    std::size_t widest = 0;
    for (std::size_t k = 1; k + 1 < knots.size(); ++k) {
      if (knots[k + 1] - knots[k] > knots[widest + 1] - knots[widest]) widest = k;
    }
    knots.insert(knots.begin() + static_cast<std::ptrdiff_t>(widest) + 1, 0.5 * (knots[widest] + knots[widest + 1]));
  }
  Eigen::VectorXd cap(static_cast<Eigen::Index>(knots.size()));
  Eigen::VectorXd pow(cap.size());
  for (Eigen::Index k = 0; k < cap.size(); ++k) {
    cap[k] = knots[static_cast<std::size_t>(k)];
    pow[k] = best.evaluate(cap[k]);
  }
  for (Eigen::Index k = 1; k < pow.size(); ++k) pow[k] = std::max(pow[k], pow[k - 1]);
  return PWLCurve(cap, pow);
}

HVACModel synthetic_heating_model() {
  constexpr double kRatedCapacity = 37.5;
  constexpr double kLoadMin = 0.11;
  const double q_min = kLoadMin * kRatedCapacity;
  struct Row {
    double t_out, d_at_min, d_at_max;
  };
  // Power draw at minimum and rated capacity. Colder air needs more power for the same heat,
  // and part load runs at a better COP than full load, as with inverter-driven units.
  const Row rows[] = {{-10.0, 1.35, 15.60}, {0.0, 1.10, 12.50}, {10.0, 0.90, 10.40}, {20.0, 0.75, 8.90}};
  std::vector<AmbientLevel> levels;
  for (const auto& r : rows) {
    Eigen::Vector2d cap(q_min, kRatedCapacity);
    Eigen::Vector2d pow(r.d_at_min, r.d_at_max);
    levels.push_back({r.t_out, PWLCurve(cap, pow)});
  }
  return HVACModel(std::move(levels), kRatedCapacity, 12.5, kLoadMin, HvacMode::Heating);
}

}  // namespace hvacsr::hvac
