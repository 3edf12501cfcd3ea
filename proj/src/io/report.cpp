#include "hvacsr/io/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "hvacsr/core/error.hpp"
#include "hvacsr/io/csv.hpp"

namespace hvacsr::io {

namespace {

constexpr double kWidth = 800, kHeight = 420;
constexpr double kLeft = 70, kRight = 150, kTop = 40, kBottom = 50;
constexpr const char* kPalette[] = {"#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Round step (1, 2, 5 x 10^k) giving about `target` ticks.
double nice_step(double span, int target) {
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (m * mag >= raw) return m * mag;
  }
  return 10.0 * mag;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << content;
  if (!out) throw DataError("write failed for " + path.string());
}

std::vector<double> hours_of(const SeriesFrame& f) {
  std::vector<double> x(f.length());
  for (std::size_t t = 0; t < f.length(); ++t) x[t] = static_cast<double>(t) * f.grid().step_hours();
  return x;
}

std::vector<double> channel_or_nan(const SeriesFrame& f, std::string_view name) {
  std::vector<double> y(f.length(), std::numeric_limits<double>::quiet_NaN());
  if (!f.has_channel(name)) return y;
  for (std::size_t t = 0; t < f.length(); ++t) {
    if (!f.is_missing(name, t)) y[t] = f.at(name, t);
  }
  return y;
}

}  // namespace

std::string render_line_chart(const std::string& title, const std::string& y_label,
                              const std::vector<ChartSeries>& series) {
  double x0 = 0, x1 = 1, y0 = std::numeric_limits<double>::infinity(), y1 = -y0;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      x1 = std::max(x1, s.x[i]);
      if (std::isfinite(s.y[i])) {
        y0 = std::min(y0, s.y[i]);
        y1 = std::max(y1, s.y[i]);
      }
    }
  }
  if (!std::isfinite(y0)) y0 = 0, y1 = 1;
  if (y1 - y0 < 1e-9) y0 -= 0.5, y1 += 0.5;
  const double ys = nice_step(y1 - y0, 6);
  y0 = std::floor(y0 / ys) * ys;
  y1 = std::ceil(y1 / ys) * ys;
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  const auto px = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * pw; };
  const auto py = [&](double y) { return kTop + (y1 - y) / (y1 - y0) * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << fmt(kLeft) << "\" y=\"24\" font-size=\"15\">" << escape(title) << "</text>\n";
  for (double y = y0; y <= y1 + ys * 1e-6; y += ys) {
    o << "<line x1=\"" << fmt(kLeft) << "\" x2=\"" << fmt(kLeft + pw) << "\" y1=\"" << fmt(py(y)) << "\" y2=\""
      << fmt(py(y)) << "\" stroke=\"#ddd\"/>\n";
    o << "<text x=\"" << fmt(kLeft - 6) << "\" y=\"" << fmt(py(y) + 4) << "\" text-anchor=\"end\">" << fmt(y)
      << "</text>\n";
  }
  const double xs = x1 - x0 > 30 ? 6.0 : 3.0;
  for (double x = x0; x <= x1 + 1e-9; x += xs) {
    o << "<line x1=\"" << fmt(px(x)) << "\" x2=\"" << fmt(px(x)) << "\" y1=\"" << fmt(kTop) << "\" y2=\""
      << fmt(kTop + ph) << "\" stroke=\"#eee\"/>\n";
    o << "<text x=\"" << fmt(px(x)) << "\" y=\"" << fmt(kTop + ph + 16) << "\" text-anchor=\"middle\">" << fmt(x)
      << "</text>\n";
  }
  o << "<rect x=\"" << fmt(kLeft) << "\" y=\"" << fmt(kTop) << "\" width=\"" << fmt(pw) << "\" height=\"" << fmt(ph)
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  o << "<text x=\"" << fmt(kLeft + pw / 2) << "\" y=\"" << fmt(kHeight - 10)
    << "\" text-anchor=\"middle\">hours</text>\n";
  o << "<text transform=\"translate(18," << fmt(kTop + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
    << escape(y_label) << "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kPalette[s % std::size(kPalette)];
    std::string points;
    auto flush = [&] {
      if (!points.empty()) {
        o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"" << points << "\"/>\n";
      }
      points.clear();
    };
    for (std::size_t i = 0; i < series[s].x.size(); ++i) {
      if (!std::isfinite(series[s].y[i])) {
        flush();
        continue;
      }
      if (!points.empty()) points += ' ';
      points += fmt(px(series[s].x[i])) + "," + fmt(py(series[s].y[i]));
    }
    flush();
    const double ly = kTop + 10 + 18 * static_cast<double>(s);
    o << "<line x1=\"" << fmt(kLeft + pw + 10) << "\" x2=\"" << fmt(kLeft + pw + 30) << "\" y1=\"" << fmt(ly)
      << "\" y2=\"" << fmt(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << fmt(kLeft + pw + 36) << "\" y=\"" << fmt(ly + 4) << "\">" << escape(series[s].name)
      << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

void write_solver_stats(std::ostream& out, const ExperimentLog& log, bool include_timing) {
  out << "timestamp,ok,objective,energy,comfort,ramp,slack,nodes,qp_iterations";
  if (include_timing) out << ",wall_ms";
  out << '\n';
  for (const auto& s : log.solves) {
    out << format_iso8601(s.time) << ',' << (s.ok ? 1 : 0) << ',' << format_number(s.objective) << ','
        << format_number(s.terms.energy) << ',' << format_number(s.terms.comfort) << ','
        << format_number(s.terms.ramp) << ',' << format_number(s.terms.slack) << ',' << s.nodes << ','
        << s.qp_iterations;
    if (include_timing) out << ',' << format_number(s.wall_ms);
    out << '\n';
  }
}

std::vector<std::filesystem::path> emit_report(const std::vector<ExperimentLog>& logs,
                                               const std::vector<plant::MetricsReport>& metrics,
                                               const std::filesystem::path& out_dir, const ReportOptions& options) {
  if (logs.empty()) throw DataError("report needs at least one log");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw DataError("cannot create " + out_dir.string() + ": " + ec.message());

  std::vector<std::filesystem::path> written;
  std::vector<ChartSeries> temp, power, energy;
  for (const auto& log : logs) {
    const auto path = out_dir / (log.name + ".csv");
    store_frame(log.frame, path);
    written.push_back(path);
    if (!log.solves.empty()) {
      std::ostringstream s;
      write_solver_stats(s, log, options.include_timing);
      const auto sp = out_dir / (log.name + "_solves.csv");
      write_file(sp, s.str());
      written.push_back(sp);
    }
    const auto x = hours_of(log.frame);
    temp.push_back({log.name + " T_in", x, channel_or_nan(log.frame, channel::kRoomTemp)});
    const auto d = channel_or_nan(log.frame, channel::kPower);
    power.push_back({log.name, x, d});
    std::vector<double> acc(d.size());
    double sum = 0.0;
    for (std::size_t t = 0; t < d.size(); ++t) {
      if (std::isfinite(d[t])) sum += d[t] * log.frame.grid().step_hours();
      acc[t] = sum;
    }
    energy.push_back({log.name, x, acc});
  }
  if (logs.front().frame.has_channel(channel::kAmbientTemp)) {
    temp.push_back({"T_out", hours_of(logs.front().frame), channel_or_nan(logs.front().frame, channel::kAmbientTemp)});
  }

  std::ostringstream m;
  m << "name,peak_kw,energy_kwh,comfort_rmse,violation_degree_hours\n";
  for (const auto& r : metrics) {
    m << r.name << ',' << format_number(r.peak_kw) << ',' << format_number(r.energy_kwh) << ','
      << format_number(r.comfort_rmse) << ',' << format_number(r.violation_degree_hours) << '\n';
  }
  const std::pair<std::string, std::string> charts[] = {
      {"temperature.svg", render_line_chart("Temperature variation", "degC", temp)},
      {"power.svg", render_line_chart("Power consumption", "kW", power)},
      {"energy.svg", render_line_chart("Accumulated energy consumption", "kWh", energy)},
      {"metrics.csv", m.str()}};
  for (const auto& [name, body] : charts) {
    write_file(out_dir / name, body);
    written.push_back(out_dir / name);
  }
  return written;
}

}  // namespace hvacsr::io
