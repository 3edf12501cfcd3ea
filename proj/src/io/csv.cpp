#include "hvacsr/io/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "hvacsr/core/error.hpp"

namespace hvacsr::io {

namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    cells.push_back(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return cells;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

[[noreturn]] void fail(const std::string& source, std::size_t line, const std::string& msg) {
  throw DataError(source + ":" + std::to_string(line) + ": " + msg);
}

}  // namespace

SeriesFrame read_frame(std::istream& in, const std::string& source, Seconds fallback_step) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw DataError(source + ": empty file");
  ++line_no;
  const auto header = split(trim(line));
  if (header.empty() || trim(header[0]) != "timestamp") fail(source, 1, "header must start with 'timestamp'");
  std::vector<std::string> names;
  for (std::size_t i = 1; i < header.size(); ++i) {
    const auto name = std::string(trim(header[i]));
    if (name.empty()) fail(source, 1, "empty column name");
    for (const auto& n : names) {
      if (n == name) fail(source, 1, "duplicate column '" + name + "'");
    }
    names.push_back(name);
  }

  std::vector<Timestamp> stamps;
  std::vector<std::vector<double>> cols(names.size());
  std::vector<std::vector<bool>> masks(names.size());
  while (std::getline(in, line)) {
    ++line_no;
    const auto row = trim(line);
    if (row.empty()) continue;
    const auto cells = split(row);
    if (cells.size() != names.size() + 1) {
      fail(source, line_no, "expected " + std::to_string(names.size() + 1) + " cells, found " +
                                std::to_string(cells.size()));
    }
    Timestamp ts;
    try {
      ts = parse_iso8601(trim(cells[0]));
    } catch (const Error& e) {
      fail(source, line_no, e.what());
    }
    if (!stamps.empty()) {
      if (ts <= stamps.back()) fail(source, line_no, "non-monotone timestamp " + format_iso8601(ts));
      const auto step = stamps.size() >= 2 ? stamps[1] - stamps[0] : ts - stamps[0];
      if (ts != stamps[0] + step * static_cast<long>(stamps.size())) {
        fail(source, line_no, "off-grid timestamp " + format_iso8601(ts));
      }
    }
    stamps.push_back(ts);
    for (std::size_t c = 0; c < names.size(); ++c) {
      const auto cell = trim(cells[c + 1]);
      if (cell.empty()) {
        cols[c].push_back(std::numeric_limits<double>::quiet_NaN());
        masks[c].push_back(true);
        continue;
      }
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
        fail(source, line_no, "malformed number '" + std::string(cell) + "' in column " + names[c]);
      }
      cols[c].push_back(v);
      masks[c].push_back(false);
    }
  }
  if (stamps.empty()) throw DataError(source + ": no data rows");
  const Seconds step = stamps.size() >= 2 ? Seconds{stamps[1] - stamps[0]} : fallback_step;
  SeriesFrame frame(TimeGrid(stamps[0], step, stamps.size()));
  for (std::size_t c = 0; c < names.size(); ++c) {
    try {
      frame.set_channel(names[c], Eigen::Map<const Eigen::VectorXd>(cols[c].data(), static_cast<Eigen::Index>(cols[c].size())),
                        masks[c]);
    } catch (const Error& e) {
      throw DataError(source + ": column " + names[c] + ": " + e.what());
    }
  }
  return frame;
}

SeriesFrame load_frame(const std::filesystem::path& path, Seconds fallback_step) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return read_frame(in, path.string(), fallback_step);
}

std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void write_frame(std::ostream& out, const SeriesFrame& frame) {
  const auto& names = frame.channel_names();
  out << "timestamp";
  for (const auto& n : names) out << ',' << n;
  out << '\n';
  for (std::size_t t = 0; t < frame.length(); ++t) {
    out << format_iso8601(frame.grid().at(t));
    for (const auto& n : names) {
      out << ',';
      if (!frame.is_missing(n, t)) out << format_number(frame.at(n, t));
    }
    out << '\n';
  }
}

void store_frame(const SeriesFrame& frame, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  write_frame(out, frame);
  if (!out) throw DataError("write failed for " + path.string());
}

}  // namespace hvacsr::io
