#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "hvacsr/core/series_frame.hpp"

namespace hvacsr::io {

/// Header `timestamp,<channel>...`; ISO-8601 UTC timestamps on a uniform grid; empty cell = masked.
/// A single-row file gets `fallback_step`.
SeriesFrame read_frame(std::istream& in, const std::string& source = "<stream>", Seconds fallback_step = kDefaultStep);
SeriesFrame load_frame(const std::filesystem::path& path, Seconds fallback_step = kDefaultStep);

/// Shortest round-trip formatting, so store -> load reproduces every value bit for bit.
void write_frame(std::ostream& out, const SeriesFrame& frame);
void store_frame(const SeriesFrame& frame, const std::filesystem::path& path);

std::string format_number(double v);

}  // namespace hvacsr::io
