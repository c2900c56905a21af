#pragma once

#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "aggdiff/diagnostics.hpp"
#include "aggdiff/grid.hpp"

namespace aggdiff {

/// Streaming CSV writer: "# key=value" metadata lines, one header line, then
/// rows printed with %.17g. Every row is flushed so a failed run leaves the
/// rows written so far.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, std::vector<std::string> columns);

  void meta(const std::string& key, const std::string& value);
  void row(const std::vector<double>& values);

 private:
  void ensure_header();

  std::ofstream out_;
  std::vector<std::string> columns_;
  bool header_written_ = false;
};

void write_csv(const TimeSeries& ts, const std::string& path);
/// Reads metadata from '#' lines anywhere in the file; "nan" and "inf" parse.
TimeSeries read_csv(const std::string& path);

/// Throws unless the columns are the base layout, optionally followed by the
/// entropy layout.
void require_run_schema(const TimeSeries& ts);

/// Text header (dim, n, half_width, time) followed by the raw doubles.
void write_checkpoint(const Field& u, double time, const std::string& path);
std::pair<Field, double> read_checkpoint(const std::string& path);

std::string format_double(double v);

}  // namespace aggdiff
