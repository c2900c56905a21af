#include "aggdiff/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

namespace aggdiff {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path, std::vector<std::string> columns)
    : out_(path), columns_(std::move(columns)) {
  if (!out_) throw std::runtime_error("cannot open " + path + " for writing");
}

void CsvWriter::meta(const std::string& key, const std::string& value) {
  if (key.find('=') != std::string::npos || key.find('\n') != std::string::npos ||
      value.find('\n') != std::string::npos)
    throw std::invalid_argument("metadata must be a single line without '=' in the key");
  out_ << "# " << key << "=" << value << "\n";
  out_.flush();
}

void CsvWriter::ensure_header() {
  if (header_written_) return;
  for (std::size_t i = 0; i < columns_.size(); ++i) out_ << (i ? "," : "") << columns_[i];
  out_ << "\n";
  header_written_ = true;
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != columns_.size())
    throw std::invalid_argument("row has " + std::to_string(values.size()) + " values, header " +
                                std::to_string(columns_.size()));
  ensure_header();
  for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << format_double(values[i]);
  out_ << "\n";
  out_.flush();
  if (!out_) throw std::runtime_error("CSV write failed");
}

void write_csv(const TimeSeries& ts, const std::string& path) {
  CsvWriter w(path, ts.columns());
  for (const auto& [k, v] : ts.metadata()) w.meta(k, v);
  for (std::size_t i = 0; i < ts.rows(); ++i) w.row(ts.row(i));
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_cell(const std::string& cell, std::size_t line_no) {
  const char* begin = cell.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0')
    throw std::invalid_argument("line " + std::to_string(line_no) + ": '" + cell +
                                "' is not a number");
  return v;
}

}  // namespace

TimeSeries read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  std::size_t line_no = 0;
  TimeSeries ts;
  std::vector<std::pair<std::string, std::string>> meta;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      std::string key = line.substr(1, eq - 1);
      key.erase(0, key.find_first_not_of(' '));
      meta.emplace_back(key, line.substr(eq + 1));
      continue;
    }
    const auto cells = split(line);
    if (!have_header) {
      ts = TimeSeries(cells);
      have_header = true;
      continue;
    }
    if (cells.size() != ts.columns().size())
      throw std::invalid_argument(path + ":" + std::to_string(line_no) + ": expected " +
                                  std::to_string(ts.columns().size()) + " cells, found " +
                                  std::to_string(cells.size()));
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(parse_cell(c, line_no));
    ts.add_row(row);
  }
  if (!have_header) throw std::invalid_argument(path + ": no header line");
  for (const auto& [k, v] : meta) ts.set_meta(k, v);
  return ts;
}

void require_run_schema(const TimeSeries& ts) {
  std::vector<std::string> expected = base_columns();
  if (ts.columns().size() > expected.size())
    for (const auto& c : entropy_columns()) expected.push_back(c);
  if (ts.columns() != expected) {
    std::string got;
    for (const auto& c : ts.columns()) got += (got.empty() ? "" : ",") + c;
    throw std::invalid_argument("CSV header does not match the run schema: " + got);
  }
}

void write_checkpoint(const Field& u, double time, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  const Grid& g = *u.grid;
  out << "aggdiff-checkpoint 1\n"
      << "dim " << g.dim() << "\n"
      << "n " << g.n() << "\n"
      << "half_width " << format_double(g.half_width()) << "\n"
      << "time " << format_double(time) << "\n"
      << "end\n";
  out.write(reinterpret_cast<const char*>(u.values.data()),
            static_cast<std::streamsize>(u.values.size() * sizeof(double)));
  if (!out) throw std::runtime_error("checkpoint write failed");
}

std::pair<Field, double> read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  std::getline(in, line);
  if (line != "aggdiff-checkpoint 1") throw std::invalid_argument(path + ": not a checkpoint");
  int dim = 0, n = 0;
  double half_width = 0.0, time = 0.0;
  while (std::getline(in, line) && line != "end") {
    std::istringstream ls(line);
    std::string key, value;
    ls >> key >> value;
    if (key == "dim")
      dim = std::stoi(value);
    else if (key == "n")
      n = std::stoi(value);
    else if (key == "half_width")
      half_width = std::strtod(value.c_str(), nullptr);
    else if (key == "time")
      time = std::strtod(value.c_str(), nullptr);
    else
      throw std::invalid_argument(path + ": unknown header field '" + key + "'");
  }
  if (line != "end") throw std::invalid_argument(path + ": truncated header");
  Field u(make_grid(dim, n, half_width));
  in.read(reinterpret_cast<char*>(u.values.data()),
          static_cast<std::streamsize>(u.values.size() * sizeof(double)));
  if (in.gcount() != static_cast<std::streamsize>(u.values.size() * sizeof(double)))
    throw std::invalid_argument(path + ": payload shorter than the header promises");
  return {std::move(u), time};
}

}  // namespace aggdiff
