#include "rjlt/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "rjlt/errors.hpp"

namespace rjlt {

std::string format_double(double x) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string format_sig6(double x) {
  if (std::isnan(x)) return "NA";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::vector<std::string> split_csv_line(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    auto field = line.substr(start, pos == std::string_view::npos ? line.npos : pos - start);
    while (!field.empty() && (field.front() == ' ' || field.front() == '"')) field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '"')) field.remove_suffix(1);
    out.emplace_back(field);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

namespace {

double parse_number(const std::string& s, const std::string& file, std::size_t line) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end)
    throw DataError(file + ":" + std::to_string(line) + ": cannot parse number '" + s + "'");
  return v;
}

std::vector<std::vector<double>> read_numeric_csv(const std::string& path, std::size_t cols) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": empty file");
  std::vector<std::vector<double>> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv_line(line);
    if (fields.size() < cols)
      throw DataError(path + ":" + std::to_string(lineno) + ": expected " +
                      std::to_string(cols) + " columns");
    std::vector<double> row(cols);
    for (std::size_t c = 0; c < cols; ++c) row[c] = parse_number(fields[c], path, lineno);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

void write_paths_csv(std::ostream& os, const SamplePath& x, const SamplePath& y) {
  if (x.times != y.times) throw DataError("write_paths_csv: paths do not share a grid");
  os << "timestamp,x,y\n";
  for (std::size_t i = 0; i < x.size(); ++i)
    os << format_double(x.times[i]) << ',' << format_double(x.values[i]) << ','
       << format_double(y.values[i]) << '\n';
}

std::pair<SamplePath, SamplePath> read_paths_csv(const std::string& path) {
  const auto rows = read_numeric_csv(path, 3);
  SamplePath x, y;
  for (const auto& r : rows) {
    x.times.push_back(r[0]);
    y.times.push_back(r[0]);
    x.values.push_back(r[1]);
    y.values.push_back(r[2]);
  }
  x.validate();
  return {std::move(x), std::move(y)};
}

void write_series_csv(std::ostream& os, const SamplePath& s) {
  os << "timestamp,value\n";
  for (std::size_t i = 0; i < s.size(); ++i)
    os << format_double(s.times[i]) << ',' << format_double(s.values[i]) << '\n';
}

SamplePath read_series_csv(const std::string& path) {
  const auto rows = read_numeric_csv(path, 2);
  SamplePath s;
  for (const auto& r : rows) {
    s.times.push_back(r[0]);
    s.values.push_back(r[1]);
  }
  s.validate();
  return s;
}

void write_vol_csv(std::ostream& os, const VolPath& vol) {
  os << "timestamp,sigma_x,sigma_y\n";
  for (std::size_t i = 0; i < vol.size(); ++i)
    os << format_double(vol.times[i]) << ',' << format_double(vol.sigma_x[i]) << ','
       << format_double(vol.sigma_y[i]) << '\n';
}

}  // namespace rjlt
