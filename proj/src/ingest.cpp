#include "rjlt/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>

#include "rjlt/errors.hpp"
#include "rjlt/harness.hpp"
#include "rjlt/io.hpp"

namespace rjlt {

double TickSeries::increment(std::size_t i) const {
  if (i == 0 || i >= size()) throw DataError("tick increment index out of range");
  if (session[i] != session[i - 1]) return std::numeric_limits<double>::quiet_NaN();
  return log_prices[i] - log_prices[i - 1];
}

namespace {

bool parse_int(std::string_view s, int& out) {
  if (s.empty()) return false;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

bool parse_double(std::string_view s, double& out) {
  if (s.empty()) return false;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size() && std::isfinite(out);
}

}  // namespace

bool parse_iso_timestamp(const std::string& text, double& days) {
  // YYYY-MM-DD is fixed width; the time part is optional.
  if (text.size() < 10 || text[4] != '-' || text[7] != '-') return false;
  int y = 0, mo = 0, d = 0;
  if (!parse_int(std::string_view(text).substr(0, 4), y) ||
      !parse_int(std::string_view(text).substr(5, 2), mo) ||
      !parse_int(std::string_view(text).substr(8, 2), d))
    return false;
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(mo)},
                                        std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return false;
  double secs = 0.0;
  if (text.size() > 10) {
    if (text[10] != 'T' && text[10] != ' ') return false;
    std::string_view rest = std::string_view(text).substr(11);
    if (!rest.empty() && rest.back() == 'Z') rest.remove_suffix(1);
    int hh = 0, mm = 0;
    double ss = 0.0;
    if (rest.size() < 5 || rest[2] != ':') return false;
    if (!parse_int(rest.substr(0, 2), hh) || !parse_int(rest.substr(3, 2), mm)) return false;
    if (rest.size() > 5) {
      if (rest[5] != ':' || !parse_double(rest.substr(6), ss)) return false;
    }
    if (hh < 0 || hh > 23 || mm < 0 || mm > 59 || ss < 0.0 || ss >= 61.0) return false;
    secs = hh * 3600.0 + mm * 60.0 + ss;
  }
  days = static_cast<double>(std::chrono::sys_days(ymd).time_since_epoch().count()) + secs / 86400.0;
  return true;
}

TickSeries ingest_csv(std::istream& in, const std::string& name, double rescale_factor) {
  if (!(rescale_factor > 0.0)) throw ConfigError("rescale factor must be > 0");
  TickSeries s;
  s.symbol = std::filesystem::path(name).stem().string();
  s.rescale = rescale_factor;

  std::string line;
  if (!std::getline(in, line)) throw DataError(name + ": empty file");
  {
    auto head = split_csv_line(line);
    for (auto& h : head)
      std::transform(h.begin(), h.end(), h.begin(), [](unsigned char c) { return std::tolower(c); });
    if (head.size() < 2 || head[0] != "timestamp" || head[1] != "price")
      throw DataError(name + ":1: expected header 'timestamp,price'");
  }

  bool detected = false;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto where = name + ":" + std::to_string(lineno) + ": ";
    const auto f = split_csv_line(line);
    if (f.size() != 2) {
      s.diagnostics.push_back(where + "expected 2 fields, got " + std::to_string(f.size()));
      continue;
    }
    if (!detected) {
      double tmp = 0.0;
      if (parse_iso_timestamp(f[0], tmp)) s.format = TimestampFormat::iso8601;
      else s.format = TimestampFormat::fractional_day;
      detected = true;
    }
    double t = 0.0;
    const bool t_ok = s.format == TimestampFormat::iso8601 ? parse_iso_timestamp(f[0], t)
                                                           : parse_double(f[0], t);
    if (!t_ok) {
      s.diagnostics.push_back(where + "unparseable timestamp '" + f[0] + "'");
      continue;
    }
    double p = 0.0;
    if (!parse_double(f[1], p)) {
      s.diagnostics.push_back(where + "unparseable price '" + f[1] + "'");
      continue;
    }
    if (!(p > 0.0)) throw DataError(where + "non-positive price " + f[1]);
    if (!s.times.empty() && t < s.times.back())
      throw DataError(where + "timestamp goes backwards");
    s.times.push_back(t);
    s.prices.push_back(p);
    s.session.push_back(static_cast<std::int64_t>(std::floor(t)));
  }
  if (s.times.empty()) throw DataError(name + ": no usable rows");

  s.log_prices.resize(s.size());
  s.log_prices[0] = std::log(s.prices[0]);
  for (std::size_t i = 1; i < s.size(); ++i)
    s.log_prices[i] =
        s.log_prices[i - 1] + rescale_factor * (std::log(s.prices[i]) - std::log(s.prices[i - 1]));
  return s;
}

TickSeries ingest_csv(const std::string& path, double rescale_factor) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return ingest_csv(in, path, rescale_factor);
}

namespace {

std::string format_iso(double days) {
  const auto whole = static_cast<std::int64_t>(std::floor(days));
  double secs = (days - static_cast<double>(whole)) * 86400.0;
  secs = std::round(secs * 1e3) / 1e3;
  const std::chrono::year_month_day ymd{std::chrono::sys_days{std::chrono::days{whole}}};
  const int hh = static_cast<int>(secs / 3600.0);
  const int mm = static_cast<int>((secs - hh * 3600.0) / 60.0);
  const double ss = secs - hh * 3600.0 - mm * 60.0;
  char buf[48];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%06.3f", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), hh, mm, ss);
  return buf;
}

}  // namespace

void write_tick_csv(std::ostream& os, const TickSeries& s) {
  os << "timestamp,price\n";
  for (std::size_t i = 0; i < s.size(); ++i) {
    os << (s.format == TimestampFormat::iso8601 ? format_iso(s.times[i]) : format_double(s.times[i]))
       << ',' << format_double(s.prices[i]) << '\n';
  }
}

void SessionGrid::validate() const {
  if (!(open >= 0.0 && close > open && close < 1.0))
    throw ConfigError("session grid: need 0 <= open < close < 1 (fractions of a day)");
  if (steps_per_day < 2) throw ConfigError("session grid: steps_per_day must be >= 2");
}

AlignedDays align_previous_tick(const TickSeries& s, const SessionGrid& grid) {
  grid.validate();
  AlignedDays out;
  const double step = (grid.close - grid.open) / grid.steps_per_day;
  std::size_t i = 0;
  while (i < s.size()) {
    const auto day = s.session[i];
    std::size_t end = i;
    while (end < s.size() && s.session[end] == day) ++end;
    std::vector<double> vals(static_cast<std::size_t>(grid.steps_per_day) + 1);
    std::size_t j = i;
    for (int k = 0; k <= grid.steps_per_day; ++k) {
      const double node = static_cast<double>(day) + grid.open + k * step;
      while (j + 1 < end && s.times[j + 1] <= node + 1e-9) ++j;
      vals[k] = s.log_prices[j];
    }
    out.days.push_back(day);
    out.values.push_back(std::move(vals));
    i = end;
  }
  return out;
}

SyncIncrements common_day_increments(const AlignedDays& a, const AlignedDays& b) {
  SyncIncrements inc;
  std::size_t m = 0;
  std::size_t ia = 0, ib = 0;
  while (ia < a.days.size() && ib < b.days.size()) {
    if (a.days[ia] < b.days[ib]) { ++ia; continue; }
    if (b.days[ib] < a.days[ia]) { ++ib; continue; }
    const auto& va = a.values[ia];
    const auto& vb = b.values[ib];
    if (va.size() != vb.size() || va.size() < 2) throw DataError("aligned days differ in length");
    m = va.size() - 1;
    for (std::size_t k = 1; k < va.size(); ++k) {
      inc.dx.push_back(va[k] - va[k - 1]);
      inc.dy.push_back(vb[k] - vb[k - 1]);
    }
    ++ia;
    ++ib;
  }
  inc.dt = m ? 1.0 / static_cast<double>(m) : 0.0;
  inc.t_start = 0.0;
  return inc;
}

PairwiseResult pairwise_test_matrix(const std::vector<TickSeries>& series,
                                    const PairwiseConfig& cfg) {
  if (series.size() < 2) throw ConfigError("pairwise test needs at least 2 series");
  cfg.session.validate();
  if (cfg.min_days < 2) throw ConfigError("min_days must be >= 2");

  std::vector<AlignedDays> aligned;
  aligned.reserve(series.size());
  for (const auto& s : series) aligned.push_back(align_previous_tick(s, cfg.session));

  PairwiseResult res;
  for (const auto& s : series) res.symbols.push_back(s.symbol);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < series.size(); ++i)
    for (std::size_t j = i + 1; j < series.size(); ++j) pairs.emplace_back(i, j);

  DepTestConfig test = cfg.test;
  test.block_options.cross_day_pairs = false;
  std::vector<PairEntry> slots(pairs.size());
  std::vector<std::string> notes(pairs.size());
  std::vector<char> ok(pairs.size(), 0);
  parallel_for(pairs.size(), cfg.workers, [&](std::size_t k) {
    const auto [i, j] = pairs[k];
    const SyncIncrements inc = common_day_increments(aligned[i], aligned[j]);
    const int days = inc.dt > 0.0 ? static_cast<int>(std::lround(inc.n() * inc.dt)) : 0;
    const int need = std::max(cfg.min_days, test.bandwidth.value_or(0) + 1);
    if (days < need) {
      notes[k] = series[i].symbol + "/" + series[j].symbol + ": " + std::to_string(days) +
                 " common days, need " + std::to_string(need) + "; skipped";
      return;
    }
    slots[k] = {i, j, days, run_test(inc, test, RngStream(cfg.seed, k))};
    ok[k] = 1;
  });
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    if (ok[k]) res.entries.push_back(std::move(slots[k]));
    else res.diagnostics.push_back(notes[k]);
  }
  return res;
}

void write_pairwise_csv(std::ostream& os, const PairwiseResult& r) {
  const std::size_t k = r.symbols.size();
  std::vector<std::string> cell(k * k);
  for (const auto& e : r.entries) cell[e.i * k + e.j] = format_sig6(e.report.p_value);
  os << "symbol";
  for (const auto& s : r.symbols) os << ',' << s;
  os << '\n';
  for (std::size_t i = 0; i < k; ++i) {
    os << r.symbols[i];
    for (std::size_t j = 0; j < k; ++j) os << ',' << cell[i * k + j];
    os << '\n';
  }
}

void write_simulated_ticks(std::ostream& os, const SamplePath& path, int steps_per_day,
                           const SessionGrid& grid, double price_level) {
  grid.validate();
  if (steps_per_day < 1) throw ConfigError("steps_per_day must be >= 1");
  if (!(price_level > 0.0)) throw ConfigError("price level must be > 0");
  const std::size_t m = static_cast<std::size_t>(steps_per_day);
  if (path.size() < m + 1 || (path.size() - 1) % m != 0)
    throw DataError("simulated path does not cover whole days");
  const std::size_t n_days = (path.size() - 1) / m;
  const double span = grid.close - grid.open;
  os << "timestamp,price\n";
  for (std::size_t d = 0; d < n_days; ++d) {
    for (std::size_t k = 0; k <= m; ++k) {
      const double t = static_cast<double>(d) + grid.open +
                       span * static_cast<double>(k) / static_cast<double>(m);
      os << format_double(t) << ',' << format_double(price_level * std::exp(path.values[d * m + k]))
         << '\n';
    }
  }
}

}  // namespace rjlt
