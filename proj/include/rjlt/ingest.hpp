#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rjlt/deptest.hpp"

namespace rjlt {

enum class TimestampFormat { iso8601, fractional_day };

// One instrument's ticks.  Times are in days (ISO timestamps are converted to
// days since 1970-01-01); session[i] is the trading day of tick i.
// log_prices is the re-cumulated path of rescaled log returns, starting at
// log(prices[0]); only increments inside one session are meaningful.
struct TickSeries {
  std::string symbol;
  std::vector<double> times;
  std::vector<double> prices;
  std::vector<double> log_prices;
  std::vector<std::int64_t> session;
  TimestampFormat format = TimestampFormat::fractional_day;
  double rescale = 15.0;
  std::vector<std::string> diagnostics;  // skipped rows, "path:line: reason"

  std::size_t size() const { return times.size(); }
  // log_prices[i] - log_prices[i - 1]; NaN when i - 1 and i straddle sessions.
  double increment(std::size_t i) const;
};

// Header timestamp,price.  Malformed rows are skipped and reported in
// diagnostics; non-positive prices, decreasing times inside a session and
// files with no usable row throw DataError.
TickSeries ingest_csv(const std::string& path, double rescale_factor = 15.0);
TickSeries ingest_csv(std::istream& in, const std::string& name, double rescale_factor = 15.0);

// Writes timestamp,price (full precision, in the series' own time format).
void write_tick_csv(std::ostream& os, const TickSeries& s);

// Parses "YYYY-MM-DD[T| ]HH:MM[:SS[.fff]]" into days since 1970-01-01.
// Returns false when the text is not of that form.
bool parse_iso_timestamp(const std::string& text, double& days);

// Regular intraday grid: steps_per_day + 1 nodes from open to close, both as
// fractions of a day.
struct SessionGrid {
  double open = 9.5 / 24.0;
  double close = 16.0 / 24.0;
  int steps_per_day = 390;

  void validate() const;
};

// Previous-tick values of log_prices on each session's grid.  A node before
// the session's first tick takes that first tick.  Days without ticks are
// absent.
struct AlignedDays {
  std::vector<std::int64_t> days;
  std::vector<std::vector<double>> values;  // steps_per_day + 1 per day
};
AlignedDays align_previous_tick(const TickSeries& s, const SessionGrid& grid);

// Intraday increments of two aligned series over their common days, overnight
// moves excluded; dt = 1 / steps_per_day so that one session is one unit.
SyncIncrements common_day_increments(const AlignedDays& a, const AlignedDays& b);

struct PairwiseConfig {
  SessionGrid session;
  DepTestConfig test;
  int min_days = 5;
  std::uint64_t seed = 1;
  int workers = 1;
};

struct PairEntry {
  std::size_t i = 0;
  std::size_t j = 0;
  int n_days = 0;
  TestReport report;
};

struct PairwiseResult {
  std::vector<std::string> symbols;
  std::vector<PairEntry> entries;  // i < j, row-major
  std::vector<std::string> diagnostics;
};

// Runs the dependence test on every unordered pair.  Pair k uses stream k of
// the seed.  Pairs with fewer than min_days common sessions are skipped.
PairwiseResult pairwise_test_matrix(const std::vector<TickSeries>& series,
                                    const PairwiseConfig& cfg);

// Square layout with the symbols as header and first column; p-values above
// the diagonal, empty cells elsewhere (and for skipped pairs).
void write_pairwise_csv(std::ostream& os, const PairwiseResult& r);

// Writes a synchronous simulated path (nodes k / steps_per_day) as tick CSV
// with prices exp(value): day d's nodes are mapped onto [open, close] of
// calendar day d, the node shared by two days appearing in both.
void write_simulated_ticks(std::ostream& os, const SamplePath& path, int steps_per_day,
                           const SessionGrid& grid, double price_level = 100.0);

}  // namespace rjlt
