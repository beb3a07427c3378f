#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "rjlt/errors.hpp"
#include "rjlt/ingest.hpp"
#include "rjlt/model_config.hpp"
#include "rjlt/simkit.hpp"

using namespace rjlt;

namespace {

TickSeries from_text(const std::string& text, double rescale = 15.0, const std::string& name = "t") {
  std::istringstream in(text);
  return ingest_csv(in, name, rescale);
}

// One ex4 draw written as tick CSV and read back without rescaling.
TickSeries simulated_series(const std::string& symbol, double rho_prime, bool take_y, int days,
                            int per_day, RngStream rng) {
  auto m = preset_model("ex4").model;
  std::get<Ar1VolSpec>(m.vol).rho_prime = rho_prime;
  const auto times = SimGrid::make(days, days * per_day).times();
  auto rv = rng.child(1);
  auto rp = rng.child(2);
  const auto vol = simulate_vol(m.vol, times, rv);
  auto [x, y] = simulate_prices(m, vol, rp);
  std::stringstream io;
  write_simulated_ticks(io, take_y ? y : x, per_day, SessionGrid{9.5 / 24, 16.0 / 24, per_day});
  return ingest_csv(io, symbol, 1.0);
}

}  // namespace

TEST_CASE("rescaled increments") {
  const std::string text = "timestamp,price\n0.40,100\n0.41,101\n";
  const auto s = from_text(text);
  REQUIRE(s.size() == 2);
  CHECK(s.increment(1) == doctest::Approx(15.0 * std::log(1.01)).epsilon(1e-14));
  CHECK(s.increment(1) == doctest::Approx(0.14926).epsilon(1e-4));
  CHECK(s.log_prices[0] == doctest::Approx(std::log(100.0)));
  const auto raw = from_text(text, 1.0);
  CHECK(raw.increment(1) == doctest::Approx(std::log(1.01)).epsilon(1e-14));
  CHECK(raw.format == TimestampFormat::fractional_day);
}

TEST_CASE("sessions split at day boundaries") {
  const auto s = from_text("timestamp,price\n0.5,100\n0.6,101\n1.45,99\n1.5,98\n", 1.0);
  CHECK(s.session == std::vector<std::int64_t>{0, 0, 1, 1});
  CHECK(std::isnan(s.increment(2)));
  CHECK(s.increment(3) == doctest::Approx(std::log(98.0 / 99.0)));
}

TEST_CASE("iso timestamps") {
  double d = 0.0;
  REQUIRE(parse_iso_timestamp("1970-01-02T12:00:00", d));
  CHECK(d == doctest::Approx(1.5));
  REQUIRE(parse_iso_timestamp("2019-10-01 09:31", d));
  CHECK(d - std::floor(d) == doctest::Approx((9 * 60 + 31) / 1440.0).epsilon(1e-12));
  REQUIRE(parse_iso_timestamp("2019-10-01T09:31:30.5Z", d));
  CHECK(d - std::floor(d) == doctest::Approx((9 * 3600 + 31 * 60 + 30.5) / 86400.0).epsilon(1e-12));
  CHECK_FALSE(parse_iso_timestamp("2019-13-01T09:31", d));
  CHECK_FALSE(parse_iso_timestamp("09:31", d));
  CHECK_FALSE(parse_iso_timestamp("0.5", d));

  const auto s = from_text("timestamp,price\n2019-10-01T09:31:00,50\n2019-10-01T09:32:00,51\n");
  CHECK(s.format == TimestampFormat::iso8601);
  CHECK(s.session[0] == s.session[1]);
}

TEST_CASE("malformed rows are reported") {
  std::string text = "timestamp,price\n";
  for (int i = 0; i < 1000; ++i) {
    const double t = 0.4 + i * 1e-4;
    if (i == 500)
      text += "garbage row\n";
    else
      text += std::to_string(t) + "," + std::to_string(100.0 + 0.01 * i) + "\n";
  }
  const auto s = from_text(text, 15.0, "feed.csv");
  CHECK(s.size() == 999);
  REQUIRE(s.diagnostics.size() == 1);
  // header is line 1, row i sits on line i + 2
  CHECK(s.diagnostics[0].rfind("feed.csv:502:", 0) == 0);
}

TEST_CASE("hard errors") {
  CHECK_THROWS_AS(from_text("timestamp,price\n0.4,100\n0.5,-1\n"), DataError);
  CHECK_THROWS_AS(from_text("timestamp,price\n0.4,100\n0.5,0\n"), DataError);
  CHECK_THROWS_AS(from_text("timestamp,price\n0.5,100\n0.4,100\n"), DataError);
  CHECK_THROWS_AS(from_text("time,px\n0.5,100\n"), DataError);
  CHECK_THROWS_AS(from_text("timestamp,price\nbad,row\n"), DataError);
  CHECK_THROWS_AS(ingest_csv("/nonexistent/file.csv"), DataError);
}

TEST_CASE("round trip") {
  RngStream rng(1);
  std::string text = "timestamp,price\n";
  double p = 50.0, t = 0.4;
  for (int i = 0; i < 300; ++i) {
    p *= std::exp(0.001 * rng.normal());
    t += 0.0007 + 0.0001 * rng.uniform_open();
    char buf[80];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", t, p);
    text += buf;
  }
  const auto a = from_text(text, 1.0);
  std::stringstream io;
  write_tick_csv(io, a);
  const auto b = ingest_csv(io, "again", 1.0);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 1; i < a.size(); ++i) {
    if (std::isnan(a.increment(i))) continue;
    CHECK(std::abs(b.increment(i) - a.increment(i)) <= 1e-12 * std::abs(a.increment(i)) + 1e-15);
  }
}

TEST_CASE("previous-tick alignment") {
  const SessionGrid g{0.4, 0.6, 4};  // nodes 0.40 0.45 0.50 0.55 0.60
  const auto s = from_text("timestamp,price\n0.42,100\n0.45,110\n0.52,120\n1.41,90\n", 1.0);
  const auto a = align_previous_tick(s, g);
  REQUIRE(a.days == std::vector<std::int64_t>{0, 1});
  const double l100 = std::log(100.0), l110 = std::log(110.0), l120 = std::log(120.0);
  const std::vector<double> want{l100, l110, l110, l120, l120};
  for (int k = 0; k < 5; ++k) CHECK(a.values[0][k] == doctest::Approx(want[k]).epsilon(1e-14));
  for (int k = 0; k < 5; ++k) CHECK(a.values[1][k] == doctest::Approx(s.log_prices[3]));

  const auto b = from_text("timestamp,price\n0.40,10\n0.60,11\n1.40,12\n1.60,13\n2.4,5\n2.6,6\n", 1.0);
  const auto inc = common_day_increments(a, align_previous_tick(b, g));
  CHECK(inc.n() == 8);
  CHECK(inc.dt == doctest::Approx(0.25));
  CHECK(inc.dx[0] == doctest::Approx(l110 - l100));
  CHECK(inc.dx[1] == 0.0);
  CHECK(inc.dy[3] == doctest::Approx(std::log(11.0 / 10.0)));
  CHECK(inc.dy[4] == 0.0);  // no overnight move
  CHECK_THROWS_AS((SessionGrid{0.6, 0.4, 10}.validate()), ConfigError);
}

TEST_CASE("simulated ticks map back onto the grid") {
  auto m = preset_model("ex4").model;
  const auto times = SimGrid::make(3, 3 * 20).times();
  RngStream rng(2);
  auto rv = rng.child(1);
  const auto vol = simulate_vol(m.vol, times, rv);
  auto rp = rng.child(2);
  auto [x, y] = simulate_prices(m, vol, rp);
  std::stringstream io;
  const SessionGrid g{9.5 / 24, 16.0 / 24, 20};
  write_simulated_ticks(io, x, 20, g);
  const auto s = ingest_csv(io, "x", 1.0);
  const auto a = align_previous_tick(s, g);
  REQUIRE(a.days.size() == 3);
  for (int d = 0; d < 3; ++d)
    for (int k = 0; k <= 20; ++k)
      CHECK(a.values[d][k] - a.values[d][0] ==
            doctest::Approx(x.values[d * 20 + k] - x.values[d * 20]).epsilon(1e-9));
}

TEST_CASE("pairwise layout and self dependence") {
  std::vector<TickSeries> series;
  for (int k = 0; k < 4; ++k)
    series.push_back(simulated_series("S" + std::to_string(k), 0.0, false, 22, 78, RngStream(3, k)));
  series.push_back(series[0]);
  series.back().symbol = "S0copy";
  PairwiseConfig cfg;
  cfg.session.steps_per_day = 78;
  cfg.test.mc_draws = 20000;
  const auto r = pairwise_test_matrix(series, cfg);
  CHECK(r.symbols.size() == 5);
  REQUIRE(r.entries.size() == 10);
  for (const auto& e : r.entries) CHECK(e.i < e.j);
  const auto& self = r.entries[3];
  REQUIRE((self.i == 0 && self.j == 4));
  CHECK(self.report.p_value < 0.05);

  std::ostringstream os;
  write_pairwise_csv(os, r);
  std::istringstream lines(os.str());
  std::string line;
  std::getline(lines, line);
  CHECK(line == "symbol,S0,S1,S2,S3,S0copy");
  int rows = 0;
  while (std::getline(lines, line)) ++rows;
  CHECK(rows == 5);

  cfg.min_days = 30;
  const auto skipped = pairwise_test_matrix(series, cfg);
  CHECK(skipped.entries.empty());
  CHECK(skipped.diagnostics.size() == 10);
  CHECK_THROWS_AS(pairwise_test_matrix({series[0]}, cfg), ConfigError);
}

TEST_CASE("pairwise size under independence") {
  // 100 pairs of independently simulated series through the full CSV path.
  const int pairs = 100;
  std::vector<TickSeries> series;
  for (int k = 0; k < 2 * pairs; ++k)
    series.push_back(
        simulated_series("P" + std::to_string(k), 0.0, false, 22, 390, RngStream(4, k)));
  PairwiseConfig cfg;
  cfg.test.mc_draws = 20000;
  int rejected = 0;
  for (int k = 0; k < pairs; ++k) {
    cfg.seed = static_cast<std::uint64_t>(k + 1);
    const auto r = pairwise_test_matrix({series[2 * k], series[2 * k + 1]}, cfg);
    REQUIRE(r.entries.size() == 1);
    rejected += r.entries[0].report.p_value < 0.05;
  }
  const double rate = rejected / static_cast<double>(pairs);
  MESSAGE("fraction of p < 0.05: " << rate);
  CHECK(rate >= 0.02);
  CHECK(rate <= 0.10);
}
