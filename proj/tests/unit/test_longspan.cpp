#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "rjlt/errors.hpp"
#include "rjlt/longspan.hpp"
#include "rjlt/model_config.hpp"
#include "rjlt/simkit.hpp"

using namespace rjlt;

namespace {

std::pair<SamplePath, SamplePath> simulate_model(const BivariateModelSpec& m, int days, int per_day,
                                                 RngStream& rng) {
  const auto times = SimGrid::make(days, days * per_day).times();
  auto rv = rng.child(1);
  auto rp = rng.child(2);
  const auto vol = simulate_vol(m.vol, times, rv);
  return simulate_prices(m, vol, rp);
}

BivariateModelSpec ex4(double rho_prime) {
  auto m = preset_model("ex4").model;
  std::get<Ar1VolSpec>(m.vol).rho_prime = rho_prime;
  return m;
}

SyncIncrements constant_increments(int days, int per_day, double rho, RngStream& rng) {
  VolPath v;
  v.times = SimGrid::make(days, days * per_day).times();
  v.sigma_x.assign(v.times.size(), 1.0);
  v.sigma_y.assign(v.times.size(), 1.0);
  BivariateModelSpec m;
  m.rho = rho;
  auto [x, y] = simulate_prices(m, v, rng);
  return make_sync_increments(x, y);
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double se_of(const std::vector<double>& v) {
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / (v.size() - 1.0) / static_cast<double>(v.size()));
}

double var_of(const std::vector<double>& v) {
  const double se = se_of(v);
  return se * se * static_cast<double>(v.size());
}

}  // namespace

TEST_CASE("zero-frequency blocks count increments") {
  RngStream rng(1);
  const auto inc = constant_increments(4, 50, 0.5, rng);
  const std::vector<LaplacePoint> grid{{0, 0}, {0.5, 0.5}};
  const auto b = daily_blocks(inc, grid);
  CHECK(b.n_days == 4);
  CHECK(b.steps_per_day == 50);
  for (int d = 0; d < 4; ++d) {
    CHECK(b.x(d, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(b.y(d, 0) == doctest::Approx(1.0).epsilon(1e-12));
    // the global last increment has no successor
    CHECK(b.xy(d, 0) == doctest::Approx(d == 3 ? 49.0 / 50 : 1.0).epsilon(1e-12));
  }
  const auto nb = daily_blocks(inc, grid, BlockOptions{false});
  for (int d = 0; d < 4; ++d) CHECK(nb.xy(d, 0) == doctest::Approx(49.0 / 50).epsilon(1e-12));
  for (int d = 0; d < 4; ++d) {
    CHECK(std::abs(b.xy(d, 1)) <= 1.0 + inc.dt);
    CHECK(std::abs(b.x(d, 1)) <= 1.0 + inc.dt);
  }
}

TEST_CASE("blocks by hand") {
  // Two days, three increments each.
  const std::vector<double> dx{0.1, -0.2, 0.05, 0.3, -0.1, 0.2};
  const std::vector<double> dy{0.0, 0.15, -0.1, 0.05, 0.2, -0.3};
  const SyncIncrements inc{dx, dy, 1.0 / 3, 0.0};
  const LaplacePoint p{0.4, 0.9};
  const std::vector<LaplacePoint> grid{p};
  const auto b = daily_blocks(inc, grid);
  const double s = std::sqrt(1.0 / 3);
  auto cxy = [&](int i) {
    return std::cos((std::sqrt(2 * p.u) * dx[i] + std::sqrt(2 * p.v) * dy[i + 1]) / s) / 3;
  };
  CHECK(b.xy(0, 0) == doctest::Approx(cxy(0) + cxy(1) + cxy(2)).epsilon(1e-13));
  CHECK(b.xy(1, 0) == doctest::Approx(cxy(3) + cxy(4)).epsilon(1e-13));
  double zx = 0, zy = 0;
  for (int i = 3; i < 6; ++i) {
    zx += std::cos(std::sqrt(2 * p.u) * dx[i] / s) / 3;
    zy += std::cos(std::sqrt(2 * p.v) * dy[i] / s) / 3;
  }
  CHECK(b.x(1, 0) == doctest::Approx(zx).epsilon(1e-13));
  CHECK(b.y(1, 0) == doctest::Approx(zy).epsilon(1e-13));

  const SyncIncrements partial{std::vector<double>(5, 0.0), std::vector<double>(5, 0.0), 1.0 / 3, 0.0};
  CHECK_THROWS_AS(daily_blocks(partial, grid), DataError);
}

TEST_CASE("constant volatility laplace oracle") {
  RngStream rng(2);
  const auto inc = constant_increments(50, 390, 0.5, rng);
  const std::vector<LaplacePoint> grid{{0.5, 0.5}};
  const auto b = daily_blocks(inc, grid);
  CHECK(std::abs(mean_of(b.z_x) - std::exp(-0.5)) < 3.0 * se_of(b.z_x));
  const auto g = gamma_vec(b, 0);
  CHECK(g[0] == 1.0);
  CHECK(std::abs(g[1] + std::exp(-0.5)) < 3.0 * se_of(b.z_y));
  CHECK(std::abs(g[2] + std::exp(-0.5)) < 3.0 * se_of(b.z_x));
}

TEST_CASE("independent volatilities leave the block products centered") {
  RngStream rng(3);
  auto [x, y] = simulate_model(ex4(0.0), 100, 390, rng);
  const std::vector<LaplacePoint> grid{{0.5, 0.5}};
  const auto b = daily_blocks(x, y, grid);
  std::vector<double> d;
  for (int t = 0; t < b.n_days; ++t) d.push_back(b.xy(t, 0) - b.x(t, 0) * b.y(t, 0));
  CHECK(std::abs(mean_of(d)) < 3.0 * se_of(d));
}

TEST_CASE("kernel weights") {
  CHECK(kernel_weight({Kernel::bartlett, 4}, 0) == 1.0);
  CHECK(kernel_weight({Kernel::bartlett, 1}, 1) == 0.5);
  CHECK(kernel_weight({Kernel::parzen, 3}, 2) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(kernel_weight({Kernel::parzen, 3}, 0) == 1.0);
  // parzen upper branch: q = 3/4
  CHECK(kernel_weight({Kernel::parzen, 3}, 3) == doctest::Approx(2 * 0.25 * 0.25 * 0.25));
  CHECK_THROWS_AS(kernel_weight({Kernel::bartlett, 2}, 3), ConfigError);
  for (auto k : {Kernel::bartlett, Kernel::parzen}) {
    double prev = 1.0;
    for (int l = 0; l <= 10; ++l) {
      const double w = kernel_weight({k, 10}, l);
      CHECK(w >= 0.0);
      CHECK(w <= prev);
      prev = w;
    }
  }
  CHECK(parse_kernel("parzen") == Kernel::parzen);
  CHECK(to_string(Kernel::bartlett) == "bartlett");
  CHECK_THROWS_AS(parse_kernel("qs"), ConfigError);
  CHECK(HacConfig::default_bandwidth(22) == 3);
  CHECK(HacConfig::default_bandwidth(66) == 4);
  CHECK(HacConfig::default_bandwidth(1000) == 12);
}

TEST_CASE("hac long-run variance oracles") {
  SUBCASE("iid") {
    RngStream rng(4);
    Eigen::MatrixXd s(10000, 1);
    for (int t = 0; t < 10000; ++t) s(t, 0) = rng.normal();
    const auto v = hac_matrix(s, {Kernel::bartlett, 3});
    CHECK(std::abs(v(0, 0) - 1.0) < 0.1);
  }
  SUBCASE("ar1") {
    // variance 1, coefficient 0.5: sum of autocovariances 1 + 2 * 0.5 / 0.5 = 3
    RngStream rng(5);
    const int T = 100000;
    Eigen::MatrixXd s(T, 1);
    double a = rng.normal();
    for (int t = 0; t < T; ++t) {
      a = 0.5 * a + std::sqrt(0.75) * rng.normal();
      s(t, 0) = a;
    }
    for (auto k : {Kernel::bartlett, Kernel::parzen}) {
      const auto v = hac_matrix(s, {k, 50});
      CHECK(std::abs(v(0, 0) / 3.0 - 1.0) < 0.1);
    }
  }
  SUBCASE("zero bandwidth is the demeaned lag-zero covariance") {
    Eigen::MatrixXd s(4, 2);
    s << 1, 2, 3, 1, 2, 0, 6, 5;
    const auto v = hac_matrix(s, {Kernel::bartlett, 0});
    const Eigen::MatrixXd b = s.rowwise() - s.colwise().mean();
    const Eigen::MatrixXd c0 = b.transpose() * b / 4.0;
    CHECK((v - c0).norm() < 1e-14);
  }
  Eigen::MatrixXd s(3, 1);
  s << 1, 2, 3;
  CHECK_THROWS_AS(hac_matrix(s, {Kernel::bartlett, 3}), ConfigError);
}

TEST_CASE("hac on injected blocks") {
  const int T = 300;
  std::vector<LaplacePoint> grid{{0.1, 0.2}, {0.3, 0.4}};
  RngStream rng(6);
  std::vector<double> xy, x, y;
  for (int t = 0; t < T; ++t)
    for (int g = 0; g < 2; ++g) {
      xy.push_back(rng.normal());
      x.push_back(rng.normal());
      y.push_back(rng.normal());
    }
  const auto b = BlockStats::from_values(grid, T, xy, x, y);
  const HacConfig cfg{Kernel::bartlett, 4};
  const auto pq = hac_cov(b, cfg, 0, 1);
  const auto qp = hac_cov(b, cfg, 1, 0);
  CHECK((pq - qp.transpose()).norm() < 1e-14);
  const auto pp = hac_cov(b, cfg, 0, 0);
  CHECK((pp - pp.transpose()).norm() < 1e-14);
  CHECK_THROWS_AS(hac_cov(b, {Kernel::bartlett, T}, 0, 0), ConfigError);

  // lag-zero entry by hand
  const auto p0 = hac_cov(b, {Kernel::bartlett, 0}, 0, 1);
  double mx = 0, my = 0;
  for (int t = 0; t < T; ++t) {
    mx += b.xy(t, 0) / T;
    my += b.x(t, 1) / T;
  }
  double c = 0;
  for (int t = 0; t < T; ++t) c += (b.xy(t, 0) - mx) * (b.x(t, 1) - my) / T;
  CHECK(p0(0, 1) == doctest::Approx(c).epsilon(1e-12));

  CHECK_THROWS_AS(BlockStats::from_values(grid, T, xy, x, std::vector<double>(3)), DataError);
}

TEST_CASE("hac expectation equals the marginal covariance on iid blocks") {
  // MC over independent replications with a fixed bandwidth.
  const int T = 200, reps = 400;
  std::vector<double> v11;
  for (int r = 0; r < reps; ++r) {
    RngStream rng(7, r);
    Eigen::MatrixXd s(T, 1);
    for (int t = 0; t < T; ++t) s(t, 0) = 2.0 * rng.normal();
    v11.push_back(hac_matrix(s, {Kernel::parzen, 2})(0, 0));
  }
  // demeaning costs O(L / T)
  CHECK(std::abs(mean_of(v11) - 4.0) < 3.0 * se_of(v11) + 4.0 * 3.0 / T);
}

TEST_CASE("s statistic") {
  const int T = 5;
  std::vector<LaplacePoint> grid{{0.5, 0.5}};
  const auto b = BlockStats::from_values(grid, T, std::vector<double>(T, 0.3 * 0.7),
                                         std::vector<double>(T, 0.3), std::vector<double>(T, 0.7));
  CHECK(s_stat(b, 0) == doctest::Approx(0.0).epsilon(1e-15));

  std::vector<double> xy{0.5, 0.4, 0.3, 0.2, 0.1}, x{0.6, 0.5, 0.7, 0.8, 0.9},
      y{0.9, 0.8, 0.4, 0.6, 0.3};
  const auto c = BlockStats::from_values(grid, T, xy, x, y);
  const double want = std::sqrt(5.0) * (mean_of(xy) - mean_of(x) * mean_of(y));
  CHECK(s_stat(c, 0) == doctest::Approx(want).epsilon(1e-13));
  const auto g = gamma_vec(c, 0);
  CHECK(g[1] == doctest::Approx(-mean_of(y)));
  CHECK(g[2] == doctest::Approx(-mean_of(x)));

  RngStream rng(8);
  const auto inc = constant_increments(10, 100, 0.5, rng);
  const std::vector<LaplacePoint> zero{{0, 0}};
  const auto z = daily_blocks(inc, zero);
  CHECK(std::abs(s_stat(z, 0)) <= std::sqrt(10.0) * 2.0 * inc.dt);
  const auto gz = gamma_vec(z, 0);
  CHECK(gz[1] == doctest::Approx(-1.0));
  CHECK(gz[2] == doctest::Approx(-1.0));

  // price levels do not matter
  auto [px, py] = simulate_model(ex4(0.0), 10, 100, rng);
  auto qx = px, qy = py;
  for (auto& v : qx.values) v += 4.6;
  for (auto& v : qy.values) v += 3.2;
  const std::vector<LaplacePoint> pt{{0.5, 0.5}};
  CHECK(s_stat(daily_blocks(px, py, pt), 0) ==
        doctest::Approx(s_stat(daily_blocks(qx, qy, pt), 0)).epsilon(1e-9));
}

TEST_CASE("dependent volatilities move the s statistic") {
  const int reps = 100;
  int larger = 0;
  const std::vector<LaplacePoint> grid{{0.5, 0.5}};
  for (int r = 0; r < reps; ++r) {
    RngStream a(9, r), b(9, r);
    auto [x0, y0] = simulate_model(ex4(0.0), 66, 780, a);
    auto [x8, y8] = simulate_model(ex4(0.8), 66, 780, b);
    larger += std::abs(s_stat(daily_blocks(x8, y8, grid), 0)) >
              std::abs(s_stat(daily_blocks(x0, y0, grid), 0));
  }
  CHECK(larger >= 95);
}

TEST_CASE("s statistic variance settles as days grow") {
  const int reps = 300;
  const std::vector<LaplacePoint> grid{{0.5, 0.5}};
  std::vector<double> var;
  for (int days : {22, 44, 88}) {
    std::vector<double> s;
    for (int r = 0; r < reps; ++r) {
      RngStream rng(10 + days, r);
      auto [x, y] = simulate_model(ex4(0.0), days, 390, rng);
      s.push_back(s_stat(daily_blocks(x, y, grid), 0));
    }
    var.push_back(var_of(s));
  }
  for (int k = 1; k < 3; ++k) {
    const double ratio = var[k] / var[k - 1];
    CHECK(ratio >= 0.6);
    CHECK(ratio <= 1.6);
  }
}

TEST_CASE("warnings and csv") {
  CHECK_FALSE(long_span_warning(22, 1.0 / 390).has_value());
  CHECK(long_span_warning(200, 1.0 / 390).has_value());
  const std::vector<LaplacePoint> grid{{0.1, 0.2}};
  const auto b = BlockStats::from_values(grid, 2, {0.5, 0.25}, {1, 0.5}, {0.75, 0.125});
  std::ostringstream os;
  write_blocks_csv(os, b);
  CHECK(os.str().rfind("day,u,v,z_xy,z_x,z_y\n1,", 0) == 0);
}
