#include <doctest.h>

#include <cmath>
#include <vector>

#include "rjlt/asymptotics.hpp"
#include "rjlt/errors.hpp"
#include "rjlt/simkit.hpp"

using namespace rjlt;

namespace {

// Written with cosh so that it shares no code path with the library.
long double oracle_v(long double x, long double y, long double xb, long double yb) {
  const long double s = x * xb + y * yb;
  return std::exp(-(x * x + y * y + xb * xb + yb * yb)) * (2.0L * std::cosh(2.0L * s) - 2.0L);
}

long double oracle_u(long double x, long double y, long double xb, long double yb, long double z) {
  const long double s = x * xb + y * yb;
  return 0.5L * std::exp(-(x * x + y * y + xb * xb + yb * yb)) *
         (2.0L * std::cosh(2.0L * s) + 2.0L * std::cosh(2.0L * xb * y * z) +
          2.0L * std::cosh(2.0L * x * yb * z) - 6.0L);
}

SyncIncrements constant_vol_increments(int n, double rho, RngStream& rng) {
  VolPath v;
  v.times = SimGrid::make(1.0, n).times();
  v.sigma_x.assign(v.times.size(), 1.0);
  v.sigma_y.assign(v.times.size(), 1.0);
  BivariateModelSpec m;
  m.rho = rho;
  auto [x, y] = simulate_prices(m, v, rng);
  return make_sync_increments(x, y);
}

}  // namespace

TEST_CASE("covariance densities at fixed points") {
  CHECK(f_cov_v(0, 0, 0, 0) == 0.0);
  CHECK(f_cov_v(0.7, 1.3, 0, 0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(f_cov_v(1, 1, 1, 1) == doctest::Approx(0.96370).epsilon(1e-5));
  CHECK(f_cov_v(1, 1, 1, 1) == doctest::Approx(static_cast<double>(oracle_v(1, 1, 1, 1))).epsilon(1e-13));
  for (double z : {-1.0, -0.3, 0.0, 0.5, 1.0}) CHECK(f_cov_u(0, 0, 0, 0, z) == doctest::Approx(0.0));
  CHECK(f_cov_u(1, 1, 1, 1, 0) == doctest::Approx(0.48185).epsilon(1e-5));
  CHECK_THROWS_AS(f_cov_u(1, 1, 1, 1, 1.01), ConfigError);

  for (double x : {0.2, 0.9, 1.7})
    for (double y : {0.1, 1.1})
      for (double xb : {0.4, 1.3})
        for (double yb : {0.3, 2.0}) {
          CHECK(f_cov_v(x, y, xb, yb) ==
                doctest::Approx(static_cast<double>(oracle_v(x, y, xb, yb))).epsilon(1e-12));
          for (double z : {-0.8, 0.0, 0.5})
            CHECK(f_cov_u(x, y, xb, yb, z) ==
                  doctest::Approx(static_cast<double>(oracle_u(x, y, xb, yb, z))).epsilon(1e-12));
        }
}

TEST_CASE("half identity, symmetry and ordering") {
  for (int i = 1; i <= 30; ++i)
    for (int j = 1; j <= 30; ++j) {
      const double x = 0.1 * i, y = 0.1 * j;
      const double fv = f_cov_v(x, y, x, y);
      CHECK(fv >= 0.0);
      for (double z : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
        const double fu = f_cov_u(x, y, x, y, z);
        CHECK(fu >= 0.0);
        CHECK(fu <= fv);
      }
      const double xb = 0.05 * (31 - i), yb = 0.07 * j;
      const double v = f_cov_v(x, y, xb, yb);
      const double u = f_cov_u(x, y, xb, yb, 0.0);
      CHECK(std::abs(u - 0.5 * v) <= 1e-12 * std::abs(v));
      CHECK(v == doctest::Approx(f_cov_v(xb, yb, x, y)).epsilon(1e-14));
      CHECK(f_cov_u(x, y, xb, yb, 0.4) == doctest::Approx(f_cov_u(xb, yb, x, y, 0.4)).epsilon(1e-14));
    }
}

TEST_CASE("plug-in estimators at zero frequency") {
  RngStream rng(1);
  for (int n : {100, 101}) {
    const auto inc = constant_vol_increments(n, 0.5, rng);
    const CovQuery zero{{0, 0}, {0, 0}};
    CHECK(gamma_hat_v(inc, zero) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(gamma_hat_u(inc, zero) == doctest::Approx(-2.0 * inc.dt).epsilon(1e-12));
    CHECK(gamma_hat_u(inc, zero, GammaUIndexing::kDropFirst) ==
          doctest::Approx(-4.0 * inc.dt).epsilon(1e-12));
  }
}

TEST_CASE("plug-in estimators by hand") {
  const std::vector<double> dx{0.1, -0.05, 0.2, 0.07, -0.11};
  const std::vector<double> dy{-0.02, 0.04, 0.09, -0.13, 0.01};
  const SyncIncrements inc{dx, dy, 0.2, 0.0};
  const LaplacePoint p{0.6, 1.1}, q{1.4, 0.3};
  const double sq = std::sqrt(0.2);
  auto c = [&](double f, double d) { return std::cos(std::sqrt(2.0 * f) * d / sq); };
  auto cc = [&](double fu, double fv, double a, double b) {
    return std::cos((std::sqrt(2.0 * fu) * a + std::sqrt(2.0 * fv) * b) / sq);
  };
  auto merged = [&](double a, double b) {
    return std::cos((std::sqrt(2 * (p.u + q.u)) * a + std::sqrt(2 * (p.v + q.v)) * b) / sq);
  };
  double gv = 0.0;
  for (int i : {0, 2}) gv += cc(p.u, p.v, dx[i], dy[i + 1]) * cc(q.u, q.v, dx[i], dy[i + 1]) -
                             merged(dx[i], dy[i + 1]);
  gv *= 4 * 0.2;
  CHECK(gamma_hat_v(inc, {p, q}) == doctest::Approx(gv).epsilon(1e-12));

  double gu = 0.0;
  for (int i = 0; i < 4; ++i)
    gu += cc(p.u, p.v, dx[i], dy[i + 1]) * cc(q.u, q.v, dx[i], dy[i + 1]) -
          3 * merged(dx[i], dy[i + 1]);
  for (int i = 0; i < 3; ++i) {
    gu += c(p.u, dx[i]) * c(p.v, dy[i + 1]) * c(q.u, dx[i + 1]) * c(q.v, dy[i + 2]);
    gu += c(q.u, dx[i]) * c(q.v, dy[i + 1]) * c(p.u, dx[i + 1]) * c(p.v, dy[i + 2]);
  }
  gu *= 0.2;
  CHECK(gamma_hat_u(inc, {p, q}) == doctest::Approx(gu).epsilon(1e-12));
}

TEST_CASE("plug-in estimators against the limit densities") {
  const int reps = 2000;
  const CovQuery cq{{1, 1}, {1, 1}};
  std::vector<double> gv, gu;
  for (int r = 0; r < reps; ++r) {
    RngStream rng(2, r);
    const auto inc = constant_vol_increments(1760, 0.5, rng);
    gv.push_back(gamma_hat_v(inc, cq));
    gu.push_back(gamma_hat_u(inc, cq));
  }
  auto check_mean = [](const std::vector<double>& s, double target) {
    double m = 0.0;
    for (double v : s) m += v;
    m /= static_cast<double>(s.size());
    double var = 0.0;
    for (double v : s) var += (v - m) * (v - m);
    const double se = std::sqrt(var / (s.size() - 1.0) / static_cast<double>(s.size()));
    CHECK(std::abs(m - target) < 3.0 * se);
  };
  check_mean(gv, static_cast<double>(oracle_v(1, 1, 1, 1)));
  check_mean(gu, static_cast<double>(oracle_u(1, 1, 1, 1, 0.5)));
}

TEST_CASE("studentize") {
  const double dt = 1.0 / 1760.0;
  auto s = studentize(0.4, 0.4, 2.0, dt);
  CHECK(s.z == 0.0);
  CHECK_FALSE(s.gamma_floored);
  s = studentize(std::sqrt(dt), 0.0, 1.0, dt);
  CHECK(s.z == doctest::Approx(1.0).epsilon(1e-14));
  s = studentize(0.01, 0.0, -0.3, dt);
  CHECK(s.gamma_floored);
  CHECK(s.gamma == kGammaFloor);
  CHECK(std::isfinite(s.z));
  CHECK_THROWS_AS(studentize(0.0, 0.0, 1.0, 0.0), ConfigError);
}
