#include "rjlt/asymptotics.hpp"

#include <algorithm>
#include <cmath>

#include "rjlt/errors.hpp"

namespace rjlt {
namespace {

// (sinh(t) * e^{-h})^2 for |t| <= h, without overflow or cancellation.
double scaled_sinh_sq(double t, double h) {
  const double at = std::abs(t);
  double s;
  if (2.0 * at > 700.0) {
    s = 0.5 * std::exp(at - h);
  } else {
    s = 0.5 * std::exp(-at - h) * std::expm1(2.0 * at);
  }
  return s * s;
}

}  // namespace

double f_cov_v(double x, double y, double xb, double yb) {
  const double h = 0.5 * (x * x + y * y + xb * xb + yb * yb);
  // e^{-2h} (2 cosh(2a) - 2) = 4 sinh(a)^2 e^{-2h}
  return 4.0 * scaled_sinh_sq(x * xb + y * yb, h);
}

double f_cov_u(double x, double y, double xb, double yb, double z) {
  if (!(std::abs(z) <= 1.0)) throw ConfigError("f_cov_u: correlation must satisfy |z| <= 1");
  const double h = 0.5 * (x * x + y * y + xb * xb + yb * yb);
  // Each (1 + e^{4c}) / e^{2c} - 2 term equals 4 sinh(c)^2; the bracket
  // carries a leading 1/2.
  return 2.0 * (scaled_sinh_sq(x * xb + y * yb, h) + scaled_sinh_sq(xb * y * z, h) +
                scaled_sinh_sq(x * yb * z, h));
}

namespace {

struct Freq {
  double a, b;    // sqrt(2u), sqrt(2v) for p
  double ap, bp;  // for q
  double as, bs;  // sqrt(2(u+u')), sqrt(2(v+v'))
};

Freq make_freq(const CovQuery& cq) {
  validate(cq.p);
  validate(cq.q);
  return {std::sqrt(2.0 * cq.p.u),          std::sqrt(2.0 * cq.p.v),
          std::sqrt(2.0 * cq.q.u),          std::sqrt(2.0 * cq.q.v),
          std::sqrt(2.0 * (cq.p.u + cq.q.u)), std::sqrt(2.0 * (cq.p.v + cq.q.v))};
}

}  // namespace

double gamma_hat_v(const SyncIncrements& inc, const CovQuery& cq) {
  const Freq f = make_freq(cq);
  if (inc.n() < 3) throw DataError("gamma_hat_v needs at least 3 increments");
  const double sq = std::sqrt(inc.dt);
  const std::size_t pairs = inc.n() / 2;
  double prod = 0.0, merged = 0.0;
  for (std::size_t i = 0; i < pairs; ++i) {
    const double dx = inc.dx[2 * i];
    const double dy = inc.dy[2 * i + 1];
    prod += std::cos((f.a * dx + f.b * dy) / sq) * std::cos((f.ap * dx + f.bp * dy) / sq);
    merged += std::cos((f.as * dx + f.bs * dy) / sq);
  }
  return 4.0 * inc.dt * (prod - merged);
}

double gamma_hat_u(const SyncIncrements& inc, const CovQuery& cq, GammaUIndexing indexing) {
  const Freq f = make_freq(cq);
  const std::size_t n = inc.n();
  if (n < 4) throw DataError("gamma_hat_u needs at least 4 increments");
  const double sq = std::sqrt(inc.dt);
  const auto& dx = inc.dx;
  const auto& dy = inc.dy;

  double prod = 0.0, merged = 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    prod += std::cos((f.a * dx[k] + f.b * dy[k + 1]) / sq) *
            std::cos((f.ap * dx[k] + f.bp * dy[k + 1]) / sq);
    merged += std::cos((f.as * dx[k] + f.bs * dy[k + 1]) / sq);
  }

  // Lag-split sums over arrays indexed so that dx[j] = Delta_{j+1} X.
  double lag_pq = 0.0, lag_qp = 0.0;
  auto lag_term = [&](std::size_t ix0, std::size_t iy1, std::size_t ix1, std::size_t iy2) {
    const double c_x0p = std::cos(f.a * dx[ix0] / sq);
    const double c_y1p = std::cos(f.b * dy[iy1] / sq);
    const double c_x1q = std::cos(f.ap * dx[ix1] / sq);
    const double c_y2q = std::cos(f.bp * dy[iy2] / sq);
    lag_pq += c_x0p * c_y1p * c_x1q * c_y2q;
    const double c_x0q = std::cos(f.ap * dx[ix0] / sq);
    const double c_y1q = std::cos(f.bp * dy[iy1] / sq);
    const double c_x1p = std::cos(f.a * dx[ix1] / sq);
    const double c_y2p = std::cos(f.b * dy[iy2] / sq);
    lag_qp += c_x0q * c_y1q * c_x1p * c_y2p;
  };
  if (indexing == GammaUIndexing::kContiguous) {
    // i = 1..n-2: Delta_i X, Delta_{i+1} Y, Delta_{i+1} X, Delta_{i+2} Y.
    for (std::size_t i = 1; i + 2 <= n; ++i) lag_term(i - 1, i, i, i + 1);
  } else {
    // i = 2..n-2: Delta_{i-1} X, Delta_{i+1} Y, Delta_{i+1} X, Delta_{i+2} Y.
    for (std::size_t i = 2; i + 2 <= n; ++i) lag_term(i - 2, i, i, i + 1);
  }
  return inc.dt * (prod + lag_pq + lag_qp - 3.0 * merged);
}

double gamma_hat_v(const SamplePath& x, const SamplePath& y, const CovQuery& cq) {
  return gamma_hat_v(make_sync_increments(x, y), cq);
}

double gamma_hat_u(const SamplePath& x, const SamplePath& y, const CovQuery& cq,
                   GammaUIndexing indexing) {
  return gamma_hat_u(make_sync_increments(x, y), cq, indexing);
}

StudentizedStat studentize(double estimate, double truth, double gamma, double dt) {
  if (!(dt > 0.0)) throw ConfigError("studentize: dt must be > 0");
  StudentizedStat s;
  s.estimate = estimate;
  s.truth = truth;
  s.dt = dt;
  s.gamma_floored = !(gamma > kGammaFloor);
  s.gamma = s.gamma_floored ? kGammaFloor : gamma;
  s.z = (estimate - truth) / std::sqrt(dt * s.gamma);
  return s;
}

}  // namespace rjlt
