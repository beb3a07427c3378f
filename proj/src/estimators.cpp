#include "rjlt/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rjlt/errors.hpp"

namespace rjlt {

std::string_view to_string(EstimatorKind k) {
  switch (k) {
    case EstimatorKind::V:
      return "V";
    case EstimatorKind::U:
      return "U";
    case EstimatorKind::Vprime:
      return "Vprime";
    case EstimatorKind::Uasync:
      return "Uasync";
  }
  return "?";
}

EstimatorKind parse_estimator_kind(std::string_view s) {
  if (s == "V") return EstimatorKind::V;
  if (s == "U") return EstimatorKind::U;
  if (s == "Vprime" || s == "V'") return EstimatorKind::Vprime;
  if (s == "Uasync" || s == "U'") return EstimatorKind::Uasync;
  throw ConfigError("unknown estimator kind '" + std::string(s) + "'");
}

SyncIncrements make_sync_increments(const SamplePath& x, const SamplePath& y) {
  x.validate();
  y.validate();
  if (x.size() != y.size()) throw DataError("synchronous estimators need equal-length paths");
  const std::size_t n = x.n_increments();
  const double t0 = x.times.front();
  const double dt = (x.times.back() - t0) / static_cast<double>(n);
  const double tol = 1e-6 * dt;
  for (std::size_t i = 0; i <= n; ++i) {
    const double expect = t0 + dt * static_cast<double>(i);
    if (std::abs(x.times[i] - expect) > tol)
      throw DataError("grid is not uniform at index " + std::to_string(i));
    if (std::abs(y.times[i] - x.times[i]) > tol)
      throw DataError("X and Y grids are misaligned at index " + std::to_string(i));
  }
  SyncIncrements inc;
  inc.dt = dt;
  inc.t_start = t0;
  inc.dx.resize(n);
  inc.dy.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    inc.dx[i] = x.values[i + 1] - x.values[i];
    inc.dy[i] = y.values[i + 1] - y.values[i];
  }
  return inc;
}

double xi(double dx, double dy_next, double dt, LaplacePoint p) {
  return std::cos((std::sqrt(2.0 * p.u) * dx + std::sqrt(2.0 * p.v) * dy_next) / std::sqrt(dt));
}

namespace {

void check_sync(const SyncIncrements& inc, LaplacePoint p) {
  validate(p);
  if (inc.n() < 3) throw DataError("estimator needs at least 3 increments");
  if (inc.dy.size() != inc.dx.size()) throw DataError("increment vectors differ in length");
  if (!(inc.dt > 0.0)) throw DataError("step length must be > 0");
}

}  // namespace

RjltEstimate v_hat(const SyncIncrements& inc, LaplacePoint p) {
  check_sync(inc, p);
  const double a = std::sqrt(2.0 * p.u);
  const double b = std::sqrt(2.0 * p.v);
  const double sq = std::sqrt(inc.dt);
  const std::size_t pairs = inc.n() / 2;
  double acc = 0.0;
  for (std::size_t i = 0; i < pairs; ++i)
    acc += std::cos((a * inc.dx[2 * i] + b * inc.dy[2 * i + 1]) / sq);
  return {2.0 * inc.dt * acc, EstimatorKind::V, 2 * pairs, inc.dt};
}

RjltEstimate u_hat(const SyncIncrements& inc, LaplacePoint p) {
  check_sync(inc, p);
  const double a = std::sqrt(2.0 * p.u);
  const double b = std::sqrt(2.0 * p.v);
  const double sq = std::sqrt(inc.dt);
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < inc.n(); ++i)
    acc += std::cos((a * inc.dx[i] + b * inc.dy[i + 1]) / sq);
  return {inc.dt * acc, EstimatorKind::U, inc.n(), inc.dt};
}

RjltEstimate v_prime_hat(const SyncIncrements& inc, LaplacePoint p) {
  check_sync(inc, p);
  const double a = std::sqrt(2.0 * p.u);
  const double b = std::sqrt(2.0 * p.v);
  const double sq = std::sqrt(inc.dt);
  const std::size_t pairs = inc.n() / 2;
  double acc = 0.0;
  for (std::size_t i = 0; i < pairs; ++i) {
    acc += std::cos((a * inc.dx[2 * i] + b * inc.dy[2 * i + 1]) / sq);
    acc += std::cos((b * inc.dy[2 * i] + a * inc.dx[2 * i + 1]) / sq);
  }
  return {inc.dt * acc, EstimatorKind::Vprime, 2 * pairs, inc.dt};
}

RjltEstimate v_hat(const SamplePath& x, const SamplePath& y, LaplacePoint p) {
  return v_hat(make_sync_increments(x, y), p);
}
RjltEstimate u_hat(const SamplePath& x, const SamplePath& y, LaplacePoint p) {
  return u_hat(make_sync_increments(x, y), p);
}
RjltEstimate v_prime_hat(const SamplePath& x, const SamplePath& y, LaplacePoint p) {
  return v_prime_hat(make_sync_increments(x, y), p);
}

RjltEstimate estimate(EstimatorKind kind, const SyncIncrements& inc, LaplacePoint p) {
  switch (kind) {
    case EstimatorKind::V:
      return v_hat(inc, p);
    case EstimatorKind::U:
      return u_hat(inc, p);
    case EstimatorKind::Vprime:
      return v_prime_hat(inc, p);
    case EstimatorKind::Uasync:
      break;
  }
  throw ConfigError("the asynchronous estimator needs the two sample paths");
}

namespace {

struct AsyncResult {
  std::vector<AsyncSummand> summands;
  std::size_t skipped = 0;
  std::size_t overlapping = 0;
};

AsyncResult async_core(const SamplePath& x, const SamplePath& y, LaplacePoint p, CoverMode mode) {
  validate(p);
  x.validate();
  y.validate();
  const double a = std::sqrt(2.0 * p.u);
  const double b = std::sqrt(2.0 * p.v);
  const auto& ty = y.times;

  AsyncResult r;
  r.summands.reserve(x.n_increments());
  double prev_hi = -INFINITY;
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double t_prev = x.times[i - 1];
    const double t_cur = x.times[i];
    std::size_t lo = 0, hi = 0;
    if (mode == CoverMode::kEnclosing) {
      const auto it_lo = std::upper_bound(ty.begin(), ty.end(), t_prev);
      const auto it_hi = std::lower_bound(ty.begin(), ty.end(), t_cur);
      if (it_lo == ty.begin() || it_hi == ty.end()) {
        ++r.skipped;
        continue;
      }
      lo = static_cast<std::size_t>(it_lo - ty.begin()) - 1;
      hi = static_cast<std::size_t>(it_hi - ty.begin());
    } else {
      const auto it = std::lower_bound(ty.begin(), ty.end(), t_cur);
      if (it == ty.end() || it + 1 == ty.end()) {
        ++r.skipped;
        continue;
      }
      lo = static_cast<std::size_t>(it - ty.begin());
      hi = lo + 1;
    }
    if (ty[lo] < prev_hi) ++r.overlapping;
    prev_hi = ty[hi];

    const double wx = t_cur - t_prev;
    const double wy = ty[hi] - ty[lo];
    const double ddx = x.values[i] - x.values[i - 1];
    const double ddy = y.values[hi] - y.values[lo];
    const double arg = a * ddx / std::sqrt(wx) + b * ddy / std::sqrt(wy);
    r.summands.push_back({i, wx, wx * std::cos(arg)});
  }
  return r;
}

}  // namespace

RjltEstimate u_async_hat(const SamplePath& x, const SamplePath& y, LaplacePoint p,
                         CoverMode mode) {
  const auto r = async_core(x, y, p, mode);
  RjltEstimate e;
  e.kind = EstimatorKind::Uasync;
  for (const auto& s : r.summands) e.value += s.value;
  e.n_increments_used = r.summands.size();
  e.n_skipped = r.skipped;
  e.n_overlapping_covers = r.overlapping;
  return e;
}

std::vector<AsyncSummand> u_async_summands(const SamplePath& x, const SamplePath& y,
                                           LaplacePoint p, CoverMode mode) {
  return async_core(x, y, p, mode).summands;
}

}  // namespace rjlt
