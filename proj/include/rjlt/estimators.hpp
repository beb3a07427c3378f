#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "rjlt/types.hpp"

namespace rjlt {

enum class EstimatorKind { V, U, Vprime, Uasync };

std::string_view to_string(EstimatorKind k);
EstimatorKind parse_estimator_kind(std::string_view s);

struct RjltEstimate {
  double value = 0.0;
  EstimatorKind kind = EstimatorKind::U;
  std::size_t n_increments_used = 0;
  double dt = 0.0;  // Delta_n; 0 for the asynchronous estimator
  // Asynchronous estimator diagnostics.
  std::size_t n_skipped = 0;             // X-increments without a Y-cover
  std::size_t n_overlapping_covers = 0;  // covers overlapping the previous cover
};

// Increments of two synchronous series on a common uniform grid.
// dx[k] is the (k+1)-th increment of X.
struct SyncIncrements {
  std::vector<double> dx;
  std::vector<double> dy;
  double dt = 0.0;
  double t_start = 0.0;

  std::size_t n() const { return dx.size(); }
  double t_end() const { return t_start + dt * static_cast<double>(dx.size()); }
};

// Validates that x and y share one uniform grid (relative tolerance 1e-6 of
// a step) and differences the values.  Throws DataError otherwise.
SyncIncrements make_sync_increments(const SamplePath& x, const SamplePath& y);

// cos((sqrt(2u) dx + sqrt(2v) dy_next) / sqrt(dt))
double xi(double dx, double dy_next, double dt, LaplacePoint p);

// Non-overlapped pairs: 2 dt sum_{i=1}^{floor(n/2)} xi_{2i-1}.  An odd final
// increment is dropped.
RjltEstimate v_hat(const SyncIncrements& inc, LaplacePoint p);
// Overlapped pairs: dt sum_{i=1}^{n-1} xi_i.
RjltEstimate u_hat(const SyncIncrements& inc, LaplacePoint p);
// Non-overlapped pairs in both orders (X then Y, Y then X).
RjltEstimate v_prime_hat(const SyncIncrements& inc, LaplacePoint p);

RjltEstimate v_hat(const SamplePath& x, const SamplePath& y, LaplacePoint p);
RjltEstimate u_hat(const SamplePath& x, const SamplePath& y, LaplacePoint p);
RjltEstimate v_prime_hat(const SamplePath& x, const SamplePath& y, LaplacePoint p);

// Synchronous kinds only (V, U, Vprime).
RjltEstimate estimate(EstimatorKind kind, const SyncIncrements& inc, LaplacePoint p);

// How the asynchronous estimator pairs a Y-increment with the X-increment
// (t_{i-1}, t_i].
enum class CoverMode {
  // Smallest Y-interval [t-, t+] with t- <= t_{i-1} and t+ >= t_i.
  kEnclosing,
  // First Y-increment that starts at or after t_i.  On a shared grid this
  // reproduces u_hat summand by summand.
  kLeading,
};

struct AsyncSummand {
  std::size_t x_index;  // 1-based X-increment index
  double weight;        // t_i - t_{i-1}
  double value;         // weight * cos(...)
};

RjltEstimate u_async_hat(const SamplePath& x, const SamplePath& y, LaplacePoint p,
                         CoverMode mode = CoverMode::kEnclosing);

// Individual weighted summands of u_async_hat, in X order; for diagnostics.
std::vector<AsyncSummand> u_async_summands(const SamplePath& x, const SamplePath& y,
                                           LaplacePoint p,
                                           CoverMode mode = CoverMode::kEnclosing);

}  // namespace rjlt
