#pragma once

#include "rjlt/estimators.hpp"
#include "rjlt/types.hpp"

namespace rjlt {

// Pair of Laplace arguments (u, v) and (u', v') for a covariance query.
struct CovQuery {
  LaplacePoint p;
  LaplacePoint q;
};

// Limit covariance density of the non-overlapped estimator:
//   e^{-(x^2+y^2+xb^2+yb^2)} (e^{-2(x xb + y yb)} + e^{2(x xb + y yb)} - 2).
// Callers pass x = sqrt(u) sigma_x, y = sqrt(v) sigma_y, xb = sqrt(u') sigma_x,
// yb = sqrt(v') sigma_y.
double f_cov_v(double x, double y, double xb, double yb);

// Limit covariance density of the overlapped estimator with Brownian
// correlation z.  Throws ConfigError when |z| > 1.
double f_cov_u(double x, double y, double xb, double yb, double z);

// Plug-in covariance estimator for v_hat (non-overlapped pairs).
double gamma_hat_v(const SyncIncrements& inc, const CovQuery& cq);

// Index convention for the two lag-split sums of gamma_hat_u.
enum class GammaUIndexing {
  // cos(a dX_i) cos(b dY_{i+1}) cos(a' dX_{i+1}) cos(b' dY_{i+2}), i = 1..n-2:
  // the factorised xi_i(p) xi_{i+1}(q) pattern with every index in range.
  kContiguous,
  // Printed summand cos(a dX_{i-1}) ..., keeping only i = 2..n-2.
  kDropFirst,
};

// Plug-in covariance estimator for u_hat (overlapped pairs): one product
// sum, two lag-split product sums and -3 times a merged-frequency sum.
double gamma_hat_u(const SyncIncrements& inc, const CovQuery& cq,
                   GammaUIndexing indexing = GammaUIndexing::kContiguous);

double gamma_hat_v(const SamplePath& x, const SamplePath& y, const CovQuery& cq);
double gamma_hat_u(const SamplePath& x, const SamplePath& y, const CovQuery& cq,
                   GammaUIndexing indexing = GammaUIndexing::kContiguous);

inline constexpr double kGammaFloor = 1e-12;

struct StudentizedStat {
  double z = 0.0;
  double estimate = 0.0;
  double truth = 0.0;
  double gamma = 0.0;  // after flooring at kGammaFloor
  double dt = 0.0;
  bool gamma_floored = false;  // raw gamma was <= 0 (or below the floor)
};

// z = (estimate - truth) / sqrt(dt * max(gamma, kGammaFloor)).
StudentizedStat studentize(double estimate, double truth, double gamma, double dt);

}  // namespace rjlt
