#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rjlt/estimators.hpp"
#include "rjlt/types.hpp"

namespace rjlt {

// Per-day Laplace block statistics over a grid of (u, v) points.  Values
// are stored row-major by day: index = day * n_points + g (day 0-based).
struct BlockStats {
  int n_days = 0;
  int steps_per_day = 0;
  double dt = 0.0;
  std::vector<LaplacePoint> grid;
  std::vector<double> z_xy;  // sum of dt cos(sqrt(2u) dX_i + sqrt(2v) dY_{i+1}) / sqrt(dt)
  std::vector<double> z_x;   // sum of dt cos(sqrt(2u) dX_i / sqrt(dt))
  std::vector<double> z_y;   // sum of dt cos(sqrt(2v) dY_i / sqrt(dt))

  std::size_t n_points() const { return grid.size(); }
  std::size_t index(int day, std::size_t g) const {
    return static_cast<std::size_t>(day) * grid.size() + g;
  }
  double xy(int day, std::size_t g) const { return z_xy[index(day, g)]; }
  double x(int day, std::size_t g) const { return z_x[index(day, g)]; }
  double y(int day, std::size_t g) const { return z_y[index(day, g)]; }

  // Block values injected directly (tests, external pipelines).  Each vector
  // holds n_days * grid.size() entries.
  static BlockStats from_values(std::vector<LaplacePoint> grid, int n_days,
                                std::vector<double> z_xy, std::vector<double> z_x,
                                std::vector<double> z_y);
};

struct BlockOptions {
  // When false, the last increment of each day is dropped from z_xy so that
  // no summand pairs returns from two different sessions.
  bool cross_day_pairs = true;
};

// Requires a uniform grid whose step divides one day and whose span is an
// integer number of days.  The final global increment never enters z_xy.
BlockStats daily_blocks(const SyncIncrements& inc, std::span<const LaplacePoint> grid,
                        BlockOptions opts = {});
BlockStats daily_blocks(const SamplePath& x, const SamplePath& y,
                        std::span<const LaplacePoint> grid, BlockOptions opts = {});

enum class Kernel { bartlett, parzen };

std::string to_string(Kernel k);
Kernel parse_kernel(const std::string& s);

struct HacConfig {
  Kernel kernel = Kernel::bartlett;
  int bandwidth = 0;  // L_T

  // floor(1.2 * T^{1/3})
  static int default_bandwidth(int n_days);
};

double kernel_weight(const HacConfig& cfg, int lag);

// Kernel long-run covariance of the rows of `series` (T x k):
//   G_0 + sum_{l=1}^{L} w(l) (G_l + G_l^T),  G_l = (1/T) sum_{t>l} b_t b_{t-l}^T,
// where b_t are the demeaned rows.
Eigen::MatrixXd hac_matrix(const Eigen::MatrixXd& series, const HacConfig& cfg);

// 3x3 long-run covariance between the (xy, x, y) blocks at grid point p and
// those at grid point q.  hac_cov(b, c, p, q) == hac_cov(b, c, q, p)^T.
using LongRunCov = Eigen::Matrix3d;
LongRunCov hac_cov(const BlockStats& blocks, const HacConfig& cfg, std::size_t p, std::size_t q);

// Delta-method weights [1, -mean z_y(v), -mean z_x(u)] for grid point g.
std::array<double, 3> gamma_vec(const BlockStats& blocks, std::size_t g);

// sqrt(T) (mean z_xy - mean z_x * mean z_y) at grid point g.
double s_stat(const BlockStats& blocks, std::size_t g);

// Set when T * dt exceeds 0.25, where the long-span approximation is poor.
std::optional<std::string> long_span_warning(int n_days, double dt);

// CSV with header day,u,v,z_xy,z_x,z_y (day 1-based), full precision.
void write_blocks_csv(std::ostream& os, const BlockStats& blocks);

}  // namespace rjlt
