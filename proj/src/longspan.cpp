#include "rjlt/longspan.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include "rjlt/errors.hpp"
#include "rjlt/io.hpp"

namespace rjlt {

BlockStats BlockStats::from_values(std::vector<LaplacePoint> grid, int n_days,
                                   std::vector<double> z_xy, std::vector<double> z_x,
                                   std::vector<double> z_y) {
  const std::size_t want = static_cast<std::size_t>(n_days) * grid.size();
  if (n_days < 1 || z_xy.size() != want || z_x.size() != want || z_y.size() != want)
    throw DataError("block values do not match n_days * grid size");
  BlockStats b;
  b.n_days = n_days;
  b.grid = std::move(grid);
  b.z_xy = std::move(z_xy);
  b.z_x = std::move(z_x);
  b.z_y = std::move(z_y);
  return b;
}

namespace {

// Distinct values of one coordinate and the position of each grid entry.
struct Axis {
  std::vector<double> freq;        // sqrt(2 w) / sqrt(dt)
  std::vector<std::size_t> index;  // per grid point
};

Axis make_axis(std::span<const LaplacePoint> grid, bool use_u, double dt) {
  std::map<double, std::size_t> seen;
  Axis ax;
  ax.index.reserve(grid.size());
  for (const auto& p : grid) {
    const double w = use_u ? p.u : p.v;
    auto [it, inserted] = seen.emplace(w, ax.freq.size());
    if (inserted) ax.freq.push_back(std::sqrt(2.0 * w) / std::sqrt(dt));
    ax.index.push_back(it->second);
  }
  return ax;
}

}  // namespace

BlockStats daily_blocks(const SyncIncrements& inc, std::span<const LaplacePoint> grid,
                        BlockOptions opts) {
  if (grid.empty()) throw ConfigError("daily_blocks: empty Laplace grid");
  for (const auto& p : grid) validate(p);
  const std::size_t n = inc.n();
  if (n < 2 || !(inc.dt > 0.0)) throw DataError("daily_blocks: need a uniform grid");

  const double per_day = 1.0 / inc.dt;
  const long m = std::lround(per_day);
  if (m < 1 || std::abs(per_day - static_cast<double>(m)) > 1e-6 * per_day)
    throw DataError("daily_blocks: step length does not divide one day");
  if (n % static_cast<std::size_t>(m) != 0)
    throw DataError("daily_blocks: sample does not span an integer number of days");
  if (std::abs(inc.t_start - std::round(inc.t_start)) > 1e-6)
    throw DataError("daily_blocks: sample must start at a day boundary");

  BlockStats b;
  b.n_days = static_cast<int>(n / static_cast<std::size_t>(m));
  b.steps_per_day = static_cast<int>(m);
  b.dt = inc.dt;
  b.grid.assign(grid.begin(), grid.end());
  const std::size_t G = grid.size();
  b.z_xy.assign(b.n_days * G, 0.0);
  b.z_x.assign(b.n_days * G, 0.0);
  b.z_y.assign(b.n_days * G, 0.0);

  const Axis ux = make_axis(grid, true, inc.dt);
  const Axis vy = make_axis(grid, false, inc.dt);
  const std::size_t nu = ux.freq.size(), nv = vy.freq.size();

  // cos/sin of each distinct frequency times the current increment; the
  // joint cosine follows from cos(A + B) = cos A cos B - sin A sin B.
  std::vector<double> cx(nu), sx(nu), cx_prev(nu), sx_prev(nu);
  std::vector<double> cy(nv), sy(nv);
  std::vector<double> day_x(nu), day_y(nv);

  auto flush_marginals = [&](int day) {
    for (std::size_t g = 0; g < G; ++g) {
      b.z_x[b.index(day, g)] = inc.dt * day_x[ux.index[g]];
      b.z_y[b.index(day, g)] = inc.dt * day_y[vy.index[g]];
    }
    std::fill(day_x.begin(), day_x.end(), 0.0);
    std::fill(day_y.begin(), day_y.end(), 0.0);
  };

  for (std::size_t k = 0; k < n; ++k) {
    const int day = static_cast<int>(k / static_cast<std::size_t>(m));
    for (std::size_t j = 0; j < nu; ++j) {
      const double arg = ux.freq[j] * inc.dx[k];
      cx[j] = std::cos(arg);
      sx[j] = std::sin(arg);
      day_x[j] += cx[j];
    }
    for (std::size_t j = 0; j < nv; ++j) {
      const double arg = vy.freq[j] * inc.dy[k];
      cy[j] = std::cos(arg);
      sy[j] = std::sin(arg);
      day_y[j] += cy[j];
    }
    if (k > 0) {
      // Pair (k-1, k) belongs to the day of increment k-1.
      const int pday = static_cast<int>((k - 1) / static_cast<std::size_t>(m));
      if (opts.cross_day_pairs || pday == day) {
        double* row = &b.z_xy[b.index(pday, 0)];
        for (std::size_t g = 0; g < G; ++g) {
          const std::size_t iu = ux.index[g], iv = vy.index[g];
          row[g] += cx_prev[iu] * cy[iv] - sx_prev[iu] * sy[iv];
        }
      }
    }
    std::swap(cx, cx_prev);
    std::swap(sx, sx_prev);
    if ((k + 1) % static_cast<std::size_t>(m) == 0) flush_marginals(day);
  }
  for (auto& z : b.z_xy) z *= inc.dt;
  return b;
}

BlockStats daily_blocks(const SamplePath& x, const SamplePath& y,
                        std::span<const LaplacePoint> grid, BlockOptions opts) {
  return daily_blocks(make_sync_increments(x, y), grid, opts);
}

std::string to_string(Kernel k) { return k == Kernel::bartlett ? "bartlett" : "parzen"; }

Kernel parse_kernel(const std::string& s) {
  if (s == "bartlett") return Kernel::bartlett;
  if (s == "parzen") return Kernel::parzen;
  throw ConfigError("unknown kernel '" + s + "' (expected bartlett or parzen)");
}

int HacConfig::default_bandwidth(int n_days) {
  return static_cast<int>(std::floor(1.2 * std::cbrt(static_cast<double>(n_days))));
}

double kernel_weight(const HacConfig& cfg, int lag) {
  if (cfg.bandwidth < 0) throw ConfigError("HAC bandwidth must be >= 0");
  if (lag < 0 || lag > cfg.bandwidth) throw ConfigError("kernel lag outside [0, bandwidth]");
  const double q = static_cast<double>(lag) / (cfg.bandwidth + 1.0);
  if (cfg.kernel == Kernel::bartlett) return 1.0 - q;
  if (q <= 0.5) return 1.0 - 6.0 * q * q + 6.0 * q * q * q;
  const double r = 1.0 - q;
  return 2.0 * r * r * r;
}

Eigen::MatrixXd hac_matrix(const Eigen::MatrixXd& series, const HacConfig& cfg) {
  const Eigen::Index T = series.rows();
  if (cfg.bandwidth < 0) throw ConfigError("HAC bandwidth must be >= 0");
  if (T <= cfg.bandwidth) throw ConfigError("HAC bandwidth must be smaller than the sample size");
  const Eigen::RowVectorXd mean = series.colwise().mean();
  const Eigen::MatrixXd b = series.rowwise() - mean;
  const double inv_t = 1.0 / static_cast<double>(T);

  Eigen::MatrixXd v = inv_t * (b.transpose() * b);
  for (int l = 1; l <= cfg.bandwidth; ++l) {
    const Eigen::MatrixXd g = inv_t * (b.bottomRows(T - l).transpose() * b.topRows(T - l));
    v += kernel_weight(cfg, l) * (g + g.transpose());
  }
  return v;
}

LongRunCov hac_cov(const BlockStats& blocks, const HacConfig& cfg, std::size_t p, std::size_t q) {
  if (p >= blocks.n_points() || q >= blocks.n_points())
    throw ConfigError("hac_cov: grid index out of range");
  if (blocks.n_days <= cfg.bandwidth)
    throw ConfigError("hac_cov: bandwidth must be smaller than the number of days");
  Eigen::MatrixXd s(blocks.n_days, 6);
  for (int t = 0; t < blocks.n_days; ++t) {
    s(t, 0) = blocks.xy(t, p);
    s(t, 1) = blocks.x(t, p);
    s(t, 2) = blocks.y(t, p);
    s(t, 3) = blocks.xy(t, q);
    s(t, 4) = blocks.x(t, q);
    s(t, 5) = blocks.y(t, q);
  }
  return hac_matrix(s, cfg).block<3, 3>(0, 3);
}

namespace {

double column_mean(const std::vector<double>& z, const BlockStats& b, std::size_t g) {
  double acc = 0.0;
  for (int t = 0; t < b.n_days; ++t) acc += z[b.index(t, g)];
  return acc / b.n_days;
}

}  // namespace

std::array<double, 3> gamma_vec(const BlockStats& blocks, std::size_t g) {
  if (blocks.n_days < 1) throw DataError("gamma_vec: no days");
  if (g >= blocks.n_points()) throw ConfigError("gamma_vec: grid index out of range");
  return {1.0, -column_mean(blocks.z_y, blocks, g), -column_mean(blocks.z_x, blocks, g)};
}

double s_stat(const BlockStats& blocks, std::size_t g) {
  if (blocks.n_days < 2) throw DataError("s_stat: at least 2 days required");
  if (g >= blocks.n_points()) throw ConfigError("s_stat: grid index out of range");
  const double mxy = column_mean(blocks.z_xy, blocks, g);
  const double mx = column_mean(blocks.z_x, blocks, g);
  const double my = column_mean(blocks.z_y, blocks, g);
  return std::sqrt(static_cast<double>(blocks.n_days)) * (mxy - mx * my);
}

std::optional<std::string> long_span_warning(int n_days, double dt) {
  if (n_days * dt > 0.25)
    return "T * dt = " + format_double(n_days * dt) +
           " exceeds 0.25; the long-span approximation may be poor";
  return std::nullopt;
}

void write_blocks_csv(std::ostream& os, const BlockStats& blocks) {
  os << "day,u,v,z_xy,z_x,z_y\n";
  for (int t = 0; t < blocks.n_days; ++t) {
    for (std::size_t g = 0; g < blocks.n_points(); ++g) {
      os << (t + 1) << ',' << format_double(blocks.grid[g].u) << ','
         << format_double(blocks.grid[g].v) << ',' << format_double(blocks.xy(t, g)) << ','
         << format_double(blocks.x(t, g)) << ',' << format_double(blocks.y(t, g)) << '\n';
    }
  }
}

}  // namespace rjlt
