#include "rjlt/deptest.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "rjlt/errors.hpp"
#include "rjlt/io.hpp"

namespace rjlt {

TestGrid TestGrid::regular(int side, double upper) {
  if (side < 1) throw ConfigError("test grid: side must be >= 1");
  if (!(upper > 0.0)) throw ConfigError("test grid: upper bound must be > 0");
  TestGrid g;
  g.side = side;
  g.upper = upper;
  const double step = upper / side;
  g.cell_weight = step * step;
  g.points.reserve(static_cast<std::size_t>(side) * side);
  for (int i = 1; i <= side; ++i)
    for (int j = 1; j <= side; ++j) g.points.push_back({i * step, j * step});
  return g;
}

double test_statistic(const BlockStats& blocks, const TestGrid& grid) {
  if (blocks.grid != grid.points)
    throw DataError("test_statistic: blocks were computed on a different grid");
  double acc = 0.0;
  for (std::size_t g = 0; g < blocks.n_points(); ++g) {
    const double s = s_stat(blocks, g);
    acc += s * s;
  }
  return grid.cell_weight * acc;
}

Eigen::MatrixXd limit_cov_matrix(const BlockStats& blocks, const HacConfig& cfg) {
  if (blocks.n_days <= cfg.bandwidth)
    throw ConfigError("limit_cov_matrix: bandwidth must be smaller than the number of days");
  const std::size_t G = blocks.n_points();
  // gamma(g) . (z_xy, z_x, z_y)_t per day.  The HAC form is bilinear, so the
  // long-run covariance of this projected series is gamma(g) V(g, h) gamma(h)^T.
  Eigen::MatrixXd w(blocks.n_days, static_cast<Eigen::Index>(G));
  for (std::size_t g = 0; g < G; ++g) {
    const auto gm = gamma_vec(blocks, g);
    for (int t = 0; t < blocks.n_days; ++t)
      w(t, static_cast<Eigen::Index>(g)) =
          gm[0] * blocks.xy(t, g) + gm[1] * blocks.x(t, g) + gm[2] * blocks.y(t, g);
  }
  Eigen::MatrixXd m = hac_matrix(w, cfg);
  m = 0.5 * (m + m.transpose()).eval();
  for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, i) = std::max(m(i, i), 0.0);
  return m;
}

MixtureSpec mixture_spec(const Eigen::MatrixXd& cov, double cell_weight) {
  if (cov.rows() != cov.cols() || cov.rows() == 0)
    throw DataError("mixture_spec: expected a nonempty square matrix");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("symmetric eigensolver failed");
  MixtureSpec m;
  m.cell_weight = cell_weight;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double lam = es.eigenvalues()(i);
    if (lam < 0.0) {
      ++m.n_discarded_negative;
    } else {
      m.eigenvalues.push_back(lam);
    }
  }
  std::sort(m.eigenvalues.begin(), m.eigenvalues.end(), std::greater<>());
  m.n_kept = static_cast<int>(m.eigenvalues.size());
  return m;
}

MixtureSample::MixtureSample(const MixtureSpec& spec, int draws, const RngStream& rng) {
  if (draws < 1) throw ConfigError("mixture: draw count must be >= 1");
  degenerate_ = std::none_of(spec.eigenvalues.begin(), spec.eigenvalues.end(),
                             [](double l) { return l > 0.0; });
  draws_.assign(static_cast<std::size_t>(draws), 0.0);
  if (!degenerate_) {
    const int n_chunks = (draws + kChunk - 1) / kChunk;
    for (int c = 0; c < n_chunks; ++c) {
      auto r = rng.child(static_cast<std::uint64_t>(c));
      const int end = std::min(draws, (c + 1) * kChunk);
      for (int d = c * kChunk; d < end; ++d) {
        double acc = 0.0;
        for (double lam : spec.eigenvalues) {
          const double z = r.normal();
          acc += lam * z * z;
        }
        draws_[d] = spec.cell_weight * acc;
      }
    }
  }
  std::sort(draws_.begin(), draws_.end());
}

double MixtureSample::quantile(double alpha) const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  const auto n = static_cast<double>(draws_.size());
  auto k = static_cast<std::size_t>(std::ceil((1.0 - alpha) * n - 1e-9));
  k = std::clamp<std::size_t>(k, 1, draws_.size());
  return draws_[k - 1];
}

double MixtureSample::p_value(double statistic) const {
  const auto it = std::lower_bound(draws_.begin(), draws_.end(), statistic);
  const auto at_least = static_cast<double>(draws_.end() - it);
  return (at_least + 1.0) / (static_cast<double>(draws_.size()) + 1.0);
}

QuantileResult mixture_quantile(const MixtureSpec& m, double alpha, int mc_draws,
                                const RngStream& rng) {
  const MixtureSample s(m, mc_draws, rng);
  if (s.degenerate()) return {0.0, true};
  return {s.quantile(alpha), false};
}

double p_value(double statistic, const MixtureSpec& m, int mc_draws, const RngStream& rng) {
  return MixtureSample(m, mc_draws, rng).p_value(statistic);
}

namespace {

struct TestCore {
  TestReport report;
  MixtureSample sample;
};

TestCore run_core(const BlockStats& blocks, const DepTestConfig& cfg, const RngStream& rng) {
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  HacConfig hac{cfg.kernel, cfg.bandwidth.value_or(HacConfig::default_bandwidth(blocks.n_days))};
  if (blocks.n_days < 2) throw DataError("dependence test needs at least 2 days");

  TestReport r;
  r.statistic = test_statistic(blocks, cfg.grid);
  const Eigen::MatrixXd cov = limit_cov_matrix(blocks, hac);
  r.mixture = mixture_spec(cov, cfg.grid.cell_weight);
  MixtureSample sample(r.mixture, cfg.mc_draws, rng);

  r.alpha = cfg.alpha;
  r.degenerate = sample.degenerate();
  r.critical_value = r.degenerate ? 0.0 : sample.quantile(cfg.alpha);
  r.p_value = sample.p_value(r.statistic);
  r.reject = r.statistic >= r.critical_value;
  r.n_days = blocks.n_days;
  r.steps_per_day = blocks.steps_per_day;
  r.dt = blocks.dt;
  r.bandwidth = hac.bandwidth;
  r.kernel = hac.kernel;
  r.mc_draws = cfg.mc_draws;
  r.seed = rng.master_seed();
  r.grid_side = cfg.grid.side;
  r.grid_upper = cfg.grid.upper;
  if (blocks.dt > 0.0) {
    if (auto w = long_span_warning(blocks.n_days, blocks.dt)) r.warnings.push_back(*w);
  }
  if (r.degenerate) r.warnings.push_back("degenerate spectrum: every eigenvalue is zero");
  return {std::move(r), std::move(sample)};
}

}  // namespace

TestReport run_test(const BlockStats& blocks, const DepTestConfig& cfg, const RngStream& rng) {
  return run_core(blocks, cfg, rng).report;
}

TestReport run_test(const SyncIncrements& inc, const DepTestConfig& cfg, const RngStream& rng) {
  return run_test(daily_blocks(inc, cfg.grid.points, cfg.block_options), cfg, rng);
}

TestReport run_test(const SamplePath& x, const SamplePath& y, const DepTestConfig& cfg,
                    const RngStream& rng) {
  return run_test(make_sync_increments(x, y), cfg, rng);
}

LevelDecisions reject_at(const BlockStats& blocks, const DepTestConfig& cfg, const RngStream& rng,
                         const std::vector<double>& alphas) {
  auto core = run_core(blocks, cfg, rng);
  LevelDecisions out;
  out.reject.reserve(alphas.size());
  for (double a : alphas) {
    const double crit = core.sample.degenerate() ? 0.0 : core.sample.quantile(a);
    out.reject.push_back(core.report.statistic >= crit);
  }
  out.report = std::move(core.report);
  return out;
}

std::string report_json(const TestReport& r) {
  nlohmann::ordered_json j;
  j["statistic"] = r.statistic;
  j["critical_value"] = r.critical_value;
  j["p_value"] = r.p_value;
  j["alpha"] = r.alpha;
  j["reject"] = r.reject;
  j["degenerate"] = r.degenerate;
  j["mixture"] = {{"n_kept", r.mixture.n_kept},
                  {"n_discarded_negative", r.mixture.n_discarded_negative},
                  {"cell_weight", r.mixture.cell_weight},
                  {"eigenvalues", r.mixture.eigenvalues}};
  j["config"] = {{"n_days", r.n_days},         {"steps_per_day", r.steps_per_day},
                 {"dt", r.dt},                 {"bandwidth", r.bandwidth},
                 {"kernel", to_string(r.kernel)}, {"mc_draws", r.mc_draws},
                 {"seed", r.seed},             {"grid_side", r.grid_side},
                 {"grid_upper", r.grid_upper}};
  j["warnings"] = r.warnings;
  return j.dump(2) + "\n";
}

std::string summary_header() { return "pair_id,statistic,d_alpha,p_value,n_discarded"; }

std::string summary_row(const std::string& pair_id, const TestReport& r) {
  return pair_id + "," + format_double(r.statistic) + "," + format_double(r.critical_value) +
         "," + format_double(r.p_value) + "," + std::to_string(r.mixture.n_discarded_negative);
}

}  // namespace rjlt
