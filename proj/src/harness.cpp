#include "rjlt/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

#include "rjlt/asymptotics.hpp"
#include "rjlt/errors.hpp"
#include "rjlt/io.hpp"

namespace rjlt {

namespace {

// Child tags of a replication stream.
constexpr std::uint64_t kTagVol = 1;
constexpr std::uint64_t kTagPrice = 2;
constexpr std::uint64_t kTagXTimes = 3;
constexpr std::uint64_t kTagYTimes = 4;
constexpr std::uint64_t kTagAsync = 5;
constexpr std::uint64_t kTagMixture = 6;

}  // namespace

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
  if (workers < 1) throw ConfigError("worker count must be >= 1");
  if (workers == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::size_t err_index = std::numeric_limits<std::size_t>::max();
  std::exception_ptr err;
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lk(mu);
        if (i < err_index) {
          err_index = i;
          err = std::current_exception();
        }
      }
    }
  };
  const auto k = std::min<std::size_t>(static_cast<std::size_t>(workers), n);
  std::vector<std::thread> pool;
  pool.reserve(k);
  for (std::size_t t = 0; t < k; ++t) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

std::vector<LaplacePoint> table1_points() {
  std::vector<LaplacePoint> pts;
  for (double u : {2.5, 3.5, 4.5})
    for (double v : {2.75, 3.75, 4.75}) pts.push_back({u, v});
  return pts;
}

void McConfig::validate() const {
  model.validate();
  if (n_reps < 1) throw ConfigError("n_reps must be >= 1");
  if (model.n_steps < 4) throw ConfigError("n_steps must be >= 4");
  if (points.empty()) throw ConfigError("no Laplace points given");
  for (const auto& p : points) rjlt::validate(p);
  if (kinds.empty()) throw ConfigError("no estimator kinds given");
  if (workers < 1) throw ConfigError("worker count must be >= 1");
}

McResultRow summarize(EstimatorKind kind, LaplacePoint p, const std::vector<double>& errors) {
  if (errors.empty()) throw ConfigError("summarize: no replications");
  const double n = static_cast<double>(errors.size());
  double mean = 0.0;
  for (double e : errors) mean += e;
  mean /= n;
  double ss = 0.0;
  for (double e : errors) ss += (e - mean) * (e - mean);
  McResultRow r;
  r.kind = kind;
  r.u = p.u;
  r.v = p.v;
  r.bias = mean;
  r.n_reps = static_cast<int>(errors.size());
  r.sd = errors.size() > 1 ? std::sqrt(ss / (n - 1.0)) : std::numeric_limits<double>::quiet_NaN();
  r.mse = mean * mean + ss / n;
  return r;
}

namespace {

McRun collect(const McConfig& cfg, const std::vector<std::vector<double>>& err_by_rep,
              const std::vector<std::vector<double>>& z_by_rep,
              const std::vector<std::size_t>& floored) {
  const std::size_t n_rows = cfg.kinds.size() * cfg.points.size();
  McRun run;
  run.errors.assign(n_rows, std::vector<double>(cfg.n_reps));
  if (cfg.studentize) run.zstats.assign(n_rows, std::vector<double>(cfg.n_reps));
  for (int r = 0; r < cfg.n_reps; ++r) {
    for (std::size_t k = 0; k < n_rows; ++k) {
      run.errors[k][r] = err_by_rep[r][k];
      if (cfg.studentize) run.zstats[k][r] = z_by_rep[r][k];
    }
    run.n_gamma_floored += floored[r];
  }
  for (std::size_t ki = 0; ki < cfg.kinds.size(); ++ki)
    for (std::size_t pi = 0; pi < cfg.points.size(); ++pi) {
      const std::size_t k = ki * cfg.points.size() + pi;
      run.rows.push_back(summarize(cfg.kinds[ki], cfg.points[pi], run.errors[k]));
    }
  return run;
}

}  // namespace

McRun run_table1(const McConfig& cfg) {
  cfg.validate();
  for (auto k : cfg.kinds)
    if (k == EstimatorKind::Uasync)
      throw ConfigError("run_table1: the asynchronous estimator belongs to run_table6");
  if (!std::holds_alternative<OuVolPair>(cfg.model.model.vol))
    throw ConfigError("run_table1: model must use exp-OU volatility");

  const std::size_t n_rows = cfg.kinds.size() * cfg.points.size();
  const auto grid = SimGrid::make(cfg.model.t_end, cfg.model.n_steps);
  const auto times = grid.times();
  std::vector<std::vector<double>> err(cfg.n_reps), z(cfg.n_reps);
  std::vector<std::size_t> floored(cfg.n_reps, 0);

  parallel_for(static_cast<std::size_t>(cfg.n_reps), cfg.workers, [&](std::size_t r) {
    const RngStream rng(cfg.master_seed, r);
    auto rv = rng.child(kTagVol);
    auto rp = rng.child(kTagPrice);
    const VolPath vol = simulate_vol(cfg.model.model.vol, times, rv);
    const auto [x, y] = simulate_prices(cfg.model.model, vol, rp);
    const SyncIncrements inc = make_sync_increments(x, y);

    auto& e = err[r];
    e.resize(n_rows);
    if (cfg.studentize) z[r].resize(n_rows);
    for (std::size_t pi = 0; pi < cfg.points.size(); ++pi) {
      const auto p = cfg.points[pi];
      const double truth = true_elt(vol, p.u, p.v);
      double gv = 0.0, gu = 0.0;
      if (cfg.studentize) {
        gv = gamma_hat_v(inc, {p, p});
        gu = gamma_hat_u(inc, {p, p});
      }
      for (std::size_t ki = 0; ki < cfg.kinds.size(); ++ki) {
        const std::size_t k = ki * cfg.points.size() + pi;
        const double est = estimate(cfg.kinds[ki], inc, p).value;
        e[k] = est - truth;
        if (cfg.studentize) {
          const double g = cfg.kinds[ki] == EstimatorKind::V ? gv : gu;
          const auto s = studentize(est, truth, g, inc.dt);
          z[r][k] = s.z;
          floored[r] += s.gamma_floored ? 1 : 0;
        }
      }
    }
  });
  return collect(cfg, err, z, floored);
}

McRun run_table6(const McConfig& cfg_in) {
  McConfig cfg = cfg_in;
  cfg.kinds = {EstimatorKind::Uasync};
  cfg.studentize = false;
  cfg.validate();
  if (!(cfg.poisson_mean > 0.0)) throw ConfigError("run_table6: Poisson mean must be > 0");

  const std::size_t n_rows = cfg.points.size();
  std::vector<std::vector<double>> err(cfg.n_reps), z(cfg.n_reps);
  std::vector<std::size_t> floored(cfg.n_reps, 0);
  const double t_end = cfg.model.t_end;

  parallel_for(static_cast<std::size_t>(cfg.n_reps), cfg.workers, [&](std::size_t r) {
    const RngStream rng(cfg.master_seed, r);
    auto rx = rng.child(kTagXTimes);
    auto ry = rng.child(kTagYTimes);
    auto rs = rng.child(kTagAsync);
    const auto xt = sample_poisson_observation_times(cfg.poisson_mean, t_end, rx);
    const auto yt = cfg.sync_y_times ? xt : sample_poisson_observation_times(cfg.poisson_mean, t_end, ry);
    const AsyncDraw d = simulate_async(cfg.model.model, xt, yt, rs);
    d.x.validate();
    d.y.validate();

    err[r].resize(n_rows);
    for (std::size_t pi = 0; pi < n_rows; ++pi) {
      const auto p = cfg.points[pi];
      const double est = u_async_hat(d.x, d.y, p, cfg.cover_mode).value;
      const double truth = true_elt_window(d.vol, p.u, p.v, d.x.times.front(), d.x.times.back());
      err[r][pi] = est - truth;
    }
  });
  return collect(cfg, err, z, floored);
}

std::vector<Table5Row> run_table5(const Table5Config& cfg) {
  cfg.mc.validate();
  const auto* base = std::get_if<Ar1VolSpec>(&cfg.mc.model.model.vol);
  if (base == nullptr) throw ConfigError("run_table5: model must use daily AR(1) volatility");
  if (cfg.rho_primes.empty() || cfg.scenarios.empty() || cfg.alphas.empty())
    throw ConfigError("run_table5: empty rho', scenario or alpha list");
  for (double a : cfg.alphas)
    if (!(a > 0.0 && a < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  for (const auto& s : cfg.scenarios)
    if (s.n_days < 2 || s.steps_per_day < 2) throw ConfigError("run_table5: bad scenario");

  const std::size_t n_alpha = cfg.alphas.size();
  std::vector<Table5Row> out;
  for (double rp : cfg.rho_primes) {
    Ar1VolSpec spec = *base;
    spec.rho_prime = rp;
    spec.validate();
    BivariateModelSpec model = cfg.mc.model.model;
    model.vol = spec;
    for (const auto& sc : cfg.scenarios) {
      const std::size_t reps = static_cast<std::size_t>(cfg.mc.n_reps);
      std::vector<char> rej(reps * n_alpha, 0);
      std::vector<char> degen(reps, 0);
      // Replication r uses stream r in every cell (common random numbers).
      parallel_for(reps, cfg.mc.workers, [&](std::size_t r) {
        const RngStream rng(cfg.mc.master_seed, r);
        auto rv = rng.child(kTagVol);
        auto rpx = rng.child(kTagPrice);
        const VolPath vol = simulate_ar1_vol(spec, sc.n_days, sc.steps_per_day, rv);
        const auto [x, y] = simulate_prices(model, vol, rpx);
        const BlockStats b =
            daily_blocks(make_sync_increments(x, y), cfg.test.grid.points, cfg.test.block_options);
        const auto rm = rng.child(kTagMixture);
        const auto dec = reject_at(b, cfg.test, rm, cfg.alphas);
        for (std::size_t a = 0; a < n_alpha; ++a) rej[r * n_alpha + a] = dec.reject[a] ? 1 : 0;
        degen[r] = dec.report.degenerate ? 1 : 0;
      });
      int n_degen = 0;
      for (char d : degen) n_degen += d;
      for (std::size_t a = 0; a < n_alpha; ++a) {
        int hits = 0;
        for (std::size_t r = 0; r < reps; ++r) hits += rej[r * n_alpha + a];
        out.push_back({rp, sc.n_days, sc.steps_per_day, cfg.alphas[a],
                       static_cast<double>(hits) / static_cast<double>(reps), cfg.mc.n_reps, n_degen});
      }
    }
  }
  return out;
}

void write_mc_csv(std::ostream& os, const std::vector<McResultRow>& rows) {
  os << "kind,u,v,bias,sd,mse,n_reps\n";
  for (const auto& r : rows)
    os << to_string(r.kind) << ',' << format_double(r.u) << ',' << format_double(r.v) << ','
       << format_double(r.bias) << ',' << (std::isnan(r.sd) ? "NA" : format_double(r.sd)) << ','
       << format_double(r.mse) << ',' << r.n_reps << '\n';
}

void write_mc_table(std::ostream& os, const std::vector<McResultRow>& rows) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-7s %6s %6s %12s %12s %12s %7s\n", "kind", "u", "v", "bias", "sd",
                "mse", "reps");
  os << buf;
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%-7s %6s %6s %12s %12s %12s %7d\n",
                  std::string(to_string(r.kind)).c_str(), format_sig6(r.u).c_str(),
                  format_sig6(r.v).c_str(), format_sig6(r.bias).c_str(), format_sig6(r.sd).c_str(),
                  format_sig6(r.mse).c_str(), r.n_reps);
    os << buf;
  }
}

void write_samples_csv(std::ostream& os, const McRun& run, bool studentized) {
  const auto& cols = studentized ? run.zstats : run.errors;
  if (cols.empty()) throw ConfigError("no samples to write");
  for (std::size_t k = 0; k < run.rows.size(); ++k) {
    if (k) os << ',';
    os << to_string(run.rows[k].kind) << '_' << format_double(run.rows[k].u) << '_'
       << format_double(run.rows[k].v);
  }
  os << '\n';
  for (std::size_t r = 0; r < cols.front().size(); ++r) {
    for (std::size_t k = 0; k < cols.size(); ++k) {
      if (k) os << ',';
      os << format_double(cols[k][r]);
    }
    os << '\n';
  }
}

void write_table5_csv(std::ostream& os, const std::vector<Table5Row>& rows) {
  os << "rho_prime,n_days,steps_per_day,alpha,rejection_rate,n_reps,n_degenerate\n";
  for (const auto& r : rows)
    os << format_double(r.rho_prime) << ',' << r.n_days << ',' << r.steps_per_day << ','
       << format_double(r.alpha) << ',' << format_double(r.rejection_rate) << ',' << r.n_reps << ','
       << r.n_degenerate << '\n';
}

std::vector<HistBin> emit_histogram(const std::vector<double>& samples, int n_bins, double lo,
                                    double hi) {
  if (samples.empty()) throw DataError("histogram: no samples");
  if (n_bins < 2) throw ConfigError("histogram: need at least 2 bins");
  if (!(hi > lo)) throw ConfigError("histogram: empty range");
  const double width = (hi - lo) / n_bins;
  std::vector<HistBin> bins(static_cast<std::size_t>(n_bins));
  for (int b = 0; b < n_bins; ++b) {
    bins[b].left = lo + b * width;
    bins[b].right = b + 1 == n_bins ? hi : lo + (b + 1) * width;
  }
  std::size_t inside = 0;
  for (double s : samples) {
    if (!(s >= lo && s <= hi)) continue;
    auto b = static_cast<int>(std::floor((s - lo) / width));
    b = std::clamp(b, 0, n_bins - 1);
    // guard the floor against rounding at bin edges
    if (s < bins[b].left && b > 0) --b;
    else if (s >= bins[b].right && b + 1 < n_bins) ++b;
    ++bins[b].count;
    ++inside;
  }
  for (auto& b : bins)
    b.density = inside ? static_cast<double>(b.count) / (static_cast<double>(inside) * width) : 0.0;
  return bins;
}

void write_histogram_csv(std::ostream& os, const std::vector<HistBin>& bins) {
  os << "bin_left,bin_right,count,density\n";
  for (const auto& b : bins)
    os << format_double(b.left) << ',' << format_double(b.right) << ',' << b.count << ','
       << format_double(b.density) << '\n';
}

}  // namespace rjlt
