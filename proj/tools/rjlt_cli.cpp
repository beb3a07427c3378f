// rjlt: simulation, estimation and volatility dependence testing from the
// command line.  Exit codes: 0 ok, 1 usage, 2 data, 3 numerical.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <boost/math/distributions/normal.hpp>

#include "rjlt/asymptotics.hpp"
#include "rjlt/deptest.hpp"
#include "rjlt/errors.hpp"
#include "rjlt/harness.hpp"
#include "rjlt/ingest.hpp"
#include "rjlt/io.hpp"
#include "rjlt/model_config.hpp"

namespace fs = std::filesystem;
using namespace rjlt;

namespace {

struct Globals {
  std::uint64_t seed = 20240601;
  int reps = 1000;
  int workers = 1;
  std::string model = "ex1";
  std::string out;
  std::string kernel = "bartlett";
  int bandwidth = -1;
  double alpha = 0.05;
  int mc_draws = 100000;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

double to_double(const std::string& s) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("not a number: '" + s + "'");
  }
}

// "2.5:2.75,3.5:3.75"; "table1" gives the nine default points.
std::vector<LaplacePoint> parse_points(const std::string& s) {
  if (s.empty() || s == "table1") return table1_points();
  std::vector<LaplacePoint> pts;
  for (const auto& item : split(s, ',')) {
    const auto uv = split(item, ':');
    if (uv.size() != 2) throw ConfigError("bad Laplace point '" + item + "' (want u:v)");
    LaplacePoint p{to_double(uv[0]), to_double(uv[1])};
    validate(p);
    pts.push_back(p);
  }
  return pts;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> v;
  for (const auto& item : split(s, ',')) v.push_back(to_double(item));
  if (v.empty()) throw ConfigError("empty list");
  return v;
}

DepTestConfig test_config(const Globals& g, int grid_side, double grid_upper, bool cross_day) {
  DepTestConfig c;
  c.kernel = parse_kernel(g.kernel);
  if (g.bandwidth >= 0) c.bandwidth = g.bandwidth;
  c.alpha = g.alpha;
  c.mc_draws = g.mc_draws;
  c.grid = TestGrid::regular(grid_side, grid_upper);
  c.block_options.cross_day_pairs = cross_day;
  return c;
}

// Output sink: a file inside --out, or stdout when --out is empty.
class Sink {
 public:
  Sink(const std::string& dir, const std::string& file) {
    if (!dir.empty()) {
      fs::create_directories(dir);
      path_ = (fs::path(dir) / file).string();
      f_.open(path_);
      if (!f_) throw DataError("cannot write " + path_);
    }
  }
  std::ostream& os() { return f_.is_open() ? static_cast<std::ostream&>(f_) : std::cout; }

 private:
  std::string path_;
  std::ofstream f_;
};

void write_file(const std::string& dir, const std::string& name,
                const std::function<void(std::ostream&)>& fn) {
  Sink s(dir, name);
  fn(s.os());
}

McConfig mc_config(const Globals& g) {
  McConfig c;
  c.model = resolve_model(g.model);
  c.n_reps = g.reps;
  c.master_seed = g.seed;
  c.workers = g.workers;
  return c;
}

std::pair<SamplePath, SamplePath> load_pair(const std::string& paths, const std::string& xfile,
                                            const std::string& yfile) {
  if (!paths.empty()) return read_paths_csv(paths);
  if (xfile.empty() || yfile.empty()) throw ConfigError("give --paths or both --x and --y");
  return {read_series_csv(xfile), read_series_csv(yfile)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Realized joint Laplace transform estimation and volatility dependence testing"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Master random seed");
  app.add_option("--reps", g.reps, "Monte Carlo replications")->check(CLI::PositiveNumber);
  app.add_option("--workers", g.workers, "Worker threads")->check(CLI::PositiveNumber);
  auto* model_opt = app.add_option("--model", g.model, "Model preset (ex1..ex4) or INI file");
  app.add_option("--out", g.out, "Output directory (default: stdout)");
  app.add_option("--kernel", g.kernel, "HAC kernel")->check(CLI::IsMember({"bartlett", "parzen"}));
  app.add_option("--bandwidth", g.bandwidth, "HAC bandwidth (default floor(1.2 T^(1/3)))");
  app.add_option("--alpha", g.alpha, "Test level");
  app.add_option("--mc-draws", g.mc_draws, "Mixture Monte Carlo draws")->check(CLI::PositiveNumber);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Simulate a bivariate path");
  bool sim_async = false, sim_ticks = false;
  double poisson_mean = 1760.0;
  int sim_steps_per_day = 390;
  sim->add_flag("--async", sim_async, "Poisson observation times for X and Y");
  sim->add_option("--poisson-mean", poisson_mean, "Expected observation count");
  sim->add_flag("--ticks", sim_ticks, "Also write x/y as tick CSVs (timestamp,price)");
  sim->add_option("--steps-per-day", sim_steps_per_day, "Steps per day for --ticks");

  // estimate
  auto* est = app.add_subcommand("estimate", "Estimate the joint Laplace transform");
  std::string paths_file, x_file, y_file, points_arg, kinds_arg = "V,U,Vprime", cover_arg = "enclosing";
  bool with_ci = false;
  est->add_option("--paths", paths_file, "Synchronous CSV timestamp,x,y");
  est->add_option("--x", x_file, "Series CSV timestamp,value for X");
  est->add_option("--y", y_file, "Series CSV timestamp,value for Y");
  est->add_option("--points", points_arg, "u:v list, e.g. 3.5:3.75,2.5:2.75");
  est->add_option("--kinds", kinds_arg, "Estimator kinds: V,U,Vprime,Uasync");
  est->add_option("--cover", cover_arg, "Async cover: enclosing|leading")
      ->check(CLI::IsMember({"enclosing", "leading"}));
  est->add_flag("--with-ci", with_ci, "Studentized confidence intervals at level 1 - alpha");

  // blocks
  auto* blk = app.add_subcommand("blocks", "Daily block statistics");
  int grid_side = 10;
  double grid_upper = 1.0;
  bool no_cross_day = false;
  blk->add_option("--paths", paths_file, "Synchronous CSV timestamp,x,y")->required();
  blk->add_option("--grid-side", grid_side, "Grid points per axis");
  blk->add_option("--grid-upper", grid_upper, "Upper end of the (u, v) square");
  blk->add_flag("--no-cross-day", no_cross_day, "Drop summands straddling two days");

  // test
  auto* tst = app.add_subcommand("test", "Test independence of the two volatility processes");
  tst->add_option("--paths", paths_file, "Synchronous CSV timestamp,x,y")->required();
  tst->add_option("--grid-side", grid_side, "Grid points per axis");
  tst->add_option("--grid-upper", grid_upper, "Upper end of the (u, v) square");
  tst->add_flag("--no-cross-day", no_cross_day, "Drop summands straddling two days");

  // mc
  auto* mc = app.add_subcommand("mc", "Monte Carlo experiments");
  mc->require_subcommand(1);
  auto* t1 = mc->add_subcommand("table1", "Bias/SD/MSE of V, U, Vprime");
  bool studentized = false, samples = false;
  t1->add_option("--points", points_arg, "u:v list");
  t1->add_option("--kinds", kinds_arg, "Estimator kinds: V,U,Vprime");
  t1->add_flag("--studentize", studentized, "Also write studentized samples");
  t1->add_flag("--samples", samples, "Write per-replication errors");
  auto* t5 = mc->add_subcommand("table5", "Size and power of the dependence test");
  std::string rho_arg = "0,0.2,0.5,-0.5,0.8", scen_arg = "22x390,44x390,44x780,66x780",
              alphas_arg = "0.05,0.10";
  t5->add_option("--rho-primes", rho_arg, "Innovation correlations");
  t5->add_option("--scenarios", scen_arg, "DAYSxSTEPS list");
  t5->add_option("--alphas", alphas_arg, "Levels");
  auto* t6 = mc->add_subcommand("table6", "Asynchronous estimator under Poisson sampling");
  bool sync_y = false;
  t6->add_option("--points", points_arg, "u:v list");
  t6->add_option("--poisson-mean", poisson_mean, "Expected observation count");
  t6->add_flag("--sync-y", sync_y, "Observe Y at the X times");
  t6->add_option("--cover", cover_arg, "Cover: enclosing|leading")
      ->check(CLI::IsMember({"enclosing", "leading"}));
  t6->add_flag("--samples", samples, "Write per-replication errors");

  // hist
  auto* hst = app.add_subcommand("hist", "Histogram of one sample column");
  std::string hist_in, hist_col;
  int n_bins = 50;
  double lo = NAN, hi = NAN;
  hst->add_option("--in", hist_in, "Samples CSV with a header row")->required();
  hst->add_option("--column", hist_col, "Column name (default: first)");
  hst->add_option("--bins", n_bins, "Bin count");
  hst->add_option("--lo", lo, "Lower end (default: sample min)");
  hst->add_option("--hi", hi, "Upper end (default: sample max)");

  // pairwise
  auto* pw = app.add_subcommand("pairwise", "Pairwise test matrix over a directory of tick CSVs");
  std::string dir;
  double rescale = 15.0;
  SessionGrid session;
  int min_days = 5;
  pw->add_option("--dir", dir, "Directory of timestamp,price CSV files")->required();
  pw->add_option("--rescale", rescale, "Log-return scale factor");
  pw->add_option("--open", session.open, "Session open, fraction of a day");
  pw->add_option("--close", session.close, "Session close, fraction of a day");
  pw->add_option("--steps-per-day", session.steps_per_day, "Grid steps per session");
  pw->add_option("--min-days", min_days, "Minimum common days per pair");
  pw->add_option("--grid-side", grid_side, "Grid points per axis");
  pw->add_option("--grid-upper", grid_upper, "Upper end of the (u, v) square");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*sim) {
      const ModelConfig mcfg = resolve_model(g.model);
      RngStream rng(g.seed);
      if (sim_async) {
        auto rx = rng.child(3), ry = rng.child(4), rs = rng.child(5);
        const auto xt = sample_poisson_observation_times(poisson_mean, mcfg.t_end, rx);
        const auto yt = sample_poisson_observation_times(poisson_mean, mcfg.t_end, ry);
        const auto d = simulate_async(mcfg.model, xt, yt, rs);
        write_file(g.out, "x.csv", [&](std::ostream& os) { write_series_csv(os, d.x); });
        if (!g.out.empty()) {
          write_file(g.out, "y.csv", [&](std::ostream& os) { write_series_csv(os, d.y); });
          write_file(g.out, "vol.csv", [&](std::ostream& os) { write_vol_csv(os, d.vol); });
        }
      } else {
        const auto grid = SimGrid::make(mcfg.t_end, mcfg.n_steps);
        auto rv = rng.child(1), rp = rng.child(2);
        const auto vol = simulate_vol(mcfg.model.vol, grid.times(), rv);
        const auto [x, y] = simulate_prices(mcfg.model, vol, rp);
        write_file(g.out, "paths.csv", [&](std::ostream& os) { write_paths_csv(os, x, y); });
        if (!g.out.empty()) {
          write_file(g.out, "vol.csv", [&](std::ostream& os) { write_vol_csv(os, vol); });
          if (sim_ticks) {
            SessionGrid sg;
            write_file(g.out, "x_ticks.csv",
                       [&](std::ostream& os) { write_simulated_ticks(os, x, sim_steps_per_day, sg); });
            write_file(g.out, "y_ticks.csv",
                       [&](std::ostream& os) { write_simulated_ticks(os, y, sim_steps_per_day, sg); });
          }
        }
      }
      return 0;
    }

    if (*est) {
      const auto [x, y] = load_pair(paths_file, x_file, y_file);
      const auto pts = parse_points(points_arg);
      std::vector<EstimatorKind> kinds;
      for (const auto& k : split(kinds_arg, ',')) kinds.push_back(parse_estimator_kind(k));
      const bool sync = x.times == y.times;
      std::optional<SyncIncrements> inc;
      if (sync) inc = make_sync_increments(x, y);
      const double zq = boost::math::quantile(boost::math::normal(), 1.0 - g.alpha / 2.0);
      const CoverMode cover = cover_arg == "leading" ? CoverMode::kLeading : CoverMode::kEnclosing;

      Sink sink(g.out, "estimates.csv");
      auto& os = sink.os();
      os << "kind,u,v,estimate,ci_low,ci_high,gamma,gamma_floored\n";
      std::size_t n_ci = 0, n_floored = 0;
      for (auto k : kinds) {
        for (const auto& p : pts) {
          double value = 0.0;
          double lo_ci = NAN, hi_ci = NAN, gamma = NAN;
          bool floored = false;
          if (k == EstimatorKind::Uasync) {
            value = u_async_hat(x, y, p, cover).value;
          } else {
            if (!inc) throw DataError("synchronous estimators need X and Y on one grid");
            value = estimate(k, *inc, p).value;
            if (with_ci) {
              const double raw = k == EstimatorKind::V ? gamma_hat_v(*inc, {p, p})
                                                       : gamma_hat_u(*inc, {p, p});
              const auto st = studentize(value, value, raw, inc->dt);
              gamma = st.gamma;
              floored = st.gamma_floored;
              const double half = zq * std::sqrt(inc->dt * st.gamma);
              lo_ci = value - half;
              hi_ci = value + half;
              ++n_ci;
              n_floored += floored ? 1 : 0;
            }
          }
          os << to_string(k) << ',' << format_double(p.u) << ',' << format_double(p.v) << ','
             << format_double(value) << ',' << (std::isnan(lo_ci) ? "NA" : format_double(lo_ci))
             << ',' << (std::isnan(hi_ci) ? "NA" : format_double(hi_ci)) << ','
             << (std::isnan(gamma) ? "NA" : format_double(gamma)) << ',' << (floored ? 1 : 0)
             << '\n';
        }
      }
      if (n_ci > 0 && n_floored == n_ci) {
        std::cerr << "error: the covariance estimate is non-positive at every point\n";
        return 3;
      }
      if (n_floored > 0)
        std::cerr << "warning: " << n_floored << " covariance estimates floored at "
                  << kGammaFloor << "\n";
      return 0;
    }

    if (*blk) {
      const auto [x, y] = read_paths_csv(paths_file);
      const auto grid = TestGrid::regular(grid_side, grid_upper);
      const auto b = daily_blocks(x, y, grid.points, BlockOptions{!no_cross_day});
      write_file(g.out, "blocks.csv", [&](std::ostream& os) { write_blocks_csv(os, b); });
      return 0;
    }

    if (*tst) {
      const auto [x, y] = read_paths_csv(paths_file);
      const auto cfg = test_config(g, grid_side, grid_upper, !no_cross_day);
      const auto r = run_test(x, y, cfg, RngStream(g.seed));
      write_file(g.out, "test_report.json", [&](std::ostream& os) { os << report_json(r); });
      for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
      return r.degenerate ? 3 : 0;
    }

    if (*mc) {
      if (*t1) {
        McConfig c = mc_config(g);
        c.points = parse_points(points_arg);
        c.kinds.clear();
        for (const auto& k : split(kinds_arg, ',')) c.kinds.push_back(parse_estimator_kind(k));
        c.studentize = studentized;
        const auto run = run_table1(c);
        write_file(g.out, "table1.csv", [&](std::ostream& os) { write_mc_csv(os, run.rows); });
        if (!g.out.empty()) {
          write_mc_table(std::cout, run.rows);
          if (samples)
            write_file(g.out, "table1_errors.csv",
                       [&](std::ostream& os) { write_samples_csv(os, run, false); });
          if (studentized)
            write_file(g.out, "table1_studentized.csv",
                       [&](std::ostream& os) { write_samples_csv(os, run, true); });
        }
        if (run.n_gamma_floored > 0)
          std::cerr << "warning: " << run.n_gamma_floored << " covariance estimates floored\n";
        return 0;
      }
      if (*t6) {
        McConfig c = mc_config(g);
        c.points = parse_points(points_arg);
        c.poisson_mean = poisson_mean;
        c.sync_y_times = sync_y;
        c.cover_mode = cover_arg == "leading" ? CoverMode::kLeading : CoverMode::kEnclosing;
        const auto run = run_table6(c);
        write_file(g.out, "table6.csv", [&](std::ostream& os) { write_mc_csv(os, run.rows); });
        if (!g.out.empty()) {
          write_mc_table(std::cout, run.rows);
          if (samples)
            write_file(g.out, "table6_errors.csv",
                       [&](std::ostream& os) { write_samples_csv(os, run, false); });
        }
        return 0;
      }
      if (*t5) {
        Table5Config c;
        if (model_opt->count() == 0) g.model = "ex4";
        c.mc = mc_config(g);
        c.rho_primes = parse_list(rho_arg);
        c.alphas = parse_list(alphas_arg);
        c.scenarios.clear();
        for (const auto& s : split(scen_arg, ',')) {
          const auto parts = split(s, 'x');
          if (parts.size() != 2) throw ConfigError("bad scenario '" + s + "' (want DAYSxSTEPS)");
          c.scenarios.push_back({static_cast<int>(to_double(parts[0])),
                                 static_cast<int>(to_double(parts[1]))});
        }
        c.test = test_config(g, 10, 1.0, true);
        const auto rows = run_table5(c);
        write_file(g.out, "table5.csv", [&](std::ostream& os) { write_table5_csv(os, rows); });
        return 0;
      }
    }

    if (*hst) {
      std::ifstream in(hist_in);
      if (!in) throw DataError("cannot open " + hist_in);
      std::string line;
      if (!std::getline(in, line)) throw DataError(hist_in + ": empty file");
      const auto header = split_csv_line(line);
      std::size_t col = 0;
      if (!hist_col.empty()) {
        const auto it = std::find(header.begin(), header.end(), hist_col);
        if (it == header.end()) throw DataError(hist_in + ": no column '" + hist_col + "'");
        col = static_cast<std::size_t>(it - header.begin());
      }
      std::vector<double> xs;
      std::size_t lineno = 1;
      while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const auto f = split_csv_line(line);
        if (f.size() <= col)
          throw DataError(hist_in + ":" + std::to_string(lineno) + ": missing column");
        if (f[col] == "NA") continue;
        try {
          xs.push_back(to_double(f[col]));
        } catch (const ConfigError&) {
          throw DataError(hist_in + ":" + std::to_string(lineno) + ": not a number");
        }
      }
      if (xs.empty()) throw DataError(hist_in + ": no samples");
      const auto [mn, mx] = std::minmax_element(xs.begin(), xs.end());
      if (std::isnan(lo)) lo = *mn;
      if (std::isnan(hi)) hi = *mx;
      if (!(hi > lo)) hi = lo + 1.0;
      const auto bins = emit_histogram(xs, n_bins, lo, hi);
      write_file(g.out, "histogram.csv", [&](std::ostream& os) { write_histogram_csv(os, bins); });
      return 0;
    }

    if (*pw) {
      std::vector<std::string> files;
      for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path().string());
      std::sort(files.begin(), files.end());
      std::vector<TickSeries> series;
      for (const auto& f : files) {
        series.push_back(ingest_csv(f, rescale));
        const auto& s = series.back();
        std::cerr << s.symbol << ": " << s.size() << " ticks, timestamps "
                  << (s.format == TimestampFormat::iso8601 ? "iso8601" : "fractional-day") << "\n";
        for (const auto& d : s.diagnostics) std::cerr << "  " << d << "\n";
      }
      PairwiseConfig pc;
      pc.session = session;
      pc.test = test_config(g, grid_side, grid_upper, false);
      pc.min_days = min_days;
      pc.seed = g.seed;
      pc.workers = g.workers;
      const auto res = pairwise_test_matrix(series, pc);
      for (const auto& d : res.diagnostics) std::cerr << d << "\n";
      write_file(g.out, "pvalues.csv", [&](std::ostream& os) { write_pairwise_csv(os, res); });
      if (!g.out.empty()) {
        write_file(g.out, "pairs.csv", [&](std::ostream& os) {
          os << summary_header() << '\n';
          for (const auto& e : res.entries)
            os << summary_row(res.symbols[e.i] + "/" + res.symbols[e.j], e.report) << '\n';
        });
      }
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
