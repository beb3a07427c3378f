#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "rjlt/deptest.hpp"
#include "rjlt/estimators.hpp"
#include "rjlt/model_config.hpp"

namespace rjlt {

// Runs fn(0..n-1) on `workers` threads.  Work items must write only to their
// own slots; the first exception (lowest index) is rethrown.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

// u in {2.5, 3.5, 4.5} (outer) times v in {2.75, 3.75, 4.75}.
std::vector<LaplacePoint> table1_points();

struct McConfig {
  ModelConfig model = preset_model("ex1");
  int n_reps = 1000;
  std::vector<LaplacePoint> points = table1_points();
  std::vector<EstimatorKind> kinds{EstimatorKind::V, EstimatorKind::U, EstimatorKind::Vprime};
  std::uint64_t master_seed = 20240601;
  int workers = 1;
  // Also compute studentized statistics for V, U and Vprime.
  bool studentize = false;
  // Asynchronous design: Poisson(mean) observation counts on [0, t_end].
  double poisson_mean = 1760.0;
  bool sync_y_times = false;  // Y observed at the X times
  CoverMode cover_mode = CoverMode::kEnclosing;

  void validate() const;
};

// Monte Carlo summary of estimate - true ELT.  sd is the sample standard
// deviation (divisor n - 1, NaN for a single replication); mse is the mean
// squared error, so mse = bias^2 + sd^2 (n - 1) / n.
struct McResultRow {
  EstimatorKind kind = EstimatorKind::U;
  double u = 0.0;
  double v = 0.0;
  double bias = 0.0;
  double sd = 0.0;
  double mse = 0.0;
  int n_reps = 0;
};

McResultRow summarize(EstimatorKind kind, LaplacePoint p, const std::vector<double>& errors);

// Rows are ordered kind-major, then by point.  errors[r] and (when requested)
// zstats[r] hold the per-replication samples behind rows[r].
struct McRun {
  std::vector<McResultRow> rows;
  std::vector<std::vector<double>> errors;
  std::vector<std::vector<double>> zstats;
  std::size_t n_gamma_floored = 0;
};

// Synchronous experiment on the model's uniform grid (V, U, Vprime).
McRun run_table1(const McConfig& cfg);
// Asynchronous experiment: Poisson X times, independent Poisson Y times
// (or Y at the X times), estimator Uasync.
McRun run_table6(const McConfig& cfg);

struct Table5Scenario {
  int n_days = 22;
  int steps_per_day = 390;
};

struct Table5Config {
  McConfig mc;  // model must use AR(1) volatility
  std::vector<double> rho_primes{0.0, 0.2, 0.5, -0.5, 0.8};
  std::vector<Table5Scenario> scenarios{{22, 390}, {44, 390}, {44, 780}, {66, 780}};
  std::vector<double> alphas{0.05, 0.10};
  DepTestConfig test;
};

struct Table5Row {
  double rho_prime = 0.0;
  int n_days = 0;
  int steps_per_day = 0;
  double alpha = 0.05;
  double rejection_rate = 0.0;
  int n_reps = 0;
  int n_degenerate = 0;
};

std::vector<Table5Row> run_table5(const Table5Config& cfg);

void write_mc_csv(std::ostream& os, const std::vector<McResultRow>& rows);
// Six significant digits, fixed columns.
void write_mc_table(std::ostream& os, const std::vector<McResultRow>& rows);
// One column per row of the run: header kind_u_v, one line per replication.
void write_samples_csv(std::ostream& os, const McRun& run, bool studentized);
void write_table5_csv(std::ostream& os, const std::vector<Table5Row>& rows);

struct HistBin {
  double left = 0.0;
  double right = 0.0;
  std::size_t count = 0;
  double density = 0.0;
};

// Equal-width bins [left, right), the last one closed.  Samples outside
// [lo, hi] are ignored; densities are normalised by the in-range count.
std::vector<HistBin> emit_histogram(const std::vector<double>& samples, int n_bins, double lo,
                                    double hi);
void write_histogram_csv(std::ostream& os, const std::vector<HistBin>& bins);

}  // namespace rjlt
