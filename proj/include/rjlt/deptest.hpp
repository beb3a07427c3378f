#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rjlt/longspan.hpp"
#include "rjlt/rng.hpp"

namespace rjlt {

// Regular grid u_i = i * upper / side, v_j = j * upper / side, i, j = 1..side,
// stored row-major (u outer, v inner), each cell weighing (upper / side)^2.
struct TestGrid {
  std::vector<LaplacePoint> points;
  double cell_weight = 0.01;
  int side = 10;
  double upper = 1.0;

  static TestGrid regular(int side = 10, double upper = 1.0);
};

struct MixtureSpec {
  std::vector<double> eigenvalues;  // nonincreasing, all >= 0
  int n_kept = 0;
  int n_discarded_negative = 0;
  double cell_weight = 0.01;
};

// cell_weight * sum_g s_stat(g)^2.  Throws DataError if the blocks were not
// computed on `grid`.
double test_statistic(const BlockStats& blocks, const TestGrid& grid);

// Covariance matrix of the limiting gamma . Phi field over the block grid:
// entry (g, h) = gamma(g) V(g, h) gamma(h)^T, symmetrized, with the diagonal
// clamped at zero.
Eigen::MatrixXd limit_cov_matrix(const BlockStats& blocks, const HacConfig& cfg);

// Eigenvalues of the symmetric matrix with negative ones discarded.
MixtureSpec mixture_spec(const Eigen::MatrixXd& cov, double cell_weight);

// Sorted Monte Carlo draws of cell_weight * sum_i lambda_i chi2_1.  Draws
// come in fixed chunks, chunk c using rng.child(c), so the sample does not
// depend on how chunks are scheduled.
class MixtureSample {
 public:
  static constexpr int kChunk = 4096;

  MixtureSample(const MixtureSpec& spec, int draws, const RngStream& rng);

  // Empirical (1 - alpha) quantile (order statistic ceil((1 - alpha) N)).
  double quantile(double alpha) const;
  // (#{draws >= statistic} + 1) / (N + 1).
  double p_value(double statistic) const;
  bool degenerate() const { return degenerate_; }
  const std::vector<double>& draws() const { return draws_; }

 private:
  std::vector<double> draws_;
  bool degenerate_ = false;
};

struct QuantileResult {
  double value = 0.0;
  bool degenerate = false;  // every eigenvalue was zero
};

QuantileResult mixture_quantile(const MixtureSpec& m, double alpha, int mc_draws,
                                const RngStream& rng);
double p_value(double statistic, const MixtureSpec& m, int mc_draws, const RngStream& rng);

struct DepTestConfig {
  Kernel kernel = Kernel::bartlett;
  std::optional<int> bandwidth;  // default floor(1.2 T^{1/3})
  double alpha = 0.05;
  int mc_draws = 100000;
  TestGrid grid = TestGrid::regular();
  BlockOptions block_options;
};

struct TestReport {
  double statistic = 0.0;
  double critical_value = 0.0;
  double p_value = 1.0;
  double alpha = 0.05;
  bool reject = false;
  bool degenerate = false;
  MixtureSpec mixture;
  // configuration echo
  int n_days = 0;
  int steps_per_day = 0;
  double dt = 0.0;
  int bandwidth = 0;
  Kernel kernel = Kernel::bartlett;
  int mc_draws = 0;
  std::uint64_t seed = 0;
  int grid_side = 10;
  double grid_upper = 1.0;
  std::vector<std::string> warnings;
};

TestReport run_test(const BlockStats& blocks, const DepTestConfig& cfg, const RngStream& rng);
TestReport run_test(const SyncIncrements& inc, const DepTestConfig& cfg, const RngStream& rng);
TestReport run_test(const SamplePath& x, const SamplePath& y, const DepTestConfig& cfg,
                    const RngStream& rng);

// Rejection decisions at several levels from one set of mixture draws; the
// report is the one run_test would give at cfg.alpha.
struct LevelDecisions {
  TestReport report;
  std::vector<bool> reject;
};
LevelDecisions reject_at(const BlockStats& blocks, const DepTestConfig& cfg,
                            const RngStream& rng, const std::vector<double>& alphas);

// Single structured document, stable field order.
std::string report_json(const TestReport& r);
std::string summary_header();
std::string summary_row(const std::string& pair_id, const TestReport& r);

}  // namespace rjlt
