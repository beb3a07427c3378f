#pragma once

#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "rjlt/rng.hpp"
#include "rjlt/types.hpp"

namespace rjlt {

// Uniform simulation grid on [0, t_end] with n_steps increments.
struct SimGrid {
  double t_end = 1.0;
  int n_steps = 2;

  static SimGrid make(double t_end, int n_steps);

  double dt() const { return t_end / n_steps; }
  // Node times k * dt, k = 0..n_steps; the last node is t_end exactly.
  std::vector<double> times() const;
  void validate() const;
};

// sigma_t = exp(a + b * tau_t), d tau = -kappa tau dt + dB.
struct OuExpVolSpec {
  double kappa = 0.025;
  double a = 0.0;
  double b = 0.0;
  double tau0 = 0.0;
  // Draw tau0 from N(0, 1/(2 kappa)) instead of using tau0.
  bool stationary_init = false;

  void validate() const;
};

// Daily AR(1) log-volatility factors with correlated innovations:
//   tau^x_t = phi_x tau^x_{t-1} + eps^x_t,  tau^y_t = phi_y tau^y_{t-1} + eps^y_t,
//   eps^y = rho' eps^x + sqrt(1 - rho'^2) eps*.
// Spot volatility exp(a + b tau) is constant within each day.
struct Ar1VolSpec {
  double phi_x = 0.5;
  double phi_y = 0.7;
  double rho_prime = 0.0;
  double a_x = 0.3125;
  double b_x = -0.125;
  double a_y = 0.45;
  double b_y = -0.325;
  double tau0_x = 0.0;
  double tau0_y = 0.0;
  bool stationary_init = false;

  void validate() const;
};

struct JumpSpec {
  enum class Kind { none, compound_poisson, alpha_stable };

  Kind kind = Kind::none;
  double intensity = 0.0;  // jumps per day (compound Poisson)
  double size_sd = 1.0;    // N(0, size_sd^2) jump sizes
  double alpha = 0.5;      // stable index, 0 < alpha < 1
  double scale = 1.0;      // stable scale

  static JumpSpec none() { return {}; }
  static JumpSpec compound_poisson(double intensity, double size_sd);
  static JumpSpec alpha_stable(double alpha, double scale = 1.0);

  void validate() const;
};

struct OuVolPair {
  OuExpVolSpec x;
  OuExpVolSpec y;
};

using VolSpec = std::variant<OuVolPair, Ar1VolSpec>;

struct BivariateModelSpec {
  double drift_x = 0.0;
  double drift_y = 0.0;
  double rho = 0.0;  // constant Brownian correlation
  VolSpec vol = OuVolPair{};
  JumpSpec jump_x;
  JumpSpec jump_y;

  void validate() const;
};

// Exact OU transition on arbitrary node times; returns exp(a + b tau_k)
// for every node.
std::vector<double> simulate_ou_exp_vol(const OuExpVolSpec& spec,
                                        std::span<const double> times,
                                        RngStream& rng);
inline std::vector<double> simulate_ou_exp_vol(const OuExpVolSpec& spec, const SimGrid& grid,
                                               RngStream& rng) {
  const auto times = grid.times();
  return simulate_ou_exp_vol(spec, times, rng);
}

// Daily AR(1) factors (tau_1..tau_{n_days}) together with the innovations
// that produced them; exposed for diagnostics and tests.
struct Ar1Factors {
  std::vector<double> tau_x;
  std::vector<double> tau_y;
  std::vector<double> eps_x;
  std::vector<double> eps_y;
};

Ar1Factors simulate_ar1_factors(const Ar1VolSpec& spec, int n_days, RngStream& rng);

// Piecewise-constant daily volatility on the grid k / steps_per_day.
VolPath simulate_ar1_vol(const Ar1VolSpec& spec, int n_days, int steps_per_day, RngStream& rng);

// Volatility for either spec kind on arbitrary node times.  For the AR(1)
// kind, the interval starting at node t belongs to day floor(t) + 1.
VolPath simulate_vol(const VolSpec& spec, std::span<const double> times, RngStream& rng);

// Euler recursion on the volatility nodes:
//   dZ_i = b^Z dt_i + sigma^Z_{i-1} dW^Z_i + J^Z_i,  dW^Y = rho dW^X + sqrt(1-rho^2) dW*.
// Both paths start at 0.
std::pair<SamplePath, SamplePath> simulate_prices(const BivariateModelSpec& model,
                                                  const VolPath& vol, RngStream& rng);

// Standard symmetric alpha-stable variate (characteristic function
// exp(-|t|^alpha)) from the Chambers-Mallows-Stuck transform of
// angle in (-pi/2, pi/2) and an Exp(1) variate.
double cms_symmetric_stable(double alpha, double angle, double exp_draw);

std::vector<double> sample_alpha_stable_increments(double alpha, double scale, int n, double dt,
                                                   RngStream& rng);

struct JumpDraws {
  std::vector<double> times;
  std::vector<double> sizes;
};

// Compound Poisson jumps on [t0, t0 + t_span]; times sorted.
JumpDraws sample_compound_poisson(double intensity, double size_sd, double t_span,
                                  RngStream& rng, double t0 = 0.0);

// Sorted event times of a homogeneous Poisson process on [0, t_span] with
// expected count `mean_count`; 0 is prepended.  Throws DataError when no
// event is drawn.
std::vector<double> sample_poisson_observation_times(double mean_count, double t_span,
                                                     RngStream& rng);

// Left-endpoint Riemann sum of exp(-u sigma_x^2 - v sigma_y^2) over the nodes.
double true_elt(const VolPath& vol, double u, double v);

// Same integral restricted to [t_lo, t_hi]; nodes must bracket both ends.
double true_elt_window(const VolPath& vol, double u, double v, double t_lo, double t_hi);

struct AsyncDraw {
  SamplePath x;
  SamplePath y;
  VolPath vol;  // on the union of both observation grids
};

// Simulate on the union of the X and Y observation times and extract each
// series at its own times.
AsyncDraw simulate_async(const BivariateModelSpec& model, std::span<const double> x_times,
                         std::span<const double> y_times, RngStream& rng);

}  // namespace rjlt
