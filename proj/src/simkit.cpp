#include "rjlt/simkit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "rjlt/errors.hpp"

namespace rjlt {
namespace {

// Stream tags; each random ingredient draws from its own child stream so
// that switching one ingredient on or off leaves the others unchanged.
constexpr std::uint64_t kTagVolX = 1;
constexpr std::uint64_t kTagVolY = 2;
constexpr std::uint64_t kTagAr1 = 3;
constexpr std::uint64_t kTagBrownian = 10;
constexpr std::uint64_t kTagJumpX = 20;
constexpr std::uint64_t kTagJumpY = 21;
constexpr std::uint64_t kTagAsyncVol = 100;
constexpr std::uint64_t kTagAsyncPrice = 200;

void check_times(std::span<const double> times) {
  if (times.size() < 2) throw DataError("simulation needs at least two node times");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) throw DataError("simulation node times must increase");
  }
}

// Adds the jumps of `spec` over the increments defined by `times`.
void add_jumps(const JumpSpec& spec, std::span<const double> times, std::vector<double>& incs,
               RngStream& rng) {
  switch (spec.kind) {
    case JumpSpec::Kind::none:
      return;
    case JumpSpec::Kind::compound_poisson: {
      const double t0 = times.front();
      const auto draws = sample_compound_poisson(spec.intensity, spec.size_sd,
                                                 times.back() - t0, rng, t0);
      for (std::size_t j = 0; j < draws.times.size(); ++j) {
        // Increment k (1-based) covers (t_{k-1}, t_k].
        auto it = std::lower_bound(times.begin(), times.end(), draws.times[j]);
        std::size_t k = static_cast<std::size_t>(it - times.begin());
        k = std::clamp<std::size_t>(k, 1, incs.size());
        incs[k - 1] += draws.sizes[j];
      }
      return;
    }
    case JumpSpec::Kind::alpha_stable: {
      if (spec.scale == 0.0) return;
      for (std::size_t k = 0; k < incs.size(); ++k) {
        const double dt = times[k + 1] - times[k];
        const double angle = std::numbers::pi * (rng.uniform_open() - 0.5);
        const double w = -std::log(rng.uniform_open());
        incs[k] += spec.scale * std::pow(dt, 1.0 / spec.alpha) *
                   cms_symmetric_stable(spec.alpha, angle, w);
      }
      return;
    }
  }
}

}  // namespace

SimGrid SimGrid::make(double t_end, int n_steps) {
  SimGrid g{t_end, n_steps};
  g.validate();
  return g;
}

void SimGrid::validate() const {
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw ConfigError("grid: t_end must be > 0");
  if (n_steps < 2) throw ConfigError("grid: n_steps must be >= 2");
}

std::vector<double> SimGrid::times() const {
  std::vector<double> t(static_cast<std::size_t>(n_steps) + 1);
  for (int k = 0; k <= n_steps; ++k) t[k] = t_end * (static_cast<double>(k) / n_steps);
  t.back() = t_end;
  return t;
}

void OuExpVolSpec::validate() const {
  if (!(kappa > 0.0)) throw ConfigError("OU volatility: kappa must be > 0");
}

void Ar1VolSpec::validate() const {
  if (!(std::abs(phi_x) < 1.0) || !(std::abs(phi_y) < 1.0))
    throw ConfigError("AR(1) volatility: |phi| must be < 1");
  if (!(std::abs(rho_prime) <= 1.0))
    throw ConfigError("AR(1) volatility: |rho_prime| must be <= 1");
}

JumpSpec JumpSpec::compound_poisson(double intensity, double size_sd) {
  JumpSpec s;
  s.kind = Kind::compound_poisson;
  s.intensity = intensity;
  s.size_sd = size_sd;
  s.validate();
  return s;
}

JumpSpec JumpSpec::alpha_stable(double alpha, double scale) {
  JumpSpec s;
  s.kind = Kind::alpha_stable;
  s.alpha = alpha;
  s.scale = scale;
  s.validate();
  return s;
}

void JumpSpec::validate() const {
  switch (kind) {
    case Kind::none:
      return;
    case Kind::compound_poisson:
      if (!(intensity >= 0.0)) throw ConfigError("jumps: intensity must be >= 0");
      if (!(size_sd >= 0.0)) throw ConfigError("jumps: size_sd must be >= 0");
      return;
    case Kind::alpha_stable:
      if (!(alpha > 0.0 && alpha < 1.0))
        throw ConfigError("jumps: stable alpha must lie in (0, 1)");
      if (!(scale >= 0.0)) throw ConfigError("jumps: stable scale must be >= 0");
      return;
  }
}

void BivariateModelSpec::validate() const {
  if (!(std::abs(rho) <= 1.0)) throw ConfigError("model: |rho| must be <= 1");
  std::visit(
      [](const auto& v) {
        if constexpr (std::is_same_v<std::decay_t<decltype(v)>, OuVolPair>) {
          v.x.validate();
          v.y.validate();
        } else {
          v.validate();
        }
      },
      vol);
  jump_x.validate();
  jump_y.validate();
}

std::vector<double> simulate_ou_exp_vol(const OuExpVolSpec& spec, std::span<const double> times,
                                        RngStream& rng) {
  spec.validate();
  check_times(times);
  std::vector<double> sigma(times.size());
  double tau = spec.stationary_init ? rng.normal() / std::sqrt(2.0 * spec.kappa) : spec.tau0;
  sigma[0] = std::exp(spec.a + spec.b * tau);
  for (std::size_t k = 1; k < times.size(); ++k) {
    const double dt = times[k] - times[k - 1];
    const double decay = std::exp(-spec.kappa * dt);
    const double sd = std::sqrt(-std::expm1(-2.0 * spec.kappa * dt) / (2.0 * spec.kappa));
    tau = decay * tau + sd * rng.normal();
    sigma[k] = std::exp(spec.a + spec.b * tau);
  }
  return sigma;
}

Ar1Factors simulate_ar1_factors(const Ar1VolSpec& spec, int n_days, RngStream& rng) {
  spec.validate();
  if (n_days < 1) throw ConfigError("AR(1) volatility: n_days must be >= 1");
  const double comp = std::sqrt(1.0 - spec.rho_prime * spec.rho_prime);

  double tx = spec.tau0_x;
  double ty = spec.tau0_y;
  if (spec.stationary_init) {
    const double vx = 1.0 / (1.0 - spec.phi_x * spec.phi_x);
    const double vy = 1.0 / (1.0 - spec.phi_y * spec.phi_y);
    const double cxy = spec.rho_prime / (1.0 - spec.phi_x * spec.phi_y);
    const double z1 = rng.normal();
    const double z2 = rng.normal();
    tx = std::sqrt(vx) * z1;
    const double slope = cxy / vx;
    ty = slope * tx + std::sqrt(std::max(0.0, vy - slope * cxy)) * z2;
  }

  Ar1Factors f;
  f.tau_x.resize(n_days);
  f.tau_y.resize(n_days);
  f.eps_x.resize(n_days);
  f.eps_y.resize(n_days);
  for (int t = 0; t < n_days; ++t) {
    const double ex = rng.normal();
    const double es = rng.normal();
    const double ey = spec.rho_prime * ex + comp * es;
    tx = spec.phi_x * tx + ex;
    ty = spec.phi_y * ty + ey;
    f.eps_x[t] = ex;
    f.eps_y[t] = ey;
    f.tau_x[t] = tx;
    f.tau_y[t] = ty;
  }
  return f;
}

VolPath simulate_vol(const VolSpec& spec, std::span<const double> times, RngStream& rng) {
  check_times(times);
  VolPath out;
  out.times.assign(times.begin(), times.end());
  if (const auto* ou = std::get_if<OuVolPair>(&spec)) {
    auto rx = rng.child(kTagVolX);
    auto ry = rng.child(kTagVolY);
    out.sigma_x = simulate_ou_exp_vol(ou->x, times, rx);
    out.sigma_y = simulate_ou_exp_vol(ou->y, times, ry);
    return out;
  }
  const auto& ar = std::get<Ar1VolSpec>(spec);
  const double t_last = times.back();
  const int n_days = std::max(1, static_cast<int>(std::ceil(t_last - 1e-9)));
  auto rf = rng.child(kTagAr1);
  const auto f = simulate_ar1_factors(ar, n_days, rf);
  out.sigma_x.resize(times.size());
  out.sigma_y.resize(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    int day = static_cast<int>(std::floor(times[k] + 1e-9));
    day = std::clamp(day, 0, n_days - 1);
    out.sigma_x[k] = std::exp(ar.a_x + ar.b_x * f.tau_x[day]);
    out.sigma_y[k] = std::exp(ar.a_y + ar.b_y * f.tau_y[day]);
  }
  return out;
}

VolPath simulate_ar1_vol(const Ar1VolSpec& spec, int n_days, int steps_per_day, RngStream& rng) {
  if (n_days < 1) throw ConfigError("AR(1) volatility: n_days must be >= 1");
  if (steps_per_day < 1) throw ConfigError("AR(1) volatility: steps_per_day must be >= 1");
  const int n = n_days * steps_per_day;
  std::vector<double> times(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) times[k] = static_cast<double>(k) / steps_per_day;
  return simulate_vol(VolSpec{spec}, times, rng);
}

std::pair<SamplePath, SamplePath> simulate_prices(const BivariateModelSpec& model,
                                                  const VolPath& vol, RngStream& rng) {
  model.validate();
  vol.validate();
  check_times(vol.times);
  const std::size_t n = vol.size() - 1;
  const double comp = std::sqrt(1.0 - model.rho * model.rho);

  std::vector<double> dx(n), dy(n);
  auto rw = rng.child(kTagBrownian);
  for (std::size_t i = 0; i < n; ++i) {
    const double dt = vol.times[i + 1] - vol.times[i];
    const double sq = std::sqrt(dt);
    const double z1 = rw.normal();
    const double z2 = rw.normal();
    const double dwx = sq * z1;
    const double dwy = sq * (model.rho * z1 + comp * z2);
    dx[i] = model.drift_x * dt + vol.sigma_x[i] * dwx;
    dy[i] = model.drift_y * dt + vol.sigma_y[i] * dwy;
  }
  auto rjx = rng.child(kTagJumpX);
  auto rjy = rng.child(kTagJumpY);
  add_jumps(model.jump_x, vol.times, dx, rjx);
  add_jumps(model.jump_y, vol.times, dy, rjy);

  SamplePath x{vol.times, std::vector<double>(n + 1, 0.0)};
  SamplePath y{vol.times, std::vector<double>(n + 1, 0.0)};
  for (std::size_t i = 0; i < n; ++i) {
    x.values[i + 1] = x.values[i] + dx[i];
    y.values[i + 1] = y.values[i] + dy[i];
  }
  return {std::move(x), std::move(y)};
}

double cms_symmetric_stable(double alpha, double angle, double exp_draw) {
  const double c = std::cos(angle);
  return std::sin(alpha * angle) / std::pow(c, 1.0 / alpha) *
         std::pow(std::cos((1.0 - alpha) * angle) / exp_draw, (1.0 - alpha) / alpha);
}

std::vector<double> sample_alpha_stable_increments(double alpha, double scale, int n, double dt,
                                                   RngStream& rng) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("stable alpha must lie in (0, 1)");
  if (!(scale >= 0.0)) throw ConfigError("stable scale must be >= 0");
  if (n < 0) throw ConfigError("increment count must be >= 0");
  std::vector<double> out(static_cast<std::size_t>(n), 0.0);
  if (scale == 0.0) return out;
  const double factor = scale * std::pow(dt, 1.0 / alpha);
  for (auto& x : out) {
    const double angle = std::numbers::pi * (rng.uniform_open() - 0.5);
    const double w = -std::log(rng.uniform_open());
    x = factor * cms_symmetric_stable(alpha, angle, w);
  }
  return out;
}

JumpDraws sample_compound_poisson(double intensity, double size_sd, double t_span, RngStream& rng,
                                  double t0) {
  if (!(intensity >= 0.0)) throw ConfigError("compound Poisson: intensity must be >= 0");
  JumpDraws d;
  const auto count = rng.poisson(intensity * t_span);
  d.times.resize(count);
  d.sizes.resize(count);
  for (auto& t : d.times) t = t0 + t_span * rng.uniform_open();
  std::sort(d.times.begin(), d.times.end());
  for (auto& s : d.sizes) s = size_sd * rng.normal();
  return d;
}

std::vector<double> sample_poisson_observation_times(double mean_count, double t_span,
                                                     RngStream& rng) {
  if (!(mean_count > 0.0)) throw ConfigError("Poisson sampling: mean count must be > 0");
  if (!(t_span > 0.0)) throw ConfigError("Poisson sampling: span must be > 0");
  const auto count = rng.poisson(mean_count);
  if (count == 0) throw DataError("Poisson sampling drew zero observation times");
  std::vector<double> t(count + 1, 0.0);
  for (std::size_t i = 1; i < t.size(); ++i) t[i] = t_span * rng.uniform_open();
  std::sort(t.begin() + 1, t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  return t;
}

double true_elt(const VolPath& vol, double u, double v) {
  validate(LaplacePoint{u, v});
  double acc = 0.0;
  for (std::size_t k = 1; k < vol.size(); ++k) {
    const double sx = vol.sigma_x[k - 1];
    const double sy = vol.sigma_y[k - 1];
    acc += (vol.times[k] - vol.times[k - 1]) * std::exp(-u * sx * sx - v * sy * sy);
  }
  return acc;
}

double true_elt_window(const VolPath& vol, double u, double v, double t_lo, double t_hi) {
  validate(LaplacePoint{u, v});
  double acc = 0.0;
  for (std::size_t k = 1; k < vol.size(); ++k) {
    const double lo = std::max(t_lo, vol.times[k - 1]);
    const double hi = std::min(t_hi, vol.times[k]);
    if (hi <= lo) continue;
    const double sx = vol.sigma_x[k - 1];
    const double sy = vol.sigma_y[k - 1];
    acc += (hi - lo) * std::exp(-u * sx * sx - v * sy * sy);
  }
  return acc;
}

AsyncDraw simulate_async(const BivariateModelSpec& model, std::span<const double> x_times,
                         std::span<const double> y_times, RngStream& rng) {
  check_times(x_times);
  check_times(y_times);
  std::vector<double> all;
  all.reserve(x_times.size() + y_times.size());
  std::merge(x_times.begin(), x_times.end(), y_times.begin(), y_times.end(),
             std::back_inserter(all));
  all.erase(std::unique(all.begin(), all.end()), all.end());

  auto rv = rng.child(kTagAsyncVol);
  auto rp = rng.child(kTagAsyncPrice);
  AsyncDraw out;
  out.vol = simulate_vol(model.vol, all, rv);
  auto [px, py] = simulate_prices(model, out.vol, rp);

  auto extract = [&](std::span<const double> ts, const SamplePath& src) {
    SamplePath p;
    p.times.assign(ts.begin(), ts.end());
    p.values.reserve(ts.size());
    for (double t : ts) {
      const auto it = std::lower_bound(all.begin(), all.end(), t);
      p.values.push_back(src.values[static_cast<std::size_t>(it - all.begin())]);
    }
    return p;
  };
  out.x = extract(x_times, px);
  out.y = extract(y_times, py);
  return out;
}

}  // namespace rjlt
