#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include "rjlt/simkit.hpp"

namespace rjlt {

// A model together with its default sampling design.  For daily AR(1)
// volatility t_end is the number of days and n_steps = t_end * steps/day.
struct ModelConfig {
  std::string name = "custom";
  BivariateModelSpec model;
  double t_end = 1.0;
  int n_steps = 1760;

  void validate() const;
};

// Built-in designs: ex1 (exp-OU volatility, no jumps), ex2 (ex1 plus compound
// Poisson jumps), ex3 (ex1 plus symmetric stable jumps), ex4 (daily AR(1)
// log-volatility, 22 days of 390 steps, rho' = 0).
ModelConfig preset_model(std::string_view name);
bool is_preset_name(std::string_view name);

// INI file.  Top level keys: name, drift_x, drift_y, rho, t_end, n_steps.
// Sections [vol] kind = ou_exp | ar1; [vol_x] / [vol_y] with kappa, a, b,
// tau0, stationary_init for ou_exp; [ar1] with phi_x, phi_y, rho_prime, a_x,
// b_x, a_y, b_y, tau0_x, tau0_y, stationary_init; [jump_x] / [jump_y] with
// kind = none | compound_poisson | alpha_stable and intensity, size_sd,
// alpha, scale.  A file may start from a preset with `base = ex1`.
ModelConfig load_model_config(const std::string& path);
ModelConfig parse_model_config(std::istream& in);
void write_model_config(std::ostream& os, const ModelConfig& cfg);

// Preset name or path to an INI file.
ModelConfig resolve_model(const std::string& name_or_path);

}  // namespace rjlt
