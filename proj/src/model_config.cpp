#include "rjlt/model_config.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "rjlt/errors.hpp"
#include "rjlt/io.hpp"

namespace rjlt {

namespace pt = boost::property_tree;

void ModelConfig::validate() const {
  model.validate();
  SimGrid::make(t_end, n_steps);
}

namespace {

OuVolPair ex1_vol() {
  OuVolPair v;
  v.x = {0.025, 0.3125, -0.125, 0.0, false};
  v.y = {0.030, 0.45, -0.325, 0.0, false};
  return v;
}

ModelConfig ex1() {
  ModelConfig c;
  c.name = "ex1";
  c.model.drift_x = 0.03;
  c.model.drift_y = 0.04;
  c.model.rho = 0.5;
  c.model.vol = ex1_vol();
  c.t_end = 1.0;
  c.n_steps = 1760;
  return c;
}

}  // namespace

bool is_preset_name(std::string_view name) {
  return name == "ex1" || name == "ex2" || name == "ex3" || name == "ex4";
}

ModelConfig preset_model(std::string_view name) {
  ModelConfig c = ex1();
  if (name == "ex1") return c;
  if (name == "ex2") {
    c.name = "ex2";
    c.model.jump_x = JumpSpec::compound_poisson(2.0, 1.0);
    c.model.jump_y = JumpSpec::compound_poisson(3.0, 1.0);
    return c;
  }
  if (name == "ex3") {
    c.name = "ex3";
    c.model.jump_x = JumpSpec::alpha_stable(0.5, 1.0);
    c.model.jump_y = JumpSpec::alpha_stable(0.9, 1.0);
    return c;
  }
  if (name == "ex4") {
    c.name = "ex4";
    Ar1VolSpec ar;
    ar.stationary_init = true;
    c.model.vol = ar;
    c.t_end = 22.0;
    c.n_steps = 22 * 390;
    return c;
  }
  throw ConfigError("unknown model preset '" + std::string(name) + "'");
}

namespace {

template <class T>
T get_or(const pt::ptree& t, const std::string& key, T fallback) {
  const auto node = t.get_child_optional(key);
  if (!node) return fallback;
  try {
    return node->get_value<T>();
  } catch (const pt::ptree_bad_data&) {
    throw ConfigError("model config: bad value for '" + key + "'");
  }
}

JumpSpec read_jump(const pt::ptree& t, const std::string& sec, JumpSpec j) {
  const auto node = t.get_child_optional(sec);
  if (!node) return j;
  const auto kind = get_or<std::string>(*node, "kind", "");
  if (kind == "none") j.kind = JumpSpec::Kind::none;
  else if (kind == "compound_poisson") j.kind = JumpSpec::Kind::compound_poisson;
  else if (kind == "alpha_stable") j.kind = JumpSpec::Kind::alpha_stable;
  else if (!kind.empty()) throw ConfigError("model config: unknown jump kind '" + kind + "'");
  j.intensity = get_or(*node, "intensity", j.intensity);
  j.size_sd = get_or(*node, "size_sd", j.size_sd);
  j.alpha = get_or(*node, "alpha", j.alpha);
  j.scale = get_or(*node, "scale", j.scale);
  return j;
}

OuExpVolSpec read_ou(const pt::ptree& t, const std::string& sec, OuExpVolSpec s) {
  const auto node = t.get_child_optional(sec);
  if (!node) return s;
  s.kappa = get_or(*node, "kappa", s.kappa);
  s.a = get_or(*node, "a", s.a);
  s.b = get_or(*node, "b", s.b);
  s.tau0 = get_or(*node, "tau0", s.tau0);
  s.stationary_init = get_or(*node, "stationary_init", s.stationary_init);
  return s;
}

Ar1VolSpec read_ar1(const pt::ptree& t, Ar1VolSpec s) {
  const auto node = t.get_child_optional("ar1");
  if (!node) return s;
  s.phi_x = get_or(*node, "phi_x", s.phi_x);
  s.phi_y = get_or(*node, "phi_y", s.phi_y);
  s.rho_prime = get_or(*node, "rho_prime", s.rho_prime);
  s.a_x = get_or(*node, "a_x", s.a_x);
  s.b_x = get_or(*node, "b_x", s.b_x);
  s.a_y = get_or(*node, "a_y", s.a_y);
  s.b_y = get_or(*node, "b_y", s.b_y);
  s.tau0_x = get_or(*node, "tau0_x", s.tau0_x);
  s.tau0_y = get_or(*node, "tau0_y", s.tau0_y);
  s.stationary_init = get_or(*node, "stationary_init", s.stationary_init);
  return s;
}

std::string jump_kind_name(JumpSpec::Kind k) {
  switch (k) {
    case JumpSpec::Kind::compound_poisson: return "compound_poisson";
    case JumpSpec::Kind::alpha_stable: return "alpha_stable";
    default: return "none";
  }
}

void write_jump(std::ostream& os, const char* sec, const JumpSpec& j) {
  os << "\n[" << sec << "]\nkind = " << jump_kind_name(j.kind) << "\n";
  os << "intensity = " << format_double(j.intensity) << "\nsize_sd = " << format_double(j.size_sd)
     << "\nalpha = " << format_double(j.alpha) << "\nscale = " << format_double(j.scale) << "\n";
}

void write_ou(std::ostream& os, const char* sec, const OuExpVolSpec& s) {
  os << "\n[" << sec << "]\nkappa = " << format_double(s.kappa) << "\na = " << format_double(s.a)
     << "\nb = " << format_double(s.b) << "\ntau0 = " << format_double(s.tau0)
     << "\nstationary_init = " << (s.stationary_init ? "true" : "false") << "\n";
}

}  // namespace

ModelConfig parse_model_config(std::istream& in) {
  pt::ptree t;
  try {
    pt::read_ini(in, t);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("model config: ") + e.what());
  }
  const auto base = get_or<std::string>(t, "base", "ex1");
  ModelConfig c = preset_model(base);
  c.name = get_or<std::string>(t, "name", base == "ex1" ? "custom" : base);
  c.model.drift_x = get_or(t, "drift_x", c.model.drift_x);
  c.model.drift_y = get_or(t, "drift_y", c.model.drift_y);
  c.model.rho = get_or(t, "rho", c.model.rho);
  c.t_end = get_or(t, "t_end", c.t_end);
  c.n_steps = get_or(t, "n_steps", c.n_steps);

  std::string kind = std::holds_alternative<Ar1VolSpec>(c.model.vol) ? "ar1" : "ou_exp";
  kind = get_or(t, "vol.kind", kind);
  if (kind == "ou_exp") {
    OuVolPair v = std::holds_alternative<OuVolPair>(c.model.vol) ? std::get<OuVolPair>(c.model.vol)
                                                                 : ex1_vol();
    v.x = read_ou(t, "vol_x", v.x);
    v.y = read_ou(t, "vol_y", v.y);
    c.model.vol = v;
  } else if (kind == "ar1") {
    Ar1VolSpec a = std::holds_alternative<Ar1VolSpec>(c.model.vol) ? std::get<Ar1VolSpec>(c.model.vol)
                                                                   : Ar1VolSpec{};
    c.model.vol = read_ar1(t, a);
  } else {
    throw ConfigError("model config: unknown vol kind '" + kind + "'");
  }
  c.model.jump_x = read_jump(t, "jump_x", c.model.jump_x);
  c.model.jump_y = read_jump(t, "jump_y", c.model.jump_y);
  c.validate();
  return c;
}

ModelConfig load_model_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open model config " + path);
  return parse_model_config(in);
}

void write_model_config(std::ostream& os, const ModelConfig& c) {
  os << "name = " << c.name << "\ndrift_x = " << format_double(c.model.drift_x)
     << "\ndrift_y = " << format_double(c.model.drift_y) << "\nrho = " << format_double(c.model.rho)
     << "\nt_end = " << format_double(c.t_end) << "\nn_steps = " << c.n_steps << "\n";
  if (const auto* ou = std::get_if<OuVolPair>(&c.model.vol)) {
    os << "\n[vol]\nkind = ou_exp\n";
    write_ou(os, "vol_x", ou->x);
    write_ou(os, "vol_y", ou->y);
  } else {
    const auto& a = std::get<Ar1VolSpec>(c.model.vol);
    os << "\n[vol]\nkind = ar1\n\n[ar1]\nphi_x = " << format_double(a.phi_x)
       << "\nphi_y = " << format_double(a.phi_y) << "\nrho_prime = " << format_double(a.rho_prime)
       << "\na_x = " << format_double(a.a_x) << "\nb_x = " << format_double(a.b_x)
       << "\na_y = " << format_double(a.a_y) << "\nb_y = " << format_double(a.b_y)
       << "\ntau0_x = " << format_double(a.tau0_x) << "\ntau0_y = " << format_double(a.tau0_y)
       << "\nstationary_init = " << (a.stationary_init ? "true" : "false") << "\n";
  }
  write_jump(os, "jump_x", c.model.jump_x);
  write_jump(os, "jump_y", c.model.jump_y);
}

ModelConfig resolve_model(const std::string& name_or_path) {
  if (is_preset_name(name_or_path)) return preset_model(name_or_path);
  return load_model_config(name_or_path);
}

}  // namespace rjlt
