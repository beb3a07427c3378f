#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "rjlt/asymptotics.hpp"
#include "rjlt/deptest.hpp"
#include "rjlt/errors.hpp"
#include "rjlt/estimators.hpp"
#include "rjlt/harness.hpp"
#include "rjlt/model_config.hpp"
#include "rjlt/simkit.hpp"

namespace py = pybind11;
using namespace rjlt;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) {
  return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

std::vector<double> to_vector(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 1) throw DataError("expected a one dimensional array");
  return {a.data(), a.data() + a.size()};
}

SamplePath make_path(const py::array_t<double, py::array::c_style | py::array::forcecast>& t,
                     const py::array_t<double, py::array::c_style | py::array::forcecast>& v) {
  SamplePath p{to_vector(t), to_vector(v)};
  p.validate();
  return p;
}

using Arr = py::array_t<double, py::array::c_style | py::array::forcecast>;

// Same streams as `rjlt simulate` with the same seed.
py::dict simulate(const std::string& model, std::uint64_t seed) {
  const ModelConfig mcfg = resolve_model(model);
  const RngStream rng(seed);
  auto rv = rng.child(1), rp = rng.child(2);
  const auto grid = SimGrid::make(mcfg.t_end, mcfg.n_steps);
  VolPath vol;
  std::pair<SamplePath, SamplePath> xy;
  {
    py::gil_scoped_release release;
    vol = simulate_vol(mcfg.model.vol, grid.times(), rv);
    xy = simulate_prices(mcfg.model, vol, rp);
  }
  const auto& [x, y] = xy;
  py::dict d;
  d["times"] = to_array(x.times);
  d["x"] = to_array(x.values);
  d["y"] = to_array(y.values);
  d["sigma_x"] = to_array(vol.sigma_x);
  d["sigma_y"] = to_array(vol.sigma_y);
  d["true_elt"] = py::cpp_function([vol](double u, double v) { return true_elt(vol, u, v); });
  return d;
}

py::dict estimate_py(const std::string& kind, const Arr& times, const Arr& x, const Arr& y, double u,
                     double v) {
  const auto k = parse_estimator_kind(kind);
  const auto px = make_path(times, x);
  const auto py_ = make_path(times, y);
  RjltEstimate e;
  if (k == EstimatorKind::Uasync)
    e = u_async_hat(px, py_, {u, v});
  else
    e = estimate(k, make_sync_increments(px, py_), {u, v});
  py::dict d;
  d["value"] = e.value;
  d["kind"] = std::string(to_string(e.kind));
  d["n_increments_used"] = e.n_increments_used;
  d["dt"] = e.dt;
  return d;
}

double u_async_py(const Arr& tx, const Arr& x, const Arr& ty, const Arr& y, double u, double v,
                  const std::string& cover) {
  CoverMode mode;
  if (cover == "enclosing") mode = CoverMode::kEnclosing;
  else if (cover == "leading") mode = CoverMode::kLeading;
  else throw ConfigError("cover must be 'enclosing' or 'leading'");
  return u_async_hat(make_path(tx, x), make_path(ty, y), {u, v}, mode).value;
}

py::dict test_py(const Arr& times, const Arr& x, const Arr& y, double alpha, int mc_draws,
                 std::uint64_t seed, const std::string& kernel, std::optional<int> bandwidth) {
  DepTestConfig cfg;
  cfg.alpha = alpha;
  cfg.mc_draws = mc_draws;
  cfg.kernel = parse_kernel(kernel);
  cfg.bandwidth = bandwidth;
  const auto px = make_path(times, x);
  const auto py_ = make_path(times, y);
  TestReport r;
  {
    py::gil_scoped_release release;
    r = run_test(px, py_, cfg, RngStream(seed));
  }
  py::dict d;
  d["statistic"] = r.statistic;
  d["critical_value"] = r.critical_value;
  d["p_value"] = r.p_value;
  d["reject"] = r.reject;
  d["degenerate"] = r.degenerate;
  d["bandwidth"] = r.bandwidth;
  d["n_days"] = r.n_days;
  d["steps_per_day"] = r.steps_per_day;
  d["warnings"] = r.warnings;
  d["json"] = report_json(r);
  return d;
}

py::list table1_py(const std::string& model, int n_reps, std::uint64_t seed, int workers) {
  McConfig c;
  c.model = resolve_model(model);
  c.n_reps = n_reps;
  c.master_seed = seed;
  c.workers = workers;
  McRun run;
  {
    py::gil_scoped_release release;
    run = run_table1(c);
  }
  py::list out;
  for (const auto& r : run.rows) {
    py::dict d;
    d["kind"] = std::string(to_string(r.kind));
    d["u"] = r.u;
    d["v"] = r.v;
    d["bias"] = r.bias;
    d["sd"] = r.sd;
    d["mse"] = r.mse;
    d["n_reps"] = r.n_reps;
    out.append(d);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Realized joint Laplace transform estimators and the independence test";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  m.def("simulate", &simulate, py::arg("model") = "ex1", py::arg("seed") = 1,
        "Simulate a preset or INI model on its default grid.");
  m.def("estimate", &estimate_py, py::arg("kind"), py::arg("times"), py::arg("x"), py::arg("y"),
        py::arg("u"), py::arg("v"), "V, U or Vprime (or Uasync) on a shared time grid.");
  m.def("u_async", &u_async_py, py::arg("x_times"), py::arg("x"), py::arg("y_times"), py::arg("y"),
        py::arg("u"), py::arg("v"), py::arg("cover") = "enclosing");
  m.def("f_cov_v", &f_cov_v, py::arg("x"), py::arg("y"), py::arg("xb"), py::arg("yb"));
  m.def("f_cov_u", &f_cov_u, py::arg("x"), py::arg("y"), py::arg("xb"), py::arg("yb"),
        py::arg("z"));
  m.def("dependence_test", &test_py, py::arg("times"), py::arg("x"), py::arg("y"),
        py::arg("alpha") = 0.05, py::arg("mc_draws") = 100000, py::arg("seed") = 1,
        py::arg("kernel") = "bartlett", py::arg("bandwidth") = py::none());
  m.def("run_table1", &table1_py, py::arg("model") = "ex1", py::arg("n_reps") = 1000,
        py::arg("seed") = 20240601, py::arg("workers") = 1);
}
