#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "aggdiff/bounds.hpp"
#include "aggdiff/config.hpp"
#include "aggdiff/diagnostics.hpp"
#include "aggdiff/oracles.hpp"
#include "aggdiff/potentials.hpp"
#include "aggdiff/selfsim.hpp"
#include "aggdiff/solver.hpp"
#include "commands.hpp"

namespace py = pybind11;
using namespace aggdiff;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

// Python-side grid; GridPtr points to const, which pybind11 cannot hold directly.
struct PyGrid {
  GridPtr ptr;
  operator const GridPtr&() const { return ptr; }
};

Array to_array(const Field& u) {
  std::vector<py::ssize_t> shape(u.grid->dim(), u.grid->n());
  Array out(shape);
  std::copy(u.values.begin(), u.values.end(), out.mutable_data());
  return out;
}

Field to_field(const Array& a, const GridPtr& grid) {
  if (static_cast<std::size_t>(a.size()) != grid->size())
    throw std::invalid_argument("array has " + std::to_string(a.size()) + " values, grid has " +
                                std::to_string(grid->size()));
  return Field(grid, std::vector<double>(a.data(), a.data() + a.size()));
}

py::dict series_dict(const TimeSeries& ts) {
  py::dict d;
  for (const auto& c : ts.columns()) d[py::str(c)] = py::array(py::cast(ts.column(c)));
  return d;
}

py::dict condition_dict(const ConditionResult& c) {
  py::dict d;
  d["verdict"] = verdict_name(c.verdict);
  d["margin"] = c.margin;
  d["note"] = c.note;
  return d;
}

py::dict norm_dict(const PotentialNorms& n) {
  auto v = [](const NormValue& x) { return x.finite ? x.value : INFINITY; };
  py::dict d;
  d["w_l1"] = v(n.w_l1);
  d["w_l2"] = v(n.w_l2);
  d["grad_l1"] = v(n.grad_l1);
  d["grad_linf"] = v(n.grad_linf);
  d["lap_plus_lhalfN"] = v(n.lap_plus_lhalfN);
  d["lap_plus_integral"] = n.lap_plus_integral;
  d["radial_bound"] = v(n.radial_bound);
  py::dict lq;
  for (const auto& [q, x] : n.grad_lq) lq[py::float_(q)] = v(x);
  d["grad_lq"] = lq;
  if (n.morse_display_value) d["morse_display_value"] = *n.morse_display_value;
  return d;
}

SolverConfig solver_config(double dt, double t_end, const std::string& scheme, bool dealias,
                           int every, const std::string& clip) {
  SolverConfig c;
  c.dt = dt;
  c.t_end = t_end;
  c.scheme = parse_scheme(scheme);
  c.dealias = dealias;
  c.diagnostics_every = every;
  c.clip_policy = parse_clip_policy(clip);
  return c;
}

int run_command(const std::string& which, const std::string& config, const std::string& out) {
  ExperimentConfig cfg = load_config(config);
  if (!out.empty()) cfg.output = out;
  std::ostringstream log;
  if (which == "check") return cli::cmd_check(cfg, log);
  if (which == "simulate") return cli::cmd_simulate(cfg, log);
  return cli::cmd_rescaled(cfg, log);
}

}  // namespace

PYBIND11_MODULE(_aggdiff, m) {
  m.doc() = "aggregation-diffusion solver";
  m.attr("__version__") = AGGDIFF_VERSION;

  py::class_<PyGrid>(m, "Grid")
      .def(py::init([](int dim, int n, double half_width) {
             return PyGrid{make_grid(dim, n, half_width)};
           }),
           py::arg("dim"), py::arg("n"), py::arg("half_width"))
      .def_property_readonly("dim", [](const PyGrid& g) { return g.ptr->dim(); })
      .def_property_readonly("n", [](const PyGrid& g) { return g.ptr->n(); })
      .def_property_readonly("half_width", [](const PyGrid& g) { return g.ptr->half_width(); })
      .def_property_readonly("spacing", [](const PyGrid& g) { return g.ptr->spacing(); })
      .def_property_readonly("axis",
                             [](const PyGrid& g) {
                               auto c = g.ptr->coordinates();
                               return py::array(py::cast(std::vector<double>(c.begin(), c.end())));
                             })
      .def("__repr__", [](const PyGrid& g) {
        std::ostringstream os;
        os << "Grid(dim=" << g.ptr->dim() << ", n=" << g.ptr->n()
           << ", half_width=" << g.ptr->half_width() << ")";
        return os.str();
      });

  py::class_<PotentialSpec>(m, "Potential")
      .def_static("zero", &PotentialSpec::zero)
      .def_static("gaussian", &PotentialSpec::gaussian, py::arg("amplitude"), py::arg("width") = 1.0)
      .def_static("morse", &PotentialSpec::morse, py::arg("amplitude") = 1.0,
                  py::arg("exponent") = 2.0)
      .def_static("tabulated", &PotentialSpec::tabulated, py::arg("radii"), py::arg("values"))
      .def_static("load_tabulated", &PotentialSpec::load_tabulated, py::arg("path"))
      .def("profile", py::vectorize(&PotentialSpec::profile))
      .def("scaled", &PotentialSpec::scaled)
      .def("__repr__", &PotentialSpec::describe);

  m.def("potential_norms",
        [](const PotentialSpec& w, int dim, const std::vector<double>& q) {
          return norm_dict(potential_norms(w, dim, q));
        },
        py::arg("potential"), py::arg("dim"), py::arg("q") = std::vector<double>{});

  m.def("check_smallness",
        [](const PotentialSpec& w, int dim, double mass, std::optional<double> c_inf,
           std::optional<double> c_2, double c_policy) {
          BoundConstants c{c_inf, c_2, c_policy};
          const ConditionReport r = check_smallness(potential_norms(w, dim), mass, c);
          py::dict d;
          d["i"] = condition_dict(r.cond_i);
          d["ii"] = condition_dict(r.cond_ii);
          d["iii"] = condition_dict(r.cond_iii);
          d["iv"] = condition_dict(r.cond_iv);
          d["any_holds"] = r.any_holds();
          return d;
        },
        py::arg("potential"), py::arg("dim"), py::arg("mass") = 1.0, py::arg("c_inf") = py::none(),
        py::arg("c_2") = py::none(), py::arg("c_policy") = 1.0);

  m.def("mittag_leffler_phi", &mittag_leffler_phi, py::arg("z"), py::arg("delta"),
        py::arg("tol") = 1e-16);
  m.def("gamma", &gamma_fn);

  m.def("gaussian",
        [](const PyGrid& g, double mass, double variance, std::vector<double> mean) {
          return to_array(sample_gaussian(make_gaussian(g.ptr->dim(), mass, variance, mean), g));
        },
        py::arg("grid"), py::arg("mass") = 1.0, py::arg("variance") = 1.0,
        py::arg("mean") = std::vector<double>{});
  m.def("gaussian_entropy",
        [](double variance, std::vector<double> mean) {
          const auto e = gaussian_entropy(
              make_gaussian(static_cast<int>(std::max<std::size_t>(1, mean.size())), 1.0, variance,
                            mean));
          return py::make_tuple(e.h_rel, e.dissipation);
        },
        py::arg("variance"), py::arg("mean") = std::vector<double>{0.0});

  m.def("lp_norm",
        [](const Array& a, const PyGrid& g, double p) { return lp_norm(to_field(a, g), p); },
        py::arg("values"), py::arg("grid"), py::arg("p"));

  m.def("simulate",
        [](const Array& rho0, const PyGrid& g, const PotentialSpec& w, double dt, double t_end,
           const std::string& scheme, bool dealias, int every, const std::string& clip) {
          const SolverConfig cfg = solver_config(dt, t_end, scheme, dealias, every, clip);
          SimulationResult res;
          {
            py::gil_scoped_release release;
            res = simulate(to_field(rho0, g), sample_on_grid(w, g), cfg);
          }
          return py::make_tuple(to_array(res.final_state), series_dict(res.series));
        },
        py::arg("rho0"), py::arg("grid"), py::arg("potential"), py::arg("dt"), py::arg("t_end"),
        py::arg("scheme") = "etdrk4", py::arg("dealias") = true, py::arg("diagnostics_every") = 10,
        py::arg("clip_policy") = "clip_and_count");

  m.def("simulate_rescaled",
        [](const Array& f0, const PyGrid& g, const PotentialSpec& w, double ds, double s_end,
           const std::string& scheme, bool dealias, int every, const std::string& clip) {
          const SolverConfig cfg = solver_config(ds, s_end, scheme, dealias, every, clip);
          RescaledRunResult res;
          {
            py::gil_scoped_release release;
            res = simulate_rescaled(to_field(f0, g), w, cfg);
          }
          return py::make_tuple(to_array(res.final_state), series_dict(res.series));
        },
        py::arg("f0"), py::arg("grid"), py::arg("potential"), py::arg("ds"), py::arg("s_end"),
        py::arg("scheme") = "etdrk4", py::arg("dealias") = true, py::arg("diagnostics_every") = 10,
        py::arg("clip_policy") = "clip_and_count");

  m.def("entropy_ledger",
        [](const Array& f, const PyGrid& g, const PotentialSpec& w, double s) {
          const EntropyRow r = entropy_ledger(to_field(f, g), s, RescaledKernel(w, g));
          py::dict d;
          const auto v = r.values();
          for (std::size_t i = 0; i < v.size(); ++i) d[py::str(entropy_columns()[i])] = v[i];
          return d;
        },
        py::arg("f"), py::arg("grid"), py::arg("potential"), py::arg("s") = 0.0);

  m.def("fit_decay",
        [](const std::vector<double>& t, const std::vector<double>& y, double t0, double t1,
           const std::string& model) {
          const DecayReport r = fit_decay(t, y, t0, t1, parse_fit_model(model));
          py::dict d;
          d["slope"] = r.slope;
          d["stderr"] = r.stderr_slope;
          d["intercept"] = r.intercept;
          d["residual_rms"] = r.residual_rms;
          d["half_window_slope"] = r.half_window_slope;
          d["samples"] = r.samples;
          return d;
        },
        py::arg("t"), py::arg("y"), py::arg("t0"), py::arg("t1"), py::arg("model") = "power");

  m.def("run", &run_command, py::arg("command"), py::arg("config"), py::arg("out") = "",
        "Run check, simulate or rescaled on a JSON config; returns the exit code.");
  m.def("validate", [] {
    std::ostringstream log;
    return cli::cmd_validate(log);
  });
}
