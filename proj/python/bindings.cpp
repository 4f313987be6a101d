#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "expsplit/error.hpp"
#include "expsplit/harness.hpp"
#include "expsplit/problems.hpp"
#include "expsplit/verification.hpp"

namespace py = pybind11;
using namespace expsplit;

namespace {

py::array_t<double> to_array(const GridFunction& u) {
  py::array_t<double> out({u.grid().ny(), u.grid().nx()});
  std::copy(u.values().begin(), u.values().end(), out.mutable_data());
  return out;
}

py::dict to_dict(const ConvergenceReport& r) {
  py::dict d;
  d["problem"] = r.problem;
  d["norm"] = r.norm.name();
  d["grid"] = r.grid;
  d["T"] = r.final_time;
  d["reference_steps"] = r.reference_steps;
  d["reference_gap"] = r.reference_gap;
  d["fit_floor"] = r.fit_floor;
  d["wall_seconds"] = r.wall_seconds;
  py::dict series;
  for (const auto& s : r.series) {
    py::dict e;
    std::vector<double> h, err;
    for (const auto& p : s.points) {
      h.push_back(p.h);
      err.push_back(p.error);
    }
    e["h"] = h;
    e["error"] = err;
    e["order"] = s.fit.order;
    e["residual"] = s.fit.residual;
    e["local_orders"] = s.local_orders;
    series[py::str(std::string(to_string(s.scheme)))] = e;
  }
  d["series"] = series;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Exponential operator splitting for 2-D parabolic problems";

  static py::exception<Error> error(m, "Error", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, e.what());
    }
  });

  m.def("problem_labels", &problem_labels);

  m.def("phi", &phi, py::arg("j"), py::arg("z"));

  m.def(
      "fit_order",
      [](const std::vector<double>& h, const std::vector<double>& err, double floor) {
        if (h.size() != err.size()) throw Error(ErrorCode::InvalidArgument, "h and error lengths differ");
        std::vector<Measurement> pts;
        for (std::size_t i = 0; i < h.size(); ++i) pts.push_back({h[i], err[i]});
        const auto fit = fit_order(pts, floor);
        return py::make_tuple(fit.order, fit.residual, fit.points_used);
      },
      py::arg("h"), py::arg("error"), py::arg("floor") = 0.0);

  m.def(
      "integrate",
      [](const std::string& problem, const std::string& scheme, int grid, double T, int steps) {
        const auto p = problem_by_label(problem);
        const Discretization disc = p.discretize(Grid::square(grid));
        py::gil_scoped_release release;
        auto u = integrate(parse_scheme(scheme), disc, p, TimeGrid(T, steps));
        py::gil_scoped_acquire acquire;
        return to_array(u);
      },
      py::arg("problem"), py::arg("scheme"), py::arg("grid"), py::arg("T"), py::arg("steps"));

  m.def(
      "reference",
      [](const std::string& problem, int grid, double T, int steps) {
        const auto p = problem_by_label(problem);
        const Discretization disc = p.discretize(Grid::square(grid));
        py::gil_scoped_release release;
        auto u = reference_solve(disc, p, TimeGrid(T, steps));
        py::gil_scoped_acquire acquire;
        return to_array(u);
      },
      py::arg("problem"), py::arg("grid"), py::arg("T"), py::arg("steps"));

  m.def(
      "run_study",
      [](const std::string& problem, const std::string& schemes, const std::string& norm, int grid,
         double T, int kmin, int kmax, int ref_factor, int threads, const std::string& out, bool plot) {
        StudyConfig cfg;
        cfg.problem = problem;
        cfg.schemes = parse_scheme_list(schemes);
        cfg.norm = NormKind::parse(norm);
        cfg.grid = grid;
        cfg.final_time = T;
        cfg.kmin = kmin;
        cfg.kmax = kmax;
        cfg.ref_factor = ref_factor;
        cfg.threads = threads;
        cfg.out_dir = out;
        cfg.plot = plot;
        ConvergenceReport r;
        {
          py::gil_scoped_release release;
          r = run_convergence_study(cfg);
        }
        return to_dict(r);
      },
      py::arg("problem") = "example1", py::arg("schemes") = "lie,strang,strangb", py::arg("norm") = "l2",
      py::arg("grid") = 63, py::arg("T") = 1.0, py::arg("kmin") = 6, py::arg("kmax") = 11,
      py::arg("ref_factor") = 32, py::arg("threads") = 1, py::arg("out") = "", py::arg("plot") = false);

  m.def("verify", [](std::uint64_t seed) {
    std::vector<py::tuple> out;
    for (const auto& c : run_verification(seed)) out.push_back(py::make_tuple(c.name, c.passed, c.value, c.tolerance));
    return out;
  }, py::arg("seed") = 7);
}
