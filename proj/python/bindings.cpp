#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sineflow/bounds.hpp"
#include "sineflow/curves.hpp"
#include "sineflow/flow.hpp"
#include "sineflow/intersections.hpp"
#include "sineflow/io.hpp"
#include "sineflow/measure.hpp"
#include "sineflow/verify.hpp"

namespace py = pybind11;
using namespace sineflow;
using nlohmann::json;

namespace {

py::object to_py(const json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

py::array_t<double> vertices_array(const Polyline& p) {
  py::array_t<double> a({static_cast<py::ssize_t>(p.size()), py::ssize_t{2}});
  auto m = a.mutable_unchecked<2>();
  for (std::size_t i = 0; i < p.size(); ++i) {
    m(i, 0) = p[i].x;
    m(i, 1) = p[i].y;
  }
  return a;
}

Polyline polyline_from_array(py::array_t<double, py::array::c_style | py::array::forcecast> a, bool closed) {
  if (a.ndim() != 2 || a.shape(1) != 2) throw py::value_error("vertices must have shape (n, 2)");
  auto r = a.unchecked<2>();
  std::vector<Point2> pts;
  for (py::ssize_t i = 0; i < r.shape(0); ++i) pts.push_back({r(i, 0), r(i, 1)});
  return Polyline(std::move(pts), closed);
}

FlowParams flow_params(py::object flow) {
  if (flow.is_none()) return {};
  return flow_params_from_json(json::parse(py::str(py::module_::import("json").attr("dumps")(flow)).cast<std::string>()));
}

py::object verify(const std::string& name, std::uint64_t seed, int n_max) {
  VerifyResult r;
  py::gil_scoped_release nogil;
  if (name == "intersect-lemma") {
    const std::vector<double> cs{1.1, 1.5, 2.0, 4.0, 8.0}, lams{0, 1, 2, 3, 4, 5, 6};
    r = verify_intersect_lemma(cs, lams);
  } else if (name == "straight2") {
    r = verify_straight2(seed);
  } else if (name == "straight") {
    r = verify_straight(seed);
  } else if (name == "jacobian") {
    r = verify_jacobian(seed);
  } else if (name == "intbound") {
    r = verify_intbound(TSCSpec::standard(n_max), ApproxSpec{}, n_max, seed);
  } else if (name == "area-law") {
    r = verify_area_law();
  } else if (name == "avoidance") {
    r = verify_avoidance(seed);
  } else {
    fail(ErrorKind::InvalidInput, "unknown suite " + name);
  }
  py::gil_scoped_acquire gil;
  return to_py(to_json(r));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Curve shortening flow on approximations of the topologist's sine curve";

  static py::exception<Error> exc(m, "SineflowError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object err = exc;
      py::object inst = err(e.what());
      inst.attr("kind") = std::string(to_string(e.kind()));
      PyErr_SetObject(err.ptr(), inst.ptr());
    }
  });

  py::class_<Polyline>(m, "Polyline")
      .def(py::init(&polyline_from_array), py::arg("vertices"), py::arg("closed"))
      .def_property_readonly("vertices", &vertices_array)
      .def_property_readonly("closed", &Polyline::closed)
      .def("__len__", &Polyline::size)
      .def("length", &polyline_length)
      .def("area", &enclosed_area)
      .def("is_embedded", [](const Polyline& p) { return is_embedded(p); })
      .def("to_json", [](const Polyline& p) { return to_py(polyline_to_json(p)); })
      .def("__repr__", [](const Polyline& p) {
        return "<Polyline " + std::to_string(p.size()) + (p.closed() ? " closed>" : " open>");
      });

  m.def("load_polyline", [](const std::string& path) { return load_polyline(path); });
  m.def("save_polyline", [](const std::string& path, const Polyline& p) { save_polyline(path, p); });

  m.def("tsc", [](int n_max, double beta) { return generate_tsc(TSCSpec::standard(n_max, beta)); },
        py::arg("n_max") = 8, py::arg("beta") = 1.0);
  m.def("inner_approx",
        [](int n, int n_max) { return generate_inner_approx(TSCSpec::standard(n_max), ApproxSpec{}, n); },
        py::arg("n"), py::arg("n_max") = 8);
  m.def("outer_approx",
        [](int n, int n_max) { return generate_outer_approx(TSCSpec::standard(n_max), ApproxSpec{}, n); },
        py::arg("n"), py::arg("n_max") = 8);
  m.def("grim_reaper",
        [](double c, double lambda, double t, double y_floor, double h) {
          return sample_grim_reaper({c, lambda}, t, y_floor, h);
        },
        py::arg("c"), py::arg("lam") = 0.0, py::arg("t") = 0.0, py::arg("y_floor") = -4.0, py::arg("h") = 0.01);
  m.def("grim_reaper_height",
        [](double c, double lambda, double x, double t) { return eval_grim_reaper({c, lambda}, x, t); },
        py::arg("c"), py::arg("lam"), py::arg("x"), py::arg("t"));
  m.def("circle", &sample_circle, py::arg("r0"), py::arg("t") = 0.0, py::arg("n_vertices") = 1024);
  m.def("delta", [](int n) { return ApproxSpec{}.delta(n); });
  m.def("a", [](int n) { return ApproxSpec{}.a(n); });

  m.def("evolve",
        [](const Polyline& p, double t, double mesh_h, py::object flow) {
          const FlowParams prm = flow_params(flow);
          py::gil_scoped_release nogil;
          return evolve_to(make_flow_state(p, mesh_h, prm), t, prm).curve;
        },
        py::arg("curve"), py::arg("t"), py::arg("mesh_h") = 0.01, py::arg("flow") = py::none(),
        "Evolves by curve shortening flow to time t; raises SineflowError on extinction.");
  m.def("evolve_snapshots",
        [](const Polyline& p, std::vector<double> times, double mesh_h, py::object flow) {
          const FlowParams prm = flow_params(flow);
          std::vector<Polyline> out;
          py::gil_scoped_release nogil;
          for (auto& s : evolve_snapshots(make_flow_state(p, mesh_h, prm), times, prm)) out.push_back(s.curve);
          return out;
        },
        py::arg("curve"), py::arg("times"), py::arg("mesh_h") = 0.01, py::arg("flow") = py::none());

  m.def("count_crossings",
        [](const Polyline& a, const Polyline& b) {
          const auto c = count_crossings(a, b);
          return py::make_tuple(c.count, c.uncertain);
        },
        "Returns (count, uncertain).");
  m.def("hausdorff_distance", [](const Polyline& a, const Polyline& b) { return hausdorff_distance(a, b); });
  m.def("polyline_distance", &polyline_distance);
  m.def("restrict_to_ball", [](const Polyline& p, double cx, double cy, double r) {
    return restrict_to_ball(p, Ball{{cx, cy}, r});
  });

  m.def("local_length_experiment",
        [](double x, double y, double t, double eps, int n_max, double mesh_h, bool wide) {
          ExperimentOptions opt;
          opt.mesh_h = mesh_h;
          opt.allow_wide_window = wide;
          py::gil_scoped_release nogil;
          const auto fam = make_family(TSCSpec::standard(n_max), ApproxSpec{}, n_max);
          const Point2 c{x, y};
          if (!(eps > 0.0)) eps = on_V(c) ? case2_recipe(fam, t, opt.alpha).eps : 0.05;
          const auto tab = local_length_experiment(fam, c, t, eps, opt);
          py::gil_scoped_acquire gil;
          return to_py(to_json(tab));
        },
        py::arg("x"), py::arg("y"), py::arg("t"), py::arg("eps"), py::arg("n_max") = 8, py::arg("mesh_h") = 0.01,
        py::arg("allow_wide_window") = false,
        "Length of each evolved inner approximation inside B_eps((x, y)); eps <= 0 picks the recipe window on V and 0.05 elsewhere.");

  m.def("h1_cover",
        [](const Polyline& p, double eps) { return to_py(to_json(h1_cover_points(p, eps))); });
  m.def("annulus_area",
        [](const Polyline& inner, const Polyline& outer) { return annulus_area({{inner, 0.0, 0.01}, {outer, 0.0, 0.01}, 0.0}); });
  m.def("levelset",
        [](int N, double t, double mesh_h) {
          LevelsetOptions opt;
          opt.mesh_h = mesh_h;
          py::gil_scoped_release nogil;
          const auto rep = levelset_snapshot(TSCSpec::standard(N), ApproxSpec{}, N, t, opt);
          py::gil_scoped_acquire gil;
          return to_py(to_json(rep));
        },
        py::arg("N"), py::arg("t"), py::arg("mesh_h") = 0.01);

  m.def("verify", &verify, py::arg("name"), py::arg("seed") = 1, py::arg("n_max") = 8,
        "Runs a property suite by name and returns its report.");
}
