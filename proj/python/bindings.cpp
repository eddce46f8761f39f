#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "bsphere/analytic.hpp"
#include "bsphere/config.hpp"
#include "bsphere/errors.hpp"
#include "bsphere/experiments.hpp"
#include "bsphere/io.hpp"
#include "bsphere/metric.hpp"
#include "bsphere/runner.hpp"

namespace py = pybind11;
using namespace bsphere;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) {
    return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

std::vector<double> from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    return {a.data(), a.data() + a.size()};
}

RunConfig make_config(const std::string& command, const py::dict& settings) {
    RunConfig c;
    c.command = command;
    for (const auto& [k, v] : settings) apply_setting(c, py::str(k).cast<std::string>(), py::str(v).cast<std::string>());
    return c;
}

} // namespace

PYBIND11_MODULE(_bsphere, m) {
    m.doc() = "Brownian snake and Brownian sphere Monte Carlo toolkit";

    py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
    py::register_exception<CorruptFileError>(m, "CorruptFileError", PyExc_IOError);
    py::register_exception<UnsupportedVersionError>(m, "UnsupportedVersionError", PyExc_IOError);
    py::register_exception<ResourceError>(m, "ResourceError", PyExc_RuntimeError);

    py::class_<SnakeTrajectory>(m, "SnakeTrajectory")
        .def(py::init([](double duration, double origin, const py::array_t<double>& zeta,
                         const py::array_t<double>& tip) {
                 SnakeTrajectory w{duration, origin, from_array(zeta), from_array(tip)};
                 validate(w);
                 return w;
             }),
             py::arg("duration"), py::arg("origin"), py::arg("zeta"), py::arg("tip"))
        .def_readonly("duration", &SnakeTrajectory::duration)
        .def_readonly("origin", &SnakeTrajectory::origin)
        .def_property_readonly("zeta", [](const SnakeTrajectory& w) { return to_array(w.zeta); })
        .def_property_readonly("tip", [](const SnakeTrajectory& w) { return to_array(w.tip); })
        .def_property_readonly("n_steps", &SnakeTrajectory::n_steps)
        .def("w_star", [](const SnakeTrajectory& w) {
            const ArgMin a = w_star(w);
            return py::make_tuple(a.value, a.index);
        })
        .def("v_epsilon", &v_epsilon, py::arg("eps"))
        .def("reroot", &reroot, py::arg("index"))
        .def("rescale", &rescale, py::arg("lam"))
        .def("label_distance", [](const SnakeTrajectory& w, std::size_t i, std::size_t j) { return d_circle(w, i, j); })
        .def("__eq__", [](const SnakeTrajectory& a, const SnakeTrajectory& b) { return a == b; });

    m.def(
        "sample_snake",
        [](std::size_t n, std::uint64_t seed, std::uint64_t stream) {
            RandomStream rng(seed, stream);
            return sample_normalized_snake(rng, n);
        },
        py::arg("n"), py::arg("seed"), py::arg("stream") = 0,
        "Normalized snake (duration 1, origin 0) on an n-step grid.");

    m.def("write_trajectory", [](const SnakeTrajectory& w, const std::string& path) { write_trajectory(w, path); });
    m.def("read_trajectory", [](const std::string& path) { return read_trajectory(path); });

    m.def(
        "approx_D",
        [](const SnakeTrajectory& w, std::size_t m_anchors, std::size_t i, std::size_t j, double ident_tol) {
            const double tol = ident_tol > 0.0 ? ident_tol : default_ident_tol(w);
            const QuotientMesh mesh = build_mesh(w, m_anchors, tol, {i, j});
            const MetricEstimate e = approx_D(mesh, w, i, j);
            return py::dict(py::arg("value") = e.value, py::arg("lower") = e.lower_bound,
                            py::arg("upper") = e.upper_bound, py::arg("mesh_size") = e.mesh_size);
        },
        py::arg("w"), py::arg("m"), py::arg("i"), py::arg("j"), py::arg("ident_tol") = 0.0);

    m.def("min_tail", &min_tail, py::arg("x"), py::arg("y"));
    m.def("ito_tail", &ito_tail, py::arg("s"));
    m.def("first_moment", &first_moment, py::arg("x"), py::arg("eps"));
    m.def("second_moment", [](double x, double eps) { return second_moment(x, eps); }, py::arg("x"), py::arg("eps"));
    m.def("clg_value", &clg_value, py::arg("x"));

    m.def(
        "estimate_min_tail",
        [](double x, double level, std::size_t replicas, std::uint64_t seed, double a, double b, std::size_t strata) {
            WindowOptions w;
            w.a = a;
            w.b = b;
            w.strata = strata;
            const EstimateReport r =
                estimate_N_functional({seed, 1, ""}, x, functional_min_below(level), w, replicas).front();
            return py::dict(py::arg("estimate") = r.estimate, py::arg("std_error") = r.std_error,
                            py::arg("window_tail_mass") = r.window_tail_mass);
        },
        py::arg("x"), py::arg("level") = 0.0, py::arg("replicas") = 2000, py::arg("seed") = 1,
        py::arg("a") = 1e-3, py::arg("b") = 500.0, py::arg("strata") = 20,
        "Windowed estimate of N_x(W* <= level).");

    m.def(
        "config_hash",
        [](const std::string& command, const py::dict& settings) { return config_hash(make_config(command, settings)); },
        py::arg("command"), py::arg("settings") = py::dict());

    m.def(
        "run",
        [](const std::string& command, const py::dict& settings) {
            const RunConfig c = make_config(command, settings);
            std::ostringstream out, err;
            const int code = run(c, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("command"), py::arg("settings") = py::dict(),
        "Runs a command like the CLI; returns (exit_code, stdout, stderr).");

    m.def("command_names", &command_names);
    m.attr("__version__") = "1.0.0";
}
