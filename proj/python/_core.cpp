#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "ssep2d/dynamics.hpp"
#include "ssep2d/errors.hpp"
#include "ssep2d/harness/acceptance.hpp"
#include "ssep2d/harness/commands.hpp"
#include "ssep2d/harness/config.hpp"
#include "ssep2d/lattice.hpp"
#include "ssep2d/rate.hpp"

namespace py = pybind11;
using namespace ssep2d;

namespace {

RadialDensity make_density(std::vector<double> r, std::vector<double> m, double alpha) {
    RadialDensity d;
    d.r = std::move(r);
    d.m = std::move(m);
    d.alpha = alpha;
    d.validate();
    d.alpha_extended = d.is_alpha_extended();
    return d;
}

EnergyVariant energy_variant(const std::string& name) {
    if (name == "plain") return EnergyVariant::plain;
    if (name == "alpha") return EnergyVariant::alpha;
    if (name == "half_interval") return EnergyVariant::half_interval;
    throw DomainError("unknown energy variant " + name);
}

BasisVariant basis_variant(const std::string& name) {
    if (name == "Q") return BasisVariant::Q;
    if (name == "Q_alpha") return BasisVariant::Q_alpha;
    if (name == "hatI") return BasisVariant::hatI;
    if (name == "J_Q") return BasisVariant::J_Q;
    throw DomainError("unknown basis variant " + name);
}

harness::RunConfig config_from(const std::string& text) {
    return harness::RunConfig::from_json(harness::json::parse(text));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Bindings for the ssep2d core library";

    py::register_exception<Error>(m, "Ssep2dError", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    py::class_<LatticeBall>(m, "LatticeBall")
        .def_static("build", [](double T, double r_max) { return LatticeBall::build(T, r_max); },
                    py::arg("T"), py::arg("r_max"))
        .def_property_readonly("T", &LatticeBall::scale)
        .def_property_readonly("r_max", &LatticeBall::r_max)
        .def_property_readonly("radius", &LatticeBall::radius)
        .def_property_readonly("size", &LatticeBall::size)
        .def_property_readonly("interior_size", &LatticeBall::interior_size)
        .def_property_readonly("bond_count", &LatticeBall::bond_count)
        .def("sigma_T", [](const LatticeBall& b, int x1, int x2) { return b.sigma_T({x1, x2}); })
        .def("sites", [](const LatticeBall& b) {
            std::vector<std::pair<int, int>> out;
            for (const auto& s : b.sites()) out.emplace_back(s.x1, s.x2);
            return out;
        });

    m.def("mobility", &mobility, py::arg("a"));
    m.def("upsilon_closed", &upsilon_closed, py::arg("alpha"), py::arg("beta"));
    m.def(
        "solve_instanton",
        [](double alpha, double beta, std::size_t N, const std::string& mode) {
            const auto res = solve_instanton(
                alpha, beta, N, mode == "direct" ? InstantonMode::direct : InstantonMode::arcsin);
            return py::make_tuple(res.profile.r, res.profile.m, res.value);
        },
        py::arg("alpha"), py::arg("beta"), py::arg("N") = 1024, py::arg("mode") = "arcsin");
    m.def(
        "energy_closed",
        [](std::vector<double> r, std::vector<double> v, double alpha, const std::string& variant) {
            return energy_closed(make_density(std::move(r), std::move(v), alpha),
                                 energy_variant(variant))
                .value;
        },
        py::arg("r"), py::arg("m"), py::arg("alpha"), py::arg("variant") = "plain");
    m.def(
        "energy_basis",
        [](std::vector<double> r, std::vector<double> v, double alpha, const std::string& variant,
           std::size_t intervals, double lo, double hi, const std::string& grading) {
            const auto basis = TestBasis::cubic(
                lo, hi, intervals, grading == "ends" ? KnotGrading::ends : KnotGrading::uniform);
            return energy_basis(make_density(std::move(r), std::move(v), alpha), basis,
                                basis_variant(variant))
                .value;
        },
        py::arg("r"), py::arg("m"), py::arg("alpha"), py::arg("variant"), py::arg("intervals") = 64,
        py::arg("lo") = 0.0, py::arg("hi") = 0.45, py::arg("grading") = "uniform");
    m.def(
        "rate_I_Q_alpha",
        [](std::vector<double> r, std::vector<double> v, double alpha) {
            return rate_I_Q_alpha(make_density(std::move(r), std::move(v), alpha)).value;
        },
        py::arg("r"), py::arg("m"), py::arg("alpha"));
    m.def(
        "detailed_balance",
        [](const std::string& config_json) {
            const auto c = config_from(config_json);
            return check_detailed_balance(LatticeBall::build(c.T, c.r_max), c.make_tilt());
        },
        py::arg("config_json"));
    m.def(
        "rate_report_json",
        [](const std::string& config_json) {
            const auto c = config_from(config_json);
            const double alpha = c.rate.density == "sine-instanton" ? 1.0 : c.alpha;
            const auto d = harness::density_preset(c.rate.density, alpha, c.rate.beta, c.r_max,
                                                   c.rate.grid);
            return harness::rate_report(c, d, "preset:" + c.rate.density).dump();
        },
        py::arg("config_json"));
    m.def(
        "simulate",
        [](const std::string& config_path, const std::string& out) {
            harness::CommandOptions o;
            o.config_path = config_path;
            o.out = out;
            o.quiet = true;
            std::ostringstream sink;
            py::gil_scoped_release release;
            return harness::cmd_simulate(o, sink);
        },
        py::arg("config_path"), py::arg("out"));
    m.def(
        "verify_json",
        [](std::vector<int> criteria, const std::string& suite, std::uint64_t seed) {
            harness::AcceptanceOptions a;
            a.suite = harness::parse_suite(suite);
            a.only = std::move(criteria);
            a.seed = seed;
            harness::json list = harness::json::array();
            {
                py::gil_scoped_release release;
                for (const auto& r : harness::run_acceptance(a)) list.push_back(harness::to_json(r));
            }
            return list.dump();
        },
        py::arg("criteria") = std::vector<int>{}, py::arg("suite") = "fast",
        py::arg("seed") = harness::AcceptanceOptions{}.seed);
}
