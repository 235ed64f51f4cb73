#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "schrlat/cli.hpp"
#include "schrlat/experiments.hpp"
#include "schrlat/extension.hpp"
#include "schrlat/io.hpp"
#include "schrlat/lattice.hpp"
#include "schrlat/measures.hpp"
#include "schrlat/parallel.hpp"
#include "schrlat/profile.hpp"
#include "schrlat/propagator.hpp"

namespace py = pybind11;
using namespace schrlat;

namespace {

Rational to_rational(const py::object& v) {
    if (py::isinstance<py::str>(v)) return Rational::parse(v.cast<std::string>());
    if (py::isinstance<py::int_>(v)) return Rational(v.cast<std::int64_t>());
    if (py::hasattr(v, "numerator") && py::hasattr(v, "denominator"))
        return Rational(v.attr("numerator").cast<std::int64_t>(), v.attr("denominator").cast<std::int64_t>());
    throw ValidationError("expected an int, a fractions.Fraction or a \"p/q\" string");
}

py::dict report_dict(const ExperimentReport& r) {
    py::dict out;
    out["experiment"] = r.experiment;
    out["n"] = r.n;
    out["scale"] = r.scale_name;
    out["scale_log2"] = r.scale_log2;
    py::dict comps;
    for (const auto& c : r.components) {
        py::dict d;
        d["values"] = c.values;
        d["slope"] = c.fit.slope;
        d["max_residual"] = c.fit.max_residual;
        d["expected_slope"] = c.expected_slope ? py::cast(*c.expected_slope) : py::none();
        comps[py::str(c.name)] = d;
    }
    out["components"] = comps;
    py::dict summary;
    for (const auto& [k, v] : r.summary) summary[py::str(k)] = v;
    out["summary"] = summary;
    out["sample_notes"] = r.sample_notes;
    out["warnings"] = r.warnings;
    return out;
}

py::tuple sup_tuple(const SupResult& s) { return py::make_tuple(s.value, s.center, s.r); }

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Self-similar Schroedinger solutions, lattice concentration and weighted extension experiments.";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<CertificateInapplicable>(m, "CertificateInapplicable", PyExc_ArithmeticError);

    m.def("set_threads", [](unsigned n) { set_thread_count(n); }, py::arg("n"));

    py::class_<QuadratureSpec>(m, "QuadratureSpec")
        .def(py::init<>())
        .def_readwrite("nodes_min", &QuadratureSpec::nodes_min)
        .def_readwrite("nodes_per_cycle", &QuadratureSpec::nodes_per_cycle)
        .def_readwrite("abs_tol", &QuadratureSpec::abs_tol);

    py::class_<FrequencyProfile>(m, "FrequencyProfile")
        .def_property_readonly("level", &FrequencyProfile::level)
        .def_property_readonly("sigma", [](const FrequencyProfile& p) { return p.sigma().str(); })
        .def_property_readonly("delta", [](const FrequencyProfile& p) { return p.delta().to_double(); })
        .def_property_readonly("centers", [](const FrequencyProfile& p) {
            return std::vector<double>(p.centers().begin(), p.centers().end());
        })
        .def_property_readonly("halfwidth", &FrequencyProfile::halfwidth)
        .def("__len__", &FrequencyProfile::size)
        .def("support_mass", [](const FrequencyProfile& p) { return support_mass(p).to_double(); })
        .def("__call__", [](const FrequencyProfile& p, double xi) { return eval_profile(p, xi); })
        .def("to_json", [](const FrequencyProfile& p) { return to_json(p).dump(); })
        .def_static("from_json", [](const std::string& s) { return profile_from_json(Json::parse(s)); });

    m.def(
        "build_profile",
        [](int delta_log2, const py::object& sigma, int level) {
            return build_profile(delta_log2, to_rational(sigma), level);
        },
        py::arg("delta_log2"), py::arg("sigma"), py::arg("level") = 1);

    m.def(
        "solution_at",
        [](const FrequencyProfile& p, int n, const std::vector<double>& x, double t, const QuadratureSpec& q) {
            return solution_at(p, n, x, t, q);
        },
        py::arg("profile"), py::arg("n"), py::arg("x"), py::arg("t"), py::arg("quad") = QuadratureSpec{});

    m.def(
        "phase_deviation", [](const FrequencyProfile& p, double s, double t) { return phase_deviation(p, s, t).theta; },
        py::arg("profile"), py::arg("s"), py::arg("t"));

    py::class_<BoxUnionWeight>(m, "BoxUnionWeight")
        .def_property_readonly("dimension", &BoxUnionWeight::dimension)
        .def_property_readonly("is_product", &BoxUnionWeight::is_product)
        .def("box_count", &BoxUnionWeight::box_count)
        .def("volume", &BoxUnionWeight::volume)
        .def("scaled", [](const BoxUnionWeight& w, double l) { return scale(w, l); })
        .def("to_json", [](const BoxUnionWeight& w) { return to_json(w).dump(); })
        .def_static("from_json", [](const std::string& s) { return weight_from_json(Json::parse(s)); })
        .def_static(
            "from_boxes",
            [](int n, const std::vector<std::pair<std::vector<double>, std::vector<double>>>& boxes) {
                std::vector<Box> out;
                for (const auto& [c, h] : boxes) out.push_back(Box{c, h});
                return BoxUnionWeight::from_boxes(n, std::move(out));
            },
            py::arg("n"), py::arg("boxes"))
        .def("__eq__", [](const BoxUnionWeight& a, const BoxUnionWeight& b) { return a == b; });

    py::class_<LatticeSet>(m, "LatticeSet")
        .def_property_readonly("dimension", &LatticeSet::dimension)
        .def_property_readonly("level", &LatticeSet::level)
        .def_property_readonly("x_values", [](const LatticeSet& l) {
            return std::vector<double>(l.x_values().begin(), l.x_values().end());
        })
        .def_property_readonly("t_values", [](const LatticeSet& l) {
            return std::vector<double>(l.t_values().begin(), l.t_values().end());
        })
        .def("__len__", [](const LatticeSet& l) { return l.size(); })
        .def("point", &LatticeSet::point)
        .def("thicken", [](const LatticeSet& l, double rho) { return thicken(l, rho); }, py::arg("rho"))
        .def("scaled", [](const LatticeSet& l, const py::object& lam) { return scale(l, to_rational(lam)); })
        .def("to_json", [](const LatticeSet& l) { return to_json(l).dump(); })
        .def_static("from_json", [](const std::string& s) { return lattice_from_json(Json::parse(s)); })
        .def("__eq__", [](const LatticeSet& a, const LatticeSet& b) { return a == b; });

    m.def(
        "build_lattice",
        [](int delta_log2, const py::object& sigma, int level, int n, const py::object& c) {
            return build_lattice(Dyadic::pow2(-delta_log2), to_rational(sigma), level, n, to_rational(c));
        },
        py::arg("delta_log2"), py::arg("sigma"), py::arg("level"), py::arg("n"), py::arg("c"));

    m.def(
        "min_modulus",
        [](const FrequencyProfile& p, const LatticeSet& l, const QuadratureSpec& q) {
            const auto r = min_modulus(p, l, q);
            return py::make_tuple(r.value, r.x, r.t);
        },
        py::arg("profile"), py::arg("lattice"), py::arg("quad") = QuadratureSpec{});

    m.def(
        "box_mass", [](const BoxUnionWeight& w, const std::vector<double>& c, double r) { return box_mass(w, c, r); },
        py::arg("weight"), py::arg("center"), py::arg("r"));
    m.def(
        "sup_ball_mass", [](const BoxUnionWeight& w, double eta) { return sup_tuple(sup_ball_mass(w, eta)); },
        py::arg("weight"), py::arg("eta"));
    m.def(
        "mc_norm", [](const BoxUnionWeight& w, double alpha, double p) { return sup_tuple(mc_norm(w, alpha, p)); },
        py::arg("weight"), py::arg("alpha"), py::arg("p"));

    m.def(
        "surface_extension",
        [](const FrequencyProfile& p, int n, const std::vector<double>& x, const QuadratureSpec& q) {
            return surface_extension(p, n, x, q);
        },
        py::arg("profile"), py::arg("n"), py::arg("x"), py::arg("quad") = QuadratureSpec{});

    m.def(
        "knapp_ratio",
        [](int delta_log2, int n) {
            return knapp_lower_bound(KnappCell::make(std::ldexp(1.0, -delta_log2), n)).ratio();
        },
        py::arg("delta_log2"), py::arg("n") = 2);

    m.def(
        "run_knapp",
        [](int n, double alpha, double p, const std::vector<int>& delta_log2) {
            KnappConfig cfg;
            cfg.n = n;
            cfg.alpha = alpha;
            cfg.p = p;
            cfg.delta_log2 = delta_log2;
            return report_dict(run_knapp(cfg));
        },
        py::arg("n") = 2, py::arg("alpha") = 1.5, py::arg("p") = 1.0,
        py::arg("delta_log2") = std::vector<int>{3, 4, 5, 6, 7});

    m.def(
        "run_upperbound",
        [](int n, const py::object& eta, const std::vector<int>& r_log2) {
            UpperBoundConfig cfg;
            cfg.n = n;
            cfg.eta = to_rational(eta);
            cfg.r_log2 = r_log2;
            return report_dict(run_upperbound(cfg));
        },
        py::arg("n") = 3, py::arg("eta") = py::int_(2), py::arg("r_log2") = std::vector<int>{12, 16, 20});

    m.def(
        "region_classify",
        [](int n, const py::object& alpha, const py::object& inv_p) {
            return region_report(n).classify(to_rational(alpha), to_rational(inv_p));
        },
        py::arg("n"), py::arg("alpha"), py::arg("inv_p"));

    m.def(
        "cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            const int code = parse_and_dispatch(args, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs one command line; returns (exit_code, stdout, stderr).");
}
