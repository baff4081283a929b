#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hsat/errors.hpp"
#include "hsat/hankel.hpp"
#include "hsat/io.hpp"
#include "hsat/symbol.hpp"

namespace py = pybind11;

namespace {

hsat::json parse(const std::string& text, const char* what) {
    if (text.empty()) return nullptr;
    try {
        return hsat::json::parse(text);
    } catch (const hsat::json::parse_error& e) {
        throw hsat::ParseError(std::string("invalid JSON in ") + what + ": " + e.what(), "");
    }
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Bindings for the hsat C++ library";

    auto base = py::register_exception<hsat::Error>(m, "HsatError");
    py::register_exception<hsat::ParseError>(m, "ParseError", base.ptr());
    py::register_exception<hsat::ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<hsat::PreconditionError>(m, "PreconditionError", base.ptr());
    py::register_exception<hsat::InapplicableError>(m, "InapplicableError", base.ptr());
    py::register_exception<hsat::DomainError>(m, "DomainError", base.ptr());
    py::register_exception<hsat::ResolutionError>(m, "ResolutionError", base.ptr());
    py::register_exception<hsat::GridError>(m, "GridError", base.ptr());

    m.def("version", &hsat::version);

    m.def(
        "run",
        [](const std::string& command, const std::string& spec, const std::string& config) {
            const auto input = parse(spec, "spec");
            const auto cfg = hsat::run_config_from_json(parse(config, "config"));
            std::string out;
            bool decided = true;
            {
                py::gil_scoped_release release;
                auto o = hsat::run_command(command, input, cfg);
                out = o.report.dump();
                decided = o.decided;
            }
            return py::make_tuple(out, decided);
        },
        py::arg("command"), py::arg("spec") = "", py::arg("config") = "",
        "Run a command on JSON text; returns (report JSON text, decided).");

    m.def(
        "hankel_norm_exact",
        [](std::vector<hsat::cplx> coeffs, std::size_t n_max, double tol_rel) {
            hsat::NormConfig cfg;
            cfg.n_max = n_max;
            cfg.tol_rel = tol_rel;
            return hsat::hankel_norm(hsat::hankel_coefficients(std::move(coeffs)), cfg).final_value();
        },
        py::arg("coeffs"), py::arg("n_max") = 64, py::arg("tol_rel") = 1e-10,
        "Norm of the Hankel matrix built from finitely many analytic coefficients.");

    m.def(
        "conjugate",
        [](const std::vector<double>& u) {
            int mexp = 0;
            while ((std::size_t{1} << mexp) < u.size()) ++mexp;
            if ((std::size_t{1} << mexp) != u.size()) throw hsat::ConfigError("sample count must be a power of two");
            return hsat::conjugate_function(mexp, u);
        },
        py::arg("samples"), "Harmonic conjugate of real samples on the offset grid.");
}
