#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "srd/config.hpp"
#include "srd/error.hpp"
#include "srd/mollifier.hpp"
#include "srd/suites.hpp"

namespace py = pybind11;
using namespace srd;

namespace {

RunConfig from_text(const std::string& text)
{
    return parse_config(text);
}

py::array_t<double> states_array(const Trajectory& t)
{
    const std::size_t T = t.states.size();
    const std::size_t r = T ? t.states.front().size() : 0;
    const std::size_t n = r ? static_cast<std::size_t>(t.states.front().front().size()) : 0;
    py::array_t<double> out({T, r, n});
    auto a = out.mutable_unchecked<3>();
    for (std::size_t i = 0; i < T; ++i) {
        for (std::size_t l = 0; l < r; ++l) {
            for (std::size_t c = 0; c < n; ++c) {
                a(i, l, c) = t.states[i][l][static_cast<Eigen::Index>(c)];
            }
        }
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_srd, m)
{
    m.doc() = "Core bindings; configs and reports travel as JSON text.";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<AuditError>(m, "AuditError", PyExc_RuntimeError);
    py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);
    // prefix the reason token so Python callers see the same thing the CLI prints
    py::register_exception_translator([](std::exception_ptr p) {
        auto raise = [](const Error& e, const char* name) {
            const auto cls = py::module_::import("srd._srd").attr(name);
            py::set_error(cls, (e.reason() + ": " + e.what()).c_str());
        };
        try {
            if (p) {
                std::rethrow_exception(p);
            }
        } catch (const ConfigError& e) {
            raise(e, "ConfigError");
        } catch (const AuditError& e) {
            raise(e, "AuditError");
        } catch (const SolverError& e) {
            raise(e, "SolverError");
        }
    });

    m.attr("version") = kToolVersion;
    m.def("fhn_preset", [] { return fhn_preset().raw.dump(); });
    m.def("config_digest", [](const std::string& cfg) { return config_digest(from_text(cfg)); });
    m.def("suite_names", &suite_names);

    m.def(
        "run_suite",
        [](const std::string& cfg, const std::string& suite, std::optional<std::size_t> paths, unsigned workers) {
            const RunConfig c = from_text(cfg);
            py::gil_scoped_release release;
            return run_suite(c, suite, {paths, workers}).to_json().dump();
        },
        py::arg("config"), py::arg("suite"), py::arg("paths") = py::none(), py::arg("workers") = 1);

    m.def(
        "run_ensemble",
        [](const std::string& cfg, std::optional<std::size_t> paths, unsigned workers) {
            const RunConfig c = from_text(cfg);
            py::gil_scoped_release release;
            const auto rep = run_ensemble(c, {paths, workers});
            Json j = rep.to_json();
            j["aggregate"] = {{"columns", rep.tables.front().columns}, {"rows", rep.tables.front().rows}};
            return j.dump();
        },
        py::arg("config"), py::arg("paths") = py::none(), py::arg("workers") = 1);

    m.def(
        "simulate",
        [](const std::string& cfg, std::size_t path_index) {
            const RunConfig c = from_text(cfg);
            const Problem p = build_problem(c);
            check_experiment_preconditions(c, p);
            const SolverConfig sc = build_solver_config(c);
            const auto path = ensemble_path(p, sc, build_ensemble(c, 1, 1), path_index);
            const Trajectory t = simulate(p, sc, path, build_initial(c, p.grid, p.components()));
            py::dict d;
            d["times"] = t.times;
            d["steps"] = t.steps;
            d["states"] = states_array(t);
            d["stopped"] = t.stopping.triggered;
            d["stop_time"] = t.stopping.time;
            d["seed"] = t.provenance.seed;
            d["problem_digest"] = t.provenance.problem_digest;
            return d;
        },
        py::arg("config"), py::arg("path_index") = 0);

    m.def(
        "operator_spectrum",
        [](int cells, double length, double a) {
            const double e[] = {length};
            const int c[] = {cells};
            const auto g = DomainGrid::build(1, e, c);
            const auto op = EllipticOperator::assemble(g, CoefficientField::uniform(g, a, 0.0, a, a));
            const Eigen::VectorXd s = operator_spectrum(op);
            return std::vector<double>(s.data(), s.data() + s.size());
        },
        py::arg("cells"), py::arg("length") = 1.0, py::arg("a") = 1.0);

    m.def(
        "wiener_increments",
        [](std::uint64_t seed, std::size_t r, std::size_t K, std::size_t n, double dt) {
            const WienerPath w(seed, r, K, n, dt);
            py::array_t<double> out({r, K, n});
            auto a = out.mutable_unchecked<3>();
            for (std::size_t l = 0; l < r; ++l) {
                for (std::size_t k = 0; k < K; ++k) {
                    for (std::size_t i = 0; i < n; ++i) {
                        a(l, k, i) = w.increment(l, k, i);
                    }
                }
            }
            return out;
        },
        py::arg("seed"), py::arg("components"), py::arg("modes"), py::arg("steps"), py::arg("dt"));

    m.def("normal_quantile", &normal_quantile);

    m.def(
        "mollifier_levels",
        [](double C, std::size_t n_max) {
            return build_mollifier([C](double s) { return C * s; }, n_max).levels();
        },
        py::arg("C"), py::arg("n_max"));
}
