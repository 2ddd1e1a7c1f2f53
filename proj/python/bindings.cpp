#include "uscprobe/config.hpp"
#include "uscprobe/dynamics.hpp"
#include "uscprobe/protocol.hpp"
#include "uscprobe/spectrum.hpp"

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

namespace py = pybind11;
using namespace uscprobe;

namespace {

py::array_t<double> to_numpy(const std::vector<double>& v) {
    const std::vector<py::ssize_t> shape{static_cast<py::ssize_t>(v.size())};
    const std::vector<py::ssize_t> strides{static_cast<py::ssize_t>(sizeof(double))};
    return py::array_t<double>(shape, strides, v.data());
}

std::string value_text(const py::handle& value) {
    if (py::isinstance<py::bool_>(value)) return value.cast<bool>() ? "true" : "false";
    if (py::isinstance<py::float_>(value)) return format_number(value.cast<double>());
    return py::str(value).cast<std::string>();
}

RunConfig configure(const std::optional<std::string>& preset, const py::dict& overrides) {
    std::vector<KeyValue> entries;
    for (const auto& [key, value] : overrides) {
        entries.push_back(parse_assignment(py::str(key).cast<std::string>() + "=" + value_text(value)));
    }
    return parse_config(preset, entries);
}

py::dict echo(const RunConfig& cfg) {
    py::dict out;
    for (const auto& [k, v] : cfg.echo()) out[py::str(k)] = v;
    return out;
}

py::dict history_dict(const RunConfig& cfg, const PopulationHistory& h) {
    py::dict d;
    d["configuration"] = std::string(to_string(h.config));
    d["times"] = to_numpy(h.times);
    d["p_0u"] = to_numpy(h.p_0u);
    d["p_2u"] = to_numpy(h.p_2u);
    d["p_phi0"] = to_numpy(h.p_phi0);
    d["p_doublet"] = to_numpy(h.p_doublet);
    const auto rows = static_cast<py::ssize_t>(h.fock_populations.size());
    const auto cols = static_cast<py::ssize_t>(h.times.size());
    py::array_t<double> fock({rows, cols});
    auto f = fock.mutable_unchecked<2>();
    for (py::ssize_t n = 0; n < rows; ++n)
        for (py::ssize_t i = 0; i < cols; ++i) f(n, i) = h.fock_populations[n][i];
    d["fock"] = fock;
    d["trace"] = to_numpy(h.trace);
    d["purity"] = to_numpy(h.purity);
    d["min_eig"] = to_numpy(h.min_eig);
    d["omega_p"] = h.carriers.omega_p;
    d["omega_s"] = h.carriers.omega_s;
    d["efficiency"] = efficiency(h);
    d["warnings"] = h.warnings;
    d["accepted_steps"] = h.accepted_steps;
    d["rejected_steps"] = h.rejected_steps;
    d["parameters"] = echo(cfg);
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Lindblad simulation of Lambda- and Vee-STIRAP with an ultrastrongly coupled cavity mode";

    static py::exception<ConfigError> config_error(m, "ConfigError", PyExc_ValueError);
    static py::exception<IntegrationError> integration_error(m, "IntegrationError", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const ConfigError& e) {
            config_error(((e.key().empty() ? "" : "[" + e.key() + "] ") + e.what()).c_str());
        } catch (const IntegrationError& e) {
            integration_error(e.what());
        }
    });

    m.def("preset_names", &preset_names);

    m.def(
        "run",
        [](std::optional<std::string> preset, py::dict overrides) {
            const RunConfig cfg = configure(preset, overrides);
            PopulationHistory h;
            {
                py::gil_scoped_release release;
                h = run(cfg.run);
            }
            return history_dict(cfg, h);
        },
        py::arg("preset") = py::none(), py::arg("overrides") = py::dict(),
        "Integrate one protocol; returns population histories and diagnostics as numpy arrays.");

    m.def(
        "kappa_scan",
        [](std::vector<double> kappas, std::optional<std::string> preset, py::dict overrides, int jobs) {
            const RunConfig cfg = configure(preset, overrides);
            std::vector<ScanPoint> points;
            {
                py::gil_scoped_release release;
                points = kappa_scan(cfg.run, kappas, jobs);
            }
            py::list out;
            for (const auto& p : points) {
                out.append(py::make_tuple(p.kappa, p.efficiency, p.error ? py::cast(*p.error) : py::none()));
            }
            return out;
        },
        py::arg("kappas"), py::arg("preset") = py::none(), py::arg("overrides") = py::dict(), py::arg("jobs") = 1,
        "One run per kappa (ascending); returns [(kappa, efficiency, error or None)].");

    m.def(
        "stray_falsification",
        [](std::string configuration, std::optional<std::string> preset, py::dict overrides, int jobs) {
            Configuration config = parse_configuration(configuration);
            std::optional<ProtocolRun> base;
            if (preset || !overrides.empty()) {
                base = configure(preset, overrides).run;
                if (base->config != config) throw ConfigError("configuration", "configuration disagrees with the preset");
            }
            StrayReport r;
            {
                py::gil_scoped_release release;
                r = stray_falsification(config, base, jobs);
            }
            py::list cases;
            for (const auto& c : r.cases) {
                py::dict d;
                d["label"] = c.label;
                d["lambda"] = c.lambda;
                d["lambda_prime"] = c.lambda_prime;
                d["eg_coupling_form"] = std::string(to_string(c.form));
                d["efficiency"] = c.efficiency;
                cases.append(d);
            }
            py::dict out;
            out["cases"] = cases;
            out["summary"] = r.summary;
            return out;
        },
        py::arg("configuration") = "lambda", py::arg("preset") = py::none(), py::arg("overrides") = py::dict(),
        py::arg("jobs") = 1,
        "Stray-coupling comparison; defaults to the fig1b / fig3a presets with gamma = kappa = 1e-4.");

    m.def(
        "spectrum",
        [](std::optional<std::string> preset, py::dict overrides) {
            const RunConfig cfg = configure(preset, overrides);
            const SystemParams& sys = cfg.run.system;
            const EigenSystem es = diagonalize(assemble_static(sys) + assemble_stray(sys), sys.space());
            py::list kinds, labels;
            std::vector<double> u_pop;
            for (int k = 0; k < es.size(); ++k) {
                const auto kind = es.labels[k].kind;
                kinds.append(kind == StateLabel::Kind::rabi ? "rabi" : kind == StateLabel::Kind::ancilla ? "ancilla" : "mixed");
                labels.append(es.labels[k].index);
                u_pop.push_back(es.states.col(k).head(sys.n_max).squaredNorm());
            }
            py::dict d;
            d["energies"] = Eigen::VectorXd(es.energies);
            d["states"] = Eigen::MatrixXcd(es.states);
            d["kind"] = kinds;
            d["label"] = labels;
            d["u_population"] = to_numpy(u_pop);
            return d;
        },
        py::arg("preset") = py::none(), py::arg("overrides") = py::dict(),
        "Eigen-decomposition of the static Hamiltonian with state classification.");

    m.def(
        "c0n",
        [](double lambda, int n, int n_max, bool corotating_only) {
            SystemParams p;
            p.lambda = lambda;
            p.n_max = n_max;
            p.eg_coupling_form = corotating_only ? CouplingForm::corotating_only : CouplingForm::full;
            p.validate();
            return virtual_amplitude(diagonalize(assemble_static(p), p.space()), 0, n);
        },
        py::arg("lam"), py::arg("n"), py::arg("n_max") = 20, py::arg("corotating_only") = false,
        "Virtual-photon amplitude <n g|Phi_0> at epsilon = omega_c.");

    m.def(
        "assemble_static",
        [](std::optional<std::string> preset, py::dict overrides) {
            const RunConfig cfg = configure(preset, overrides);
            return Eigen::MatrixXcd(assemble_static(cfg.run.system) + assemble_stray(cfg.run.system));
        },
        py::arg("preset") = py::none(), py::arg("overrides") = py::dict(),
        "Static Hamiltonian including the stray term, atom-major basis ordering.");

    m.def(
        "efficiency",
        [](const std::vector<double>& p_2u) {
            PopulationHistory h;
            h.p_2u = p_2u;
            return efficiency(h);
        },
        py::arg("p_2u"));
}
