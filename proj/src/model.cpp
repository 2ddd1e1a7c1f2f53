#include "uscprobe/model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace uscprobe {

std::string_view to_string(Configuration config) noexcept {
    return config == Configuration::Lambda ? "lambda" : "vee";
}

std::string_view to_string(CouplingForm form) noexcept {
    return form == CouplingForm::full ? "full" : "corotating_only";
}

Configuration parse_configuration(std::string_view text) {
    if (text == "lambda" || text == "Lambda") return Configuration::Lambda;
    if (text == "vee" || text == "Vee") return Configuration::Vee;
    throw std::invalid_argument("unknown configuration '" + std::string(text) + "' (expected lambda|vee)");
}

CouplingForm parse_coupling_form(std::string_view text) {
    if (text == "full") return CouplingForm::full;
    if (text == "corotating_only") return CouplingForm::corotating_only;
    throw std::invalid_argument("unknown coupling form '" + std::string(text) +
                                "' (expected full|corotating_only)");
}

void SystemParams::validate() const {
    if (!(omega_c > 0.0)) throw std::invalid_argument("omega_c must be > 0");
    if (lambda < 0.0) throw std::invalid_argument("lambda must be >= 0");
    if (lambda_prime < 0.0) throw std::invalid_argument("lambda_prime must be >= 0");
    SpaceDef{n_max};
}

void PulseSpec::validate() const {
    if (!(width > 0.0)) throw std::invalid_argument("pulse width T must be > 0");
    if (!(tau > 0.0)) throw std::invalid_argument("pulse delay tau must be > 0");
}

OperatorMatrix assemble_static(const SystemParams& params) {
    params.validate();
    const SpaceDef space = params.space();
    const OperatorMatrix a = annihilation(space);
    const OperatorMatrix a_dag = a.adjoint();
    const OperatorMatrix sigma_eg = atomic_transition(space, AtomLevel::g, AtomLevel::e);  // |e><g|
    const OperatorMatrix sigma_ge = sigma_eg.adjoint();                                    // |g><e|

    OperatorMatrix h = params.epsilon * atomic_transition(space, AtomLevel::e, AtomLevel::e) -
                       params.epsilon_prime * atomic_transition(space, AtomLevel::u, AtomLevel::u) +
                       params.omega_c * number_operator(space);

    OperatorMatrix coupling;
    if (params.eg_coupling_form == CouplingForm::full) {
        coupling = (a + a_dag) * (sigma_eg + sigma_ge);
    } else {
        coupling = a_dag * sigma_ge + a * sigma_eg;
    }
    // Symmetrize so the result is bitwise Hermitian.
    h += params.lambda * coupling;
    return 0.5 * (h + h.adjoint());
}

OperatorMatrix assemble_stray(const SystemParams& params) {
    params.validate();
    const SpaceDef space = params.space();
    const OperatorMatrix a = annihilation(space);
    const OperatorMatrix sigma_ug = atomic_transition(space, AtomLevel::g, AtomLevel::u);  // |u><g|
    const OperatorMatrix term = sigma_ug * a.adjoint();
    return params.lambda_prime * (term + term.adjoint());
}

double envelope(const PulseSpec& spec, double t, PulseKind which) noexcept {
    if (which == PulseKind::stokes) {
        const double x = (t + spec.tau) / spec.width;
        return spec.w_s_peak * std::exp(-x * x);
    }
    const double x = (t - spec.tau) / spec.width;
    return spec.w_p_peak * std::exp(-x * x);
}

double drive_amplitude(const PulseSpec& spec, double t) noexcept {
    return envelope(spec, t, PulseKind::pump) * std::cos(spec.omega_p * t) +
           envelope(spec, t, PulseKind::stokes) * std::cos(spec.omega_s * t);
}

OperatorMatrix control_operator(const SpaceDef& space, Configuration config) {
    const AtomLevel partner = config == Configuration::Lambda ? AtomLevel::g : AtomLevel::e;
    const OperatorMatrix up = atomic_transition(space, partner, AtomLevel::u);
    return up + up.adjoint();
}

OperatorMatrix control_hamiltonian(const PulseSpec& spec, const SpaceDef& space, double t) {
    return drive_amplitude(spec, t) * control_operator(space, spec.configuration);
}

FrequencyConvention parse_frequency_convention(std::string_view text) {
    if (text == "angular") return FrequencyConvention::angular;
    if (text == "cyclic") return FrequencyConvention::cyclic;
    throw std::invalid_argument("unknown angular_convention '" + std::string(text) +
                                "' (expected angular|cyclic)");
}

std::string_view to_string(FrequencyConvention convention) noexcept {
    return convention == FrequencyConvention::angular ? "angular" : "cyclic";
}

double omega_c_rad_per_ns(double omega_c_ghz, FrequencyConvention convention) noexcept {
    return convention == FrequencyConvention::cyclic ? 2.0 * std::numbers::pi * omega_c_ghz : omega_c_ghz;
}

double time_to_internal(double t_ns, double omega_c_ghz, FrequencyConvention convention) noexcept {
    return t_ns * omega_c_rad_per_ns(omega_c_ghz, convention);
}

}  // namespace uscprobe
