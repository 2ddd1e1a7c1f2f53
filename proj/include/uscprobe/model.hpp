#pragma once

// Static and driven Hamiltonians of the atom-cavity system.
//
// Internal units: omega_c = 1 by convention, so every frequency and rate is
// expressed in units of omega_c and every time in units of 1/omega_c.

#include "uscprobe/hilbert.hpp"

#include <string_view>

namespace uscprobe {

enum class Configuration { Lambda, Vee };
enum class CouplingForm { full, corotating_only };
enum class PulseKind { stokes, pump };

std::string_view to_string(Configuration config) noexcept;
std::string_view to_string(CouplingForm form) noexcept;
Configuration parse_configuration(std::string_view text);
CouplingForm parse_coupling_form(std::string_view text);

struct SystemParams {
    double omega_c = 1.0;
    double epsilon = 1.0;         // e-g splitting
    double epsilon_prime = 4.0;   // enters H as -epsilon_prime |u><u|
    double lambda = 0.5;          // e-g mode coupling
    double lambda_prime = 0.0;    // stray corotating u-g mode coupling
    CouplingForm eg_coupling_form = CouplingForm::full;
    int n_max = 20;

    SpaceDef space() const { return SpaceDef(n_max); }
    // Throws std::invalid_argument on omega_c <= 0, negative couplings or n_max < 3.
    void validate() const;
};

struct PulseSpec {
    double w_s_peak = 0.1;
    double w_p_peak = 0.00972;
    double omega_s = 0.0;
    double omega_p = 0.0;
    double width = 1.0;       // T
    double tau = 0.6;         // Stokes peaks at -tau, pump at +tau
    Configuration configuration = Configuration::Lambda;

    void validate() const;
};

// H = eps |e><e| - eps' |u><u| + omega_c a^dag a + lambda C_eg
OperatorMatrix assemble_static(const SystemParams& params);

// lambda' (|u><g| a^dag + |g><u| a)
OperatorMatrix assemble_stray(const SystemParams& params);

// Stokes: W_s exp[-(t+tau)^2/T^2], pump: W_p exp[-(t-tau)^2/T^2].
double envelope(const PulseSpec& spec, double t, PulseKind which) noexcept;

// W(t) = sum_k W_k(t) cos(omega_k t), lab frame.
double drive_amplitude(const PulseSpec& spec, double t) noexcept;

// |u><g| + |g><u| for Lambda, |u><e| + |e><u| for Vee.
OperatorMatrix control_operator(const SpaceDef& space, Configuration config);

OperatorMatrix control_hamiltonian(const PulseSpec& spec, const SpaceDef& space, double t);

// Laboratory-unit conversion. With `angular` the quoted frequency f is
// omega_c itself in rad/ns; with `cyclic` it is omega_c / 2pi, i.e.
// omega_c = 2 pi f rad/ns.
enum class FrequencyConvention { angular, cyclic };

FrequencyConvention parse_frequency_convention(std::string_view text);
std::string_view to_string(FrequencyConvention convention) noexcept;

double omega_c_rad_per_ns(double omega_c_ghz, FrequencyConvention convention) noexcept;

// Converts a duration in ns to units of 1/omega_c.
double time_to_internal(double t_ns, double omega_c_ghz, FrequencyConvention convention) noexcept;

}  // namespace uscprobe
