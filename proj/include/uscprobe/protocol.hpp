#pragma once

// Complete Lambda- and Vee-STIRAP runs: carrier derivation, integration,
// projection onto the protocol states and the efficiency figure of merit.

#include "uscprobe/dynamics.hpp"
#include "uscprobe/model.hpp"
#include "uscprobe/spectrum.hpp"

#include <optional>
#include <string>
#include <vector>

namespace uscprobe {

struct ProtocolRun {
    Configuration config = Configuration::Lambda;
    SystemParams system;
    PulseSpec pulses;
    DissipationParams dissipation;
    IntegratorConfig integrator;

    // Carriers come from the static spectrum unless this is false, in which
    // case pulses.omega_p / omega_s are used as given.
    bool auto_carriers = true;
    DoubletTarget doublet_target = DoubletTarget::midpoint;

    // Window [-(tau + before*T), tau + after*T] sampled on `samples` points.
    double window_before = 4.0;
    double window_after = 6.0;
    int samples = 2000;
    // max_step = (2 pi / fastest carrier) / steps_per_period unless integrator.max_step > 0.
    double steps_per_period = 20.0;

    // Keeps configuration tags of the nested structs in sync with `config`.
    void sync_configuration() noexcept;
    void validate() const;
    std::pair<double, double> window() const noexcept;
};

struct PopulationHistory {
    Configuration config = Configuration::Lambda;
    std::vector<double> times;
    std::vector<double> p_0u;
    std::vector<double> p_2u;
    std::vector<double> p_phi0;
    std::vector<double> p_doublet;                  // Phi_1- + Phi_1+
    std::vector<std::vector<double>> fock_populations;  // [n][sample]
    std::vector<double> trace;
    std::vector<double> purity;
    std::vector<double> min_eig;
    double max_hermiticity_drift = 0.0;

    Carriers carriers;
    DensityMatrix final_state;
    std::vector<std::string> warnings;
    long accepted_steps = 0;
    long rejected_steps = 0;
};

// Final population on the two highest Fock levels above this raises a warning.
inline constexpr double truncation_warning_threshold = 1e-4;

PopulationHistory run(const ProtocolRun& run);

// Maximum of P_|2u> over the output grid. Throws on an empty history.
double efficiency(const PopulationHistory& history);

struct ScanPoint {
    double kappa = 0.0;
    double efficiency = 0.0;
    std::optional<std::string> error;
};

// One run per kappa (ascending), results in input order. `jobs` bounds the
// number of concurrently executing runs.
std::vector<ScanPoint> kappa_scan(const ProtocolRun& base, const std::vector<double>& kappas, int jobs = 1);

struct StrayCase {
    std::string label;
    double lambda = 0.0;
    double lambda_prime = 0.0;
    CouplingForm form = CouplingForm::full;
    double efficiency = 0.0;
};

struct StrayReport {
    Configuration config = Configuration::Lambda;
    std::vector<StrayCase> cases;
    std::string summary;
};

// Lambda: USC channel (lambda=0.5, lambda'=0) against stray-only
// (lambda=0, lambda'=0.5). Vee: lambda=lambda'=0.5 with full and with
// corotating-only e-g coupling. Runs on the fig1b / fig3a presets with
// gamma = kappa = 1e-4 omega_c unless `base` is given.
StrayReport stray_falsification(Configuration config, std::optional<ProtocolRun> base = std::nullopt,
                                int jobs = 1);

// Named presets: fig1b, fig1c (Lambda) and fig3a, fig3b (Vee).
std::vector<std::string> preset_names();
ProtocolRun preset(const std::string& name);
bool preset_is_scan(const std::string& name);

// Logarithmic 1e-5 .. 1e-2 omega_c, 13 points.
std::vector<double> default_kappa_grid();

}  // namespace uscprobe
