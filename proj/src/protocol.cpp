#include "uscprobe/protocol.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <cmath>
#include <numbers>
#include <sstream>
#include <thread>

namespace uscprobe {

void ProtocolRun::sync_configuration() noexcept {
    pulses.configuration = config;
    dissipation.configuration = config;
}

void ProtocolRun::validate() const {
    system.validate();
    pulses.validate();
    dissipation.validate();
    integrator.validate();
    if (pulses.configuration != config || dissipation.configuration != config) {
        throw std::invalid_argument("protocol run: pulse/dissipation configuration disagrees with the run");
    }
    if (samples < 2) throw std::invalid_argument("protocol run: samples must be >= 2");
    if (!(steps_per_period > 0.0)) throw std::invalid_argument("protocol run: steps_per_period must be > 0");
    if (window_before < 0.0 || window_after < 0.0) {
        throw std::invalid_argument("protocol run: window extents must be >= 0");
    }
}

std::pair<double, double> ProtocolRun::window() const noexcept {
    return {-(pulses.tau + window_before * pulses.width), pulses.tau + window_after * pulses.width};
}

namespace {

enum ObservableSlot : std::size_t { slot_0u, slot_2u, slot_phi0, slot_phi1_lower, slot_phi1_upper, slot_fock };

}  // namespace

PopulationHistory run(const ProtocolRun& spec) {
    spec.validate();
    const SpaceDef space = spec.system.space();

    // Labels come from the spectrum without the stray term, which is cleanly
    // partitioned; with lambda' != 0 the states are followed by overlap.
    SystemParams reference_params = spec.system;
    reference_params.lambda_prime = 0.0;
    const OperatorMatrix h_reference = assemble_static(reference_params);
    const EigenSystem reference = diagonalize(h_reference, space);

    const OperatorMatrix h_static = h_reference + assemble_stray(spec.system);
    const EigenSystem es = spec.system.lambda_prime == 0.0 ? reference : diagonalize(h_static, space);
    const ProtocolStates states = locate_protocol_states(es, reference);

    LindbladModel model{spec.system, spec.pulses, spec.dissipation};
    if (spec.auto_carriers) {
        const Carriers c = carriers_from_states(es, states, spec.config, spec.system, spec.doublet_target);
        model.pulses.omega_p = c.omega_p;
        model.pulses.omega_s = c.omega_s;
    }

    IntegratorConfig cfg = spec.integrator;
    const auto window = spec.window();
    cfg.output_grid = uniform_grid(window.first, window.second, spec.samples);
    if (cfg.max_step <= 0.0) {
        const double fastest = std::max(std::abs(model.pulses.omega_p), std::abs(model.pulses.omega_s));
        if (fastest > 0.0) cfg.max_step = (2.0 * std::numbers::pi / fastest) / spec.steps_per_period;
    }

    std::vector<Observable> observables;
    observables.push_back({"p_0u", projector(es.state(states.zero_u))});
    observables.push_back({"p_2u", projector(es.state(states.two_u))});
    observables.push_back({"p_phi0", projector(es.state(states.phi0))});
    observables.push_back({"p_phi1_lower", projector(es.state(states.phi1_lower))});
    observables.push_back({"p_phi1_upper", projector(es.state(states.phi1_upper))});
    for (int n = 0; n < space.n_max(); ++n) {
        observables.push_back({"p_fock_" + std::to_string(n), fock_projector(space, n)});
    }

    const StateVector initial = basis_state(space, AtomLevel::u, 0);
    const LindbladGenerator generator(h_static, control_operator(space, spec.config),
                                      [pulses = model.pulses](double t) { return drive_amplitude(pulses, t); },
                                      jump_operators(space, spec.dissipation));
    Trajectory traj = integrate(projector(initial), generator, window, cfg, observables);

    PopulationHistory h;
    h.config = spec.config;
    h.times = std::move(traj.times);
    h.p_0u = std::move(traj.values[slot_0u]);
    h.p_2u = std::move(traj.values[slot_2u]);
    h.p_phi0 = std::move(traj.values[slot_phi0]);
    h.p_doublet.resize(h.times.size());
    for (std::size_t i = 0; i < h.times.size(); ++i) {
        h.p_doublet[i] = traj.values[slot_phi1_lower][i] + traj.values[slot_phi1_upper][i];
    }
    for (int n = 0; n < space.n_max(); ++n) {
        h.fock_populations.push_back(std::move(traj.values[slot_fock + n]));
    }
    h.trace = std::move(traj.trace);
    h.purity = std::move(traj.purity);
    h.min_eig = std::move(traj.min_eig);
    h.max_hermiticity_drift = traj.max_hermiticity_drift;
    h.carriers = {model.pulses.omega_p, model.pulses.omega_s};
    h.final_state = std::move(traj.final_state);
    h.accepted_steps = traj.accepted_steps;
    h.rejected_steps = traj.rejected_steps;

    const int top = space.n_max() - 1;
    const double top_population = h.fock_populations[top].back() + h.fock_populations[top - 1].back();
    if (top_population > truncation_warning_threshold) {
        std::ostringstream msg;
        msg << "truncation: final population " << top_population << " on Fock levels " << top - 1 << ","
            << top << " exceeds " << truncation_warning_threshold << "; increase n_max";
        h.warnings.push_back(msg.str());
    }
    return h;
}

double efficiency(const PopulationHistory& history) {
    if (history.p_2u.empty()) throw std::invalid_argument("efficiency of an empty population history");
    return *std::max_element(history.p_2u.begin(), history.p_2u.end());
}

namespace {

// Runs task(i) for i in [0, count) on at most `jobs` threads. The first
// exception thrown by any task is rethrown once all workers have finished.
template <typename Task>
void parallel_for(std::size_t count, int jobs, Task&& task) {
    const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, jobs)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) task(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex failure_mutex;
    std::exception_ptr failure;
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < count; i = next++) {
                    try {
                        task(i);
                    } catch (...) {
                        const std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                    }
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
}

}  // namespace

std::vector<ScanPoint> kappa_scan(const ProtocolRun& base, const std::vector<double>& kappas, int jobs) {
    if (kappas.empty()) throw std::invalid_argument("kappa scan: empty grid");
    if (!std::is_sorted(kappas.begin(), kappas.end())) {
        throw std::invalid_argument("kappa scan: grid must be ascending");
    }
    std::vector<ScanPoint> points(kappas.size());
    parallel_for(kappas.size(), jobs, [&](std::size_t i) {
        points[i].kappa = kappas[i];
        try {
            ProtocolRun r = base;
            r.dissipation.kappa = kappas[i];
            points[i].efficiency = efficiency(run(r));
        } catch (const std::exception& ex) {
            points[i].efficiency = std::nan("");
            points[i].error = ex.what();
        }
    });
    return points;
}

StrayReport stray_falsification(Configuration config, std::optional<ProtocolRun> base, int jobs) {
    ProtocolRun proto;
    if (base) {
        proto = *base;
    } else {
        proto = preset(config == Configuration::Lambda ? "fig1b" : "fig3a");
        proto.dissipation.kappa = 1e-4;
        proto.dissipation.gamma = 1e-4;
    }
    proto.config = config;
    proto.sync_configuration();

    StrayReport report;
    report.config = config;
    if (config == Configuration::Lambda) {
        report.cases = {{"usc_only", 0.5, 0.0, CouplingForm::full, 0.0},
                        {"stray_only", 0.0, 0.5, CouplingForm::full, 0.0}};
    } else {
        report.cases = {{"usc_with_stray", 0.5, 0.5, CouplingForm::full, 0.0},
                        {"corotating_with_stray", 0.5, 0.5, CouplingForm::corotating_only, 0.0}};
    }
    parallel_for(report.cases.size(), jobs, [&](std::size_t i) {
        ProtocolRun r = proto;
        r.system.lambda = report.cases[i].lambda;
        r.system.lambda_prime = report.cases[i].lambda_prime;
        r.system.eg_coupling_form = report.cases[i].form;
        report.cases[i].efficiency = efficiency(run(r));
    });

    std::ostringstream msg;
    if (config == Configuration::Lambda) {
        const double stray = report.cases[1].efficiency;
        msg << "lambda configuration: stray-only transfer " << stray
            << (stray > 0.1 ? " is substantial; two photons are not a USC signature"
                            : " is small; two photons remain a USC signature");
    } else {
        const double corot = report.cases[1].efficiency;
        msg << "vee configuration: corotating-only transfer " << corot
            << (corot < 0.05 ? " collapses; transfer requires counter-rotating terms"
                             : " survives; stray coupling mimics the USC channel");
    }
    report.summary = msg.str();
    return report;
}

std::vector<std::string> preset_names() { return {"fig1b", "fig1c", "fig3a", "fig3b"}; }

bool preset_is_scan(const std::string& name) { return name == "fig1c" || name == "fig3b"; }

ProtocolRun preset(const std::string& name) {
    constexpr double omega_c_ghz = 6.0;
    constexpr auto convention = FrequencyConvention::cyclic;

    ProtocolRun r;
    r.system.omega_c = 1.0;
    r.system.epsilon = 1.0;
    r.system.lambda = 0.5;
    r.system.lambda_prime = 0.0;
    r.system.eg_coupling_form = CouplingForm::full;
    r.system.n_max = 20;
    r.pulses.w_s_peak = 0.1;
    r.dissipation.kappa = 1e-4;
    r.dissipation.gamma = 0.0;

    if (name == "fig1b" || name == "fig1c") {
        r.config = Configuration::Lambda;
        r.system.epsilon_prime = 4.0;
        r.pulses.w_p_peak = 0.0972 * r.pulses.w_s_peak;
        r.pulses.width = time_to_internal(54.6, omega_c_ghz, convention);
    } else if (name == "fig3a" || name == "fig3b") {
        r.config = Configuration::Vee;
        r.system.epsilon_prime = -1.5;
        r.pulses.w_p_peak = 0.4078 * r.pulses.w_s_peak;
        r.pulses.width = time_to_internal(13.0, omega_c_ghz, convention);
    } else {
        throw std::invalid_argument("unknown preset '" + name + "' (expected fig1b|fig1c|fig3a|fig3b)");
    }
    r.pulses.tau = 0.6 * r.pulses.width;
    r.doublet_target = default_doublet_target(r.config);
    r.sync_configuration();
    return r;
}

std::vector<double> default_kappa_grid() {
    std::vector<double> grid(13);
    for (int i = 0; i < 13; ++i) grid[i] = std::pow(10.0, -5.0 + 3.0 * i / 12.0);
    return grid;
}

}  // namespace uscprobe
