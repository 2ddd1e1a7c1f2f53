#pragma once

// Lindblad master equation
//     drho/dt = i[rho, H + H_C(t)] + L_cav[rho] + L_atom[rho]
// with bare-operator dissipators, and its adaptive integration.

#include "uscprobe/banded_operator.hpp"
#include "uscprobe/hilbert.hpp"
#include "uscprobe/model.hpp"

#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace uscprobe {

struct DissipationParams {
    double kappa = 0.0;   // cavity loss rate
    double gamma = 0.0;   // atomic decay rate
    Configuration configuration = Configuration::Lambda;

    void validate() const;
};

enum class IntegratorMethod { dopri5, dop853 };

IntegratorMethod parse_integrator_method(const std::string& text);
std::string to_string(IntegratorMethod method);

struct IntegratorConfig {
    IntegratorMethod method = IntegratorMethod::dop853;
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_step = 0.0;           // <= 0 means uncapped
    std::vector<double> output_grid; // ascending sample times inside the window
    double trace_tolerance = 1e-6;   // abort when |Tr rho - 1| exceeds this
    double min_step = 1e-12;         // abort below this step size
    long max_steps = 50'000'000;

    void validate() const;
};

// Everything the right-hand side depends on.
struct LindbladModel {
    SystemParams system;
    PulseSpec pulses;
    DissipationParams dissipation;
};

struct JumpOperator {
    double rate = 0.0;
    OperatorMatrix op;
};

// (kappa/2)(2 a rho a^dag - a^dag a rho - rho a^dag a)
OperatorMatrix cavity_dissipator(const DensityMatrix& rho, const SpaceDef& space, double kappa);

// Lambda channels sigma_ug, sigma_ge; Vee channels sigma_eu, sigma_ge.
OperatorMatrix atomic_dissipator(const DensityMatrix& rho, const SpaceDef& space, double gamma,
                                 Configuration config);

// Jump operators of both dissipators; zero-rate channels are omitted.
std::vector<JumpOperator> jump_operators(const SpaceDef& space, const DissipationParams& dissipation);

// Dense reference evaluation of the full right-hand side.
OperatorMatrix rhs(const DensityMatrix& rho, double t, const LindbladModel& model);

// Structured evaluation of the same generator. Operators are stored by diagonal
// band and the commutator uses H_eff rho together with its adjoint, so the
// input must be Hermitian. Holds a scratch buffer: one instance per thread.
class LindbladGenerator {
public:
    using DriveFunction = std::function<double(double)>;

    LindbladGenerator(const OperatorMatrix& h_static, const OperatorMatrix& control, DriveFunction drive,
                      std::vector<JumpOperator> jumps);

    explicit LindbladGenerator(const LindbladModel& model);

    int dim() const noexcept { return dim_; }

    void apply(double t, const DensityMatrix& rho, OperatorMatrix& out) const;
    OperatorMatrix operator()(double t, const DensityMatrix& rho) const;

private:
    int dim_;
    BandedOperator h_eff_;    // H - (i/2) sum_k rate_k L_k^dag L_k
    BandedOperator control_;
    DriveFunction drive_;
    std::vector<std::pair<double, BandedOperator>> jumps_;
    mutable OperatorMatrix y_;
};

class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& what, double time) : std::runtime_error(what), time_(time) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

// Named linear observable, sampled as Tr(P rho).
struct Observable {
    std::string name;
    OperatorMatrix op;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<std::vector<double>> values;   // values[k][i] = Tr(P_k rho(times[i]))
    std::vector<double> trace;
    std::vector<double> purity;
    std::vector<double> min_eig;
    double max_hermiticity_drift = 0.0;        // largest |rho - rho^dag| before re-symmetrization
    DensityMatrix final_state;
    long accepted_steps = 0;
    long rejected_steps = 0;
};

// Adaptive embedded Runge-Kutta integration (Dormand-Prince 5(4) or 8(5,3))
// over [window.first, window.second].
// rho is re-symmetrized after every step; positivity is only monitored.
// Throws IntegrationError on step-size underflow or trace drift.
Trajectory integrate(const DensityMatrix& rho0, const LindbladGenerator& generator,
                     std::pair<double, double> window, const IntegratorConfig& cfg,
                     const std::vector<Observable>& observables = {});

Trajectory integrate(const DensityMatrix& rho0, const LindbladModel& model, std::pair<double, double> window,
                     const IntegratorConfig& cfg, const std::vector<Observable>& observables = {});

// Evenly spaced grid with `samples` points covering [t0, t1] inclusive.
std::vector<double> uniform_grid(double t0, double t1, int samples);

double purity(const DensityMatrix& rho);
double min_eigenvalue(const DensityMatrix& rho);

}  // namespace uscprobe
