#include "uscprobe/dynamics.hpp"

#include "runge_kutta.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace uscprobe {

void DissipationParams::validate() const {
    if (kappa < 0.0) throw std::invalid_argument("kappa must be >= 0");
    if (gamma < 0.0) throw std::invalid_argument("gamma must be >= 0");
}

void IntegratorConfig::validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw std::invalid_argument("integrator tolerances must be > 0");
    if (!std::is_sorted(output_grid.begin(), output_grid.end())) {
        throw std::invalid_argument("output grid must be ascending");
    }
}

namespace {

OperatorMatrix lindblad_term(const DensityMatrix& rho, const OperatorMatrix& l, double rate) {
    const OperatorMatrix ldl = l.adjoint() * l;
    return 0.5 * rate * (2.0 * l * rho * l.adjoint() - ldl * rho - rho * ldl);
}

}  // namespace

OperatorMatrix cavity_dissipator(const DensityMatrix& rho, const SpaceDef& space, double kappa) {
    return lindblad_term(rho, annihilation(space), kappa);
}

OperatorMatrix atomic_dissipator(const DensityMatrix& rho, const SpaceDef& space, double gamma,
                                 Configuration config) {
    // Lambda: g -> u and e -> g. Vee: u -> e and e -> g.
    const OperatorMatrix first = config == Configuration::Lambda
                                     ? atomic_transition(space, AtomLevel::g, AtomLevel::u)
                                     : atomic_transition(space, AtomLevel::u, AtomLevel::e);
    const OperatorMatrix sigma_ge = atomic_transition(space, AtomLevel::e, AtomLevel::g);
    return lindblad_term(rho, first, gamma) + lindblad_term(rho, sigma_ge, gamma);
}

std::vector<JumpOperator> jump_operators(const SpaceDef& space, const DissipationParams& dissipation) {
    std::vector<JumpOperator> jumps;
    if (dissipation.kappa > 0.0) jumps.push_back({dissipation.kappa, annihilation(space)});
    if (dissipation.gamma > 0.0) {
        if (dissipation.configuration == Configuration::Lambda) {
            jumps.push_back({dissipation.gamma, atomic_transition(space, AtomLevel::g, AtomLevel::u)});
        } else {
            jumps.push_back({dissipation.gamma, atomic_transition(space, AtomLevel::u, AtomLevel::e)});
        }
        jumps.push_back({dissipation.gamma, atomic_transition(space, AtomLevel::e, AtomLevel::g)});
    }
    return jumps;
}

OperatorMatrix rhs(const DensityMatrix& rho, double t, const LindbladModel& model) {
    const SpaceDef space = model.system.space();
    const OperatorMatrix h = assemble_static(model.system) + assemble_stray(model.system) +
                             control_hamiltonian(model.pulses, space, t);
    const Complex i{0.0, 1.0};
    return i * (rho * h - h * rho) + cavity_dissipator(rho, space, model.dissipation.kappa) +
           atomic_dissipator(rho, space, model.dissipation.gamma, model.dissipation.configuration);
}

// ----------------------------------------------------------------------------

LindbladGenerator::LindbladGenerator(const OperatorMatrix& h_static, const OperatorMatrix& control,
                                     DriveFunction drive, std::vector<JumpOperator> jumps)
    : dim_(static_cast<int>(h_static.rows())), drive_(std::move(drive)) {
    if (h_static.rows() != h_static.cols() || control.rows() != dim_ || control.cols() != dim_) {
        throw std::invalid_argument("LindbladGenerator: operator dimensions disagree");
    }
    const Complex half_i{0.0, 0.5};
    OperatorMatrix h_eff = h_static;
    for (auto& jump : jumps) {
        if (jump.op.rows() != dim_ || jump.op.cols() != dim_) {
            throw std::invalid_argument("LindbladGenerator: jump operator dimension mismatch");
        }
        h_eff -= half_i * jump.rate * (jump.op.adjoint() * jump.op);
        jumps_.emplace_back(jump.rate, BandedOperator(jump.op));
    }
    h_eff_ = BandedOperator(h_eff);
    control_ = BandedOperator(control);
    y_.resize(dim_, dim_);
}

LindbladGenerator::LindbladGenerator(const LindbladModel& model)
    : LindbladGenerator(assemble_static(model.system) + assemble_stray(model.system),
                        control_operator(model.system.space(), model.pulses.configuration),
                        [pulses = model.pulses](double t) { return drive_amplitude(pulses, t); },
                        jump_operators(model.system.space(), model.dissipation)) {}

void LindbladGenerator::apply(double t, const DensityMatrix& rho, OperatorMatrix& out) const {
    // -i (H_eff rho - rho H_eff^dag) with rho H_eff^dag = (H_eff rho)^dag.
    y_.setZero();
    h_eff_.add_left_product(rho, y_);
    const double w = drive_ ? drive_(t) : 0.0;
    if (w != 0.0) control_.add_left_product(rho, w, y_);
    const Complex minus_i{0.0, -1.0};
    out = minus_i * y_ + (minus_i * y_).adjoint();
    for (const auto& [rate, l] : jumps_) l.add_sandwich(rho, rate, out);
}

OperatorMatrix LindbladGenerator::operator()(double t, const DensityMatrix& rho) const {
    OperatorMatrix out(dim_, dim_);
    apply(t, rho, out);
    return out;
}

// ----------------------------------------------------------------------------

double purity(const DensityMatrix& rho) {
    // Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho.
    return rho.squaredNorm();
}

double min_eigenvalue(const DensityMatrix& rho) {
    Eigen::SelfAdjointEigenSolver<OperatorMatrix> solver(rho, Eigen::EigenvaluesOnly);
    return solver.eigenvalues()(0);
}

std::vector<double> uniform_grid(double t0, double t1, int samples) {
    if (samples < 2) throw std::invalid_argument("uniform_grid needs at least two samples");
    std::vector<double> grid(samples);
    for (int i = 0; i < samples; ++i) {
        grid[i] = t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(samples - 1);
    }
    grid.back() = t1;
    return grid;
}

namespace {

constexpr double safety = 0.9;
constexpr double fac_min = 0.2;
constexpr double fac_max = 5.0;

// Per-entry error weight 1 / (atol + rtol max(|y0|, |y1|))^2.
void error_weights(const OperatorMatrix& y0, const OperatorMatrix& y1, double atol, double rtol,
                   Eigen::ArrayXXd& w) {
    w = (atol + rtol * y0.cwiseAbs2().cwiseMax(y1.cwiseAbs2()).cwiseSqrt().array()).square().inverse();
}

double scaled_rms(const OperatorMatrix& err, const Eigen::ArrayXXd& w) {
    return std::sqrt((err.cwiseAbs2().array() * w).mean());
}

// out = base + sum_j coef_j * terms_j in one pass over memory.
void combine(const OperatorMatrix* base, const std::vector<std::pair<double, const OperatorMatrix*>>& terms,
             OperatorMatrix& out) {
    const Eigen::Index n = out.size();
    Complex* o = out.data();
    if (base) std::copy(base->data(), base->data() + n, o);
    else std::fill(o, o + n, Complex{});
    for (std::size_t j = 0; j < terms.size();) {
        // Two terms per sweep keeps the loop body small and vectorizable.
        if (j + 1 < terms.size()) {
            const double c0 = terms[j].first, c1 = terms[j + 1].first;
            const Complex* p0 = terms[j].second->data();
            const Complex* p1 = terms[j + 1].second->data();
            for (Eigen::Index i = 0; i < n; ++i) o[i] += c0 * p0[i] + c1 * p1[i];
            j += 2;
        } else {
            const double c0 = terms[j].first;
            const Complex* p0 = terms[j].second->data();
            for (Eigen::Index i = 0; i < n; ++i) o[i] += c0 * p0[i];
            ++j;
        }
    }
}

struct Sampler {
    const std::vector<Observable>& observables;
    Trajectory& out;

    void record(double t, const DensityMatrix& rho) const {
        out.times.push_back(t);
        for (std::size_t k = 0; k < observables.size(); ++k) {
            // Tr(P rho) = sum_ij P_ji rho_ij
            out.values[k].push_back(observables[k].op.transpose().cwiseProduct(rho).sum().real());
        }
        out.trace.push_back(rho.trace().real());
        out.purity.push_back(purity(rho));
        out.min_eig.push_back(min_eigenvalue(rho));
    }
};

void check_trace(const DensityMatrix& rho, double t, double tolerance) {
    const double tr = rho.trace().real();
    if (!(std::abs(tr - 1.0) <= tolerance)) {
        std::ostringstream msg;
        msg << "trace drift: Tr(rho) = " << tr << " at t = " << t << " exceeds tolerance " << tolerance;
        throw IntegrationError(msg.str(), t);
    }
}

const detail::EmbeddedPair& tableau(IntegratorMethod method) {
    return method == IntegratorMethod::dop853 ? detail::dop853() : detail::dopri5();
}

}  // namespace

IntegratorMethod parse_integrator_method(const std::string& text) {
    if (text == "dopri5") return IntegratorMethod::dopri5;
    if (text == "dop853") return IntegratorMethod::dop853;
    throw std::invalid_argument("unknown integrator method '" + text + "' (expected dopri5 or dop853)");
}

std::string to_string(IntegratorMethod method) {
    return method == IntegratorMethod::dop853 ? "dop853" : "dopri5";
}

Trajectory integrate(const DensityMatrix& rho0, const LindbladGenerator& f, std::pair<double, double> window,
                     const IntegratorConfig& cfg, const std::vector<Observable>& observables) {
    cfg.validate();
    const auto [t0, t1] = window;
    if (!(t1 > t0)) throw std::invalid_argument("integration window must have t1 > t0");
    if (rho0.rows() != f.dim() || rho0.cols() != f.dim()) {
        throw std::invalid_argument("initial state dimension does not match the generator");
    }
    for (const double s : cfg.output_grid) {
        if (s < t0 || s > t1) throw std::invalid_argument("output grid point outside the integration window");
    }

    const detail::EmbeddedPair& rk = tableau(cfg.method);
    const int s = rk.stages;
    const double exponent = rk.error_exponent;

    Trajectory traj;
    traj.values.resize(observables.size());
    const Sampler sampler{observables, traj};

    const int dim = f.dim();
    OperatorMatrix y = 0.5 * (rho0 + rho0.adjoint());
    check_trace(y, t0, cfg.trace_tolerance);

    std::size_t next = 0;
    const auto& grid = cfg.output_grid;
    while (next < grid.size() && grid[next] <= t0) sampler.record(grid[next++], y);

    std::vector<OperatorMatrix> k(s + 1, OperatorMatrix(dim, dim));
    OperatorMatrix stage(dim, dim), y_new(dim, dim), err(dim, dim), err_aux(dim, dim);
    Eigen::ArrayXXd w(dim, dim);
    std::vector<std::pair<double, const OperatorMatrix*>> terms;
    terms.reserve(s + 1);

    const double h_cap = cfg.max_step > 0.0 ? cfg.max_step : (t1 - t0);
    double t = t0;
    f.apply(t, y, k[0]);

    // Initial step guess from the local scale of the solution and its derivative.
    double h;
    {
        error_weights(y, y, cfg.abs_tol, cfg.rel_tol, w);
        const double d0 = scaled_rms(y, w);
        const double d1 = scaled_rms(k[0], w);
        double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        h0 = std::min(h0, h_cap);
        stage = y + h0 * k[0];
        f.apply(t + h0, stage, k[1]);
        const double d2 = scaled_rms(k[1] - k[0], w) / h0;
        const double dmax = std::max(d1, d2);
        const double h1 = dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dmax, exponent);
        h = std::min({100.0 * h0, h1, h_cap});
    }

    auto weighted = [&](const std::vector<double>& coef, double scale) {
        terms.clear();
        for (int j = 0; j < static_cast<int>(coef.size()); ++j) {
            if (coef[j] != 0.0) terms.emplace_back(scale * coef[j], &k[j]);
        }
    };

    bool last_rejected = false;
    while (t < t1) {
        if (traj.accepted_steps + traj.rejected_steps >= cfg.max_steps) {
            throw IntegrationError("step budget exhausted", t);
        }
        double target = t1;
        if (next < grid.size()) target = std::min(target, grid[next]);
        bool lands = false;
        double step = std::min(h, h_cap);
        if (t + step >= target || target - (t + step) < 1e-12 * std::max(1.0, std::abs(target))) {
            step = target - t;
            lands = true;
        }
        if (step < cfg.min_step && !lands) {
            std::ostringstream msg;
            msg << "step size underflow: h = " << step << " at t = " << t;
            throw IntegrationError(msg.str(), t);
        }

        for (int i = 1; i < s; ++i) {
            weighted(rk.a[i], step);
            combine(&y, terms, stage);
            f.apply(t + rk.c[i] * step, stage, k[i]);
        }
        weighted(rk.b, step);
        combine(&y, terms, y_new);
        const double t_new = lands ? target : t + step;
        f.apply(t_new, y_new, k[s]);

        error_weights(y, y_new, cfg.abs_tol, cfg.rel_tol, w);
        double err_norm;
        if (rk.e_aux.empty()) {
            weighted(rk.e_main, step);
            combine(nullptr, terms, err);
            err_norm = scaled_rms(err, w);
        } else {
            // Hairer's combined 5th/3rd-order estimate.
            weighted(rk.e_main, 1.0);
            combine(nullptr, terms, err);
            weighted(rk.e_aux, 1.0);
            combine(nullptr, terms, err_aux);
            const double e5 = (err.cwiseAbs2().array() * w).sum();
            const double e3 = (err_aux.cwiseAbs2().array() * w).sum();
            const double denom = e5 + 0.01 * e3;
            err_norm = denom > 0.0 ? std::abs(step) * e5 / std::sqrt(denom * static_cast<double>(err.size())) : 0.0;
        }
        if (!std::isfinite(err_norm)) throw IntegrationError("non-finite error estimate", t);

        if (err_norm <= 1.0) {
            const double drift = std::sqrt((y_new - y_new.adjoint()).cwiseAbs2().maxCoeff());
            traj.max_hermiticity_drift = std::max(traj.max_hermiticity_drift, drift);
            y = 0.5 * (y_new + y_new.adjoint());
            t = t_new;
            ++traj.accepted_steps;
            check_trace(y, t, cfg.trace_tolerance);
            // FSAL. The generator maps Hermitian to Hermitian and is linear, so
            // the derivative at the symmetrized state is the symmetrized last stage.
            k[0] = 0.5 * (k[s] + k[s].adjoint());
            while (next < grid.size() && grid[next] <= t) sampler.record(grid[next++], y);

            double fac = err_norm == 0.0 ? fac_max : safety * std::pow(err_norm, -exponent);
            fac = std::clamp(fac, fac_min, last_rejected ? 1.0 : fac_max);
            // A step shortened to hit a grid point does not shrink the next one.
            if (!lands || step >= h) h = step * fac;
            else h = std::max(h, step * fac);
            last_rejected = false;
        } else {
            ++traj.rejected_steps;
            h = step * std::max(fac_min, safety * std::pow(err_norm, -exponent));
            last_rejected = true;
        }
    }
    traj.final_state = y;
    return traj;
}

Trajectory integrate(const DensityMatrix& rho0, const LindbladModel& model, std::pair<double, double> window,
                     const IntegratorConfig& cfg, const std::vector<Observable>& observables) {
    model.system.validate();
    model.pulses.validate();
    model.dissipation.validate();
    const LindbladGenerator generator(model);
    return integrate(rho0, generator, window, cfg, observables);
}

}  // namespace uscprobe
