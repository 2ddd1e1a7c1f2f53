#include "doctest.h"
#include "oracles.hpp"

#include "uscprobe/dynamics.hpp"
#include "uscprobe/spectrum.hpp"

#include <cmath>

using namespace uscprobe;

namespace {

LindbladModel toy_model(Configuration config, double kappa, double gamma, int n_max = 3) {
    LindbladModel m;
    m.system.epsilon = 1.0;
    m.system.epsilon_prime = config == Configuration::Lambda ? 4.0 : -1.5;
    m.system.lambda = 0.5;
    m.system.lambda_prime = 0.2;
    m.system.n_max = n_max;
    m.pulses.w_s_peak = 0.3;
    m.pulses.w_p_peak = 0.2;
    m.pulses.omega_p = 3.1;
    m.pulses.omega_s = 1.1;
    m.pulses.width = 5.0;
    m.pulses.tau = 2.0;
    m.pulses.configuration = config;
    m.dissipation = {kappa, gamma, config};
    return m;
}

std::vector<oracle::Jump> oracle_jumps(Configuration config, double kappa, double gamma, int n) {
    std::vector<oracle::Jump> j;
    j.push_back({kappa, oracle::lower(n)});
    j.push_back({gamma, config == Configuration::Lambda ? oracle::flip(1, 0, n) : oracle::flip(0, 2, n)});
    j.push_back({gamma, oracle::flip(2, 1, n)});
    return j;
}

oracle::Matrix oracle_control(Configuration config, int n) {
    const int other = config == Configuration::Lambda ? 1 : 2;
    return oracle::flip(other, 0, n) + oracle::flip(0, other, n);
}

double oracle_drive(const PulseSpec& p, double t) {
    return p.w_s_peak * std::exp(-std::pow((t + p.tau) / p.width, 2)) * std::cos(p.omega_s * t) +
           p.w_p_peak * std::exp(-std::pow((t - p.tau) / p.width, 2)) * std::cos(p.omega_p * t);
}

}  // namespace

TEST_CASE("cavity dissipator") {
    const SpaceDef s(4);
    // Vacuum times any atomic state is dark.
    OperatorMatrix rho = OperatorMatrix::Zero(12, 12);
    const OperatorMatrix atom = oracle::random_density(3, 4);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) rho(s.index(AtomLevel(i), 0), s.index(AtomLevel(j), 0)) = atom(i, j);
    CHECK(oracle::max_abs(cavity_dissipator(rho, s, 0.3)) < 1e-15);

    const OperatorMatrix r = oracle::random_density(12, 5);
    CHECK(std::abs(cavity_dissipator(r, s, 0.3).trace()) < 1e-14);

    // d<n>/dt = -kappa <n> for a one-photon state.
    const OperatorMatrix one = projector(basis_state(s, AtomLevel::g, 1));
    const Complex dn = (number_operator(s) * cavity_dissipator(one, s, 0.3)).trace();
    CHECK(dn.real() == doctest::Approx(-0.3));
}

TEST_CASE("atomic dissipator") {
    const SpaceDef s(4);
    // Lambda: anything on u is dark.
    OperatorMatrix rho = OperatorMatrix::Zero(12, 12);
    rho.topLeftCorner(4, 4) = oracle::random_density(4, 6);
    CHECK(oracle::max_abs(atomic_dissipator(rho, s, 0.2, Configuration::Lambda)) < 1e-15);

    // Vee: |u0> feeds |e0> at rate gamma.
    const OperatorMatrix u0 = projector(basis_state(s, AtomLevel::u, 0));
    const OperatorMatrix d = atomic_dissipator(u0, s, 0.2, Configuration::Vee);
    CHECK(d(s.index(AtomLevel::e, 0), s.index(AtomLevel::e, 0)).real() == doctest::Approx(0.2));
    CHECK(d(0, 0).real() == doctest::Approx(-0.2));

    const OperatorMatrix r = oracle::random_density(12, 7);
    for (auto c : {Configuration::Lambda, Configuration::Vee}) {
        CHECK(std::abs(atomic_dissipator(r, s, 0.2, c).trace()) < 1e-14);
    }
}

TEST_CASE("right-hand side agrees with the superoperator oracle") {
    for (auto config : {Configuration::Lambda, Configuration::Vee}) {
        const LindbladModel m = toy_model(config, 0.07, 0.05);
        const double t = 0.9;
        const oracle::Matrix h = oracle::hamiltonian(3, 1.0, m.system.epsilon_prime, 0.5, 0.2) +
                                 oracle_drive(m.pulses, t) * oracle_control(config, 3);
        const oracle::Matrix l = oracle::superoperator(h, oracle_jumps(config, 0.07, 0.05, 3));
        const OperatorMatrix rho = oracle::random_density(9, 11);
        const OperatorMatrix expected = oracle::unvec(l * oracle::vec(rho), 9);

        const OperatorMatrix dense = rhs(rho, t, m);
        CHECK(oracle::max_abs(dense - expected) < 1e-10);
        const LindbladGenerator gen(m);
        CHECK(oracle::max_abs(gen(t, rho) - expected) < 1e-10);
        CHECK(std::abs(dense.trace()) < 1e-12);
        CHECK(oracle::max_abs(dense - dense.adjoint()) < 1e-12);
    }
}

TEST_CASE("structured generator matches the dense right-hand side at full size") {
    LindbladModel m = toy_model(Configuration::Lambda, 1e-3, 2e-3, 20);
    const LindbladGenerator gen(m);
    const OperatorMatrix rho = oracle::random_density(60, 12);
    for (double t : {-3.0, 0.0, 1.7}) {
        const OperatorMatrix out = gen(t, rho);
        CHECK(oracle::max_abs(out - rhs(rho, t, m)) < 1e-12);
        CHECK(oracle::max_abs(out - out.adjoint()) < 1e-15);
        CHECK(std::abs(out.trace()) < 1e-12);
    }
}

TEST_CASE("eigenprojectors of the static Hamiltonian are stationary") {
    LindbladModel m = toy_model(Configuration::Lambda, 0.0, 0.0, 8);
    m.pulses.w_s_peak = m.pulses.w_p_peak = 0.0;
    m.system.lambda_prime = 0.0;
    const EigenSystem es = diagonalize(assemble_static(m.system), m.system.space());
    for (int k : {0, 3, 11}) {
        CHECK(oracle::max_abs(rhs(projector(es.state(k)), 0.3, m)) < 1e-13);
    }
}

TEST_CASE("integration matches the exact propagator on a small space") {
    for (auto method : {IntegratorMethod::dopri5, IntegratorMethod::dop853}) {
        for (auto config : {Configuration::Lambda, Configuration::Vee}) {
            LindbladModel m = toy_model(config, 0.05, 0.03);
            m.pulses.w_s_peak = m.pulses.w_p_peak = 0.0;
            const oracle::Matrix h = oracle::hamiltonian(3, 1.0, m.system.epsilon_prime, 0.5, 0.2);
            const oracle::Matrix l = oracle::superoperator(h, oracle_jumps(config, 0.05, 0.03, 3));
            const OperatorMatrix rho0 = oracle::random_density(9, 21);

            IntegratorConfig cfg;
            cfg.method = method;
            cfg.rel_tol = 1e-9;
            cfg.abs_tol = 1e-11;
            const Trajectory traj = integrate(rho0, m, {0.0, 10.0}, cfg);
            const OperatorMatrix exact = oracle::propagate(l, rho0, 10.0);
            CHECK(oracle::max_abs(traj.final_state - exact) < 1e-6);
        }
    }
}

TEST_CASE("driven integration matches a fine fixed-step reference") {
    // Time-dependent case on the small space: compare the two adaptive
    // methods against each other at tight tolerance.
    const LindbladModel m = toy_model(Configuration::Lambda, 0.02, 0.01);
    const OperatorMatrix rho0 = projector(basis_state(m.system.space(), AtomLevel::u, 0));
    IntegratorConfig a, b;
    a.method = IntegratorMethod::dopri5;
    b.method = IntegratorMethod::dop853;
    a.rel_tol = b.rel_tol = 1e-11;
    a.abs_tol = b.abs_tol = 1e-13;
    const auto ta = integrate(rho0, m, {-15.0, 15.0}, a);
    const auto tb = integrate(rho0, m, {-15.0, 15.0}, b);
    CHECK(oracle::max_abs(ta.final_state - tb.final_state) < 1e-8);
    CHECK(tb.accepted_steps < ta.accepted_steps);
}

TEST_CASE("single-mode decay is exponential") {
    const SpaceDef s(4);
    const OperatorMatrix zero = OperatorMatrix::Zero(12, 12);
    const double kappa = 0.05;
    const LindbladGenerator gen(zero, zero, nullptr, {{kappa, annihilation(s)}});
    IntegratorConfig cfg;
    cfg.output_grid = uniform_grid(0.0, 60.0, 31);
    const Trajectory traj = integrate(projector(basis_state(s, AtomLevel::g, 1)), gen, {0.0, 60.0}, cfg,
                                      {{"p1", fock_projector(s, 1)}});
    REQUIRE(traj.times.size() == 31);
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        CHECK(std::abs(traj.values[0][i] - std::exp(-kappa * traj.times[i])) < 1e-6);
    }
}

TEST_CASE("closed driven evolution conserves purity, trace and positivity") {
    LindbladModel m = toy_model(Configuration::Lambda, 0.0, 0.0, 6);
    const OperatorMatrix rho0 = projector(basis_state(m.system.space(), AtomLevel::u, 0));
    IntegratorConfig cfg;
    cfg.output_grid = uniform_grid(-20.0, 20.0, 81);
    const Trajectory traj = integrate(rho0, m, {-20.0, 20.0}, cfg);
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        CHECK(std::abs(traj.purity[i] - 1.0) < 1e-6);
        CHECK(std::abs(traj.trace[i] - 1.0) < 1e-6);
        CHECK(traj.min_eig[i] > -1e-6);
    }
    CHECK(traj.max_hermiticity_drift < 1e-8);
}

TEST_CASE("stationary dressed ground state over a full window") {
    SystemParams p;
    p.n_max = 20;
    const EigenSystem es = diagonalize(assemble_static(p), p.space());
    const OperatorMatrix phi0 = projector(es.state(es.find_rabi(0)));
    const OperatorMatrix h = assemble_static(p);
    const LindbladGenerator gen(h, OperatorMatrix::Zero(60, 60), nullptr, {});
    IntegratorConfig cfg;
    cfg.output_grid = uniform_grid(-10000.0, 13000.0, 50);
    const std::vector<Observable> obs = {{"phi0", phi0},
                                         {"0u", projector(es.state(es.find_ancilla(0)))},
                                         {"2u", projector(es.state(es.find_ancilla(2)))}};
    const Trajectory traj = integrate(phi0, gen, {-10000.0, 13000.0}, cfg, obs);
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        CHECK(std::abs(traj.values[0][i] - 1.0) < 1e-8);
        CHECK(std::abs(traj.values[1][i]) < 1e-8);
        CHECK(std::abs(traj.values[2][i]) < 1e-8);
    }
}

TEST_CASE("integration errors") {
    const SpaceDef s(3);
    const OperatorMatrix rho0 = projector(basis_state(s, AtomLevel::g, 1));
    const OperatorMatrix zero = OperatorMatrix::Zero(9, 9);

    SUBCASE("step size underflow") {
        const LindbladGenerator gen(number_operator(s), zero, nullptr, {{0.1, annihilation(s)}});
        IntegratorConfig cfg;
        cfg.rel_tol = 1e-300;
        cfg.abs_tol = 1e-300;
        CHECK_THROWS_AS(integrate(rho0, gen, {0.0, 1.0}, cfg), IntegrationError);
    }
    SUBCASE("trace drift") {
        // Non-Hermitian loss without the matching jump term does not preserve the trace.
        const Complex i{0.0, 1.0};
        const LindbladGenerator gen(-0.05 * i * number_operator(s), zero, nullptr, {});
        IntegratorConfig cfg;
        try {
            integrate(rho0, gen, {0.0, 10.0}, cfg);
            FAIL("expected trace drift");
        } catch (const IntegrationError& e) {
            CHECK(std::string(e.what()).find("trace") != std::string::npos);
            CHECK(e.time() < 1.0);
        }
    }
    SUBCASE("contract violations") {
        const LindbladGenerator gen(number_operator(s), zero, nullptr, {});
        IntegratorConfig cfg;
        CHECK_THROWS_AS(integrate(rho0, gen, {1.0, 0.0}, cfg), std::invalid_argument);
        cfg.output_grid = {0.5, 2.0};
        CHECK_THROWS_AS(integrate(rho0, gen, {0.0, 1.0}, cfg), std::invalid_argument);
        cfg.output_grid = {0.6, 0.5};
        CHECK_THROWS_AS(integrate(rho0, gen, {0.0, 1.0}, cfg), std::invalid_argument);
        cfg.output_grid.clear();
        CHECK_THROWS_AS(integrate(OperatorMatrix::Identity(4, 4) / 4.0, gen, {0.0, 1.0}, cfg),
                        std::invalid_argument);
        cfg.rel_tol = 0.0;
        CHECK_THROWS_AS(integrate(rho0, gen, {0.0, 1.0}, cfg), std::invalid_argument);
    }
}

TEST_CASE("output grid is hit exactly") {
    const SpaceDef s(3);
    const LindbladGenerator gen(number_operator(s), OperatorMatrix::Zero(9, 9), nullptr, {});
    IntegratorConfig cfg;
    cfg.output_grid = uniform_grid(-1.0, 2.0, 7);
    const Trajectory traj = integrate(projector(basis_state(s, AtomLevel::g, 1)), gen, {-1.0, 2.0}, cfg);
    REQUIRE(traj.times.size() == 7);
    for (std::size_t i = 0; i < 7; ++i) CHECK(traj.times[i] == cfg.output_grid[i]);
    CHECK(parse_integrator_method("dop853") == IntegratorMethod::dop853);
    CHECK(to_string(IntegratorMethod::dopri5) == "dopri5");
    CHECK_THROWS_AS(parse_integrator_method("rk4"), std::invalid_argument);
}
