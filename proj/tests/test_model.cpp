#include "doctest.h"
#include "oracles.hpp"

#include "uscprobe/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace uscprobe;

namespace {

SystemParams params(double lambda, double lambda_prime = 0.0, int n_max = 8) {
    SystemParams p;
    p.epsilon = 1.0;
    p.epsilon_prime = 4.0;
    p.lambda = lambda;
    p.lambda_prime = lambda_prime;
    p.n_max = n_max;
    return p;
}

}  // namespace

TEST_CASE("uncoupled spectrum is the sum of bare energies") {
    const SystemParams p = params(0.0, 0.0, 10);
    const OperatorMatrix h = assemble_static(p);
    std::vector<double> got(h.rows());
    for (Eigen::Index i = 0; i < h.rows(); ++i) got[i] = h(i, i).real();
    CHECK(oracle::max_abs(h - h.diagonal().asDiagonal().toDenseMatrix()) == 0.0);
    std::vector<double> expected;
    for (int n = 0; n < 10; ++n) {
        expected.push_back(n - 4.0);
        expected.push_back(n);
        expected.push_back(n + 1.0);
    }
    std::sort(got.begin(), got.end());
    std::sort(expected.begin(), expected.end());
    for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == expected[i]);
}

TEST_CASE("static Hamiltonian is exactly Hermitian and matches an entrywise construction") {
    for (double lambda : {0.0, 0.1, 0.5, 1.3}) {
        for (auto form : {CouplingForm::full, CouplingForm::corotating_only}) {
            SystemParams p = params(lambda, 0.0, 7);
            p.eg_coupling_form = form;
            const OperatorMatrix h = assemble_static(p);
            CHECK(oracle::max_abs(h - h.adjoint()) == 0.0);
            const auto ref = oracle::hamiltonian(7, 1.0, 4.0, lambda, 0.0, form == CouplingForm::corotating_only);
            CHECK(oracle::max_abs(h - ref) < 1e-14);
        }
    }
}

TEST_CASE("ground energy converges under truncation doubling") {
    const SystemParams p = params(0.5, 0.0, 20);
    const OperatorMatrix h = assemble_static(p);
    // Rabi block of the library Hamiltonian (rows/cols of g and e).
    const OperatorMatrix block = h.bottomRightCorner(40, 40);
    const double e0 = Eigen::SelfAdjointEigenSolver<OperatorMatrix>(block).eigenvalues()(0);
    const double e0_ref = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(oracle::rabi_block(40, 1.0, 0.5)).eigenvalues()(0);
    CHECK(std::abs(e0 - e0_ref) < 1e-8);
    CHECK(e0 < 0.0);
}

TEST_CASE("stray coupling") {
    CHECK(oracle::max_abs(assemble_stray(params(0.5, 0.0))) == 0.0);
    const SystemParams p = params(0.5, 0.3, 5);
    const SpaceDef s = p.space();
    const StateVector out = assemble_stray(p) * basis_state(s, AtomLevel::g, 1);
    CHECK((out - 0.3 * std::sqrt(2.0) * basis_state(s, AtomLevel::u, 2)).norm() < 1e-15);
    const OperatorMatrix h = assemble_stray(p);
    CHECK(oracle::max_abs(h - h.adjoint()) == 0.0);
    CHECK(oracle::max_abs(h + assemble_static(p) - oracle::hamiltonian(5, 1.0, 4.0, 0.5, 0.3)) < 1e-14);
}

TEST_CASE("corotating-only coupling conserves a shifted excitation number") {
    SystemParams p = params(0.5, 0.4, 8);
    const SpaceDef s = p.space();
    // a^dag a + |e><e| - |u><u|: |g,n> <-> |e,n-1> and |g,n> <-> |u,n+1> both conserve it.
    const OperatorMatrix n_exc = number_operator(s) + atomic_transition(s, AtomLevel::e, AtomLevel::e) -
                                 atomic_transition(s, AtomLevel::u, AtomLevel::u);
    p.eg_coupling_form = CouplingForm::corotating_only;
    OperatorMatrix h = assemble_static(p) + assemble_stray(p);
    CHECK(oracle::max_abs(h * n_exc - n_exc * h) < 1e-14);
    p.eg_coupling_form = CouplingForm::full;
    h = assemble_static(p) + assemble_stray(p);
    CHECK(oracle::max_abs(h * n_exc - n_exc * h) > 0.1);
}

TEST_CASE("pulse envelopes and lab-frame drive") {
    PulseSpec spec;
    spec.w_s_peak = 0.1;
    spec.w_p_peak = 0.00972;
    spec.width = 100.0;
    spec.tau = 60.0;
    spec.omega_p = 3.9;
    spec.omega_s = 1.9;
    CHECK(envelope(spec, -spec.tau, PulseKind::stokes) == 0.1);
    CHECK(envelope(spec, spec.tau, PulseKind::pump) == 0.00972);
    CHECK(envelope(spec, 0.0, PulseKind::pump) == doctest::Approx(0.00972 * std::exp(-0.36)).epsilon(1e-14));
    CHECK(envelope(spec, 0.0, PulseKind::pump) / 0.00972 == doctest::Approx(0.6977).epsilon(1e-4));
    CHECK(drive_amplitude(spec, 0.0) == doctest::Approx(0.07655).epsilon(1e-4));

    // Independent scalar evaluation.
    for (double t : {-250.0, -61.3, 0.7, 42.0, 199.9}) {
        const double ws = 0.1 * std::exp(-std::pow((t + 60.0) / 100.0, 2));
        const double wp = 0.00972 * std::exp(-std::pow((t - 60.0) / 100.0, 2));
        const double w = ws * std::cos(1.9 * t) + wp * std::cos(3.9 * t);
        CHECK(drive_amplitude(spec, t) == doctest::Approx(w).epsilon(1e-13));
    }

    const SpaceDef s(4);
    for (auto config : {Configuration::Lambda, Configuration::Vee}) {
        spec.configuration = config;
        for (double t : {-80.0, 0.0, 33.3}) {
            const OperatorMatrix hc = control_hamiltonian(spec, s, t);
            CHECK(oracle::max_abs(hc - hc.adjoint()) == 0.0);
        }
        const double far = spec.tau + 8.0 * spec.width;
        CHECK(oracle::max_abs(control_hamiltonian(spec, s, far)) < 1e-12 * spec.w_s_peak);
        CHECK(oracle::max_abs(control_hamiltonian(spec, s, -far)) < 1e-12 * spec.w_s_peak);
    }
}

TEST_CASE("control operators address the right transition") {
    const SpaceDef s(3);
    const OperatorMatrix lambda = control_operator(s, Configuration::Lambda);
    CHECK(oracle::max_abs(lambda - oracle::flip(1, 0, 3) - oracle::flip(0, 1, 3)) == 0.0);
    const OperatorMatrix vee = control_operator(s, Configuration::Vee);
    CHECK(oracle::max_abs(vee - oracle::flip(2, 0, 3) - oracle::flip(0, 2, 3)) == 0.0);
}

TEST_CASE("parameter validation") {
    SystemParams p;
    CHECK_NOTHROW(p.validate());
    p.lambda = -0.1;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = SystemParams{};
    p.omega_c = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = SystemParams{};
    p.n_max = 2;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    PulseSpec spec;
    spec.tau = 0.0;
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    spec.tau = 1.0;
    spec.width = -1.0;
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}

TEST_CASE("enum round trips") {
    CHECK(parse_configuration("lambda") == Configuration::Lambda);
    CHECK(parse_configuration(to_string(Configuration::Vee)) == Configuration::Vee);
    CHECK(parse_coupling_form("corotating_only") == CouplingForm::corotating_only);
    CHECK_THROWS_AS(parse_configuration("ladder"), std::invalid_argument);
    CHECK(parse_frequency_convention("angular") == FrequencyConvention::angular);
}

TEST_CASE("laboratory time conversion") {
    // omega_c = 2 pi * 6 rad/ns
    CHECK(time_to_internal(54.6, 6.0, FrequencyConvention::cyclic) ==
          doctest::Approx(2.0 * std::numbers::pi * 6.0 * 54.6));
    CHECK(time_to_internal(54.6, 6.0, FrequencyConvention::cyclic) == doctest::Approx(2058.37).epsilon(1e-5));
    CHECK(time_to_internal(13.0, 6.0, FrequencyConvention::angular) == doctest::Approx(78.0));
}
