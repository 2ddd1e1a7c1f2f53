#include "doctest.h"
#include "oracles.hpp"

#include "uscprobe/hilbert.hpp"

using namespace uscprobe;

TEST_CASE("space rejects fewer than three Fock states") {
    CHECK_THROWS_AS(SpaceDef(2), std::invalid_argument);
    CHECK_NOTHROW(SpaceDef(3));
    CHECK(SpaceDef(20).total_dim() == 60);
}

TEST_CASE("basis ordering is atom-major") {
    const SpaceDef s(3);
    const StateVector u0 = basis_state(s, AtomLevel::u, 0);
    CHECK(u0(0) == Complex(1.0));
    CHECK(u0.squaredNorm() == doctest::Approx(1.0));
    const StateVector e2 = basis_state(s, AtomLevel::e, 2);
    CHECK(e2(8) == Complex(1.0));
    CHECK(s.index(AtomLevel::e, 2) == 8);
    CHECK(s.atom_of(8) == AtomLevel::e);
    CHECK(s.photons_of(8) == 2);
    CHECK_THROWS_AS(basis_state(s, AtomLevel::g, 5), TruncationError);
    CHECK_THROWS_AS(s.index(AtomLevel::g, -1), TruncationError);
}

TEST_CASE("ladder operators on a three-level truncation") {
    const SpaceDef s(3);
    const OperatorMatrix a = annihilation(s);
    for (AtomLevel atom : {AtomLevel::u, AtomLevel::g, AtomLevel::e}) {
        const StateVector out = a * basis_state(s, atom, 2);
        CHECK((out - std::sqrt(2.0) * basis_state(s, atom, 1)).norm() < 1e-15);
        CHECK((a * basis_state(s, atom, 0)).norm() == 0.0);
    }
    const OperatorMatrix n = number_operator(s);
    for (int atom = 0; atom < 3; ++atom) {
        for (int k = 0; k < 3; ++k) CHECK(n(atom * 3 + k, atom * 3 + k).real() == doctest::Approx(k));
    }
    CHECK(oracle::max_abs(creation(s) - a.adjoint()) == 0.0);
    CHECK(oracle::max_abs(a - oracle::lower(3)) == 0.0);
}

TEST_CASE("canonical commutator holds below the truncation edge") {
    const SpaceDef s(6);
    const OperatorMatrix a = annihilation(s);
    const OperatorMatrix comm = a * a.adjoint() - a.adjoint() * a;
    for (int i = 0; i < s.total_dim(); ++i) {
        const double expected = s.photons_of(i) == 5 ? -5.0 : 1.0;
        CHECK(comm(i, i).real() == doctest::Approx(expected));
    }
    CHECK(oracle::max_abs(comm - comm.diagonal().asDiagonal().toDenseMatrix()) == 0.0);
}

TEST_CASE("atomic transitions") {
    const SpaceDef s(3);
    const OperatorMatrix s_ug = atomic_transition(s, AtomLevel::g, AtomLevel::u);
    CHECK((s_ug * basis_state(s, AtomLevel::g, 0) - basis_state(s, AtomLevel::u, 0)).norm() == 0.0);
    const OperatorMatrix s_ee = atomic_transition(s, AtomLevel::e, AtomLevel::e);
    CHECK((s_ee * basis_state(s, AtomLevel::g, 1)).norm() == 0.0);
    for (int from = 0; from < 3; ++from) {
        for (int to = 0; to < 3; ++to) {
            CHECK(oracle::max_abs(atomic_transition(s, AtomLevel(from), AtomLevel(to)) - oracle::flip(from, to, 3)) ==
                  0.0);
        }
    }
}

TEST_CASE("projectors") {
    const SpaceDef s(4);
    OperatorMatrix sum = OperatorMatrix::Zero(12, 12);
    for (int n = 0; n < 4; ++n) sum += fock_projector(s, n);
    CHECK(oracle::max_abs(sum - OperatorMatrix::Identity(12, 12)) == 0.0);
    const OperatorMatrix p = projector(basis_state(s, AtomLevel::g, 1));
    CHECK(oracle::max_abs(p * p - p) == 0.0);
    CHECK(p.trace().real() == 1.0);
}
