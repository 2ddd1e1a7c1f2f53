#include "uscprobe/hilbert.hpp"

#include <cmath>

namespace uscprobe {

std::string_view to_string(AtomLevel level) noexcept {
    switch (level) {
    case AtomLevel::u: return "u";
    case AtomLevel::g: return "g";
    case AtomLevel::e: return "e";
    }
    return "?";
}

SpaceDef::SpaceDef(int n_max) : n_max_(n_max) {
    if (n_max < min_fock_states) {
        throw std::invalid_argument("SpaceDef: n_max must be >= 3 (Fock states |0>,|1>,|2>), got " +
                                    std::to_string(n_max));
    }
}

int SpaceDef::index(AtomLevel atom, int n) const {
    if (n < 0 || n >= n_max_) {
        throw TruncationError("photon number " + std::to_string(n) + " outside truncated space 0.." +
                              std::to_string(n_max_ - 1));
    }
    return static_cast<int>(atom) * n_max_ + n;
}

OperatorMatrix annihilation(const SpaceDef& space) {
    const int dim = space.total_dim();
    OperatorMatrix a = OperatorMatrix::Zero(dim, dim);
    for (int atom = 0; atom < SpaceDef::atom_dim; ++atom) {
        const int offset = atom * space.n_max();
        for (int n = 1; n < space.n_max(); ++n) {
            a(offset + n - 1, offset + n) = std::sqrt(static_cast<double>(n));
        }
    }
    return a;
}

OperatorMatrix creation(const SpaceDef& space) { return annihilation(space).adjoint(); }

OperatorMatrix number_operator(const SpaceDef& space) {
    const int dim = space.total_dim();
    OperatorMatrix n_op = OperatorMatrix::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) {
        n_op(i, i) = static_cast<double>(space.photons_of(i));
    }
    return n_op;
}

OperatorMatrix atomic_transition(const SpaceDef& space, AtomLevel from, AtomLevel to) {
    const int dim = space.total_dim();
    OperatorMatrix sigma = OperatorMatrix::Zero(dim, dim);
    for (int n = 0; n < space.n_max(); ++n) {
        sigma(space.index(to, n), space.index(from, n)) = 1.0;
    }
    return sigma;
}

StateVector basis_state(const SpaceDef& space, AtomLevel atom, int n) {
    StateVector psi = StateVector::Zero(space.total_dim());
    psi(space.index(atom, n)) = 1.0;
    return psi;
}

OperatorMatrix fock_projector(const SpaceDef& space, int n) {
    const int dim = space.total_dim();
    OperatorMatrix p = OperatorMatrix::Zero(dim, dim);
    for (int atom = 0; atom < SpaceDef::atom_dim; ++atom) {
        const int i = space.index(static_cast<AtomLevel>(atom), n);
        p(i, i) = 1.0;
    }
    return p;
}

OperatorMatrix projector(const StateVector& psi) { return psi * psi.adjoint(); }

}  // namespace uscprobe
