#pragma once

// Composite Hilbert space of a three-level atom and a truncated bosonic mode.
//
// Basis ordering is atom-major, photon-minor:
//     index(atom, n) = atom_index * n_max + n,   atom_index in {u=0, g=1, e=2}
// so each atomic level owns a contiguous block of n_max Fock states.

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace uscprobe {

using Complex = std::complex<double>;
using OperatorMatrix = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;
// Hermitian, unit-trace, positive semidefinite OperatorMatrix.
using DensityMatrix = Eigen::MatrixXcd;

enum class AtomLevel : int { u = 0, g = 1, e = 2 };

std::string_view to_string(AtomLevel level) noexcept;

class TruncationError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

class SpaceDef {
public:
    static constexpr int atom_dim = 3;
    static constexpr int min_fock_states = 3;

    // Throws std::invalid_argument when n_max < 3.
    explicit SpaceDef(int n_max);

    int n_max() const noexcept { return n_max_; }
    int total_dim() const noexcept { return atom_dim * n_max_; }

    // Throws TruncationError when n is outside 0..n_max-1.
    int index(AtomLevel atom, int n) const;

    AtomLevel atom_of(int index) const noexcept { return static_cast<AtomLevel>(index / n_max_); }
    int photons_of(int index) const noexcept { return index % n_max_; }

    bool operator==(const SpaceDef&) const = default;

private:
    int n_max_;
};

// a (x) 1_atom, with <n-1|a|n> = sqrt(n) up to n = n_max-1.
OperatorMatrix annihilation(const SpaceDef& space);
OperatorMatrix creation(const SpaceDef& space);
OperatorMatrix number_operator(const SpaceDef& space);

// |to><from| (x) 1_mode.
OperatorMatrix atomic_transition(const SpaceDef& space, AtomLevel from, AtomLevel to);

// |atom> (x) |n>; throws TruncationError when n >= n_max.
StateVector basis_state(const SpaceDef& space, AtomLevel atom, int n);

// 1_atom (x) |n><n|.
OperatorMatrix fock_projector(const SpaceDef& space, int n);

// |psi><psi|
OperatorMatrix projector(const StateVector& psi);

}  // namespace uscprobe
