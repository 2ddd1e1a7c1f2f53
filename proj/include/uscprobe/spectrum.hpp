#pragma once

// Eigen-decomposition of the static Hamiltonian and the split of its
// eigenstates into dressed Rabi states |Phi_j> and factorized ancillas |n u>.

#include "uscprobe/hilbert.hpp"
#include "uscprobe/model.hpp"

#include <stdexcept>
#include <utility>
#include <vector>

namespace uscprobe {

// u-block population below this is "rabi", above 1 - this is "ancilla".
inline constexpr double classification_threshold = 1e-8;

struct StateLabel {
    enum class Kind { rabi, ancilla, mixed };
    Kind kind = Kind::mixed;
    // Rabi: j in ascending energy order (Phi_0, Phi_1-, Phi_1+, ...).
    // Ancilla: photon number n of |n u>. Mixed: -1.
    int index = -1;
};

class SpectrumError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct EigenSystem {
    SpaceDef space{3};
    Eigen::VectorXd energies;        // ascending
    OperatorMatrix states;           // column k is the eigenvector of energies(k)
    std::vector<StateLabel> labels;

    int size() const noexcept { return static_cast<int>(energies.size()); }
    StateVector state(int k) const { return states.col(k); }
    bool clean_partition() const noexcept;
    int rabi_count() const noexcept;
    int ancilla_count() const noexcept;

    // Column index of Phi_j / |n u>; throws SpectrumError when absent.
    int find_rabi(int j) const;
    int find_ancilla(int n) const;

    // Column with the largest overlap |<k|reference>|^2.
    int best_overlap(const StateVector& reference) const;
};

// Full eigendecomposition with classification by u-block population.
// When the u block is exactly decoupled the two blocks are diagonalized
// separately, so degeneracies across blocks never produce mixed labels.
EigenSystem diagonalize(const OperatorMatrix& h, const SpaceDef& space);

// c_jn = <n g|Phi_j>, phase fixed so the lowest nonzero c_jn is real positive.
Complex virtual_amplitude(const EigenSystem& es, int j, int n);
// d_jn = <n e|Phi_j> under the same phase convention.
Complex excited_amplitude(const EigenSystem& es, int j, int n);

enum class DoubletTarget { midpoint, lower, upper };

DoubletTarget parse_doublet_target(std::string_view text);
std::string_view to_string(DoubletTarget target) noexcept;

// Lambda aims at Phi_0 and ignores the target. Vee aims at the lower doublet
// member: the midpoint sits detuned from both members by half the splitting.
DoubletTarget default_doublet_target(Configuration config) noexcept;

struct Carriers {
    double omega_p = 0.0;
    double omega_s = 0.0;
};

// Lambda: omega_p = E(Phi_0) - E(|0u>), omega_s = omega_p - 2 omega_c.
// Vee:    omega_p = E(|0u>) - E_ref(Phi_1+-), omega_s = omega_p + 2 omega_c.
// Requires a clean partition.
Carriers stirap_carriers(const EigenSystem& es, Configuration config, const SystemParams& params,
                         DoubletTarget target = DoubletTarget::midpoint);

// Protocol-relevant eigenstates of the static Hamiltonian.
struct ProtocolStates {
    int zero_u = -1;   // |0 u>
    int two_u = -1;    // |2 u>
    int phi0 = -1;     // Phi_0
    int phi1_lower = -1;
    int phi1_upper = -1;
};

// With a clean partition the states come from the labels. Otherwise each is
// taken as the eigenstate of `es` with the largest overlap to the matching
// state of `reference`, which must itself be cleanly partitioned.
ProtocolStates locate_protocol_states(const EigenSystem& es, const EigenSystem& reference);
ProtocolStates locate_protocol_states(const EigenSystem& es);

// Same carriers from located states, except that the Stokes tone is put on
// the two-photon resonance with |2u>: Lambda omega_s = E(Phi_0) - E(|2u>),
// Vee omega_s = E(|2u>) - E_ref. Without the stray term E(|2u>) - E(|0u>) is
// exactly 2 omega_c and this reduces to the formulas above; with it the
// levels shift differently and the fixed 2 omega_c offset misses resonance.
Carriers carriers_from_states(const EigenSystem& es, const ProtocolStates& states, Configuration config,
                                                        const SystemParams& params, DoubletTarget target = DoubletTarget::midpoint);

}  // namespace uscprobe
