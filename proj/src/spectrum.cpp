#include "uscprobe/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace uscprobe {

namespace {

constexpr double phase_reference_floor = 1e-12;

bool u_block_decoupled(const OperatorMatrix& h, int n_max) {
    const int rest = h.rows() - n_max;
    return h.block(0, n_max, n_max, rest).cwiseAbs().maxCoeff() == 0.0 &&
           h.block(n_max, 0, rest, n_max).cwiseAbs().maxCoeff() == 0.0;
}

void fix_phase(Eigen::Ref<StateVector> psi, const SpaceDef& space, bool rabi) {
    int ref = -1;
    if (rabi) {
        for (int block : {1, 2}) {
            for (int n = 0; n < space.n_max() && ref < 0; ++n) {
                const int i = block * space.n_max() + n;
                if (std::abs(psi(i)) > phase_reference_floor) ref = i;
            }
            if (ref >= 0) break;
        }
    }
    if (ref < 0) psi.cwiseAbs().maxCoeff(&ref);
    const Complex z = psi(ref);
    if (std::abs(z) > 0.0) psi *= std::conj(z) / std::abs(z);
}

double u_population(const StateVector& psi, int n_max) { return psi.head(n_max).squaredNorm(); }

void assign_labels(EigenSystem& es) {
    const int n_max = es.space.n_max();
    es.labels.assign(es.size(), StateLabel{});
    int next_rabi = 0;
    for (int k = 0; k < es.size(); ++k) {
        const StateVector psi = es.states.col(k);
        const double pu = u_population(psi, n_max);
        StateLabel& label = es.labels[k];
        if (pu > 1.0 - classification_threshold) {
            label.kind = StateLabel::Kind::ancilla;
            Eigen::Index n = 0;
            psi.head(n_max).cwiseAbs().maxCoeff(&n);
            label.index = static_cast<int>(n);
        } else if (pu < classification_threshold) {
            label.kind = StateLabel::Kind::rabi;
            label.index = next_rabi++;
        } else {
            label.kind = StateLabel::Kind::mixed;
            label.index = -1;
        }
        fix_phase(es.states.col(k), es.space, label.kind == StateLabel::Kind::rabi);
    }
}

}  // namespace

bool EigenSystem::clean_partition() const noexcept {
    return std::none_of(labels.begin(), labels.end(),
                        [](const StateLabel& l) { return l.kind == StateLabel::Kind::mixed; });
}

int EigenSystem::rabi_count() const noexcept {
    return static_cast<int>(std::count_if(labels.begin(), labels.end(),
                                          [](const StateLabel& l) { return l.kind == StateLabel::Kind::rabi; }));
}

int EigenSystem::ancilla_count() const noexcept {
    return static_cast<int>(std::count_if(
        labels.begin(), labels.end(), [](const StateLabel& l) { return l.kind == StateLabel::Kind::ancilla; }));
}

int EigenSystem::find_rabi(int j) const {
    for (int k = 0; k < size(); ++k) {
        if (labels[k].kind == StateLabel::Kind::rabi && labels[k].index == j) return k;
    }
    throw SpectrumError("Rabi state Phi_" + std::to_string(j) + " not present in the spectrum");
}

int EigenSystem::find_ancilla(int n) const {
    for (int k = 0; k < size(); ++k) {
        if (labels[k].kind == StateLabel::Kind::ancilla && labels[k].index == n) return k;
    }
    throw SpectrumError("ancilla |" + std::to_string(n) + " u> not present in the spectrum");
}

int EigenSystem::best_overlap(const StateVector& reference) const {
    Eigen::Index best = 0;
    (states.adjoint() * reference).cwiseAbs2().maxCoeff(&best);
    return static_cast<int>(best);
}

EigenSystem diagonalize(const OperatorMatrix& h, const SpaceDef& space) {
    const int dim = space.total_dim();
    if (h.rows() != dim || h.cols() != dim) {
        throw std::invalid_argument("diagonalize: Hamiltonian dimension does not match the space");
    }
    EigenSystem es;
    es.space = space;
    es.energies.resize(dim);
    es.states = OperatorMatrix::Zero(dim, dim);

    const int n_max = space.n_max();
    if (u_block_decoupled(h, n_max)) {
        Eigen::SelfAdjointEigenSolver<OperatorMatrix> upper(h.topLeftCorner(n_max, n_max));
        Eigen::SelfAdjointEigenSolver<OperatorMatrix> lower(h.bottomRightCorner(dim - n_max, dim - n_max));
        if (upper.info() != Eigen::Success || lower.info() != Eigen::Success) {
            throw SpectrumError("diagonalize: eigensolver failed");
        }
        // Merge both ascending sequences; ties keep ancillas first.
        int iu = 0, ir = 0;
        for (int k = 0; k < dim; ++k) {
            const bool take_u = ir >= dim - n_max ||
                                (iu < n_max && upper.eigenvalues()(iu) <= lower.eigenvalues()(ir));
            if (take_u) {
                es.energies(k) = upper.eigenvalues()(iu);
                es.states.col(k).head(n_max) = upper.eigenvectors().col(iu);
                ++iu;
            } else {
                es.energies(k) = lower.eigenvalues()(ir);
                es.states.col(k).tail(dim - n_max) = lower.eigenvectors().col(ir);
                ++ir;
            }
        }
    } else {
        Eigen::SelfAdjointEigenSolver<OperatorMatrix> solver(h);
        if (solver.info() != Eigen::Success) throw SpectrumError("diagonalize: eigensolver failed");
        es.energies = solver.eigenvalues();
        es.states = solver.eigenvectors();
    }
    assign_labels(es);
    return es;
}

namespace {

const StateLabel& require_rabi(const EigenSystem& es, int j, int n) {
    const int k = es.find_rabi(j);
    if (n < 0 || n >= es.space.n_max()) {
        throw TruncationError("photon number " + std::to_string(n) + " outside truncated space");
    }
    return es.labels[k];
}

}  // namespace

Complex virtual_amplitude(const EigenSystem& es, int j, int n) {
    require_rabi(es, j, n);
    return es.states(es.space.index(AtomLevel::g, n), es.find_rabi(j));
}

Complex excited_amplitude(const EigenSystem& es, int j, int n) {
    require_rabi(es, j, n);
    return es.states(es.space.index(AtomLevel::e, n), es.find_rabi(j));
}

DoubletTarget parse_doublet_target(std::string_view text) {
    if (text == "midpoint") return DoubletTarget::midpoint;
    if (text == "lower") return DoubletTarget::lower;
    if (text == "upper") return DoubletTarget::upper;
    throw std::invalid_argument("unknown doublet target '" + std::string(text) +
                                "' (expected midpoint|lower|upper)");
}

DoubletTarget default_doublet_target(Configuration config) noexcept {
    return config == Configuration::Vee ? DoubletTarget::lower : DoubletTarget::midpoint;
}

std::string_view to_string(DoubletTarget target) noexcept {
    switch (target) {
    case DoubletTarget::midpoint: return "midpoint";
    case DoubletTarget::lower: return "lower";
    case DoubletTarget::upper: return "upper";
    }
    return "?";
}

ProtocolStates locate_protocol_states(const EigenSystem& es) {
    if (!es.clean_partition()) {
        throw SpectrumError("eigenstates are not cleanly partitioned into Rabi and ancilla families");
    }
    ProtocolStates s;
    s.zero_u = es.find_ancilla(0);
    s.two_u = es.find_ancilla(2);
    s.phi0 = es.find_rabi(0);
    s.phi1_lower = es.find_rabi(1);
    s.phi1_upper = es.find_rabi(2);
    return s;
}

ProtocolStates locate_protocol_states(const EigenSystem& es, const EigenSystem& reference) {
    if (es.clean_partition()) return locate_protocol_states(es);
    const ProtocolStates ref = locate_protocol_states(reference);
    ProtocolStates s;
    s.zero_u = es.best_overlap(reference.state(ref.zero_u));
    s.two_u = es.best_overlap(reference.state(ref.two_u));
    s.phi0 = es.best_overlap(reference.state(ref.phi0));
    s.phi1_lower = es.best_overlap(reference.state(ref.phi1_lower));
    s.phi1_upper = es.best_overlap(reference.state(ref.phi1_upper));
    return s;
}

Carriers carriers_from_states(const EigenSystem& es, const ProtocolStates& states, Configuration config,
                              const SystemParams& /*params*/, DoubletTarget target) {
    Carriers c;
    const double e_zero_u = es.energies(states.zero_u);
    if (config == Configuration::Lambda) {
        c.omega_p = es.energies(states.phi0) - e_zero_u;
        c.omega_s = es.energies(states.phi0) - es.energies(states.two_u);
        return c;
    }
    const double lower = es.energies(states.phi1_lower);
    const double upper = es.energies(states.phi1_upper);
    double e_ref = 0.5 * (lower + upper);
    if (target == DoubletTarget::lower) e_ref = lower;
    if (target == DoubletTarget::upper) e_ref = upper;
    c.omega_p = e_zero_u - e_ref;
    c.omega_s = es.energies(states.two_u) - e_ref;
    return c;
}

Carriers stirap_carriers(const EigenSystem& es, Configuration config, const SystemParams& params,
                         DoubletTarget target) {
    return carriers_from_states(es, locate_protocol_states(es), config, params, target);
}

}  // namespace uscprobe
