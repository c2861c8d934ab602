#pragma once

#include <string>
#include <vector>

#include "vqht/bosonic.hpp"
#include "vqht/subsystems.hpp"

namespace vqht {

enum class GateKind {
    Euler,      ///< Rz(a) Ry(b) Rz(c) on a qubit
    GellMann,   ///< exp(-i sum_k w_k lambda_k) on a qudit
    Fixed,      ///< parameter-free unitary (entanglers, state preparation)
    Displace,   ///< slots (Re alpha, Im alpha)
    Squeeze2,   ///< slots (r, phi)
    Split,      ///< slots (theta, phi)
    Rotate,     ///< slot (phi)
    CPhase,     ///< slot (s)
};

struct ParamGate {
    GateKind kind;
    std::vector<int> targets;
    std::vector<int> slots;
    Mat fixed;  ///< only for GateKind::Fixed
};

/// Ordered list of gate descriptors bound to parameter slots. Discrete
/// circuits act on a product of finite local spaces; bosonic circuits expand
/// into BosonicGate lists for either backend.
class ParamCircuit {
public:
    static ParamCircuit discrete(std::vector<int> dims);
    static ParamCircuit bosonic(int modes, int cutoff);

    bool is_bosonic() const { return bosonic_; }
    const std::vector<int>& dims() const { return dims_; }
    int modes() const { return static_cast<int>(dims_.size()); }
    int cutoff() const { return cutoff_; }
    int n_params() const { return n_params_; }
    const std::vector<ParamGate>& gates() const { return gates_; }

    /// Appends a gate using fresh slots; returns the first slot index.
    int add_euler(int target);
    int add_gell_mann(int target);
    void add_fixed(const Mat& u, std::vector<int> targets);
    int add_displacement(int mode);
    int add_two_mode_squeeze(int mode_a, int mode_b);
    int add_beam_splitter(int mode_a, int mode_b);
    int add_phase_rotation(int mode);
    int add_controlled_phase(int mode_a, int mode_b);

    /// Throws UsageError if a slot is never referenced.
    void validate() const;

    /// U(params) * x for a discrete circuit; x has prod(dims) rows.
    Mat apply(const RVec& params, const Mat& x) const;

    /// Dense unitary of a discrete circuit.
    Mat unitary(const RVec& params) const;

    /// Concrete gate list of a bosonic circuit.
    std::vector<BosonicGate> bosonic_gates(const RVec& params) const;

    /// Local matrix of one discrete gate.
    Mat gate_matrix(const ParamGate& g, const RVec& params) const;

private:
    int add(GateKind kind, std::vector<int> targets, int n_slots, Mat fixed = {});

    bool bosonic_ = false;
    std::vector<int> dims_;
    int cutoff_ = 0;
    int n_params_ = 0;
    std::vector<ParamGate> gates_;
    std::vector<LocalEmbedding> embeddings_;
};

enum class Entangler { CZ, None };

/// Layers of per-subsystem rotations (Euler on qubits, Gell-Mann on qudits)
/// followed by a ring of diagonal controlled-phase gates.
ParamCircuit build_hardware_efficient_ansatz(const std::vector<int>& dims, int layers,
                                             Entangler entangler = Entangler::CZ);

/// Signal/idler probe: displacements on S and I, then two-mode squeezing.
ParamCircuit build_illumination_probe(int cutoff = 20);

/// Receiver on (q0, returned, idler): displacements on all modes, controlled
/// phases and beam splitters between q0 and each of the other modes.
ParamCircuit build_illumination_measure(int cutoff = 20);

/// Generalized Gell-Mann basis of su(d): d^2 - 1 Hermitian matrices.
std::vector<Mat> gell_mann_basis(int d);

}  // namespace vqht
