#pragma once

#include <variant>
#include <vector>

#include "vqht/linalg.hpp"

namespace vqht {

/// Truncation control shared by every Fock-space operation.
struct CutoffPolicy {
    double escalate_above = 1e-6;  ///< leakage that triggers a cutoff increase
    double hard_limit = 1e-4;      ///< leakage that is an error
    int step = 6;
    int max_cutoff = 64;
    bool adaptive = true;
    int pad = 8;  ///< extra levels used when exponentiating a gate generator
};

/// Truncated multimode bosonic density matrix. Mode 0 is the most significant
/// tensor factor. Probability that left the truncated space is carried in
/// trace_deficit instead of being renormalized away.
class FockState {
public:
    FockState(std::vector<int> cutoffs, Mat data, double trace_deficit = 0.0, double leakage = 0.0);

    int modes() const { return static_cast<int>(cutoffs_.size()); }
    const std::vector<int>& cutoffs() const { return cutoffs_; }
    int cutoff(int mode) const { return cutoffs_.at(static_cast<std::size_t>(mode)); }
    const Mat& data() const { return data_; }
    double trace() const { return data_.trace().real(); }
    double trace_deficit() const { return trace_deficit_; }
    /// Accumulated gate-truncation leakage, measured before re-unitarization.
    double leakage() const { return leakage_; }

    /// Copy with every mode's cutoff raised to at least the given values
    /// (zero padding; never truncates).
    FockState with_cutoffs(const std::vector<int>& cutoffs) const;

    /// Data divided by its trace.
    Mat normalized() const;

private:
    std::vector<int> cutoffs_;
    Mat data_;
    double trace_deficit_ = 0.0;
    double leakage_ = 0.0;
};

namespace gate {
struct Displacement {
    int mode;
    cplx alpha;
};
struct TwoModeSqueeze {
    int mode_a, mode_b;
    double r, phi;
};
struct BeamSplitter {
    int mode_a, mode_b;
    double theta, phi;
};
struct PhaseRotation {
    int mode;
    double phi;
};
/// exp(i s q_a q_b) with q = (a + a^dag)/sqrt(2).
struct ControlledPhase {
    int mode_a, mode_b;
    double s;
};
}  // namespace gate

using BosonicGate = std::variant<gate::Displacement, gate::TwoModeSqueeze, gate::BeamSplitter,
                                 gate::PhaseRotation, gate::ControlledPhase>;

/// Modes a gate acts on, in generator order.
std::vector<int> gate_modes(const BosonicGate& g);

/// Throws UsageError for non-finite parameters or bad/duplicate modes.
void validate_gate(const BosonicGate& g, int modes);

FockState fock_vacuum(int modes, int cutoff);

/// Two-mode squeezed vacuum with n_s mean photons per mode, modes (0, 1).
FockState tmsv_state(double n_s, int cutoff);

/// Truncated thermal state. The cutoff escalates while the tail mass exceeds
/// policy.escalate_above; CutoffError if it still exceeds policy.hard_limit.
FockState thermal_state(double n_bar, int cutoff, const CutoffPolicy& policy = {});

/// Single-mode Fock projector |n><n|.
FockState fock_number_state(int n, int cutoff);

/// Truncated exponential of the gate generator on its target modes, computed
/// on cutoff+pad levels and projected back to the given cutoffs. Not unitary
/// in general; the deviation is the truncation leakage.
Mat truncated_gate_matrix(const BosonicGate& g, const std::vector<int>& target_cutoffs, int pad);

/// U rho U^dag with U the re-unitarized (polar) truncated exponential.
FockState apply_bosonic_gate(const FockState& rho, const BosonicGate& g,
                             const CutoffPolicy& policy = {});

FockState apply_bosonic_circuit(const FockState& rho, const std::vector<BosonicGate>& gates,
                                const CutoffPolicy& policy = {});

/// Beam-splitter loss channel of quantum illumination. Input modes (S, I);
/// a thermal bath mode B with n_b photons is mixed with S by
/// exp(asin(eta) (a_S^dag a_B - a_S a_B^dag)), S is traced out and the
/// output modes are (returned, idler). The returned-mode cutoff follows the
/// bath cutoff selected by the policy.
FockState illumination_channel(const FockState& rho_si, double eta, double n_b,
                               const CutoffPolicy& policy = {});

/// <n1 n2 | U | m1 m2> for the illumination beam splitter, exact (no truncation).
double illumination_bs_amplitude(double theta, int k_s, int r_b, int s_s, int m_b);

double vacuum_probability(const FockState& rho, int mode);
double parity_expectation(const FockState& rho, int mode);
double mean_photon(const FockState& rho, int mode);

/// Reduced state on one mode.
Mat reduced_mode(const FockState& rho, int mode);

/// Truncated annihilation operator on `cutoff` levels.
Mat annihilation(int cutoff);

}  // namespace vqht
