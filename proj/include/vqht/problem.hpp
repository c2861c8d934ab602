#pragma once

#include <optional>
#include <vector>

#include "vqht/circuit.hpp"
#include "vqht/gaussian.hpp"
#include "vqht/qsim.hpp"

namespace vqht {

/// Illumination hypothesis: loss channel with reflectivity eta in a thermal
/// bath of n_b photons. eta = 0 is "object absent".
struct BosonicChannelSpec {
    double eta = 0.0;
    double n_b = 1.0;
};

struct PhotonConstraint {
    int signal_mode = 0;
    double target = 0.1;
    double lambda = 100.0;
};

/// Bosonic ancilla readout: outcome 0 is "vacuum" or "even photon number".
enum class Readout { Vacuum, Parity };

/// k channels, a probe circuit U(theta) and a measurement circuit V(phi) on
/// (ancilla (x) probe output). Discrete problems use a k-level ancilla at
/// subsystem 0 of the measurement circuit; bosonic problems use an ancilla
/// mode whose vacuum outcome is the hypothesis-0 result.
class HypothesisProblem {
public:
    /// channel_targets index the probe register.
    static HypothesisProblem discrete(std::vector<KrausChannel> channels, std::vector<int> channel_targets,
                                      ParamCircuit probe, ParamCircuit measure);

    static HypothesisProblem bosonic(std::vector<BosonicChannelSpec> channels, ParamCircuit probe,
                                     ParamCircuit measure, std::optional<PhotonConstraint> constraint = {},
                                     Readout readout = Readout::Vacuum);

    /// Discrete problem with a fixed probe state and no probe parameters.
    static HypothesisProblem fixed_probe(std::vector<KrausChannel> channels, std::vector<int> channel_targets,
                                         std::vector<int> probe_dims, Vec probe, ParamCircuit measure);

    bool is_bosonic() const { return bosonic_; }
    int k() const { return bosonic_ ? static_cast<int>(bchannels_.size()) : static_cast<int>(channels_.size()); }
    int n_theta() const { return fixed_ ? 0 : probe_.n_params(); }
    int n_phi() const { return measure_.n_params(); }

    const ParamCircuit& probe_circuit() const { return probe_; }
    const ParamCircuit& measure_circuit() const { return measure_; }
    const std::vector<KrausChannel>& channels() const { return channels_; }
    const std::vector<int>& channel_targets() const { return targets_; }
    const std::vector<BosonicChannelSpec>& bosonic_channels() const { return bchannels_; }
    const std::optional<PhotonConstraint>& constraint() const { return constraint_; }
    const std::vector<int>& probe_dims() const { return probe_dims_; }
    Readout readout() const { return readout_; }

    /// Probe ket U(theta)|0...0> (discrete).
    Vec probe_ket(const RVec& theta) const;

    /// (E_i (x) I)(probe) for every channel (discrete).
    std::vector<Mat> channel_outputs(const RVec& theta) const;

    /// Per channel, the columns K_j (x) I applied to the probe ket, so that
    /// the output is L L^dag (discrete).
    std::vector<Mat> channel_factors(const RVec& theta) const;

    /// Probe moments and per-channel output moments on (returned, idler) (bosonic).
    GaussianMoments probe_moments(const RVec& theta) const;
    std::vector<GaussianMoments> output_moments(const RVec& theta) const;

    /// Truncated Fock probe and outputs, for oracle comparisons (bosonic).
    FockState probe_fock(const RVec& theta, const CutoffPolicy& policy = {}) const;
    std::vector<FockState> fock_outputs(const RVec& theta, const CutoffPolicy& policy = {}) const;

    /// Slots of the probe circuit that carry energy (squeezing and displacement).
    std::vector<int> energy_slots() const;

private:
    bool bosonic_ = false;
    bool fixed_ = false;
    std::vector<KrausChannel> channels_;
    std::vector<int> targets_;
    std::vector<BosonicChannelSpec> bchannels_;
    ParamCircuit probe_ = ParamCircuit::discrete({2});
    ParamCircuit measure_ = ParamCircuit::discrete({2});
    std::optional<PhotonConstraint> constraint_;
    std::vector<int> probe_dims_;
    Vec fixed_probe_;
    Readout readout_ = Readout::Vacuum;
};

/// Ancilla outcome distributions, one per channel.
std::vector<std::vector<double>> outcome_probabilities(const HypothesisProblem& problem, const RVec& theta,
                                                       const RVec& phi);

/// p_0(outcome 0) - p_1(outcome 0) for a binary problem.
double signed_tve(const HypothesisProblem& problem, const RVec& theta, const RVec& phi);

/// |p_0 - p_1| using the outcome-0 probabilities. Binary problems only.
double cost_tve(const HypothesisProblem& problem, const RVec& theta, const RVec& phi);

/// (1/k) sum_i P(outcome i | channel i).
double cost_success_multi(const HypothesisProblem& problem, const RVec& theta, const RVec& phi);

/// Mean photon number of the constrained signal mode.
double signal_photons(const HypothesisProblem& problem, const RVec& theta);

/// cost - lambda (N_S - target)^2 with cost = T^ve for binary problems and
/// the success probability otherwise.
double penalized_cost(const HypothesisProblem& problem, const RVec& theta, const RVec& phi);

}  // namespace vqht
