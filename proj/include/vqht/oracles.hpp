#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "vqht/bosonic.hpp"
#include "vqht/qsim.hpp"

namespace vqht {

struct ErrorRates {
    double alpha = 0.0;  ///< 1 - Tr(G rho_0)
    double beta = 0.0;   ///< Tr(G rho_1)
};

struct HelstromResult {
    ErrorRates rates;
    double min_error = 0.0;
    Mat projector;  ///< onto the non-negative eigenspace of pi_0 rho_0 - pi_1 rho_1
};

struct ChernoffResult {
    double q = 1.0;
    double s = 0.5;
    double log_q = 0.0;  ///< ln Q from 1 - Q directly; use this when Q is close to 1
};

struct QfiResult {
    double value = 0.0;
    double half_step_value = 0.0;  ///< same estimate at d_eta / 2
    bool richardson_ok = true;     ///< relative discrepancy below 1%
    bool ill_conditioned = false;  ///< dominant terms sit on a near-null spectrum
};

/// Half the trace norm of r0 - r1.
double trace_distance(const Mat& r0, const Mat& r1);
double trace_distance(const DensityMatrix& r0, const DensityMatrix& r1);
/// Fock states are compared after normalization to unit trace on a common cutoff.
double trace_distance(const FockState& r0, const FockState& r1);

HelstromResult helstrom(const Mat& r0, const Mat& r1, double prior0 = 0.5);

/// Diameter of the smallest circle enclosing the eigenvalues of u, capped at 2.
double diamond_unitary(const Mat& u);

double diamond_phase_flip(double p);

/// min over s in [0, 1] of Tr(r0^s r1^(1-s)).
ChernoffResult chernoff_bound(const Mat& r0, const Mat& r1);
ChernoffResult chernoff_bound(const FockState& r0, const FockState& r1);

/// Tr(r0^s r1^(1-s)) at a fixed s with the same clamping conventions.
double chernoff_objective(const Mat& r0, const Mat& r1, double s);

double uhlmann_fidelity(const Mat& r0, const Mat& r1);
double uhlmann_fidelity(const FockState& r0, const FockState& r1);

/// Symmetric-logarithmic-derivative QFI of a one-parameter family at eta0,
/// with the derivative taken by central differences.
QfiResult qfi(const std::function<Mat(double)>& family, double eta0, double d_eta = 1e-3);

/// QFI of (illumination channel (x) I)(probe) with respect to eta.
QfiResult qfi_illumination(const FockState& probe, double n_b, double eta0, double d_eta = 1e-3,
                           const CutoffPolicy& policy = {});

/// Squared Schmidt coefficients of a pure bipartite state (dims {d_a, d_b}),
/// descending, first top_k entries. Throws UsageError if the state is mixed.
std::vector<double> schmidt_values(const Mat& rho, const std::vector<int>& dims, int top_k);
std::vector<double> schmidt_values(const FockState& rho, int top_k);

/// Natural-log entropy; eigenvalues <= 1e-14 are dropped.
double von_neumann_entropy(const Mat& rho);

struct PovmSolution {
    double success = 0.0;
    std::vector<Mat> elements;
    std::vector<double> history;  ///< success after each fixed-point sweep
};

/// Equal-prior minimum-error POVM for fixed states by the fixed-point map
/// P_i <- X^-1/2 rho_i P_i rho_i X^-1/2.
PovmSolution povm_fixed_point(const std::vector<Mat>& states, int iterations = 200,
                              double tol = 1e-10);

struct MultiHypothesisResult {
    double success = 0.0;
    Vec probe;  ///< on system (x) reference
    std::vector<Mat> povm;
    std::vector<double> history;  ///< best success after each alternation
};

/// Alternating probe / POVM ascent for k channels acting on the first
/// factor of a (system (x) reference) probe. Best over seeded restarts.
MultiHypothesisResult multi_hypothesis_opt(const std::vector<KrausChannel>& channels, int ref_dim,
                                           int iterations = 50, int restarts = 8,
                                           std::uint64_t seed = 1);

struct NeighborhoodReport {
    bool pass = true;
    double d = 0.0;
    double min_distance = 0.0;
    double max_distance = 0.0;
    std::vector<int> violating_trials;
};

/// Perturbs the probe within trace distance eps and checks the output trace
/// distance of the two channels stays in [d (1 - 2 eps), d].
NeighborhoodReport epsilon_neighborhood_check(const KrausChannel& e0, const KrausChannel& e1,
                                              const DensityMatrix& probe, std::span<const int> targets,
                                              double eps, int n_trials, std::uint64_t seed);

}  // namespace vqht
