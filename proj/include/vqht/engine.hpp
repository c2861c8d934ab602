#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "vqht/optimize.hpp"
#include "vqht/problem.hpp"

namespace vqht {

struct OptimizationResult {
    RVec theta, phi;
    std::vector<std::pair<int, double>> cost_trace;  ///< best-so-far objective
    long n_evals = 0;
    bool converged = false;
    std::uint64_t seed = 0;
    std::optional<double> constraint_residual;  ///< |N_S - target|
    double cost = 0.0;      ///< T^ve (binary) or success probability (k > 2)
    double estimate = 0.0;  ///< 2 T^ve for binary problems, else the success probability
    int restart = 0;        ///< index of the winning restart
};

/// Seeded starting point for one restart.
RVec initial_parameters(const HypothesisProblem& problem, std::mt19937_64& rng);

/// Multi-start simultaneous maximization over (theta, phi). Binary problems
/// optimize |p_0 - p_1| for 10 iterations, then the signed difference with
/// the sign fixed. Constrained problems are polished so N_S lands on target.
OptimizationResult run_vqht(const HypothesisProblem& problem, const OptimizerConfig& cfg, std::uint64_t seed);

/// One restart from a given starting point (no multi-start).
OptimizationResult run_vqht_from(const HypothesisProblem& problem, const RVec& x0, const OptimizerConfig& cfg,
                                 std::uint64_t seed);

/// Rescales the energy slots so N_S hits the target, then re-optimizes phi.
OptimizationResult polish_constraint(const HypothesisProblem& problem, OptimizationResult result,
                                     const OptimizerConfig& cfg);

struct NoiseRow {
    double variance = 0.0;
    double mean_cost = 0.0;
    double ratio = 0.0;  ///< mean_cost / noiseless cost
};

/// Adds i.i.d. N(0, variance) noise to every parameter and reports the mean
/// cost over n_samples draws relative to the noiseless cost.
std::vector<NoiseRow> noise_robustness(const OptimizationResult& result, const HypothesisProblem& problem,
                                       const std::vector<double>& variances, int n_samples, std::uint64_t seed);

/// Unpenalized cost used for reporting (T^ve or success probability).
double problem_cost(const HypothesisProblem& problem, const RVec& theta, const RVec& phi);

}  // namespace vqht
