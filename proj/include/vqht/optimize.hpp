#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "vqht/linalg.hpp"

namespace vqht {

enum class OptimizerKind { NelderMead, Spsa, Gradient };

OptimizerKind parse_optimizer(const std::string& name);
std::string optimizer_name(OptimizerKind kind);

struct OptimizerConfig {
    OptimizerKind kind = OptimizerKind::NelderMead;
    int max_iters = 5000;
    double tol = 1e-6;      ///< minimum best-cost improvement ...
    int patience = 50;      ///< ... over this many consecutive iterations
    int restarts = 8;
    double fd_step = 1e-4;  ///< central finite-difference step (Gradient)
    double simplex_step = 0.5;
    double spsa_a = 0.2;
    double spsa_c = 0.1;
    int receiver_starts = 8;  ///< receiver fits before joint optimization (bosonic)
    int threads = 0;  ///< 0: VQHT_THREADS or hardware concurrency
};

struct OptimizeTrace {
    RVec x;
    double best = 0.0;
    std::vector<std::pair<int, double>> trace;  ///< (iteration, best-so-far)
    long n_evals = 0;
    bool converged = false;
    int iterations = 0;
};

using Objective = std::function<double(const RVec&)>;

/// Maximizes f from x0. Deterministic in (x0, cfg, seed). The reported trace
/// is the best value seen so far, so it never decreases.
OptimizeTrace maximize(const Objective& f, const RVec& x0, const OptimizerConfig& cfg, std::uint64_t seed);

OptimizeTrace nelder_mead(const Objective& f, const RVec& x0, const OptimizerConfig& cfg);
OptimizeTrace spsa(const Objective& f, const RVec& x0, const OptimizerConfig& cfg, std::uint64_t seed);
OptimizeTrace gradient_ascent(const Objective& f, const RVec& x0, const OptimizerConfig& cfg);

/// Central-difference gradient with step h.
RVec fd_gradient(const Objective& f, const RVec& x, double h, long& n_evals);

}  // namespace vqht
