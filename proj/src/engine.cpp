#include "vqht/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "vqht/errors.hpp"
#include "vqht/parallel.hpp"

namespace vqht {

namespace {

struct Split {
    RVec theta, phi;
};

Split split(const HypothesisProblem& p, const RVec& x)
{
    return {x.head(p.n_theta()), x.tail(p.n_phi())};
}

double penalty(const HypothesisProblem& p, const RVec& theta)
{
    if (!p.constraint()) return 0.0;
    const double dn = signal_photons(p, theta) - p.constraint()->target;
    return p.constraint()->lambda * dn * dn;
}

// Objective guard: overflowing trial points (huge squeezing in a line search)
// score as -inf instead of aborting the run.
template <class F>
auto guarded(F f)
{
    return [f](const RVec& x) {
        try {
            const double v = f(x);
            return std::isnan(v) ? -std::numeric_limits<double>::infinity() : v;
        } catch (const NumericalError&) {
            return -std::numeric_limits<double>::infinity();
        }
    };
}

RVec random_receiver(const HypothesisProblem& p, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
    std::normal_distribution<double> n01(0.0, 1.0);
    RVec phi(p.n_phi());
    for (const auto& g : p.measure_circuit().gates()) {
        for (int s : g.slots) {
            switch (g.kind) {
            case GateKind::Displace:
            case GateKind::CPhase: phi(s) = 0.5 * n01(rng); break;
            default: phi(s) = angle(rng); break;
            }
        }
    }
    return phi;
}

void fill_reporting(const HypothesisProblem& p, OptimizationResult& r)
{
    r.cost = problem_cost(p, r.theta, r.phi);
    r.estimate = p.k() == 2 ? 2.0 * r.cost : r.cost;
    if (p.constraint()) r.constraint_residual = std::abs(signal_photons(p, r.theta) - p.constraint()->target);
}

}  // namespace

double problem_cost(const HypothesisProblem& problem, const RVec& theta, const RVec& phi)
{
    return problem.k() == 2 ? cost_tve(problem, theta, phi) : cost_success_multi(problem, theta, phi);
}

RVec initial_parameters(const HypothesisProblem& problem, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
    std::normal_distribution<double> n01(0.0, 1.0);
    RVec x(problem.n_theta() + problem.n_phi());
    if (!problem.is_bosonic()) {
        for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = angle(rng);
        return x;
    }
    // Bosonic probes start near the squeezed-vacuum family at the target
    // energy; random receivers around the identity.
    const double target = problem.constraint() ? problem.constraint()->target : 0.1;
    std::uniform_real_distribution<double> frac(0.6, 1.0);
    for (const auto& g : problem.probe_circuit().gates()) {
        for (std::size_t k = 0; k < g.slots.size(); ++k) {
            double v = 0.0;
            switch (g.kind) {
            case GateKind::Displace: v = 0.1 * std::sqrt(target) * n01(rng); break;
            case GateKind::Squeeze2: v = k == 0 ? std::asinh(std::sqrt(target)) * frac(rng) : angle(rng); break;
            default: v = angle(rng); break;
            }
            x(g.slots[k]) = v;
        }
    }
    x.tail(problem.n_phi()) = random_receiver(problem, rng);
    return x;
}

OptimizationResult run_vqht_from(const HypothesisProblem& problem, const RVec& x0, const OptimizerConfig& cfg,
                                 std::uint64_t seed)
{
    if (x0.size() != problem.n_theta() + problem.n_phi()) throw UsageError("run_vqht: start vector size mismatch");
    OptimizationResult res;
    res.seed = seed;
    OptimizeTrace tr;
    RVec start = x0;
    OptimizeTrace warmup;
    if (problem.is_bosonic() && problem.n_theta() > 0) {
        // Fit the receiver to the starting probe first; joint optimization
        // from a random receiver drifts toward displacement-heavy probes.
        // Most receiver starts stall in the Gaussian-receiver basin, so
        // several are tried and the best one is kept.
        const RVec theta0 = x0.head(problem.n_theta());
        const double pen0 = penalty(problem, theta0);
        auto f_rx = [&](const RVec& phi) { return std::abs(signed_tve(problem, theta0, phi)) - pen0; };
        std::mt19937_64 rng(seed + 5);
        double best = -std::numeric_limits<double>::infinity();
        for (int k = 0; k < std::max(1, cfg.receiver_starts); ++k) {
            const RVec phi0 = k == 0 ? RVec(x0.tail(problem.n_phi())) : random_receiver(problem, rng);
            const OptimizeTrace fit = maximize(guarded(f_rx), phi0, cfg, seed + 3 + 11ULL * static_cast<std::uint64_t>(k));
            for (auto [it, v] : fit.trace) {
                best = std::max(best, v);
                warmup.trace.emplace_back(it + warmup.iterations, best);
            }
            warmup.iterations += fit.iterations;
            warmup.n_evals += fit.n_evals;
            if (k == 0 || fit.best > warmup.best) {
                warmup.best = fit.best;
                warmup.x = fit.x;
            }
        }
        start.tail(problem.n_phi()) = warmup.x;
    }
    if (problem.k() == 2) {
        auto f_abs = [&](const RVec& x) {
            const auto [t, ph] = split(problem, x);
            return std::abs(signed_tve(problem, t, ph)) - penalty(problem, t);
        };
        OptimizerConfig warm = cfg;
        warm.max_iters = std::min(10, cfg.max_iters);
        warm.patience = cfg.max_iters + 1;
        const OptimizeTrace t1 = maximize(guarded(f_abs), start, warm, seed);
        const auto [t1t, t1p] = split(problem, t1.x);
        const double sign = signed_tve(problem, t1t, t1p) >= 0.0 ? 1.0 : -1.0;
        auto f_signed = [&](const RVec& x) {
            const auto [t, ph] = split(problem, x);
            return sign * signed_tve(problem, t, ph) - penalty(problem, t);
        };
        OptimizerConfig main = cfg;
        main.max_iters = std::max(0, cfg.max_iters - t1.iterations);
        tr = main.max_iters > 0 ? maximize(guarded(f_signed), t1.x, main, seed + 1) : t1;
        if (main.max_iters > 0) {
            // Stitch both phases into one best-so-far trace.
            std::vector<std::pair<int, double>> trace = t1.trace;
            double best = t1.best;
            for (auto [it, v] : tr.trace) {
                best = std::max(best, v);
                trace.emplace_back(it + t1.iterations, best);
            }
            if (t1.best > tr.best) {
                tr.x = t1.x;
                tr.best = t1.best;
            }
            tr.trace = std::move(trace);
            tr.n_evals += t1.n_evals;
        }
    } else {
        auto f = [&](const RVec& x) {
            const auto [t, ph] = split(problem, x);
            return cost_success_multi(problem, t, ph) - penalty(problem, t);
        };
        tr = maximize(guarded(f), start, cfg, seed);
    }
    if (!warmup.trace.empty()) {
        std::vector<std::pair<int, double>> trace = warmup.trace;
        double best = warmup.best;
        for (auto [it, v] : tr.trace) {
            best = std::max(best, v);
            trace.emplace_back(it + warmup.iterations, best);
        }
        tr.trace = std::move(trace);
        tr.n_evals += warmup.n_evals;
    }
    const auto [t, ph] = split(problem, tr.x);
    res.theta = t;
    res.phi = ph;
    res.cost_trace = std::move(tr.trace);
    res.n_evals = tr.n_evals;
    res.converged = tr.converged;
    if (problem.constraint()) return polish_constraint(problem, std::move(res), cfg);
    fill_reporting(problem, res);
    return res;
}

OptimizationResult polish_constraint(const HypothesisProblem& problem, OptimizationResult result,
                                     const OptimizerConfig& cfg)
{
    if (!problem.constraint()) {
        fill_reporting(problem, result);
        return result;
    }
    const double target = problem.constraint()->target;
    const auto slots = problem.energy_slots();
    const RVec base = result.theta;
    auto scaled = [&](double c) {
        RVec t = base;
        for (int s : slots) t(s) *= c;
        return t;
    };
    auto photons = [&](double c) { return signal_photons(problem, scaled(c)); };
    double lo = 0.0, hi = 1.0;
    int guard = 0;
    while (photons(hi) < target && guard++ < 60) hi *= 2.0;
    if (photons(hi) < target) throw NumericalError("polish_constraint: cannot reach target photon number");
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        (photons(mid) < target ? lo : hi) = mid;
    }
    const double c = std::abs(photons(lo) - target) < std::abs(photons(hi) - target) ? lo : hi;
    result.theta = scaled(c);

    // Receiver-only re-optimization at the fixed probe.
    const RVec theta = result.theta;
    double sign = 1.0;
    if (problem.k() == 2) sign = signed_tve(problem, theta, result.phi) >= 0.0 ? 1.0 : -1.0;
    auto f = [&](const RVec& phi) {
        return problem.k() == 2 ? sign * signed_tve(problem, theta, phi) : cost_success_multi(problem, theta, phi);
    };
    const OptimizeTrace tr = maximize(guarded(f), result.phi, cfg, result.seed + 2);
    result.phi = tr.x;
    result.n_evals += tr.n_evals;
    fill_reporting(problem, result);
    return result;
}

OptimizationResult run_vqht(const HypothesisProblem& problem, const OptimizerConfig& cfg, std::uint64_t seed)
{
    const int restarts = std::max(1, cfg.restarts);
    std::vector<OptimizationResult> runs(static_cast<std::size_t>(restarts));
    parallel_for(restarts, worker_count(cfg.threads), [&](int r) {
        const std::uint64_t s = seed + 7919ULL * static_cast<std::uint64_t>(r);
        std::mt19937_64 rng(s);
        const RVec x0 = initial_parameters(problem, rng);
        runs[static_cast<std::size_t>(r)] = run_vqht_from(problem, x0, cfg, s);
    });
    // Order-fixed reduction: highest objective, lowest restart index on ties.
    std::size_t best = 0;
    long evals = 0;
    auto score = [&](const OptimizationResult& r) { return r.cost - penalty(problem, r.theta); };
    for (std::size_t r = 0; r < runs.size(); ++r) {
        evals += runs[r].n_evals;
        if (score(runs[r]) > score(runs[best])) best = r;
    }
    OptimizationResult out = runs[best];
    out.n_evals = evals;
    out.restart = static_cast<int>(best);
    out.seed = seed;
    return out;
}

std::vector<NoiseRow> noise_robustness(const OptimizationResult& result, const HypothesisProblem& problem,
                                       const std::vector<double>& variances, int n_samples, std::uint64_t seed)
{
    if (n_samples < 1) throw UsageError("noise_robustness: n_samples must be >= 1");
    const double base = problem_cost(problem, result.theta, result.phi);
    const Eigen::Index nt = result.theta.size(), np = result.phi.size();
    // Common random numbers across noise levels: the same standard-normal
    // draws are scaled by each standard deviation.
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n01(0.0, 1.0);
    std::vector<RVec> z(static_cast<std::size_t>(n_samples), RVec(nt + np));
    for (auto& v : z) {
        for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = n01(rng);
    }
    std::vector<NoiseRow> out;
    for (double var : variances) {
        if (!(var >= 0.0)) throw UsageError("noise_robustness: negative variance");
        const double sd = std::sqrt(var);
        double acc = 0.0;
        for (const auto& v : z) {
            const RVec t = result.theta + sd * v.head(nt);
            const RVec p = result.phi + sd * v.tail(np);
            acc += problem_cost(problem, t, p);
        }
        NoiseRow row;
        row.variance = var;
        row.mean_cost = var == 0.0 ? base : acc / n_samples;
        row.ratio = base > 0.0 ? row.mean_cost / base : 1.0;
        out.push_back(row);
    }
    return out;
}

}  // namespace vqht
