#include "vqht/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <random>

#include "vqht/errors.hpp"

namespace vqht {

OptimizerKind parse_optimizer(const std::string& name)
{
    if (name == "nelder-mead") return OptimizerKind::NelderMead;
    if (name == "spsa") return OptimizerKind::Spsa;
    if (name == "gradient") return OptimizerKind::Gradient;
    throw UsageError("unknown optimizer '" + name + "' (expected nelder-mead, spsa or gradient)");
}

std::string optimizer_name(OptimizerKind kind)
{
    switch (kind) {
    case OptimizerKind::NelderMead: return "nelder-mead";
    case OptimizerKind::Spsa: return "spsa";
    case OptimizerKind::Gradient: return "gradient";
    }
    return "?";
}

namespace {

// Tracks the best-so-far history and the stall-based stopping rule.
class Progress {
public:
    Progress(const OptimizerConfig& cfg, OptimizeTrace& out) : cfg_(cfg), out_(out) {}

    // Returns true when the run should stop.
    bool step(int iter)
    {
        out_.trace.emplace_back(iter, out_.best);
        out_.iterations = iter + 1;
        history_.push_back(out_.best);
        if (static_cast<int>(history_.size()) > cfg_.patience) {
            const double gain = history_.back() - history_.front();
            history_.pop_front();
            if (gain < cfg_.tol) {
                out_.converged = true;
                return true;
            }
        }
        return false;
    }

private:
    const OptimizerConfig& cfg_;
    OptimizeTrace& out_;
    std::deque<double> history_;
};

}  // namespace

OptimizeTrace maximize(const Objective& f, const RVec& x0, const OptimizerConfig& cfg, std::uint64_t seed)
{
    if (x0.size() == 0) {
        OptimizeTrace t;
        t.x = x0;
        t.best = f(x0);
        t.n_evals = 1;
        t.converged = true;
        t.trace.emplace_back(0, t.best);
        return t;
    }
    switch (cfg.kind) {
    case OptimizerKind::NelderMead: return nelder_mead(f, x0, cfg);
    case OptimizerKind::Spsa: return spsa(f, x0, cfg, seed);
    case OptimizerKind::Gradient: return gradient_ascent(f, x0, cfg);
    }
    throw InternalError("maximize: unknown optimizer");
}

OptimizeTrace nelder_mead(const Objective& f, const RVec& x0, const OptimizerConfig& cfg)
{
    // Adaptive coefficients for higher dimensions; we minimize g = -f.
    const auto n = x0.size();
    const double dn = static_cast<double>(n);
    const double alpha = 1.0, beta = 1.0 + 2.0 / dn, gamma = 0.75 - 0.5 / dn, delta = 1.0 - 1.0 / dn;
    OptimizeTrace out;
    auto g = [&](const RVec& x) {
        ++out.n_evals;
        const double v = -f(x);
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    };
    std::vector<RVec> pts;
    std::vector<double> val;
    pts.push_back(x0);
    val.push_back(g(x0));
    for (Eigen::Index i = 0; i < n; ++i) {
        RVec x = x0;
        x(i) += cfg.simplex_step;
        pts.push_back(x);
        val.push_back(g(x));
    }
    std::vector<std::size_t> order(pts.size());
    auto sort_simplex = [&] {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return val[a] < val[b]; });
        std::vector<RVec> p2;
        std::vector<double> v2;
        for (auto i : order) {
            p2.push_back(pts[i]);
            v2.push_back(val[i]);
        }
        pts = std::move(p2);
        val = std::move(v2);
    };
    sort_simplex();
    out.best = -val[0];
    out.x = pts[0];
    Progress prog(cfg, out);
    for (int it = 0; it < cfg.max_iters; ++it) {
        const std::size_t w = pts.size() - 1;
        RVec c = RVec::Zero(n);
        for (std::size_t i = 0; i < w; ++i) c += pts[i];
        c /= dn;
        const RVec xr = c + alpha * (c - pts[w]);
        const double fr = g(xr);
        if (fr < val[0]) {
            const RVec xe = c + beta * (xr - c);
            const double fe = g(xe);
            if (fe < fr) {
                pts[w] = xe;
                val[w] = fe;
            } else {
                pts[w] = xr;
                val[w] = fr;
            }
        } else if (fr < val[w - 1]) {
            pts[w] = xr;
            val[w] = fr;
        } else {
            const bool outside = fr < val[w];
            const RVec xc = outside ? RVec(c + gamma * (xr - c)) : RVec(c - gamma * (c - pts[w]));
            const double fc = g(xc);
            if (fc < (outside ? fr : val[w])) {
                pts[w] = xc;
                val[w] = fc;
            } else {
                for (std::size_t i = 1; i < pts.size(); ++i) {
                    pts[i] = pts[0] + delta * (pts[i] - pts[0]);
                    val[i] = g(pts[i]);
                }
            }
        }
        sort_simplex();
        if (-val[0] > out.best) {
            out.best = -val[0];
            out.x = pts[0];
        }
        if (prog.step(it)) break;
    }
    return out;
}

OptimizeTrace spsa(const Objective& f, const RVec& x0, const OptimizerConfig& cfg, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(0.5);
    OptimizeTrace out;
    RVec x = x0;
    out.x = x0;
    out.best = f(x0);
    out.n_evals = 1;
    Progress prog(cfg, out);
    const double big_a = 0.1 * cfg.max_iters;
    for (int it = 0; it < cfg.max_iters; ++it) {
        const double ak = cfg.spsa_a / std::pow(it + 1.0 + big_a, 0.602);
        const double ck = cfg.spsa_c / std::pow(it + 1.0, 0.101);
        RVec d(x.size());
        for (Eigen::Index i = 0; i < d.size(); ++i) d(i) = coin(rng) ? 1.0 : -1.0;
        const double fp = f(x + ck * d), fm = f(x - ck * d);
        out.n_evals += 2;
        // d_i = +-1, so 1/d_i = d_i.
        x += ak * (fp - fm) / (2.0 * ck) * d;
        const double fx = f(x);
        ++out.n_evals;
        if (fx > out.best) {
            out.best = fx;
            out.x = x;
        }
        if (prog.step(it)) break;
    }
    return out;
}

RVec fd_gradient(const Objective& f, const RVec& x, double h, long& n_evals)
{
    RVec grad(x.size());
    RVec y = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        y(i) = x(i) + h;
        const double fp = f(y);
        y(i) = x(i) - h;
        const double fm = f(y);
        y(i) = x(i);
        grad(i) = (fp - fm) / (2.0 * h);
        if (!std::isfinite(grad(i))) grad(i) = 0.0;
    }
    n_evals += 2 * x.size();
    return grad;
}

OptimizeTrace gradient_ascent(const Objective& f, const RVec& x0, const OptimizerConfig& cfg)
{
    // Limited-memory BFGS direction on -f with Armijo backtracking.
    constexpr int memory = 10;
    OptimizeTrace out;
    RVec x = x0;
    double fx = f(x);
    out.n_evals = 1;
    out.best = fx;
    out.x = x;
    RVec grad = fd_gradient(f, x, cfg.fd_step, out.n_evals);
    std::deque<RVec> s_hist, y_hist;
    double step = 1.0;
    Progress prog(cfg, out);
    for (int it = 0; it < cfg.max_iters; ++it) {
        // Two-loop recursion on the ascent gradient.
        RVec q = grad;
        const auto m = s_hist.size();
        std::vector<double> a(m), rho(m);
        for (std::size_t i = m; i-- > 0;) {
            rho[i] = 1.0 / y_hist[i].dot(s_hist[i]);
            a[i] = rho[i] * s_hist[i].dot(q);
            q -= a[i] * y_hist[i];
        }
        if (m > 0) q *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
        for (std::size_t i = 0; i < m; ++i) {
            const double b = rho[i] * y_hist[i].dot(q);
            q += (a[i] - b) * s_hist[i];
        }
        RVec dir = q;
        double slope = dir.dot(grad);
        if (!(slope > 0.0)) {
            dir = grad;
            slope = grad.squaredNorm();
            s_hist.clear();
            y_hist.clear();
        }
        if (slope <= 0.0) {
            if (prog.step(it)) break;
            continue;
        }
        double t = m > 0 ? 1.0 : std::min(1.0, step / std::max(dir.norm(), 1e-300));
        bool accepted = false;
        RVec xn;
        double fn = 0.0;
        for (int ls = 0; ls < 40; ++ls) {
            xn = x + t * dir;
            fn = f(xn);
            ++out.n_evals;
            if (std::isfinite(fn) && fn >= fx + 1e-4 * t * slope) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (accepted) {
            const RVec gn = fd_gradient(f, xn, cfg.fd_step, out.n_evals);
            const RVec s = xn - x;
            // Curvature pair for the minimization of -f.
            const RVec yv = grad - gn;
            if (yv.dot(s) > 1e-12 * s.norm() * yv.norm()) {
                s_hist.push_back(s);
                y_hist.push_back(yv);
                if (static_cast<int>(s_hist.size()) > memory) {
                    s_hist.pop_front();
                    y_hist.pop_front();
                }
            }
            step = std::max(1e-8, 2.0 * s.norm());
            x = xn;
            fx = fn;
            grad = gn;
            if (fx > out.best) {
                out.best = fx;
                out.x = x;
            }
        } else {
            s_hist.clear();
            y_hist.clear();
            step *= 0.1;
        }
        if (prog.step(it)) break;
        if (grad.norm() == 0.0) {
            out.converged = true;
            break;
        }
    }
    return out;
}

}  // namespace vqht
