#include "vqht/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "vqht/errors.hpp"
#include "vqht/subsystems.hpp"

namespace vqht {

namespace {

constexpr double kClamp = 1e-14;

void check_same_shape(const Mat& a, const Mat& b, const char* who)
{
    if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols()) {
        throw UsageError(std::string(who) + ": state shapes differ");
    }
}

// Both states normalized on the elementwise-larger cutoff grid.
std::pair<Mat, Mat> common_normalized(const FockState& a, const FockState& b)
{
    if (a.modes() != b.modes()) throw UsageError("Fock oracle: mode counts differ");
    std::vector<int> cut(a.cutoffs().size());
    for (std::size_t m = 0; m < cut.size(); ++m) cut[m] = std::max(a.cutoffs()[m], b.cutoffs()[m]);
    return {a.with_cutoffs(cut).normalized(), b.with_cutoffs(cut).normalized()};
}

}  // namespace

double trace_distance(const Mat& r0, const Mat& r1)
{
    check_same_shape(r0, r1, "trace_distance");
    return 0.5 * trace_norm_hermitian(r0 - r1);
}

double trace_distance(const DensityMatrix& r0, const DensityMatrix& r1)
{
    if (r0.dims() != r1.dims()) throw UsageError("trace_distance: dims differ");
    return trace_distance(r0.data(), r1.data());
}

double trace_distance(const FockState& r0, const FockState& r1)
{
    const auto [a, b] = common_normalized(r0, r1);
    return trace_distance(a, b);
}

HelstromResult helstrom(const Mat& r0, const Mat& r1, double prior0)
{
    check_same_shape(r0, r1, "helstrom");
    if (!(prior0 >= 0.0 && prior0 <= 1.0)) throw UsageError("helstrom: prior outside [0, 1]");
    const double prior1 = 1.0 - prior0;
    HelstromResult out;
    out.projector = spectral_projector(prior0 * r0 - prior1 * r1, 0.0);
    out.rates.alpha = 1.0 - (out.projector * r0).trace().real();
    out.rates.beta = (out.projector * r1).trace().real();
    out.min_error = prior0 * out.rates.alpha + prior1 * out.rates.beta;
    return out;
}

double diamond_unitary(const Mat& u)
{
    if (unitarity_error(u) > 1e-9) throw ValidationError("diamond_unitary: input not unitary");
    Eigen::ComplexEigenSolver<Mat> es(u, false);
    std::vector<double> ph;
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) ph.push_back(std::arg(es.eigenvalues()(k)));
    std::sort(ph.begin(), ph.end());
    // The eigenvalues occupy the complement of the widest empty arc.
    double gap = 2.0 * std::numbers::pi - (ph.back() - ph.front());
    for (std::size_t k = 1; k < ph.size(); ++k) gap = std::max(gap, ph[k] - ph[k - 1]);
    const double spread = 2.0 * std::numbers::pi - gap;
    if (spread >= std::numbers::pi) return 2.0;
    return 2.0 * std::sin(0.5 * spread);
}

double diamond_phase_flip(double p)
{
    if (!(p >= 0.0 && p <= 1.0)) throw UsageError("diamond_phase_flip: p outside [0, 1]");
    return 2.0 * p;
}

namespace {

// s e^x - 1 - (e^{s x} - 1) = sum_{n>=2} (s - s^n) x^n / n!, summed directly
// near x = 0 where the closed form cancels.
double amgm_gap(double x, double s)
{
    if (std::abs(x) >= 0.5) return s * std::expm1(x) - std::expm1(s * x);
    double sum = 0.0, xn = x, fact = 1.0, sn = s;
    for (int n = 2; n < 40; ++n) {
        xn *= x;
        fact *= n;
        sn *= s;
        const double term = (s - sn) * xn / fact;
        sum += term;
        if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

// Works with 1 - Q(s) = sum_ij |<v_i|w_j>|^2 (s l_i + (1-s) m_j - l_i^s m_j^(1-s))
// plus trace corrections. Every pair term is non-negative (weighted AM-GM),
// so nearly identical states keep full relative precision in 1 - Q.
struct ChernoffData {
    RVec l0, l1, log0, log1;
    RMat overlap;  // |<v_i|w_j>|^2
    double sum0 = 0.0, sum1 = 0.0;

    ChernoffData(const Mat& r0, const Mat& r1)
    {
        Eigen::SelfAdjointEigenSolver<Mat> e0(r0), e1(r1);
        auto clamp = [](double x) { return x <= kClamp ? 0.0 : x; };
        l0 = e0.eigenvalues().unaryExpr(clamp);
        l1 = e1.eigenvalues().unaryExpr(clamp);
        log0 = l0.unaryExpr([](double x) { return x > 0.0 ? std::log(x) : 0.0; });
        log1 = l1.unaryExpr([](double x) { return x > 0.0 ? std::log(x) : 0.0; });
        sum0 = l0.sum();
        sum1 = l1.sum();
        overlap = (e0.eigenvectors().adjoint() * e1.eigenvectors()).cwiseAbs2();
    }

    double deficit(double s) const
    {
        double acc = s * (1.0 - sum0) + (1.0 - s) * (1.0 - sum1);
        for (Eigen::Index j = 0; j < l1.size(); ++j) {
            for (Eigen::Index i = 0; i < l0.size(); ++i) {
                const double o = overlap(i, j);
                if (o == 0.0) continue;
                double g = 0.0;
                if (l0(i) == 0.0) g = (1.0 - s) * l1(j);
                else if (l1(j) == 0.0) g = s * l0(i);
                else g = l1(j) * amgm_gap(log0(i) - log1(j), s);
                acc += o * g;
            }
        }
        return acc;
    }
};

}  // namespace

double chernoff_objective(const Mat& r0, const Mat& r1, double s)
{
    check_same_shape(r0, r1, "chernoff_objective");
    return 1.0 - ChernoffData(r0, r1).deficit(s);
}

ChernoffResult chernoff_bound(const Mat& r0, const Mat& r1)
{
    check_same_shape(r0, r1, "chernoff_bound");
    const ChernoffData f(r0, r1);
    // Golden section on the deficit 1 - Q(s), which is concave in s.
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = 0.0, b = 1.0;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = f.deficit(c), fd = f.deficit(d);
    while (b - a > 1e-8) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f.deficit(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f.deficit(d);
        }
    }
    double best_s = 0.5 * (a + b), best = f.deficit(best_s);
    // Endpoints are not interior optima of the search; check them explicitly.
    for (double s : {0.0, 1.0}) {
        const double v = f.deficit(s);
        if (v > best) {
            best = v;
            best_s = s;
        }
    }
    best = std::clamp(best, 0.0, 1.0);
    return {1.0 - best, best_s, std::log1p(-best)};
}

ChernoffResult chernoff_bound(const FockState& r0, const FockState& r1)
{
    const auto [a, b] = common_normalized(r0, r1);
    return chernoff_bound(a, b);
}

double uhlmann_fidelity(const Mat& r0, const Mat& r1)
{
    check_same_shape(r0, r1, "uhlmann_fidelity");
    const Mat s0 = hermitian_function(r0, [](double x) { return x > 0.0 ? std::sqrt(x) : 0.0; });
    const Mat m = s0 * r1 * s0;
    const RVec ev = hermitian_eigenvalues(0.5 * (m + m.adjoint()));
    double acc = 0.0;
    for (Eigen::Index k = 0; k < ev.size(); ++k) acc += ev(k) > 0.0 ? std::sqrt(ev(k)) : 0.0;
    return std::min(1.0, acc * acc);
}

double uhlmann_fidelity(const FockState& r0, const FockState& r1)
{
    const auto [a, b] = common_normalized(r0, r1);
    return uhlmann_fidelity(a, b);
}

namespace {

struct QfiTerms {
    double value = 0.0;
    double small_part = 0.0;
};

QfiTerms sld_qfi(const Eigen::SelfAdjointEigenSolver<Mat>& es, const Mat& drho)
{
    const Mat d = es.eigenvectors().adjoint() * drho * es.eigenvectors();
    const RVec& l = es.eigenvalues();
    QfiTerms out;
    for (Eigen::Index k = 0; k < l.size(); ++k) {
        for (Eigen::Index j = 0; j < l.size(); ++j) {
            const double den = std::max(l(j), 0.0) + std::max(l(k), 0.0);
            if (den <= 1e-12) continue;
            const double term = 2.0 * std::norm(d(j, k)) / den;
            out.value += term;
            if (den < 1e-8) out.small_part += term;
        }
    }
    return out;
}

}  // namespace

QfiResult qfi(const std::function<Mat(double)>& family, double eta0, double d_eta)
{
    if (!(d_eta > 0.0)) throw UsageError("qfi: step must be positive");
    const Mat rho = family(eta0);
    Eigen::SelfAdjointEigenSolver<Mat> es(rho);
    const Mat d1 = (family(eta0 + d_eta) - family(eta0 - d_eta)) / (2.0 * d_eta);
    const Mat d2 = (family(eta0 + 0.5 * d_eta) - family(eta0 - 0.5 * d_eta)) / d_eta;
    const QfiTerms full = sld_qfi(es, d1);
    const QfiTerms half = sld_qfi(es, d2);
    QfiResult out;
    out.value = full.value;
    out.half_step_value = half.value;
    const double scale = std::max(std::abs(full.value), 1e-300);
    out.richardson_ok = std::abs(full.value - half.value) <= 0.01 * scale || full.value < 1e-12;
    out.ill_conditioned = full.small_part > 0.5 * full.value && full.value > 0.0;
    return out;
}

QfiResult qfi_illumination(const FockState& probe, double n_b, double eta0, double d_eta,
                           const CutoffPolicy& policy)
{
    if (eta0 - d_eta < 0.0 || eta0 + d_eta > 1.0) {
        throw UsageError("qfi_illumination: finite-difference stencil leaves [0, 1]");
    }
    // Evaluate every member on one grid so the finite differences line up.
    const std::vector<int> cut = illumination_channel(probe, eta0 + d_eta, n_b, policy).cutoffs();
    auto family = [&](double eta) -> Mat {
        return illumination_channel(probe, eta, n_b, policy).with_cutoffs(cut).normalized();
    };
    return qfi(family, eta0, d_eta);
}

std::vector<double> schmidt_values(const Mat& rho, const std::vector<int>& dims, int top_k)
{
    if (dims.size() != 2) throw UsageError("schmidt_values: need a bipartite dims list");
    if (rho.rows() != total_dim(dims)) throw UsageError("schmidt_values: shape mismatch");
    const double tr = rho.trace().real();
    const double purity = (rho * rho).trace().real() / (tr * tr);
    if (purity < 1.0 - 1e-6) throw UsageError("schmidt_values: state is not pure");
    const int keep[1] = {0};
    RVec ev = hermitian_eigenvalues(partial_trace(rho, dims, keep) / tr);
    std::vector<double> out(ev.data(), ev.data() + ev.size());
    std::sort(out.begin(), out.end(), std::greater<>());
    out.resize(std::min<std::size_t>(out.size(), static_cast<std::size_t>(std::max(top_k, 0))));
    return out;
}

std::vector<double> schmidt_values(const FockState& rho, int top_k)
{
    if (rho.modes() != 2) throw UsageError("schmidt_values: need a two-mode state");
    return schmidt_values(rho.data(), rho.cutoffs(), top_k);
}

double von_neumann_entropy(const Mat& rho)
{
    const RVec ev = hermitian_eigenvalues(rho);
    double s = 0.0;
    for (Eigen::Index k = 0; k < ev.size(); ++k) {
        if (ev(k) > kClamp) s -= ev(k) * std::log(ev(k));
    }
    return s;
}

// ---------------------------------------------------------------- POVM search

namespace {

double success_of(const std::vector<Mat>& states, const std::vector<Mat>& povm)
{
    double acc = 0.0;
    for (std::size_t i = 0; i < states.size(); ++i) acc += (povm[i] * states[i]).trace().real();
    return acc / static_cast<double>(states.size());
}

void povm_sweep(const std::vector<Mat>& states, std::vector<Mat>& povm)
{
    const Eigen::Index n = states[0].rows();
    const auto k = povm.size();
    std::vector<Mat> y(k);
    Mat x = 1e-12 * Mat::Identity(n, n);
    for (std::size_t i = 0; i < k; ++i) {
        y[i] = states[i] * povm[i] * states[i];
        x += y[i];
    }
    x = 0.5 * (x + x.adjoint());
    const Mat xi = hermitian_function(x, [](double v) { return v > 0.0 ? 1.0 / std::sqrt(v) : 0.0; });
    Mat sum = Mat::Zero(n, n);
    for (std::size_t i = 0; i < k; ++i) {
        povm[i] = xi * y[i] * xi;
        povm[i] = 0.5 * (povm[i] + povm[i].adjoint());
        sum += povm[i];
    }
    // Spread any completeness residual (regularization, null spaces) evenly.
    const Mat residual = (Mat::Identity(n, n) - sum) / static_cast<double>(k);
    for (auto& p : povm) p += residual;
}

PovmSolution povm_fixed_point_from(const std::vector<Mat>& states, std::vector<Mat> povm,
                                   int iterations, double tol)
{
    PovmSolution best;
    best.elements = povm;
    best.success = success_of(states, povm);
    for (int it = 0; it < iterations; ++it) {
        const std::vector<Mat> prev = povm;
        povm_sweep(states, povm);
        const double s = success_of(states, povm);
        if (s > best.success) {
            best.success = s;
            best.elements = povm;
        }
        best.history.push_back(best.success);
        double change = 0.0;
        for (std::size_t i = 0; i < povm.size(); ++i) {
            change = std::max(change, (povm[i] - prev[i]).cwiseAbs().maxCoeff());
        }
        if (change < tol) break;
    }
    return best;
}

}  // namespace

PovmSolution povm_fixed_point(const std::vector<Mat>& states, int iterations, double tol)
{
    if (states.size() < 2) throw UsageError("povm_fixed_point: need at least 2 states");
    const Eigen::Index n = states[0].rows();
    for (const auto& s : states) check_same_shape(s, states[0], "povm_fixed_point");
    std::vector<Mat> povm(states.size(), Mat::Identity(n, n) / static_cast<double>(states.size()));
    return povm_fixed_point_from(states, std::move(povm), iterations, tol);
}

MultiHypothesisResult multi_hypothesis_opt(const std::vector<KrausChannel>& channels, int ref_dim,
                                           int iterations, int restarts, std::uint64_t seed)
{
    if (channels.size() < 2) throw UsageError("multi_hypothesis_opt: need k >= 2 channels");
    if (ref_dim < 1) throw UsageError("multi_hypothesis_opt: ref_dim must be >= 1");
    const auto sys = channels[0].in_dims();
    for (const auto& ch : channels) {
        if (ch.in_dims() != sys || ch.out_dims() != sys) {
            throw UsageError("multi_hypothesis_opt: channels must share input and output dims");
        }
    }
    const Eigen::Index ds = total_dim(sys);
    const Eigen::Index n = ds * ref_dim;
    const Mat id_ref = Mat::Identity(ref_dim, ref_dim);
    std::vector<std::vector<Mat>> lifted;
    for (const auto& ch : channels) {
        std::vector<Mat> ks;
        for (const auto& k : ch.kraus()) ks.push_back(kron(k, id_ref));
        lifted.push_back(std::move(ks));
    }
    const auto k = channels.size();
    auto outputs = [&](const Vec& psi) {
        std::vector<Mat> out;
        const Mat rho = psi * psi.adjoint();
        for (const auto& ks : lifted) {
            Mat o = Mat::Zero(n, n);
            for (const auto& kk : ks) o.noalias() += kk * rho * kk.adjoint();
            out.push_back(o);
        }
        return out;
    };

    MultiHypothesisResult best;
    best.success = -1.0;
    for (int rs = 0; rs < restarts; ++rs) {
        Vec psi = haar_random_ket(static_cast<int>(n), seed + static_cast<std::uint64_t>(rs));
        std::vector<Mat> povm(k, Mat::Identity(n, n) / static_cast<double>(k));
        double run_best = -1.0;
        std::vector<double> hist;
        Vec run_psi = psi;
        std::vector<Mat> run_povm = povm;
        for (int it = 0; it < iterations; ++it) {
            PovmSolution ps = povm_fixed_point_from(outputs(psi), povm, 200, 1e-10);
            povm = ps.elements;
            // Probe step: top eigenvector of the averaged Heisenberg-picture POVM.
            Mat m = Mat::Zero(n, n);
            for (std::size_t i = 0; i < k; ++i) {
                for (const auto& kk : lifted[i]) m.noalias() += kk.adjoint() * povm[i] * kk;
            }
            m /= static_cast<double>(k);
            Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.adjoint()));
            psi = es.eigenvectors().col(n - 1);
            const double s = success_of(outputs(psi), povm);
            if (s > run_best) {
                run_best = s;
                run_psi = psi;
                run_povm = povm;
            }
            hist.push_back(run_best);
        }
        if (run_best > best.success) {
            best.success = run_best;
            best.probe = run_psi;
            best.povm = run_povm;
            best.history = hist;
        }
    }
    return best;
}

NeighborhoodReport epsilon_neighborhood_check(const KrausChannel& e0, const KrausChannel& e1,
                                              const DensityMatrix& probe, std::span<const int> targets,
                                              double eps, int n_trials, std::uint64_t seed)
{
    if (!(eps >= 0.0 && eps <= 1.0)) throw UsageError("epsilon_neighborhood_check: eps outside [0, 1]");
    NeighborhoodReport rep;
    rep.d = trace_distance(apply_channel(probe, e0, targets), apply_channel(probe, e1, targets));
    rep.min_distance = rep.d;
    rep.max_distance = rep.d;
    const double lo = rep.d * (1.0 - 2.0 * eps) - 1e-9, hi = rep.d + 1e-9;
    for (int t = 0; t < n_trials; ++t) {
        const std::uint64_t s = seed + static_cast<std::uint64_t>(t);
        // Mixing with weight eps moves the probe by at most eps in trace distance.
        const DensityMatrix sigma = random_density_matrix(probe.dims(), 1 + static_cast<int>(s % 3), s);
        Mat mixed = (1.0 - eps) * probe.data() + eps * sigma.data();
        const DensityMatrix pert(probe.dims(), 0.5 * (mixed + mixed.adjoint()));
        const double d = trace_distance(apply_channel(pert, e0, targets), apply_channel(pert, e1, targets));
        rep.min_distance = std::min(rep.min_distance, d);
        rep.max_distance = std::max(rep.max_distance, d);
        if (d < lo || d > hi) {
            rep.pass = false;
            rep.violating_trials.push_back(t);
        }
    }
    return rep;
}

}  // namespace vqht
