#include "vqht/bosonic.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "vqht/errors.hpp"
#include "vqht/subsystems.hpp"

namespace vqht {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

struct Entry {
    Eigen::Index row, col;
    cplx value;
};

int find_root(std::vector<int>& parent, int x)
{
    while (parent[x] != x) {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    return x;
}

// exp(G) for a sparse generator on `padded` levels, restricted to the
// `cut` levels of every mode. The exponential is taken blockwise over the
// connected components of the sparsity graph.
Mat sparse_expm_projected(const std::vector<Entry>& gen, const std::vector<int>& padded,
                          const std::vector<int>& cut)
{
    const int n = static_cast<int>(total_dim(padded));
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    for (const Entry& e : gen) {
        const int a = find_root(parent, static_cast<int>(e.row));
        const int b = find_root(parent, static_cast<int>(e.col));
        if (a != b) parent[a] = b;
    }
    std::map<int, std::vector<int>> comps;
    for (int i = 0; i < n; ++i) comps[find_root(parent, i)].push_back(i);

    // Position of every padded index inside its component, and its image in
    // the unpadded space (-1 when outside).
    std::vector<int> slot(n), target(n);
    for (auto& [root, members] : comps) {
        for (std::size_t k = 0; k < members.size(); ++k) slot[members[k]] = static_cast<int>(k);
    }
    for (int i = 0; i < n; ++i) {
        const auto digits = unravel_index(i, padded);
        int idx = 0;
        bool inside = true;
        for (std::size_t m = 0; m < digits.size(); ++m) {
            if (digits[m] >= cut[m]) inside = false;
            idx = idx * cut[m] + std::min(digits[m], cut[m] - 1);
        }
        target[i] = inside ? idx : -1;
    }

    std::map<int, Mat> blocks;
    for (auto& [root, members] : comps) {
        const auto sz = static_cast<Eigen::Index>(members.size());
        blocks.emplace(root, Mat::Zero(sz, sz));
    }
    for (const Entry& e : gen) {
        const int r = find_root(parent, static_cast<int>(e.row));
        blocks[r](slot[e.row], slot[e.col]) += e.value;
    }

    const Eigen::Index m = total_dim(cut);
    Mat out = Mat::Zero(m, m);
    for (auto& [root, members] : comps) {
        const Mat ex = expm(blocks[root]);
        for (std::size_t a = 0; a < members.size(); ++a) {
            const int ta = target[members[a]];
            if (ta < 0) continue;
            for (std::size_t b = 0; b < members.size(); ++b) {
                const int tb = target[members[b]];
                if (tb < 0) continue;
                out(ta, tb) = ex(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
            }
        }
    }
    return out;
}

// Squeezing or beam-splitter generator on the padded grid (na, nb) -> na * db + nb.
std::vector<Entry> two_mode_generator(int da, int db, double r_or_theta, double phi, bool squeeze)
{
    std::vector<Entry> out;
    const cplx w = std::polar(r_or_theta, phi);
    auto idx = [db](int na, int nb) { return static_cast<Eigen::Index>(na) * db + nb; };
    for (int na = 0; na < da; ++na) {
        for (int nb = 0; nb < db; ++nb) {
            if (squeeze) {
                // w a^dag b^dag - w* a b
                if (na + 1 < da && nb + 1 < db) {
                    const double amp = std::sqrt(double(na + 1) * (nb + 1));
                    out.push_back({idx(na + 1, nb + 1), idx(na, nb), w * amp});
                    out.push_back({idx(na, nb), idx(na + 1, nb + 1), -std::conj(w) * amp});
                }
            } else {
                // w a^dag b - w* a b^dag
                if (na + 1 < da && nb >= 1) {
                    const double amp = std::sqrt(double(na + 1) * nb);
                    out.push_back({idx(na + 1, nb - 1), idx(na, nb), w * amp});
                    out.push_back({idx(na, nb), idx(na + 1, nb - 1), -std::conj(w) * amp});
                }
            }
        }
    }
    return out;
}

Mat position(int d)
{
    const Mat a = annihilation(d);
    return (a + a.adjoint()) / std::sqrt(2.0);
}

void check_mode(int mode, int modes, const char* who)
{
    if (mode < 0 || mode >= modes) {
        throw UsageError(std::string(who) + ": mode " + std::to_string(mode) + " out of range");
    }
}

Mat hermitize(const Mat& m)
{
    return 0.5 * (m + m.adjoint());
}

}  // namespace

// ---------------------------------------------------------------- FockState

FockState::FockState(std::vector<int> cutoffs, Mat data, double trace_deficit, double leakage)
    : cutoffs_(std::move(cutoffs)), data_(std::move(data)), trace_deficit_(trace_deficit),
      leakage_(leakage)
{
    if (cutoffs_.empty()) throw UsageError("FockState: no modes");
    for (int c : cutoffs_) {
        if (c < 2) throw UsageError("FockState: cutoff must be >= 2");
    }
    if (data_.rows() != total_dim(cutoffs_) || data_.cols() != data_.rows()) {
        throw UsageError("FockState: matrix side does not match product of cutoffs");
    }
    if (!(trace_deficit_ >= 0.0)) throw ValidationError("FockState: negative trace deficit");
    const double herm = hermiticity_error(data_);
    if (herm > 1e-10) {
        throw ValidationError("FockState: not Hermitian (error " + std::to_string(herm) + ")");
    }
    const double total = trace() + trace_deficit_;
    if (total > 1.0 + 1e-10 || total < 1.0 - 1e-6) {
        throw ValidationError("FockState: trace + deficit = " + std::to_string(total));
    }
}

FockState FockState::with_cutoffs(const std::vector<int>& cutoffs) const
{
    if (cutoffs.size() != cutoffs_.size()) throw UsageError("with_cutoffs: mode count mismatch");
    std::vector<int> next(cutoffs_.size());
    for (std::size_t m = 0; m < next.size(); ++m) next[m] = std::max(cutoffs_[m], cutoffs[m]);
    if (next == cutoffs_) return *this;
    const Eigen::Index n_old = data_.rows();
    std::vector<Eigen::Index> map(static_cast<std::size_t>(n_old));
    for (Eigen::Index i = 0; i < n_old; ++i) {
        const auto digits = unravel_index(i, cutoffs_);
        Eigen::Index j = 0;
        for (std::size_t m = 0; m < digits.size(); ++m) j = j * next[m] + digits[m];
        map[static_cast<std::size_t>(i)] = j;
    }
    const Eigen::Index n_new = total_dim(next);
    Mat out = Mat::Zero(n_new, n_new);
    for (Eigen::Index c = 0; c < n_old; ++c) {
        for (Eigen::Index r = 0; r < n_old; ++r) out(map[r], map[c]) = data_(r, c);
    }
    return FockState(std::move(next), std::move(out), trace_deficit_, leakage_);
}

Mat FockState::normalized() const
{
    const double t = trace();
    if (!(t > 0.0)) throw NumericalError("FockState: zero trace");
    return data_ / t;
}

// ---------------------------------------------------------------- gates

std::vector<int> gate_modes(const BosonicGate& g)
{
    return std::visit(
        overloaded{
            [](const gate::Displacement& d) { return std::vector<int>{d.mode}; },
            [](const gate::PhaseRotation& d) { return std::vector<int>{d.mode}; },
            [](const gate::TwoModeSqueeze& d) { return std::vector<int>{d.mode_a, d.mode_b}; },
            [](const gate::BeamSplitter& d) { return std::vector<int>{d.mode_a, d.mode_b}; },
            [](const gate::ControlledPhase& d) { return std::vector<int>{d.mode_a, d.mode_b}; },
        },
        g);
}

void validate_gate(const BosonicGate& g, int modes)
{
    const bool finite = std::visit(
        overloaded{
            [](const gate::Displacement& d) {
                return std::isfinite(d.alpha.real()) && std::isfinite(d.alpha.imag());
            },
            [](const gate::PhaseRotation& d) { return std::isfinite(d.phi); },
            [](const gate::TwoModeSqueeze& d) { return std::isfinite(d.r) && std::isfinite(d.phi); },
            [](const gate::BeamSplitter& d) {
                return std::isfinite(d.theta) && std::isfinite(d.phi);
            },
            [](const gate::ControlledPhase& d) { return std::isfinite(d.s); },
        },
        g);
    if (!finite) throw UsageError("bosonic gate: non-finite parameter");
    const auto ms = gate_modes(g);
    for (int m : ms) check_mode(m, modes, "bosonic gate");
    if (ms.size() == 2 && ms[0] == ms[1]) throw UsageError("bosonic gate: target modes coincide");
}

Mat annihilation(int cutoff)
{
    Mat a = Mat::Zero(cutoff, cutoff);
    for (int n = 1; n < cutoff; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

Mat truncated_gate_matrix(const BosonicGate& g, const std::vector<int>& cut, int pad)
{
    std::vector<int> padded = cut;
    for (int& c : padded) c += pad;
    return std::visit(
        overloaded{
            [&](const gate::Displacement& d) -> Mat {
                const Mat a = annihilation(padded[0]);
                const Mat gen = d.alpha * a.adjoint() - std::conj(d.alpha) * a;
                return expm(gen).topLeftCorner(cut[0], cut[0]);
            },
            [&](const gate::PhaseRotation& d) -> Mat {
                Mat u = Mat::Zero(cut[0], cut[0]);
                for (int n = 0; n < cut[0]; ++n) u(n, n) = std::polar(1.0, d.phi * n);
                return u;
            },
            [&](const gate::TwoModeSqueeze& d) -> Mat {
                return sparse_expm_projected(
                    two_mode_generator(padded[0], padded[1], d.r, d.phi, true), padded, cut);
            },
            [&](const gate::BeamSplitter& d) -> Mat {
                return sparse_expm_projected(
                    two_mode_generator(padded[0], padded[1], d.theta, d.phi, false), padded, cut);
            },
            [&](const gate::ControlledPhase& d) -> Mat {
                // q_a q_b is diagonal in the product eigenbasis of truncated q.
                Eigen::SelfAdjointEigenSolver<Mat> ea(position(padded[0]));
                Eigen::SelfAdjointEigenSolver<Mat> eb(position(padded[1]));
                const Mat wa = ea.eigenvectors().topRows(cut[0]);
                const Mat wb = eb.eigenvectors().topRows(cut[1]);
                const Mat w = kron(wa, wb);
                Vec phase(w.cols());
                for (int j = 0; j < padded[0]; ++j) {
                    for (int k = 0; k < padded[1]; ++k) {
                        phase(j * padded[1] + k) =
                            std::polar(1.0, d.s * ea.eigenvalues()(j) * eb.eigenvalues()(k));
                    }
                }
                return w * phase.asDiagonal() * w.adjoint();
            },
        },
        g);
}

FockState apply_bosonic_gate(const FockState& rho, const BosonicGate& g, const CutoffPolicy& policy)
{
    validate_gate(g, rho.modes());
    const auto targets = gate_modes(g);
    FockState cur = rho;
    for (;;) {
        std::vector<int> tcut;
        for (int t : targets) tcut.push_back(cur.cutoff(t));
        const Mat raw = truncated_gate_matrix(g, tcut, policy.pad);
        LocalEmbedding emb(cur.cutoffs(), targets);
        const double leak = std::max(0.0, cur.trace() - emb.conjugate(raw, cur.data()).trace().real());

        bool can_grow = false;
        for (int t : targets) can_grow = can_grow || cur.cutoff(t) < policy.max_cutoff;
        if (leak > policy.escalate_above && policy.adaptive && can_grow) {
            std::vector<int> next = cur.cutoffs();
            for (int t : targets) next[t] = std::min(policy.max_cutoff, next[t] + policy.step);
            cur = cur.with_cutoffs(next);
            continue;
        }
        if (leak > policy.hard_limit) {
            throw CutoffError("apply_bosonic_gate: truncation leakage " + std::to_string(leak) +
                              " exceeds hard limit");
        }
        const Mat u = polar_unitary(raw);
        return FockState(cur.cutoffs(), hermitize(emb.conjugate(u, cur.data())),
                         cur.trace_deficit(), cur.leakage() + leak);
    }
}

FockState apply_bosonic_circuit(const FockState& rho, const std::vector<BosonicGate>& gates,
                                const CutoffPolicy& policy)
{
    FockState cur = rho;
    for (const auto& g : gates) cur = apply_bosonic_gate(cur, g, policy);
    return cur;
}

// ---------------------------------------------------------------- states

FockState tmsv_state(double n_s, int cutoff)
{
    if (!(n_s >= 0.0) || !std::isfinite(n_s)) throw UsageError("tmsv_state: n_s must be finite and >= 0");
    return apply_bosonic_gate(fock_vacuum(2, cutoff), gate::TwoModeSqueeze{0, 1, std::asinh(std::sqrt(n_s)), 0.0});
}

FockState fock_vacuum(int modes, int cutoff)
{
    if (modes < 1) throw UsageError("fock_vacuum: modes must be >= 1");
    if (cutoff < 2) throw UsageError("fock_vacuum: cutoff must be >= 2");
    std::vector<int> cuts(static_cast<std::size_t>(modes), cutoff);
    const Eigen::Index n = total_dim(cuts);
    Mat m = Mat::Zero(n, n);
    m(0, 0) = 1.0;
    return FockState(std::move(cuts), std::move(m));
}

FockState fock_number_state(int n, int cutoff)
{
    if (n < 0 || n >= cutoff) throw UsageError("fock_number_state: n outside truncated space");
    Mat m = Mat::Zero(cutoff, cutoff);
    m(n, n) = 1.0;
    return FockState({cutoff}, std::move(m));
}

FockState thermal_state(double n_bar, int cutoff, const CutoffPolicy& policy)
{
    if (!(n_bar >= 0.0) || !std::isfinite(n_bar)) throw UsageError("thermal_state: n_bar < 0");
    if (cutoff < 2) throw UsageError("thermal_state: cutoff must be >= 2");
    const double x = n_bar / (1.0 + n_bar);
    int d = cutoff;
    auto tail = [x](int dd) { return std::pow(x, dd); };
    while (policy.adaptive && tail(d) > policy.escalate_above && d < policy.max_cutoff) {
        d = std::min(policy.max_cutoff, d + policy.step);
    }
    if (tail(d) > policy.hard_limit) {
        throw CutoffError("thermal_state: tail mass " + std::to_string(tail(d)) +
                          " exceeds hard limit at cutoff " + std::to_string(d));
    }
    Mat m = Mat::Zero(d, d);
    double p = 1.0 / (1.0 + n_bar);
    for (int n = 0; n < d; ++n) {
        m(n, n) = p;
        p *= x;
    }
    return FockState({d}, std::move(m), tail(d));
}

// ---------------------------------------------------------------- illumination

namespace {

// exp(theta (a_S^dag a_B - a_S a_B^dag)) restricted to the basis |j, n-j>.
RMat bs_block(double theta, int n)
{
    RMat g = RMat::Zero(n + 1, n + 1);
    for (int j = 0; j < n; ++j) {
        const double amp = std::sqrt(double(j + 1) * (n - j));
        g(j + 1, j) = theta * amp;
        g(j, j + 1) = -theta * amp;
    }
    return expm(g.cast<cplx>()).real();
}

}  // namespace

double illumination_bs_amplitude(double theta, int k_s, int r_b, int s_s, int m_b)
{
    const int n = k_s + r_b;
    if (n != s_s + m_b || k_s < 0 || r_b < 0 || s_s < 0 || m_b < 0) return 0.0;
    return bs_block(theta, n)(k_s, s_s);
}

FockState illumination_channel(const FockState& rho_si, double eta, double n_b,
                               const CutoffPolicy& policy)
{
    if (rho_si.modes() != 2) throw UsageError("illumination_channel: input must have 2 modes");
    if (!(eta >= 0.0 && eta <= 1.0)) throw UsageError("illumination_channel: eta outside [0, 1]");
    const FockState bath = thermal_state(n_b, rho_si.cutoff(0), policy);
    const int cs = rho_si.cutoff(0), ci = rho_si.cutoff(1), cb = bath.cutoff(0);
    const int cr = std::max(cb, cs);
    const double theta = std::asin(eta);

    const int nmax = cs + cb - 2;
    std::vector<RMat> blocks;
    for (int n = 0; n <= nmax; ++n) blocks.push_back(bs_block(theta, n));
    // <k, r| U |s, m> with S first; r is implied by photon conservation.
    auto amp = [&](int k, int s, int m) { return blocks[static_cast<std::size_t>(s + m)](k, s); };

    const Mat& in = rho_si.data();
    const Eigen::Index nout = static_cast<Eigen::Index>(cr) * ci;
    Mat out = Mat::Zero(nout, nout);
    const RVec pb = bath.data().diagonal().real();
    // Photons move between S and the returned mode in lockstep: r - s = m - k = delta.
    for (int delta = -(cs - 1); delta <= cb - 1; ++delta) {
        RMat w = RMat::Zero(cr, cr);
        for (int k = std::max(0, -delta); k + delta < cb; ++k) {
            const int m = k + delta;
            RVec v = RVec::Zero(cr);
            bool any = false;
            for (int r = std::max(0, delta); r < cr && r - delta < cs; ++r) {
                v(r) = amp(k, r - delta, m);
                any = true;
            }
            if (any) w.noalias() += pb(m) * v * v.transpose();
        }
        for (int r = std::max(0, delta); r < cr && r - delta < cs; ++r) {
            for (int rp = std::max(0, delta); rp < cr && rp - delta < cs; ++rp) {
                const double c = w(r, rp);
                if (c == 0.0) continue;
                out.block(static_cast<Eigen::Index>(r) * ci, static_cast<Eigen::Index>(rp) * ci,
                          ci, ci) += c * in.block(static_cast<Eigen::Index>(r - delta) * ci,
                                                  static_cast<Eigen::Index>(rp - delta) * ci, ci, ci);
            }
        }
    }
    out = hermitize(out);
    const double lost = rho_si.trace() - out.trace().real();
    if (lost - bath.trace_deficit() * rho_si.trace() > policy.hard_limit) {
        throw CutoffError("illumination_channel: returned-mode truncation lost " +
                          std::to_string(lost));
    }
    return FockState({cr, ci}, std::move(out), rho_si.trace_deficit() + std::max(0.0, lost),
                     rho_si.leakage());
}

// ---------------------------------------------------------------- readout

Mat reduced_mode(const FockState& rho, int mode)
{
    check_mode(mode, rho.modes(), "reduced_mode");
    const int keep[1] = {mode};
    return partial_trace(rho.data(), rho.cutoffs(), keep);
}

double vacuum_probability(const FockState& rho, int mode)
{
    return reduced_mode(rho, mode)(0, 0).real();
}

double parity_expectation(const FockState& rho, int mode)
{
    const Mat r = reduced_mode(rho, mode);
    double acc = 0.0;
    for (Eigen::Index n = 0; n < r.rows(); ++n) acc += (n % 2 == 0 ? 1.0 : -1.0) * r(n, n).real();
    return acc;
}

double mean_photon(const FockState& rho, int mode)
{
    const Mat r = reduced_mode(rho, mode);
    double acc = 0.0;
    for (Eigen::Index n = 0; n < r.rows(); ++n) acc += static_cast<double>(n) * r(n, n).real();
    return acc;
}

}  // namespace vqht
