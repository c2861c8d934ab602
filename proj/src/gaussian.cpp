#include "vqht/gaussian.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "vqht/errors.hpp"

namespace vqht {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

void check_mode(int mode, int modes, const char* who)
{
    if (mode < 0 || mode >= modes) {
        throw UsageError(std::string(who) + ": mode " + std::to_string(mode) + " out of range");
    }
}

}  // namespace

GaussianMoments GaussianMoments::vacuum(int modes)
{
    if (modes < 1) throw UsageError("GaussianMoments: modes must be >= 1");
    return {RVec::Zero(2 * modes), 0.5 * RMat::Identity(2 * modes, 2 * modes)};
}

GaussianMoments GaussianMoments::thermal(double n_bar)
{
    if (!(n_bar >= 0.0)) throw UsageError("GaussianMoments::thermal: n_bar < 0");
    return {RVec::Zero(2), (n_bar + 0.5) * RMat::Identity(2, 2)};
}

void GaussianMoments::validate() const
{
    const Eigen::Index n = mean.size();
    if (n % 2 != 0 || cov.rows() != n || cov.cols() != n) {
        throw UsageError("GaussianMoments: inconsistent sizes");
    }
    if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
        throw ValidationError("GaussianMoments: covariance not symmetric");
    }
    Mat h = cov.cast<cplx>();
    for (Eigen::Index k = 0; k < n; k += 2) {
        h(k, k + 1) += cplx(0.0, 0.5);
        h(k + 1, k) -= cplx(0.0, 0.5);
    }
    if (hermitian_eigenvalues(h).minCoeff() < -1e-9) {
        throw ValidationError("GaussianMoments: uncertainty principle violated");
    }
}

void gaussian_gate_action(const BosonicGate& g, int modes, RMat& s, RVec& d)
{
    validate_gate(g, modes);
    s = RMat::Identity(2 * modes, 2 * modes);
    d = RVec::Zero(2 * modes);
    std::visit(
        overloaded{
            [&](const gate::Displacement& x) {
                d(2 * x.mode) = std::sqrt(2.0) * x.alpha.real();
                d(2 * x.mode + 1) = std::sqrt(2.0) * x.alpha.imag();
            },
            [&](const gate::PhaseRotation& x) {
                const int q = 2 * x.mode;
                const double c = std::cos(x.phi), sn = std::sin(x.phi);
                s(q, q) = c;
                s(q, q + 1) = -sn;
                s(q + 1, q) = sn;
                s(q + 1, q + 1) = c;
            },
            [&](const gate::TwoModeSqueeze& x) {
                // a -> cosh r a + e^{i phi} sinh r b^dag, and symmetrically for b.
                const int a = 2 * x.mode_a, b = 2 * x.mode_b;
                const double ch = std::cosh(x.r), sh = std::sinh(x.r);
                const double c = std::cos(x.phi), sn = std::sin(x.phi);
                s(a, a) = ch;
                s(a + 1, a + 1) = ch;
                s(b, b) = ch;
                s(b + 1, b + 1) = ch;
                s(a, b) = sh * c;
                s(a, b + 1) = sh * sn;
                s(a + 1, b) = sh * sn;
                s(a + 1, b + 1) = -sh * c;
                s(b, a) = sh * c;
                s(b, a + 1) = sh * sn;
                s(b + 1, a) = sh * sn;
                s(b + 1, a + 1) = -sh * c;
            },
            [&](const gate::BeamSplitter& x) {
                // a -> cos t a + e^{i phi} sin t b,  b -> cos t b - e^{-i phi} sin t a.
                const int a = 2 * x.mode_a, b = 2 * x.mode_b;
                const double ct = std::cos(x.theta), st = std::sin(x.theta);
                const double c = std::cos(x.phi), sn = std::sin(x.phi);
                s(a, a) = ct;
                s(a + 1, a + 1) = ct;
                s(b, b) = ct;
                s(b + 1, b + 1) = ct;
                s(a, b) = st * c;
                s(a, b + 1) = -st * sn;
                s(a + 1, b) = st * sn;
                s(a + 1, b + 1) = st * c;
                s(b, a) = -st * c;
                s(b, a + 1) = -st * sn;
                s(b + 1, a) = st * sn;
                s(b + 1, a + 1) = -st * c;
            },
            [&](const gate::ControlledPhase& x) {
                const int a = 2 * x.mode_a, b = 2 * x.mode_b;
                s(a + 1, b) = x.s;
                s(b + 1, a) = x.s;
            },
        },
        g);
}

GaussianMoments apply_gaussian_gate(const GaussianMoments& g, const BosonicGate& gate)
{
    RMat s;
    RVec d;
    gaussian_gate_action(gate, g.modes(), s, d);
    GaussianMoments out{s * g.mean + d, s * g.cov * s.transpose()};
    out.cov = 0.5 * (out.cov + out.cov.transpose());
    return out;
}

GaussianMoments apply_gaussian_circuit(GaussianMoments g, const std::vector<BosonicGate>& gates)
{
    for (const auto& gate : gates) g = apply_gaussian_gate(g, gate);
    return g;
}

GaussianMoments gaussian_moments_from_circuit(const std::vector<BosonicGate>& gates, int modes)
{
    return apply_gaussian_circuit(GaussianMoments::vacuum(modes), gates);
}

GaussianMoments gaussian_tensor(const GaussianMoments& a, const GaussianMoments& b)
{
    const Eigen::Index na = a.mean.size(), nb = b.mean.size();
    GaussianMoments out{RVec(na + nb), RMat::Zero(na + nb, na + nb)};
    out.mean << a.mean, b.mean;
    out.cov.topLeftCorner(na, na) = a.cov;
    out.cov.bottomRightCorner(nb, nb) = b.cov;
    return out;
}

GaussianMoments gaussian_marginal(const GaussianMoments& g, const std::vector<int>& modes)
{
    const auto k = static_cast<Eigen::Index>(modes.size());
    GaussianMoments out{RVec(2 * k), RMat(2 * k, 2 * k)};
    for (Eigen::Index i = 0; i < k; ++i) {
        check_mode(modes[i], g.modes(), "gaussian_marginal");
        out.mean.segment(2 * i, 2) = g.mean.segment(2 * modes[i], 2);
        for (Eigen::Index j = 0; j < k; ++j) {
            out.cov.block(2 * i, 2 * j, 2, 2) = g.cov.block(2 * modes[i], 2 * modes[j], 2, 2);
        }
    }
    return out;
}

double vacuum_overlap_gaussian(const GaussianMoments& g, int mode)
{
    check_mode(mode, g.modes(), "vacuum_overlap_gaussian");
    const Eigen::Vector2d mu = g.mean.segment(2 * mode, 2);
    const Eigen::Matrix2d m = g.cov.block(2 * mode, 2 * mode, 2, 2) + 0.5 * Eigen::Matrix2d::Identity();
    const double det = m.determinant();
    if (det == std::numeric_limits<double>::infinity()) return 0.0;
    if (!(det > 1e-300)) throw NumericalError("vacuum_overlap_gaussian: singular covariance");
    return std::exp(-0.5 * mu.dot(m.inverse() * mu)) / std::sqrt(det);
}

double parity_gaussian(const GaussianMoments& g, int mode)
{
    check_mode(mode, g.modes(), "parity_gaussian");
    const Eigen::Vector2d mu = g.mean.segment(2 * mode, 2);
    const Eigen::Matrix2d c = g.cov.block(2 * mode, 2 * mode, 2, 2);
    const double det = c.determinant();
    if (det == std::numeric_limits<double>::infinity()) return 0.0;
    if (!(det > 1e-300)) throw NumericalError("parity_gaussian: singular covariance");
    return std::exp(-0.5 * mu.dot(c.inverse() * mu)) / (2.0 * std::sqrt(det));
}

double mean_photon_gaussian(const GaussianMoments& g, int mode)
{
    check_mode(mode, g.modes(), "mean_photon_gaussian");
    const auto mu = g.mean.segment(2 * mode, 2);
    const auto c = g.cov.block(2 * mode, 2 * mode, 2, 2);
    return 0.5 * (c.trace() + mu.squaredNorm()) - 0.5;
}

GaussianMoments gaussian_illumination(const GaussianMoments& si, double eta, double n_b)
{
    if (si.modes() != 2) throw UsageError("gaussian_illumination: input must have 2 modes");
    if (!(eta >= 0.0 && eta <= 1.0)) throw UsageError("gaussian_illumination: eta outside [0, 1]");
    // Modes (S, I, B); the returned mode is B after the beam splitter.
    GaussianMoments full = gaussian_tensor(si, GaussianMoments::thermal(n_b));
    full = apply_gaussian_gate(full, gate::BeamSplitter{0, 2, std::asin(eta), 0.0});
    return gaussian_marginal(full, {2, 1});
}

}  // namespace vqht
