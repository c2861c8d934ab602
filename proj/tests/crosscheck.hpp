#pragma once

// Shared by the unit tests and the acceptance binary.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "vqht/bosonic.hpp"
#include "vqht/gaussian.hpp"

namespace vqht::testing {

/// Seeded two-mode Gaussian circuit with parameters small enough that every
/// gate leaks less than 1e-6 at cutoff 20.
inline std::vector<BosonicGate> random_gaussian_circuit(std::mt19937_64& rng, int index)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double pi = 3.141592653589793;
    std::vector<BosonicGate> gates;
    gates.emplace_back(gate::Displacement{0, cplx(0.4 * u(rng), 0.4 * u(rng))});
    gates.emplace_back(gate::TwoModeSqueeze{0, 1, 0.25 * std::abs(u(rng)), pi * u(rng)});
    gates.emplace_back(gate::BeamSplitter{0, 1, pi * u(rng), pi * u(rng)});
    gates.emplace_back(gate::PhaseRotation{index % 2, pi * u(rng)});
    gates.emplace_back(gate::ControlledPhase{0, 1, 0.2 * u(rng)});
    gates.emplace_back(gate::Displacement{1, cplx(0.4 * u(rng), 0.4 * u(rng))});
    return gates;
}

struct CrossCheck {
    double max_error = 0.0;  ///< over means, covariances, photon numbers, vacuum probabilities
    double leakage = 0.0;
};

/// Simulates the circuit in a truncated Fock space (fixed cutoff) and compares
/// first and second moments with the symplectic propagation.
inline CrossCheck fock_vs_gaussian(const std::vector<BosonicGate>& gates, int cutoff)
{
    const int modes = 2;
    CutoffPolicy strict;
    strict.adaptive = false;
    const auto f = apply_bosonic_circuit(fock_vacuum(modes, cutoff), gates, strict);
    const auto g = gaussian_moments_from_circuit(gates, modes);

    const Mat a = annihilation(cutoff);
    const Mat id = Mat::Identity(cutoff, cutoff);
    const Mat lower[2] = {kron(a, id), kron(id, a)};
    const Mat& rho = f.data();
    auto ev = [&](const Mat& op) { return (rho * op).trace(); };

    CrossCheck out;
    out.leakage = f.leakage();
    auto note = [&](double e) { out.max_error = std::max(out.max_error, e); };
    std::vector<Mat> quad;
    for (int m = 0; m < modes; ++m) {
        const Mat& am = lower[m];
        quad.push_back((am + am.adjoint()) / std::sqrt(2.0));
        quad.push_back((am - am.adjoint()) / (cplx(0.0, 1.0) * std::sqrt(2.0)));
        note(std::abs(mean_photon(f, m) - mean_photon_gaussian(g, m)));
        note(std::abs(vacuum_probability(f, m) - vacuum_overlap_gaussian(g, m)));
    }
    std::vector<double> mu;
    for (const auto& q : quad) mu.push_back(ev(q).real());
    for (std::size_t i = 0; i < quad.size(); ++i) {
        note(std::abs(mu[i] - g.mean(static_cast<Eigen::Index>(i))));
        for (std::size_t j = 0; j < quad.size(); ++j) {
            const double sym = 0.5 * ev(quad[i] * quad[j] + quad[j] * quad[i]).real();
            note(std::abs(sym - mu[i] * mu[j] - g.cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))));
        }
    }
    return out;
}

}  // namespace vqht::testing
