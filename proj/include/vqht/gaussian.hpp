#pragma once

#include <vector>

#include "vqht/bosonic.hpp"

namespace vqht {

/// First and second moments of an n-mode Gaussian state. Quadratures are
/// ordered (q_1, p_1, ..., q_n, p_n) with hbar = 1, so vacuum has cov = I/2.
struct GaussianMoments {
    RVec mean;
    RMat cov;

    int modes() const { return static_cast<int>(mean.size() / 2); }

    static GaussianMoments vacuum(int modes);
    static GaussianMoments thermal(double n_bar);

    /// Throws ValidationError unless cov is symmetric and cov + i Omega / 2 >= 0.
    void validate() const;
};

/// Symplectic matrix S (2n x 2n) and displacement d of a Gaussian gate acting
/// as x -> S x + d in the Heisenberg picture.
void gaussian_gate_action(const BosonicGate& g, int modes, RMat& s, RVec& d);

GaussianMoments apply_gaussian_gate(const GaussianMoments& g, const BosonicGate& gate);

GaussianMoments gaussian_moments_from_circuit(const std::vector<BosonicGate>& gates, int modes);

GaussianMoments apply_gaussian_circuit(GaussianMoments g, const std::vector<BosonicGate>& gates);

/// Tensor product of independent Gaussian states (a's modes first).
GaussianMoments gaussian_tensor(const GaussianMoments& a, const GaussianMoments& b);

/// Marginal on the listed modes, in the listed order.
GaussianMoments gaussian_marginal(const GaussianMoments& g, const std::vector<int>& modes);

double vacuum_overlap_gaussian(const GaussianMoments& g, int mode);
/// <(-1)^n> of one mode: det(2 sigma_m)^{-1/2} exp(-1/2 mu_m^T sigma_m^{-1} mu_m).
double parity_gaussian(const GaussianMoments& g, int mode);

double mean_photon_gaussian(const GaussianMoments& g, int mode);

/// Moments version of illumination_channel: (S, I) -> (returned, idler).
GaussianMoments gaussian_illumination(const GaussianMoments& si, double eta, double n_b);

}  // namespace vqht
