#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "vqht/linalg.hpp"

namespace vqht {

namespace tol {
inline constexpr double hermitian = 1e-10;
inline constexpr double trace = 1e-10;
inline constexpr double psd = 1e-9;
inline constexpr double unitary = 1e-10;
inline constexpr double completeness = 1e-10;
}  // namespace tol

/// Largest total dimension tensor_product will build.
inline constexpr Eigen::Index kDefaultMaxDim = 4096;

class KrausChannel;

/// Density operator on a product of finite local spaces. Always valid:
/// construction checks Hermiticity, unit trace and positivity and throws
/// ValidationError otherwise.
class DensityMatrix {
public:
    DensityMatrix(std::vector<int> dims, Mat data);

    static DensityMatrix from_ket(std::vector<int> dims, const Vec& ket);
    static DensityMatrix basis(std::vector<int> dims, Eigen::Index index);
    static DensityMatrix maximally_mixed(std::vector<int> dims);

    const std::vector<int>& dims() const { return dims_; }
    const Mat& data() const { return data_; }
    Eigen::Index dim() const { return data_.rows(); }
    cplx trace() const { return data_.trace(); }
    double purity() const;

private:
    struct Trusted {};
    DensityMatrix(std::vector<int> dims, Mat data, Trusted);

    std::vector<int> dims_;
    Mat data_;

    friend DensityMatrix tensor_product(const DensityMatrix&, const DensityMatrix&, Eigen::Index);
    friend DensityMatrix partial_trace(const DensityMatrix&, std::span<const int>);
    friend DensityMatrix apply_unitary(const DensityMatrix&, const Mat&, std::span<const int>);
    friend DensityMatrix apply_channel(const DensityMatrix&, const KrausChannel&,
                                       std::span<const int>);
};

/// Completely positive trace-preserving map given by Kraus operators.
class KrausChannel {
public:
    KrausChannel(std::vector<int> in_dims, std::vector<int> out_dims, std::vector<Mat> kraus);

    static KrausChannel identity(std::vector<int> dims);
    static KrausChannel unitary(std::vector<int> dims, const Mat& u);

    const std::vector<int>& in_dims() const { return in_dims_; }
    const std::vector<int>& out_dims() const { return out_dims_; }
    const std::vector<Mat>& kraus() const { return kraus_; }

    /// Heisenberg-picture map X -> sum K^dag X K.
    Mat adjoint_apply(const Mat& x) const;

private:
    std::vector<int> in_dims_, out_dims_;
    std::vector<Mat> kraus_;
};

/// Positive operator-valued measure on a declared product space.
class Povm {
public:
    Povm(std::vector<int> dims, std::vector<Mat> elements);

    const std::vector<int>& dims() const { return dims_; }
    const std::vector<Mat>& elements() const { return elements_; }
    std::size_t size() const { return elements_.size(); }

    std::vector<double> probabilities(const DensityMatrix& rho) const;

private:
    std::vector<int> dims_;
    std::vector<Mat> elements_;
};

DensityMatrix tensor_product(const DensityMatrix& a, const DensityMatrix& b,
                             Eigen::Index max_dim = kDefaultMaxDim);

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep);

DensityMatrix apply_unitary(const DensityMatrix& rho, const Mat& u, std::span<const int> targets);

DensityMatrix apply_channel(const DensityMatrix& rho, const KrausChannel& ch,
                            std::span<const int> targets);

/// Sum_k K_k rho K_k^dag lifted to targets, on raw matrices (no validation).
Mat apply_kraus_raw(const Mat& rho, std::span<const int> dims, const KrausChannel& ch,
                    std::span<const int> targets);

/// Kraus set {sqrt(1-p) I, sqrt(p) Z}.
KrausChannel phase_flip_channel(double p);

/// Pauli channel with weights (p_I, p_X, p_Y, p_Z).
KrausChannel pauli_channel(double p_i, double p_x, double p_y, double p_z);

/// I_P (x) sqrt(G) + i sigma_Y,P (x) sqrt(I - G): two-outcome Naimark unitary
/// with the probe qubit as the first tensor factor.
Mat naimark_unitary(const Mat& gamma);

/// Unitary on (k-level ancilla) (x) system whose ancilla-column-0 block is the
/// isometry [sqrt(G_0); ...; sqrt(G_{k-1})], completed by Gram-Schmidt over
/// the standard basis in column order.
Mat naimark_unitary_multi(const Povm& povm);

/// Haar-distributed unitary, deterministic in the seed.
Mat haar_random_unitary(int dim, std::uint64_t seed);

/// Haar-random pure state, deterministic in the seed.
Vec haar_random_ket(int dim, std::uint64_t seed);

/// Random mixed state of the given rank (Hilbert-Schmidt style via Ginibre).
DensityMatrix random_density_matrix(std::vector<int> dims, int rank, std::uint64_t seed);

namespace gates {
Mat pauli_x();
Mat pauli_y();
Mat pauli_z();
Mat hadamard();
/// Diagonal entangler |j,k> -> exp(2 pi i j k / max(d1, d2)) |j,k>; CZ for qubits.
Mat controlled_phase(int d1, int d2);
}  // namespace gates

}  // namespace vqht
