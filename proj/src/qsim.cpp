#include "vqht/qsim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "vqht/errors.hpp"
#include "vqht/subsystems.hpp"

namespace vqht {

namespace {

void check_dims(const std::vector<int>& dims, const char* who)
{
    if (dims.empty()) throw UsageError(std::string(who) + ": empty dims list");
    for (int d : dims) {
        if (d < 2) throw UsageError(std::string(who) + ": local dimension must be >= 2");
    }
}

void validate_state(const Mat& m, const char* who)
{
    const double herm = hermiticity_error(m);
    if (herm > tol::hermitian) {
        throw ValidationError(std::string(who) + ": not Hermitian (error " + std::to_string(herm) +
                              ")");
    }
    const double tr_err = std::abs(m.trace() - cplx(1.0, 0.0));
    if (tr_err > tol::trace) {
        throw ValidationError(std::string(who) + ": trace differs from 1 by " +
                              std::to_string(tr_err));
    }
    const double lo = hermitian_eigenvalues(m).minCoeff();
    if (lo < -tol::psd) {
        throw ValidationError(std::string(who) + ": negative eigenvalue " + std::to_string(lo));
    }
}

Mat ginibre(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng)
{
    std::normal_distribution<double> n01(0.0, 1.0);
    Mat g(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c) {
        for (Eigen::Index r = 0; r < rows; ++r) g(r, c) = cplx(n01(rng), n01(rng));
    }
    return g;
}

}  // namespace

// ---------------------------------------------------------------- DensityMatrix

DensityMatrix::DensityMatrix(std::vector<int> dims, Mat data)
    : dims_(std::move(dims)), data_(std::move(data))
{
    check_dims(dims_, "DensityMatrix");
    if (data_.rows() != total_dim(dims_) || data_.cols() != data_.rows()) {
        throw UsageError("DensityMatrix: matrix side does not match product of dims");
    }
    validate_state(data_, "DensityMatrix");
}

DensityMatrix::DensityMatrix(std::vector<int> dims, Mat data, Trusted)
    : dims_(std::move(dims)), data_(std::move(data))
{
}

DensityMatrix DensityMatrix::from_ket(std::vector<int> dims, const Vec& ket)
{
    const double n = ket.norm();
    if (std::abs(n - 1.0) > tol::trace) throw ValidationError("from_ket: ket is not normalized");
    return DensityMatrix(std::move(dims), ket * ket.adjoint());
}

DensityMatrix DensityMatrix::basis(std::vector<int> dims, Eigen::Index index)
{
    const Eigen::Index n = total_dim(dims);
    if (index < 0 || index >= n) throw UsageError("basis: index out of range");
    Mat m = Mat::Zero(n, n);
    m(index, index) = 1.0;
    return DensityMatrix(std::move(dims), std::move(m));
}

DensityMatrix DensityMatrix::maximally_mixed(std::vector<int> dims)
{
    const Eigen::Index n = total_dim(dims);
    Mat m = Mat::Identity(n, n) / static_cast<double>(n);
    return DensityMatrix(std::move(dims), std::move(m));
}

double DensityMatrix::purity() const
{
    return (data_ * data_).trace().real();
}

// ---------------------------------------------------------------- KrausChannel

KrausChannel::KrausChannel(std::vector<int> in_dims, std::vector<int> out_dims,
                           std::vector<Mat> kraus)
    : in_dims_(std::move(in_dims)), out_dims_(std::move(out_dims)), kraus_(std::move(kraus))
{
    check_dims(in_dims_, "KrausChannel");
    check_dims(out_dims_, "KrausChannel");
    if (kraus_.empty()) throw UsageError("KrausChannel: empty Kraus list");
    const Eigen::Index din = total_dim(in_dims_), dout = total_dim(out_dims_);
    Mat sum = Mat::Zero(din, din);
    for (const Mat& k : kraus_) {
        if (k.rows() != dout || k.cols() != din) {
            throw UsageError("KrausChannel: Kraus operator shape mismatch");
        }
        sum.noalias() += k.adjoint() * k;
    }
    sum.diagonal().array() -= 1.0;
    const double err = sum.cwiseAbs().maxCoeff();
    if (err > tol::completeness) {
        throw ValidationError("KrausChannel: completeness violated (error " + std::to_string(err) +
                              ")");
    }
}

KrausChannel KrausChannel::identity(std::vector<int> dims)
{
    const Eigen::Index n = total_dim(dims);
    return KrausChannel(dims, dims, {Mat::Identity(n, n)});
}

KrausChannel KrausChannel::unitary(std::vector<int> dims, const Mat& u)
{
    if (unitarity_error(u) > tol::unitary) throw ValidationError("KrausChannel: map not unitary");
    return KrausChannel(dims, dims, {u});
}

Mat KrausChannel::adjoint_apply(const Mat& x) const
{
    const Eigen::Index din = total_dim(in_dims_);
    Mat out = Mat::Zero(din, din);
    for (const Mat& k : kraus_) out.noalias() += k.adjoint() * x * k;
    return out;
}

// ---------------------------------------------------------------- Povm

Povm::Povm(std::vector<int> dims, std::vector<Mat> elements)
    : dims_(std::move(dims)), elements_(std::move(elements))
{
    check_dims(dims_, "Povm");
    if (elements_.empty()) throw UsageError("Povm: no elements");
    const Eigen::Index n = total_dim(dims_);
    Mat sum = Mat::Zero(n, n);
    for (const Mat& e : elements_) {
        if (e.rows() != n || e.cols() != n) throw UsageError("Povm: element shape mismatch");
        if (hermiticity_error(e) > tol::hermitian) {
            throw ValidationError("Povm: element not Hermitian");
        }
        if (hermitian_eigenvalues(e).minCoeff() < -tol::psd) {
            throw ValidationError("Povm: element not positive semidefinite");
        }
        sum += e;
    }
    sum.diagonal().array() -= 1.0;
    if (sum.cwiseAbs().maxCoeff() > tol::completeness) {
        throw ValidationError("Povm: elements do not sum to identity");
    }
}

std::vector<double> Povm::probabilities(const DensityMatrix& rho) const
{
    if (rho.dims() != dims_) throw UsageError("Povm: state dims mismatch");
    std::vector<double> p;
    p.reserve(elements_.size());
    for (const Mat& e : elements_) p.push_back((e * rho.data()).trace().real());
    return p;
}

// ---------------------------------------------------------------- operations

DensityMatrix tensor_product(const DensityMatrix& a, const DensityMatrix& b, Eigen::Index max_dim)
{
    if (a.dim() * b.dim() > max_dim) {
        throw ResourceError("tensor_product: dimension " + std::to_string(a.dim() * b.dim()) +
                            " exceeds limit " + std::to_string(max_dim));
    }
    std::vector<int> dims = a.dims();
    dims.insert(dims.end(), b.dims().begin(), b.dims().end());
    return DensityMatrix(std::move(dims), kron(a.data(), b.data()), DensityMatrix::Trusted{});
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep)
{
    Mat reduced = partial_trace(rho.data(), rho.dims(), keep);
    std::vector<int> kept(keep.begin(), keep.end());
    std::sort(kept.begin(), kept.end());
    std::vector<int> dims;
    for (int k : kept) dims.push_back(rho.dims()[k]);
    return DensityMatrix(std::move(dims), std::move(reduced), DensityMatrix::Trusted{});
}

DensityMatrix apply_unitary(const DensityMatrix& rho, const Mat& u, std::span<const int> targets)
{
    LocalEmbedding emb(rho.dims(), targets);
    if (u.rows() != emb.target_dim_in() || u.cols() != emb.target_dim_in()) {
        throw UsageError("apply_unitary: gate size does not match target dimensions");
    }
    const double err = unitarity_error(u);
    if (err > tol::unitary) {
        throw ValidationError("apply_unitary: gate not unitary (error " + std::to_string(err) + ")");
    }
    return DensityMatrix(rho.dims(), emb.conjugate(u, rho.data()), DensityMatrix::Trusted{});
}

Mat apply_kraus_raw(const Mat& rho, std::span<const int> dims, const KrausChannel& ch,
                    std::span<const int> targets)
{
    std::vector<int> tin;
    for (int t : targets) {
        if (t < 0 || t >= static_cast<int>(dims.size())) {
            throw UsageError("apply_channel: target out of range");
        }
        tin.push_back(dims[t]);
    }
    if (tin != ch.in_dims()) throw UsageError("apply_channel: channel input dims mismatch");
    LocalEmbedding emb(dims, targets, ch.out_dims());
    Mat out = Mat::Zero(emb.dim_out(), emb.dim_out());
    for (const Mat& k : ch.kraus()) out += emb.conjugate(k, rho);
    return out;
}

DensityMatrix apply_channel(const DensityMatrix& rho, const KrausChannel& ch,
                            std::span<const int> targets)
{
    Mat out = apply_kraus_raw(rho.data(), rho.dims(), ch, targets);
    LocalEmbedding emb(rho.dims(), targets, ch.out_dims());
    return DensityMatrix(emb.out_dims(), std::move(out), DensityMatrix::Trusted{});
}

KrausChannel phase_flip_channel(double p)
{
    if (!(p >= 0.0 && p <= 1.0)) throw UsageError("phase_flip_channel: p outside [0, 1]");
    return KrausChannel({2}, {2},
                        {std::sqrt(1.0 - p) * Mat::Identity(2, 2), std::sqrt(p) * gates::pauli_z()});
}

KrausChannel pauli_channel(double p_i, double p_x, double p_y, double p_z)
{
    for (double p : {p_i, p_x, p_y, p_z}) {
        if (!(p >= 0.0 && p <= 1.0)) throw UsageError("pauli_channel: weight outside [0, 1]");
    }
    return KrausChannel({2}, {2},
                        {std::sqrt(p_i) * Mat::Identity(2, 2), std::sqrt(p_x) * gates::pauli_x(),
                         std::sqrt(p_y) * gates::pauli_y(), std::sqrt(p_z) * gates::pauli_z()});
}

Mat naimark_unitary(const Mat& gamma)
{
    if (gamma.rows() != gamma.cols()) throw UsageError("naimark_unitary: gamma not square");
    if (hermiticity_error(gamma) > tol::hermitian) {
        throw ValidationError("naimark_unitary: gamma not Hermitian");
    }
    const RVec ev = hermitian_eigenvalues(gamma);
    if (ev.minCoeff() < -tol::psd || ev.maxCoeff() > 1.0 + tol::psd) {
        throw ValidationError("naimark_unitary: gamma eigenvalues outside [0, 1]");
    }
    const Eigen::Index n = gamma.rows();
    const Mat id = Mat::Identity(n, n);
    const Mat s = psd_sqrt(gamma);
    const Mat c = psd_sqrt(id - gamma);
    // i sigma_Y = [[0, 1], [-1, 0]]
    Mat u(2 * n, 2 * n);
    u.topLeftCorner(n, n) = s;
    u.topRightCorner(n, n) = c;
    u.bottomLeftCorner(n, n) = -c;
    u.bottomRightCorner(n, n) = s;
    return u;
}

Mat naimark_unitary_multi(const Povm& povm)
{
    const Eigen::Index n = total_dim(povm.dims());
    const Eigen::Index k = static_cast<Eigen::Index>(povm.size());
    const Eigen::Index big = k * n;
    Mat u = Mat::Zero(big, big);
    for (Eigen::Index i = 0; i < k; ++i) {
        u.block(i * n, 0, n, n) = psd_sqrt(povm.elements()[static_cast<std::size_t>(i)]);
    }
    // Complete the isometry column block with the orthogonal complement.
    Eigen::Index filled = n;
    const double accept = 1e-6;
    for (Eigen::Index j = 0; j < big && filled < big; ++j) {
        Vec v = Vec::Unit(big, j);
        for (int pass = 0; pass < 2; ++pass) {
            v -= u.leftCols(filled) * (u.leftCols(filled).adjoint() * v);
        }
        const double nv = v.norm();
        if (nv > accept) u.col(filled++) = v / nv;
    }
    if (filled != big) {
        throw InternalError("naimark_unitary_multi: could not complete isometry to a unitary");
    }
    if (unitarity_error(u) > 1e-9) {
        throw InternalError("naimark_unitary_multi: completion is not unitary within 1e-9");
    }
    return u;
}

Mat haar_random_unitary(int dim, std::uint64_t seed)
{
    if (dim < 2) throw UsageError("haar_random_unitary: dim must be >= 2");
    std::mt19937_64 rng(seed);
    const Mat z = ginibre(dim, dim, rng) / std::numbers::sqrt2;
    Eigen::HouseholderQR<Mat> qr(z);
    Mat q = qr.householderQ();
    const Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < dim; ++j) {
        const cplx d = r(j, j);
        const double a = std::abs(d);
        q.col(j) *= (a > 0.0 ? d / a : cplx(1.0, 0.0));
    }
    return q;
}

Vec haar_random_ket(int dim, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    Vec v = ginibre(dim, 1, rng).col(0);
    return v / v.norm();
}

DensityMatrix random_density_matrix(std::vector<int> dims, int rank, std::uint64_t seed)
{
    const Eigen::Index n = total_dim(dims);
    if (rank < 1) throw UsageError("random_density_matrix: rank must be >= 1");
    std::mt19937_64 rng(seed);
    const Mat g = ginibre(n, rank, rng);
    Mat rho = g * g.adjoint();
    rho /= rho.trace().real();
    rho = 0.5 * (rho + rho.adjoint());
    return DensityMatrix(std::move(dims), std::move(rho));
}

namespace gates {

Mat pauli_x()
{
    Mat m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

Mat pauli_y()
{
    Mat m(2, 2);
    m << 0, -kI, kI, 0;
    return m;
}

Mat pauli_z()
{
    Mat m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

Mat hadamard()
{
    Mat m(2, 2);
    m << 1, 1, 1, -1;
    return m / std::numbers::sqrt2;
}

Mat controlled_phase(int d1, int d2)
{
    const int m = std::max(d1, d2);
    Mat u = Mat::Zero(d1 * d2, d1 * d2);
    for (int j = 0; j < d1; ++j) {
        for (int k = 0; k < d2; ++k) {
            u(j * d2 + k, j * d2 + k) = std::polar(1.0, 2.0 * std::numbers::pi * j * k / m);
        }
    }
    return u;
}

}  // namespace gates

}  // namespace vqht
