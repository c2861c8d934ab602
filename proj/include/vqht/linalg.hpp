#pragma once

#include <complex>
#include <limits>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

namespace vqht {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

inline constexpr cplx kI{0.0, 1.0};

template <typename A, typename B>
auto kron(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b)
{
    using Scalar = typename A::Scalar;
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out =
        Eigen::kroneckerProduct(a.derived(), b.derived());
    return out;
}

/// Max abs element of m - m^dagger.
template <typename Derived>
double hermiticity_error(const Eigen::MatrixBase<Derived>& m)
{
    if (m.rows() == 0) return 0.0;
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

/// Max abs element of m^dagger m - I.
template <typename Derived>
double unitarity_error(const Eigen::MatrixBase<Derived>& m)
{
    using Plain = typename Derived::PlainObject;
    if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
    Plain g = m.adjoint() * m;
    g.diagonal().array() -= typename Derived::Scalar(1);
    return g.cwiseAbs().maxCoeff();
}

/// Spectrum of a Hermitian matrix in ascending order.
RVec hermitian_eigenvalues(const Mat& h);

/// V f(lambda) V^dagger for Hermitian h. f maps double -> double.
template <typename F>
Mat hermitian_function(const Mat& h, F&& f)
{
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    RVec fl = es.eigenvalues().unaryExpr(f);
    return es.eigenvectors() * fl.asDiagonal() * es.eigenvectors().adjoint();
}

/// Principal square root of a PSD matrix; eigenvalues are clamped to [0, inf).
/// Throws ValidationError if an eigenvalue is below -tol.
Mat psd_sqrt(const Mat& h, double tol = 1e-9);

/// Orthogonal projector onto span of eigenvectors with eigenvalue >= threshold.
Mat spectral_projector(const Mat& h, double threshold);

/// Matrix exponential (scaling and squaring Pade).
Mat expm(const Mat& m);

/// Unitary factor W V^dagger of the SVD m = W S V^dagger.
Mat polar_unitary(const Mat& m);

/// Trace norm: sum of singular values (abs eigenvalues for Hermitian input).
double trace_norm_hermitian(const Mat& h);

}  // namespace vqht
