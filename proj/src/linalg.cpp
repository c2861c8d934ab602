#include "vqht/linalg.hpp"

#include <cmath>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "vqht/errors.hpp"

namespace vqht {

RVec hermitian_eigenvalues(const Mat& h)
{
    Eigen::SelfAdjointEigenSolver<Mat> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

Mat psd_sqrt(const Mat& h, double tol)
{
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    const RVec& ev = es.eigenvalues();
    if (ev.size() > 0 && ev.minCoeff() < -tol) {
        throw ValidationError("psd_sqrt: eigenvalue " + std::to_string(ev.minCoeff()) +
                              " below tolerance");
    }
    RVec s = ev.unaryExpr([](double x) { return x > 0.0 ? std::sqrt(x) : 0.0; });
    return es.eigenvectors() * s.asDiagonal() * es.eigenvectors().adjoint();
}

Mat spectral_projector(const Mat& h, double threshold)
{
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    Mat p = Mat::Zero(h.rows(), h.cols());
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
        if (es.eigenvalues()(k) >= threshold) {
            const auto v = es.eigenvectors().col(k);
            p.noalias() += v * v.adjoint();
        }
    }
    return p;
}

Mat expm(const Mat& m)
{
    return m.exp();
}

Mat polar_unitary(const Mat& m)
{
    Eigen::BDCSVD<Mat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return svd.matrixU() * svd.matrixV().adjoint();
}

double trace_norm_hermitian(const Mat& h)
{
    return hermitian_eigenvalues(h).cwiseAbs().sum();
}

}  // namespace vqht
