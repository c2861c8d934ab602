#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "vqht/circuit.hpp"
#include "vqht/errors.hpp"
#include "vqht/qsim.hpp"

using namespace vqht;
using Catch::Approx;

namespace {

Vec ket(std::initializer_list<cplx> v)
{
    Vec out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (auto x : v) out(i++) = x;
    return out;
}

const double kS = 1.0 / std::sqrt(2.0);

DensityMatrix plus() { return DensityMatrix::from_ket({2}, ket({kS, kS})); }

KrausChannel random_channel(int dim, int n_kraus, std::uint64_t seed)
{
    // Columns of a Haar isometry split into Kraus blocks.
    const Mat u = haar_random_unitary(dim * n_kraus, seed);
    std::vector<Mat> ks;
    for (int k = 0; k < n_kraus; ++k) ks.push_back(u.block(k * dim, 0, dim, dim));
    std::vector<int> dims;
    for (int d = dim; d > 1; d /= 2) dims.push_back(2);
    return KrausChannel(dims, dims, ks);
}

double max_abs(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("density matrix validation")
{
    CHECK_THROWS_AS(DensityMatrix({2}, Mat::Identity(2, 2)), ValidationError);
    Mat nh = Mat::Identity(2, 2) * 0.5;
    nh(0, 1) = 0.1;
    CHECK_THROWS_AS(DensityMatrix({2}, nh), ValidationError);
    Mat neg = Mat::Zero(2, 2);
    neg(0, 0) = 1.5;
    neg(1, 1) = -0.5;
    CHECK_THROWS_AS(DensityMatrix({2}, neg), ValidationError);
    CHECK_THROWS_AS(DensityMatrix({1}, Mat::Identity(1, 1)), UsageError);
    CHECK_THROWS_AS(DensityMatrix({2, 2}, Mat::Identity(2, 2) * 0.5), UsageError);
}

TEST_CASE("tensor product")
{
    const auto z = DensityMatrix::basis({2}, 0);
    const auto zz = tensor_product(z, z);
    CHECK(zz.dims() == std::vector<int>{2, 2});
    CHECK(std::abs(zz.data()(0, 0) - 1.0) < 1e-15);
    CHECK(std::abs(zz.trace() - 1.0) < 1e-15);

    const auto mm = tensor_product(DensityMatrix::maximally_mixed({2}), DensityMatrix::maximally_mixed({2}));
    CHECK(max_abs(mm.data() - Mat::Identity(4, 4) / 4.0) < 1e-15);

    const auto pq = tensor_product(plus(), DensityMatrix::basis({3}, 1));
    CHECK(pq.dims() == std::vector<int>{2, 3});
    CHECK(std::abs(pq.trace() - 1.0) < 1e-14);
    CHECK(pq.purity() == Approx(1.0).margin(1e-14));
    CHECK(std::abs(pq.data()(1, 4) - 0.5) < 1e-15);

    const auto big = DensityMatrix::maximally_mixed({4, 4, 4, 4, 4});
    CHECK_THROWS_AS(tensor_product(big, big), ResourceError);
}

TEST_CASE("partial trace")
{
    const int keep0[] = {0};
    const int keep1[] = {1};
    const Mat bell = [] {
        Vec v = Vec::Zero(4);
        v(0) = v(3) = kS;
        return Mat(v * v.adjoint());
    }();
    const auto red = partial_trace(DensityMatrix({2, 2}, bell), keep0);
    CHECK(max_abs(red.data() - Mat::Identity(2, 2) / 2.0) < 1e-15);

    // |01> on [2, 3]: the qutrit is left in |1>.
    const auto s = DensityMatrix::basis({2, 3}, 1);
    const auto q = partial_trace(s, keep1);
    CHECK(q.dims() == std::vector<int>{3});
    CHECK(std::abs(q.data()(1, 1) - 1.0) < 1e-15);

    CHECK_THROWS_AS(partial_trace(s, std::span<const int>{}), UsageError);

    SECTION("recovers factors of product states")
    {
        for (std::uint64_t seed = 0; seed < 50; ++seed) {
            const auto a = random_density_matrix({2, 3}, 1 + static_cast<int>(seed % 6), seed);
            const auto b = random_density_matrix({2}, 1 + static_cast<int>(seed % 2), 1000 + seed);
            const auto ab = tensor_product(a, b);
            const int ka[] = {0, 1};
            const int kb[] = {2};
            CHECK(max_abs(partial_trace(ab, ka).data() - a.data()) < 1e-12);
            CHECK(max_abs(partial_trace(ab, kb).data() - b.data()) < 1e-12);
        }
    }
}

TEST_CASE("apply unitary")
{
    const int t0[] = {0};
    const int t01[] = {0, 1};
    const auto zz = DensityMatrix::basis({2, 2}, 0);
    CHECK(max_abs(apply_unitary(zz, Mat::Identity(2, 2), t0).data() - zz.data()) < 1e-15);
    CHECK(std::abs(apply_unitary(zz, gates::pauli_x(), t0).data()(2, 2) - 1.0) < 1e-15);

    const auto pp = tensor_product(plus(), plus());
    const auto out = apply_unitary(pp, gates::controlled_phase(2, 2), t01);
    const Vec want = ket({0.5, 0.5, 0.5, -0.5});
    CHECK(std::abs((want.adjoint() * out.data() * want)(0, 0) - 1.0) < 1e-14);

    Mat bad = Mat::Identity(2, 2);
    bad(0, 0) = 2.0;
    CHECK_THROWS_AS(apply_unitary(zz, bad, t0), ValidationError);
    CHECK_THROWS_AS(apply_unitary(zz, Mat::Identity(4, 4), t0), UsageError);

    SECTION("spectrum is preserved")
    {
        const int t12[] = {1, 2};
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const auto rho = random_density_matrix({2, 2, 3}, 3, seed);
            const auto r2 = apply_unitary(rho, haar_random_unitary(6, seed + 50), t12);
            CHECK((hermitian_eigenvalues(rho.data()) - hermitian_eigenvalues(r2.data())).cwiseAbs().maxCoeff() <
                  1e-10);
        }
    }
}

TEST_CASE("apply channel")
{
    const int t0[] = {0};
    CHECK(max_abs(apply_channel(plus(), KrausChannel::identity({2}), t0).data() - plus().data()) < 1e-15);
    CHECK(max_abs(apply_channel(plus(), phase_flip_channel(0.5), t0).data() - Mat::Identity(2, 2) / 2.0) < 1e-15);

    const auto dep = pauli_channel(0.25, 0.25, 0.25, 0.25);
    const auto any = random_density_matrix({2}, 1, 3);
    CHECK(max_abs(apply_channel(any, dep, t0).data() - Mat::Identity(2, 2) / 2.0) < 1e-15);

    const auto pf = apply_channel(plus(), phase_flip_channel(0.3), t0);
    CHECK(std::abs(pf.data()(0, 1) - 0.5 * 0.4) < 1e-15);

    std::vector<Mat> bad{Mat::Identity(2, 2), Mat::Identity(2, 2)};
    CHECK_THROWS_AS(KrausChannel({2}, {2}, bad), ValidationError);
    CHECK_THROWS_AS(phase_flip_channel(1.2), UsageError);

    SECTION("outputs are valid states")
    {
        std::mt19937_64 rng(9);
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            const int nq = 1 + static_cast<int>(seed % 4);
            const std::vector<int> dims(static_cast<std::size_t>(nq), 2);
            const auto rho = random_density_matrix(dims, 1 + static_cast<int>(seed % 3), seed);
            const int width = std::min(nq, 2);
            const auto ch = random_channel(1 << width, 1 + static_cast<int>(seed % 4), 500 + seed);
            std::vector<int> targets(static_cast<std::size_t>(nq));
            for (int i = 0; i < nq; ++i) targets[static_cast<std::size_t>(i)] = i;
            std::shuffle(targets.begin(), targets.end(), rng);
            targets.resize(static_cast<std::size_t>(width));
            const auto out = apply_channel(rho, ch, targets);
            CHECK(hermiticity_error(out.data()) < 1e-10);
            CHECK(std::abs(out.trace() - 1.0) < 1e-10);
            CHECK(hermitian_eigenvalues(out.data()).minCoeff() > -1e-9);
        }
    }
}

TEST_CASE("two-outcome Naimark unitary")
{
    const auto prob0 = [](const Mat& u, const Mat& rho) {
        const Eigen::Index n = rho.rows();
        const Mat b = u.leftCols(n).topRows(n);
        return (b * rho * b.adjoint()).trace().real();
    };
    const Mat z = DensityMatrix::basis({2}, 0).data();
    CHECK(prob0(naimark_unitary(Mat::Identity(2, 2)), z) == Approx(1.0).margin(1e-12));
    CHECK(prob0(naimark_unitary(Mat::Zero(2, 2)), z) == Approx(0.0).margin(1e-12));
    CHECK(prob0(naimark_unitary(plus().data()), z) == Approx(0.5).margin(1e-12));

    Mat too_big = Mat::Identity(2, 2) * 1.1;
    CHECK_THROWS_AS(naimark_unitary(too_big), ValidationError);

    SECTION("reproduces Tr(G rho) on random pairs")
    {
        for (std::uint64_t seed = 0; seed < 50; ++seed) {
            const int d = 2 + static_cast<int>(seed % 3);
            const Mat u = haar_random_unitary(d, seed);
            RVec lam = RVec::Zero(d);
            std::mt19937_64 rng(seed);
            std::uniform_real_distribution<double> unif(0.0, 1.0);
            for (int i = 0; i < d; ++i) lam(i) = unif(rng);
            const Mat g = u * lam.cast<cplx>().asDiagonal() * u.adjoint();
            const Mat rho = random_density_matrix({d}, 1 + static_cast<int>(seed % d), 100 + seed).data();
            const Mat nu = naimark_unitary(g);
            CHECK(unitarity_error(nu) < 1e-9);
            CHECK(std::abs(prob0(nu, rho) - (g * rho).trace().real()) < 1e-10);
        }
    }
}

TEST_CASE("multi-outcome Naimark unitary")
{
    const auto probs = [](const Mat& u, const Mat& rho, int k) {
        const Eigen::Index n = rho.rows();
        std::vector<double> p;
        for (int j = 0; j < k; ++j) {
            const Mat b = u.block(j * n, 0, n, n);
            p.push_back((b * rho * b.adjoint()).trace().real());
        }
        return p;
    };
    const Mat z = DensityMatrix::basis({2}, 0).data();

    Mat p0 = Mat::Zero(2, 2), p1 = Mat::Zero(2, 2);
    p0(0, 0) = 1.0;
    p1(1, 1) = 1.0;
    const auto basis = probs(naimark_unitary_multi(Povm({2}, {p0, p1})), z, 2);
    CHECK(basis[0] == Approx(1.0).margin(1e-12));
    CHECK(basis[1] == Approx(0.0).margin(1e-12));

    const Mat third = Mat::Identity(2, 2) / 3.0;
    const Mat uu = naimark_unitary_multi(Povm({2}, {third, third, third}));
    CHECK(unitarity_error(uu) < 1e-10);
    for (double p : probs(uu, random_density_matrix({2}, 2, 4).data(), 3)) CHECK(p == Approx(1.0 / 3.0).margin(1e-10));

    std::vector<Mat> trine;
    for (int j = 0; j < 3; ++j) {
        const double a = 2.0 * std::numbers::pi * j / 3.0;
        const Vec v = ket({std::cos(a / 2.0), std::sin(a / 2.0)});
        trine.push_back(2.0 / 3.0 * v * v.adjoint());
    }
    const auto pt = probs(naimark_unitary_multi(Povm({2}, trine)), z, 3);
    CHECK(pt[0] == Approx(2.0 / 3.0).margin(1e-10));
    CHECK(pt[1] == Approx(1.0 / 6.0).margin(1e-10));
    CHECK(pt[2] == Approx(1.0 / 6.0).margin(1e-10));

    CHECK_THROWS_AS(Povm({2}, {p0, p0}), ValidationError);
}

TEST_CASE("Haar unitaries")
{
    const Mat a = haar_random_unitary(5, 77);
    CHECK(max_abs(a - haar_random_unitary(5, 77)) == 0.0);
    CHECK(max_abs(a - haar_random_unitary(5, 78)) > 1e-3);
    CHECK(max_abs(a * a.adjoint() - Mat::Identity(5, 5)) < 1e-12);
    const Eigen::ComplexEigenSolver<Mat> es(a);
    for (Eigen::Index i = 0; i < 5; ++i) CHECK(std::abs(std::abs(es.eigenvalues()(i)) - 1.0) < 1e-10);
}

TEST_CASE("hardware-efficient ansatz")
{
    CHECK(build_hardware_efficient_ansatz({2, 2, 2, 2}, 1).n_params() == 12);
    CHECK(build_hardware_efficient_ansatz({3, 2, 2, 2, 2}, 1).n_params() == 20);
    CHECK(build_hardware_efficient_ansatz({3, 2, 2, 2, 2}, 5).n_params() == 100);

    // Zero parameters leave only the CZ ring.
    const auto c = build_hardware_efficient_ansatz({2, 2, 2}, 2);
    const Mat u = c.unitary(RVec::Zero(c.n_params()));
    CHECK(max_abs(u - u.diagonal().asDiagonal().toDenseMatrix()) < 1e-14);
    const Mat ring_sq = u * u;
    CHECK(max_abs(ring_sq - Mat::Identity(8, 8)) < 1e-14);

    const auto gm = gell_mann_basis(3);
    REQUIRE(gm.size() == 8);
    for (std::size_t i = 0; i < gm.size(); ++i) {
        CHECK(hermiticity_error(gm[i]) < 1e-15);
        CHECK(std::abs(gm[i].trace()) < 1e-15);
        for (std::size_t j = 0; j < gm.size(); ++j) {
            CHECK(std::abs((gm[i] * gm[j]).trace() - (i == j ? 2.0 : 0.0)) < 1e-14);
        }
    }
}
