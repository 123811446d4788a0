#include "doctest.h"
#include "poimps/linalg.hpp"

#include <random>

using namespace poimps;

namespace {

MatrixXcd random_matrix(int m, int n, unsigned seed) {
    std::mt19937_64 eng(seed);
    std::uniform_real_distribution<double> u(-1, 1);
    MatrixXcd M(m, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < m; ++i) M(i, j) = cd(u(eng), u(eng));
    return M;
}

}  // namespace

TEST_CASE("gauged_qr fixes signs on diagonal input") {
    MatrixXcd M = MatrixXcd::Zero(2, 2);
    M(0, 0) = 2;
    M(1, 1) = -3;
    auto [Q, R] = gauged_qr(M);
    CHECK(std::abs(Q(0, 0) - cd(1)) < 1e-14);
    CHECK(std::abs(Q(1, 1) - cd(-1)) < 1e-14);
    CHECK(std::abs(R(0, 0) - cd(2)) < 1e-14);
    CHECK(std::abs(R(1, 1) - cd(3)) < 1e-14);
}

TEST_CASE("gauged_qr of identity is identity") {
    auto [Q, R] = gauged_qr(MatrixXcd::Identity(3, 3));
    CHECK((Q - MatrixXcd::Identity(3, 3)).norm() < 1e-14);
    CHECK((R - MatrixXcd::Identity(3, 3)).norm() < 1e-14);
}

TEST_CASE("gauged_qr reconstructs random input with positive diagonal") {
    const MatrixXcd M = random_matrix(4, 2, 11);
    auto [Q, R] = gauged_qr(M);
    CHECK((M - Q * R).norm() < 1e-13);
    CHECK((Q.adjoint() * Q - MatrixXcd::Identity(2, 2)).norm() < 1e-13);
    for (int j = 0; j < 2; ++j) {
        CHECK(R(j, j).imag() == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(R(j, j).real() > 0);
    }
}

TEST_CASE("gauged_qr rejects rank-deficient input") {
    MatrixXcd M = MatrixXcd::Zero(3, 2);
    M.col(0).setOnes();
    M.col(1).setOnes();
    CHECK_THROWS_AS(gauged_qr(M), DegenerateInputError);
}

TEST_CASE("gauged_svd on diagonal and sign cases") {
    MatrixXcd M = MatrixXcd::Zero(2, 2);
    M(0, 0) = 3;
    M(1, 1) = 1;
    auto sv = gauged_svd(M);
    CHECK((sv.U - MatrixXcd::Identity(2, 2)).norm() < 1e-14);
    CHECK((sv.V - MatrixXcd::Identity(2, 2)).norm() < 1e-14);
    CHECK(sv.S(0) == doctest::Approx(3));
    CHECK(sv.S(1) == doctest::Approx(1));

    MatrixXcd N(1, 1);
    N(0, 0) = -2;
    auto sn = gauged_svd(N);
    CHECK(std::abs(sn.U(0, 0) - cd(1)) < 1e-14);
    CHECK(std::abs(sn.V(0, 0) - cd(-1)) < 1e-14);
    CHECK(sn.S(0) == doctest::Approx(2));
}

TEST_CASE("gauged_svd reconstructs and gauges a random matrix") {
    const MatrixXcd M = random_matrix(3, 3, 5);
    auto sv = gauged_svd(M);
    const MatrixXcd rec = sv.U * sv.S.cast<cd>().asDiagonal() * sv.V.adjoint();
    CHECK((M - rec).norm() < 1e-13);
    for (int k = 0; k < 3; ++k) {
        for (int i = 0; i < 3; ++i) {
            if (std::abs(sv.U(i, k)) > 1e-12) {
                CHECK(sv.U(i, k).imag() == doctest::Approx(0.0).epsilon(1e-12));
                CHECK(sv.U(i, k).real() > 0);
                break;
            }
        }
    }
}

TEST_CASE("polar_unitary produces isometry") {
    const MatrixXcd M = random_matrix(6, 3, 7);
    double sv = 0;
    const MatrixXcd U = polar_unitary(M, &sv);
    CHECK((U.adjoint() * U - MatrixXcd::Identity(3, 3)).norm() < 1e-13);
    CHECK(sv > 0);
    // M U^dag... P = U^dag M must be Hermitian positive
    const MatrixXcd P = U.adjoint() * M;
    CHECK((P - P.adjoint()).norm() < 1e-12);
}

TEST_CASE("dominant_eig matches dense and arnoldi paths") {
    for (int dim : {12, 80}) {
        const MatrixXcd M = random_matrix(dim, dim, 100 + dim);
        auto apply = [&](const VectorXcd& v, VectorXcd& out) { out = M * v; };
        const auto de = dominant_eig(apply, dim, 1e-12);
        const auto ev = eigenvalues_by_magnitude(M);
        CHECK(std::abs(de.value - ev[0]) < 1e-9 * std::abs(ev[0]));
        CHECK((M * de.vector - de.value * de.vector).norm() < 1e-8 * std::abs(ev[0]));
    }
}

TEST_CASE("expm_apply matches dense exponential") {
    const int dim = 10;
    MatrixXcd H = random_matrix(dim, dim, 42);
    H = (H + H.adjoint()).eval();  // Hermitian generator
    auto apply = [&](const VectorXcd& v, VectorXcd& out) { out = H * v; };
    const VectorXcd v = random_matrix(dim, 1, 43).col(0);

    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(H);
    const cd z(0, -0.37);
    MatrixXcd ph = MatrixXcd::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) ph(i, i) = std::exp(z * es.eigenvalues()(i));
    const VectorXcd exact = es.eigenvectors() * ph * es.eigenvectors().adjoint() * v;

    const VectorXcd got = expm_apply(apply, v, z, 1e-14);
    CHECK((got - exact).norm() < 1e-12 * exact.norm());
}

TEST_CASE("solve_linear dense and gmres agree") {
    for (int dim : {20, 150}) {
        MatrixXcd A = random_matrix(dim, dim, 7 + dim);
        A += 10.0 * MatrixXcd::Identity(dim, dim);  // well conditioned
        const VectorXcd b = random_matrix(dim, 1, 9 + dim).col(0);
        auto apply = [&](const VectorXcd& v, VectorXcd& out) { out = A * v; };
        const VectorXcd x = solve_linear(apply, b, 1e-12, dim);
        CHECK((A * x - b).norm() < 1e-9 * b.norm());
    }
}

TEST_CASE("dft magnitudes locate a pure tone") {
    const int n = 256;
    std::vector<double> x(n);
    for (int j = 0; j < n; ++j) x[j] = 3.0 + std::cos(2 * M_PI * 20 * j / n);
    const auto mags = dft_magnitudes(x);
    int best = 0;
    for (int k = 1; k < static_cast<int>(mags.size()); ++k)
        if (mags[k] > mags[best]) best = k;
    CHECK(best == 20);
}
