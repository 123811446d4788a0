#include "doctest.h"
#include "poimps/tangent.hpp"
#include "test_helpers.hpp"

#include <random>

using namespace poimps;

namespace {

double gauge_fix_residual(const MpsTensor& A_L, const MpsTensor& V) {
    MatrixXcd acc = MatrixXcd::Zero(A_L.chi_r, V.chi_r);
    for (int s = 0; s < A_L.d; ++s) acc += A_L.m[s].adjoint() * V.m[s];
    return acc.cwiseAbs().maxCoeff();
}

cd flat_overlap(const MpsTensor& a, const MpsTensor& b) {
    cd acc = 0;
    for (int s = 0; s < a.d; ++s) acc += (a.m[s].adjoint() * b.m[s]).trace();
    return acc;
}

}  // namespace

TEST_CASE("null space of a chi = 1 spin-up tensor") {
    MpsTensor up(1, 2, 1);
    up.m[0](0, 0) = 1;
    const MatrixXcd nu = null_space(up);
    REQUIRE(nu.rows() == 2);
    REQUIRE(nu.cols() == 1);
    CHECK(std::abs(nu(0, 0)) < 1e-14);
    CHECK(std::abs(std::abs(nu(1, 0)) - 1.0) < 1e-14);
}

TEST_CASE("null space dimensions and residuals") {
    for (int chi : {2, 4}) {
        const auto st = mixed_canonical(random_tensor(chi, 2, 40 + chi));
        const MatrixXcd nu = null_space(st.A_L);
        CHECK(nu.rows() == 2 * chi);
        CHECK(nu.cols() == chi);
        CHECK((nu.adjoint() * nu - MatrixXcd::Identity(chi, chi)).cwiseAbs().maxCoeff() <= 1e-13);
        CHECK((nu.adjoint() * st.A_L.merged_left()).cwiseAbs().maxCoeff() <= 1e-13);
    }
}

TEST_CASE("null space rejects non-orthonormal input") {
    CHECK_THROWS_AS(null_space(random_tensor(2, 2, 3)), std::invalid_argument);
}

TEST_CASE("tangent basis counts") {
    const auto st1 = mixed_canonical(random_tensor(1, 2, 50));
    const auto b1 = tangent_basis(st1.A_L);
    CHECK(b1.size() == 2);

    const auto st2 = mixed_canonical(random_tensor(2, 2, 51));
    const auto b2 = tangent_basis(st2.A_L);
    CHECK(b2.size() == 8);
}

TEST_CASE("tangent basis invariants at chi = 3") {
    const auto st = mixed_canonical(random_tensor(3, 2, 52));
    const auto basis = tangent_basis(st.A_L);
    REQUIRE(basis.size() == 18);

    for (int i = 0; i < basis.n_complex(); ++i) {
        CHECK(gauge_fix_residual(st.A_L, basis.vectors_re[i]) <= 1e-12);
        CHECK(gauge_fix_residual(st.A_L, basis.vectors_im[i]) <= 1e-12);
        // i V_re = V_im holds exactly
        MpsTensor diff = basis.vectors_re[i];
        diff *= cd(0, 1);
        diff += cd(-1) * basis.vectors_im[i];
        CHECK(diff.frobenius_norm() == 0.0);
    }

    // orthonormality in the real inner product Re<.,.>
    for (int i = 0; i < basis.size(); ++i)
        for (int j = 0; j < basis.size(); ++j) {
            const double want = i == j ? 1.0 : 0.0;
            CHECK(std::abs(flat_overlap(basis.vector(i), basis.vector(j)).real() - want) <= 1e-12);
        }
}

TEST_CASE("completeness: gauge-fixed tensors expand exactly") {
    const auto st = mixed_canonical(random_tensor(3, 2, 53));
    const auto basis = tangent_basis(st.A_L);

    // random gauge-fixed direction B = sum_a x_a V_re[a], complex x
    std::mt19937_64 eng(4);
    std::uniform_real_distribution<double> u(-1, 1);
    MpsTensor B(3, 2, 3);
    std::vector<cd> coef(basis.n_complex());
    for (int a = 0; a < basis.n_complex(); ++a) {
        coef[a] = cd(u(eng), u(eng));
        MpsTensor t = basis.vectors_re[a];
        t *= coef[a];
        B += t;
    }
    CHECK(gauge_fix_residual(st.A_L, B) <= 1e-12);

    MpsTensor rec(3, 2, 3);
    for (int a = 0; a < basis.n_complex(); ++a) {
        const cd c = flat_overlap(basis.vectors_re[a], B);
        MpsTensor t = basis.vectors_re[a];
        t *= c;
        rec += t;
    }
    rec *= cd(-1);
    rec += B;
    CHECK(rec.frobenius_norm() <= 1e-12);
}

TEST_CASE("tangent directions change the physical state at order eps^2") {
    const auto st = mixed_canonical(random_tensor(2, 2, 54));
    const auto basis = tangent_basis(st.A_L);
    for (int a = 0; a < basis.n_complex(); ++a) {
        double deficit[2];
        const double eps[2] = {1e-2, 1e-3};
        for (int k = 0; k < 2; ++k) {
            MpsTensor pert = basis.vectors_re[a];
            pert *= cd(eps[k]);
            pert += st.A_L;
            deficit[k] = 1.0 - fidelity_density(normalized(pert), st.A_L);
        }
        CHECK(deficit[1] > 1e-12);  // not a gauge direction
        CHECK(deficit[1] < 1e-4);
        const double ratio = deficit[0] / deficit[1];  // ~ (eps0/eps1)^2
        CHECK(ratio > 50.0);
        CHECK(ratio < 200.0);
    }
}

TEST_CASE("basis ordering is deterministic") {
    const auto st = mixed_canonical(random_tensor(3, 2, 55));
    const auto b1 = tangent_basis(st.A_L);
    const auto b2 = tangent_basis(st.A_L);
    for (int i = 0; i < b1.size(); ++i) {
        MpsTensor diff = b1.vector(i);
        diff *= cd(-1);
        diff += b2.vector(i);
        CHECK(diff.frobenius_norm() == 0.0);
    }
}
