#include "doctest.h"
#include "poimps/model.hpp"
#include "test_helpers.hpp"

#include <Eigen/Eigenvalues>

using namespace poimps;

TEST_CASE("kicked_ising at the dual-unitary point") {
    const KickedIsingParams p(M_PI / 2);
    CHECK(p.g == doctest::Approx(M_PI / 2));
    CHECK(p.h == doctest::Approx(1.0));
    CHECK(p.T == doctest::Approx(1.0));
    const auto sched = kicked_ising(p);
    sched.validate();
    REQUIRE(sched.segments.size() == 2);
    CHECK(sched.segments[0].duration == doctest::Approx(0.5));
    CHECK(sched.segments[1].duration == doctest::Approx(0.5));
    CHECK(sched.total_period == doctest::Approx(1.0));
    CHECK_FALSE(sched.segments[0].single_site_only);
    CHECK(sched.segments[1].single_site_only);
}

TEST_CASE("kicked_ising with all couplings zero") {
    const auto sched = kicked_ising(KickedIsingParams(0, 0, 0, 1));
    CHECK(sched.segments[0].two_site.cwiseAbs().maxCoeff() == doctest::Approx(0.0));
    CHECK(sched.segments[1].two_site.cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("zz-segment bond eigenvalues at J = 1.09") {
    const auto sched = kicked_ising(KickedIsingParams(1.09));
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(sched.segments[0].two_site);
    VectorXd w = es.eigenvalues();
    std::sort(w.data(), w.data() + w.size());
    CHECK(w(0) == doctest::Approx(-1.09).epsilon(1e-12));
    CHECK(w(1) == doctest::Approx(-1.09).epsilon(1e-12));
    CHECK(w(2) == doctest::Approx(0.09).epsilon(1e-12));
    CHECK(w(3) == doctest::Approx(2.09).epsilon(1e-12));
}

TEST_CASE("bond terms are Hermitian as stored") {
    for (double J : {0.0, 0.6, 1.09, M_PI / 2}) {
        const auto sched = kicked_ising(KickedIsingParams(J));
        for (const auto& seg : sched.segments)
            CHECK((seg.two_site - seg.two_site.adjoint()).cwiseAbs().maxCoeff() <= 1e-14);
    }
}

TEST_CASE("invalid period is rejected") {
    CHECK_THROWS_AS(kicked_ising(KickedIsingParams(1.0, 1.0, 1.0, 0.0)), std::invalid_argument);
}

TEST_CASE("bond sum over a periodic ring reproduces H1") {
    const double J = 1.09, h = 1.0;
    const auto sched = kicked_ising(KickedIsingParams(J));
    for (int L : {3, 4, 6}) {
        const MatrixXcd from_bonds = testing::bond_sum_on_ring(sched.segments[0].two_site, L);
        MatrixXcd direct = MatrixXcd::Zero(1L << L, 1L << L);
        for (int i = 0; i < L; ++i) {
            direct += J * testing::two_site_on_ring(kron(pauli_z(), pauli_z()), i, L);
            direct += h * testing::one_site_on_ring(pauli_z(), i, L);
        }
        CHECK((from_bonds - direct).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("single-site propagator of the kick segment") {
    SUBCASE("g = pi/2, duration 1/2") {
        const auto sched = kicked_ising(KickedIsingParams(M_PI / 2));
        const MatrixXcd u = segment_unitary_single_site(sched.segments[1]);
        const MatrixXcd expect =
            std::cos(M_PI / 4) * pauli_id() - cd(0, 1) * std::sin(M_PI / 4) * pauli_x();
        CHECK((u - expect).cwiseAbs().maxCoeff() < 1e-13);
    }
    SUBCASE("g = 0 gives the identity") {
        const auto sched = kicked_ising(KickedIsingParams(0.0, 0.0, 1.0, 1.0));
        const MatrixXcd u = segment_unitary_single_site(sched.segments[1]);
        CHECK((u - pauli_id()).cwiseAbs().maxCoeff() < 1e-14);
    }
    SUBCASE("g = 1.09 closed form") {
        const auto sched = kicked_ising(KickedIsingParams(1.09));
        const MatrixXcd u = segment_unitary_single_site(sched.segments[1]);
        CHECK(std::abs(u(0, 0) - cd(std::cos(0.545), 0)) < 1e-13);
        CHECK(std::abs(u(0, 1) - cd(0, -std::sin(0.545))) < 1e-13);
    }
    SUBCASE("rejects genuine two-site content") {
        auto sched = kicked_ising(KickedIsingParams(1.09));
        auto bad = sched.segments[0];
        bad.single_site_only = true;
        CHECK_THROWS_AS(segment_unitary_single_site(bad), std::invalid_argument);
    }
}
