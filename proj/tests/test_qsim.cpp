#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bit>
#include <complex>

#include "qkd/qsim.hpp"

using namespace qkd;
using std::complex;

namespace {

// n-fold Kronecker power of the 2x2 Hadamard, the direct tensor oracle
CMatrix hadamard_power(int n) {
    CMatrix h(2, 2);
    const double r = 1.0 / std::sqrt(2.0);
    h << r, r, r, -r;
    CMatrix acc = CMatrix::Identity(1, 1);
    for (int i = 0; i < n; ++i) {
        CMatrix next(acc.rows() * 2, acc.cols() * 2);
        next.topLeftCorner(acc.rows(), acc.cols()) = h(0, 0) * acc;
        next.topRightCorner(acc.rows(), acc.cols()) = h(0, 1) * acc;
        next.bottomLeftCorner(acc.rows(), acc.cols()) = h(1, 0) * acc;
        next.bottomRightCorner(acc.rows(), acc.cols()) = h(1, 1) * acc;
        acc = next;
    }
    return acc;
}

int64_t binomial_ball(int n, int radius) {
    int64_t total = 0;
    for (uint64_t s = 0; s < (uint64_t(1) << n); ++s)
        if (std::popcount(s) <= radius) ++total;
    return total;
}

} // namespace

TEST_CASE("bb84 qubit preparation") {
    auto s0 = prepare_bb84_qubit(0, Basis::plus);
    CHECK(s0.amplitudes()(0) == complex<double>(1, 0));
    CHECK(s0.amplitudes()(1) == complex<double>(0, 0));

    auto s1x = prepare_bb84_qubit(1, Basis::times);
    CHECK(s1x.amplitudes()(0).real() == doctest::Approx(1 / std::sqrt(2.0)));
    CHECK(s1x.amplitudes()(1).real() == doctest::Approx(-1 / std::sqrt(2.0)));
}

TEST_CASE("conjugate-basis measurement of a plus-basis state is unbiased") {
    auto plus0 = prepare_bb84_qubit(0, Basis::times);
    auto rho = DensityOperator::pure(plus0);
    auto pvm = computational_pvm(1);

    int zeros = 0;
    const int draws = 10000;
    for (int i = 0; i < draws; ++i)
        if (measure(rho, pvm, derive_seed(77, uint64_t(i))).index == 0) ++zeros;
    CHECK(double(zeros) / draws == doctest::Approx(0.5).epsilon(0.04));
}

TEST_CASE("conjugate basis states") {
    auto z0 = conjugate_basis_state(BitString::from_string("0"));
    CHECK(z0.amplitudes()(0).real() == doctest::Approx(1 / std::sqrt(2.0)));
    CHECK(z0.amplitudes()(1).real() == doctest::Approx(1 / std::sqrt(2.0)));

    // unbiasedness and sign pattern against the direct tensor oracle
    for (int n = 1; n <= 6; ++n) {
        CMatrix h = hadamard_power(n);
        for (uint64_t zv = 0; zv < (uint64_t(1) << n); ++zv) {
            auto zbar = conjugate_basis_state(BitString::from_index(zv, n));
            for (int64_t x = 0; x < (int64_t(1) << n); ++x) {
                CHECK(std::norm(zbar.amplitudes()(x)) == doctest::Approx(std::pow(2.0, -n)));
                CHECK(std::abs(zbar.amplitudes()(x) - h(x, int64_t(zv))) < 1e-12);
            }
        }
    }
    CHECK_THROWS_AS(conjugate_basis_state(BitString(13)), std::invalid_argument);
}

TEST_CASE("hamming ball projector") {
    // radius n: the full space
    auto full = hamming_ball_projector(BitString::from_string("101"), 3);
    CHECK((full.matrix() - CMatrix::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-9);

    // n=4 radius=1: rank 5 via eigenvalue count
    auto ball = hamming_ball_projector(BitString::from_string("0110"), 1);
    CHECK(ball.is_projector());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(ball.matrix(), Eigen::EigenvaluesOnly);
    int rank = 0;
    for (int i = 0; i < es.eigenvalues().size(); ++i)
        if (es.eigenvalues()(i) > 0.5) ++rank;
    CHECK(rank == 5);

    Rng rng(81);
    for (int rep = 0; rep < 10; ++rep) {
        int n = 2 + int(rng.next_below(4));
        int radius = int(rng.next_below(uint64_t(n) + 1));
        auto p = hamming_ball_projector(BitString::random(n, rng), radius);
        CHECK(p.projector_residue() < 1e-9);

        Eigen::SelfAdjointEigenSolver<CMatrix> ev(p.matrix(), Eigen::EigenvaluesOnly);
        int observed = 0;
        for (int i = 0; i < ev.eigenvalues().size(); ++i)
            if (ev.eigenvalues()(i) > 0.5) ++observed;
        CHECK(observed == binomial_ball(n, radius));
    }
}

TEST_CASE("measure: deterministic outcome and post-state support") {
    auto rho = DensityOperator::pure(prepare_bb84_qubit(0, Basis::plus));
    auto pvm = computational_pvm(1);
    for (uint64_t s = 0; s < 20; ++s) {
        auto out = measure(rho, pvm, s);
        CHECK(out.label == "0");
    }

    // post-state lives in the range of the measured projector
    auto mixed = DensityOperator::maximally_mixed(4);
    auto pvm2 = computational_pvm(2);
    auto out = measure(mixed, pvm2, 5);
    CHECK(expectation(out.post_state, pvm2.element(out.index)) == doctest::Approx(1.0));
}

TEST_CASE("expectation identities") {
    auto mixed = DensityOperator::maximally_mixed(4);
    CHECK(expectation(mixed, HermitianOp(CMatrix::Identity(4, 4))) == doctest::Approx(1.0));

    auto rho0 = DensityOperator::pure(prepare_bb84_qubit(0, Basis::plus));
    CMatrix e1 = CMatrix::Zero(2, 2);
    e1(1, 1) = 1.0;
    CHECK(expectation(rho0, HermitianOp(e1)) == doctest::Approx(0.0));

    // maximally mixed on 2 qubits against random rank-r projectors
    Rng rng(82);
    for (int r = 0; r <= 4; ++r) {
        auto p = random_projector(4, r, rng);
        CHECK(expectation(mixed, p) == doctest::Approx(r / 4.0).epsilon(1e-9));
    }
}

TEST_CASE("partial trace") {
    Rng rng(83);

    // product state: tracing B recovers A
    auto rho_a = random_density(2, 2, rng);
    auto rho_b = random_density(3, 1, rng);
    CMatrix prod = CMatrix::Zero(6, 6);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            prod.block(i * 3, j * 3, 3, 3) = rho_a.matrix()(i, j) * rho_b.matrix();
    auto reduced = partial_trace(DensityOperator(prod), {2, 3}, {true, false});
    CHECK((reduced.matrix() - rho_a.matrix()).cwiseAbs().maxCoeff() < 1e-10);

    // Bell state: either side is maximally mixed
    CVector bell(4);
    bell << 1 / std::sqrt(2.0), 0, 0, 1 / std::sqrt(2.0);
    auto rho_bell = DensityOperator::pure(StateVector(2, bell));
    for (bool keep_first : {true, false}) {
        auto half = partial_trace(rho_bell, {2, 2}, {keep_first, !keep_first});
        CHECK((half.matrix() - CMatrix::Identity(2, 2) / 2.0).cwiseAbs().maxCoeff() < 1e-10);
    }

    // trace preservation on random states
    for (int rep = 0; rep < 5; ++rep) {
        auto rho = random_density(8, 1 + int(rng.next_below(8)), rng);
        auto red = partial_trace(rho, {2, 2, 2}, {true, false, true});
        CHECK(red.matrix().trace().real() == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("projection perturbation: degenerate cases") {
    Rng rng(84);
    auto rho = random_density(6, 3, rng);
    auto q = random_projector(6, 2, rng);

    // P = identity: both sides vanish
    auto full = HermitianOp(CMatrix::Identity(6, 6));
    auto c1 = verify_projection_perturbation(rho, full, q);
    CHECK(c1.lhs < 1e-9);
    CHECK(c1.rhs < 1e-6);
    CHECK(c1.holds);

    // Q = 0: lhs vanishes
    auto p = random_projector(6, 3, rng);
    auto c2 = verify_projection_perturbation(rho, p, HermitianOp(CMatrix::Zero(6, 6)));
    CHECK(c2.lhs < 1e-12);
    CHECK(c2.holds);

    CHECK_THROWS_AS(verify_projection_perturbation(rho, HermitianOp(CMatrix::Identity(6, 6) * 0.5),
                                                   q),
                    std::invalid_argument);
}

TEST_CASE("projection perturbation sweep holds and matches serial reference") {
    auto par = run_perturbation_sweep(120, 2, 16, 4242);
    auto ser = run_perturbation_sweep_serial(120, 2, 16, 4242);
    CHECK(par.violations == 0);
    CHECK(ser.violations == 0);
    CHECK(par.max_ratio == doctest::Approx(ser.max_ratio).epsilon(1e-14));
    CHECK(par.max_lhs == doctest::Approx(ser.max_lhs).epsilon(1e-14));
    CHECK(par.max_ratio <= 1.0 + 1e-9);
}

TEST_CASE("construction invariants reject bad inputs") {
    CMatrix notherm(2, 2);
    notherm << 0.0, complex<double>(0, 1), complex<double>(0, 1), 1.0;
    CHECK_THROWS_AS(DensityOperator{notherm}, std::invalid_argument);

    CMatrix toobig = CMatrix::Identity(2, 2); // trace 2
    CHECK_THROWS_AS(DensityOperator{toobig}, std::invalid_argument);

    CMatrix neg(2, 2);
    neg << 1.5, 0.0, 0.0, -0.5;
    CHECK_THROWS_AS(DensityOperator{neg}, std::invalid_argument);

    CVector unnormalized(2);
    unnormalized << 1.0, 1.0;
    CHECK_THROWS_AS((StateVector{1, unnormalized}), std::invalid_argument);

    // PVM with non-orthogonal elements
    CMatrix e0 = CMatrix::Zero(2, 2);
    e0(0, 0) = 1.0;
    std::vector<std::pair<std::string, HermitianOp>> overlap;
    overlap.emplace_back("a", HermitianOp(e0));
    overlap.emplace_back("b", HermitianOp(e0));
    CHECK_THROWS_AS(Pvm(std::move(overlap)), std::invalid_argument);
}
