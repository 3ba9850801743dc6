#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qkd/synthetic.hpp"

using namespace qkd;

namespace {

LinearCode rep3() { return LinearCode(Gf2Matrix({BitString::from_string("111")})); }

} // namespace

TEST_CASE("single-program instance has exact distinguishability") {
    auto inst = build_synthetic_instance(rep3(), 7, 1);
    CHECK(inst.exact_distinguishability());
    CHECK(inst.distinguishability_residue() < 1e-12);
    CHECK(inst.eve_dim() >= 2);
    CHECK(inst.joint_state().dim() == inst.alice_dim() * inst.eve_dim());
}

TEST_CASE("Q_L is a projector on random instances") {
    Rng rng(91);
    for (int rep = 0; rep < 12; ++rep) {
        LinearCode code = construct_code({3 + int(rng.next_below(2)), 1, 1}, rng.next_u64());
        auto inst = build_synthetic_instance(code, rng.next_u64(), 1 + int(rng.next_below(3)));
        CHECK(inst.listing_projector().projector_residue() < 1e-9);
    }
}

TEST_CASE("expectation of Q_L equals the classical coverage probability") {
    Rng rng(92);
    for (int rep = 0; rep < 12; ++rep) {
        LinearCode code = construct_code({4, 1 + int(rng.next_below(2)), 0}, rng.next_u64());
        auto inst = build_synthetic_instance(code, rng.next_u64(), 1 + int(rng.next_below(3)));
        HermitianOp ql = inst.listing_projector();
        double quantum = expectation(inst.joint_state(), ql);
        double classical = inst.classical_coverage();
        CHECK(std::abs(quantum - classical) < 1e-9);
        // the overflow label keeps coverage strictly inside (0, 1) generically
        CHECK(classical <= 1.0);
    }
}

TEST_CASE("listing bound on product instances: lhs near the counting term") {
    Rng rng(93);
    for (int rep = 0; rep < 8; ++rep) {
        auto inst = build_product_instance(rep3(), rng.next_u64(), 2);
        auto check = verify_listing_bound(inst, 0.4); // radius 1, d = 3
        CHECK(check.holds);
        // Eve uncorrelated: the coverage term dominates; lhs stays at the
        // |L| 2^{-M} scale rather than near 1
        CHECK(check.lhs <= double(inst.program_labels().size()) * 0.5 + 1e-9);
    }
}

TEST_CASE("maximally entangled register: tail vanishes, bound still holds") {
    Rng rng(94);
    for (int rep = 0; rep < 8; ++rep) {
        auto inst = build_entangled_instance(rep3(), rng.next_u64(), 2);
        auto check = verify_listing_bound(inst, 0.4);
        CHECK(check.tail < 1e-12);
        CHECK(check.holds);
        CHECK(check.rhs == doctest::Approx(2 * 0.5).epsilon(1e-9));
    }
}

TEST_CASE("lhs from the purification matches the joint-state expectation") {
    Rng rng(95);
    for (int rep = 0; rep < 8; ++rep) {
        LinearCode code = construct_code({3, 1, 2}, rng.next_u64());
        auto inst = build_synthetic_instance(code, rng.next_u64(), 2);
        auto check = verify_listing_bound(inst, 0.4);
        double direct = expectation(inst.joint_state(), inst.listing_projector());
        CHECK(check.lhs == doctest::Approx(direct).epsilon(1e-9));
    }
}

TEST_CASE("radius violating the distance condition is rejected") {
    auto inst = build_synthetic_instance(rep3(), 1, 1);
    // radius 2 with d = 3 fails 2*radius < d
    CHECK_THROWS_AS(verify_listing_bound(inst, 0.7), std::invalid_argument);
}

TEST_CASE("listing sweep: no violations, parallel matches serial") {
    auto par = run_listing_sweep(40, 777);
    auto ser = run_listing_sweep_serial(40, 777);
    CHECK(par.violations == 0);
    CHECK(ser.violations == 0);
    CHECK(par.max_distinguishability_residue == doctest::Approx(ser.max_distinguishability_residue).epsilon(1e-14));
    CHECK(par.max_projector_residue == doctest::Approx(ser.max_projector_residue).epsilon(1e-14));
    CHECK(par.max_coverage_residue == doctest::Approx(ser.max_coverage_residue).epsilon(1e-14));
    CHECK(par.max_ratio == doctest::Approx(ser.max_ratio).epsilon(1e-14));

    CHECK(par.max_distinguishability_residue < 1e-9);
    CHECK(par.max_projector_residue < 1e-9);
    CHECK(par.max_coverage_residue < 1e-9);
    CHECK(par.max_ratio <= 1.0 + 1e-9);
}

TEST_CASE("dimension budget is enforced") {
    // n = 6 with m = 2 needs eve dim >= 4, joint 64 * 4 = 256 > 128
    LinearCode code = construct_code({6, 2, 0}, 3);
    CHECK_THROWS_AS(build_synthetic_instance(code, 1, 1), std::invalid_argument);
}
