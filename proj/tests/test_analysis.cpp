#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qkd/analysis.hpp"

using namespace qkd;

TEST_CASE("binary entropy") {
    CHECK(binary_entropy(0.0) == 0.0);
    CHECK(binary_entropy(1.0) == 0.0);
    CHECK(binary_entropy(0.5) == doctest::Approx(1.0).epsilon(1e-12));
    // extended-precision evaluation, frozen to twenty digits
    CHECK(binary_entropy(0.11) == doctest::Approx(0.49991595816452799564).epsilon(1e-12));
    CHECK_THROWS_AS(binary_entropy(-0.1), std::domain_error);
    CHECK_THROWS_AS(binary_entropy(1.1), std::domain_error);
}

TEST_CASE("binary entropy symmetry on a grid") {
    for (int i = 0; i <= 1000; ++i) {
        const double p = double(i) / 1000.0;
        CHECK(binary_entropy(p) == doctest::Approx(binary_entropy(1.0 - p)).epsilon(1e-12));
    }
}

TEST_CASE("key rate") {
    CHECK(key_rate(0.0, 0.0).rate == doctest::Approx(1.0));
    CHECK(key_rate(0.01, 0.01).rate == doctest::Approx(0.6162672683757645933).epsilon(1e-9));
    CHECK(key_rate(0.01, 0.01).monotone_regime);

    auto flagged = key_rate(0.3, 0.1);
    CHECK(!flagged.monotone_regime);

    CHECK_THROWS_AS(key_rate(0.5, 0.1), std::domain_error);
    CHECK_THROWS_AS(key_rate(-0.1, 0.1), std::domain_error);

    // rate <= 1 and strictly decreasing in p over the monotone regime
    double prev = 2.0;
    for (int i = 0; i <= 40; ++i) {
        const double p = 0.005 * i; // p + eps up to 0.21
        const double rate = key_rate(p, 0.01).rate;
        CHECK(rate <= 1.0);
        CHECK(rate < prev);
        prev = rate;
    }
}

TEST_CASE("security bound at frozen reference points") {
    CHECK(security_bound(1000, 0.01, 0.05) ==
          doctest::Approx(1.6067608480569707259).epsilon(1e-12));
    CHECK(security_bound(10000, 0.01, 0.05) ==
          doctest::Approx(0.0057913624086831277266).epsilon(1e-12));
    CHECK(security_bound(256, 0.05, 0.1) ==
          doctest::Approx(1.5820174940963083957).epsilon(1e-12));

    CHECK_THROWS_AS(security_bound(0, 0.1, 0.1), std::domain_error);
    CHECK_THROWS_AS(security_bound(10, -0.1, 0.1), std::domain_error);
}

TEST_CASE("security bound decreases in n") {
    double prev = 1e9;
    for (int64_t n : {10, 100, 1000, 10000, 100000}) {
        const double b = security_bound(n, 0.01, 0.05);
        CHECK(b < prev);
        prev = b;
    }
}

TEST_CASE("sampling tail: all-zero pattern never fires") {
    auto rep = sampling_tail_mc(50, 0.1, 0.1, 2000, 5);
    for (const auto& [w, f] : rep.grid)
        if (w == 0) CHECK(f == 0.0);
}

TEST_CASE("sampling tail respects the bound with margin") {
    // visible-frequency regime: small n so the joint event actually occurs
    auto rep = sampling_tail_mc(50, 0.1, 0.1, 20000, 6);
    CHECK(rep.hoeffding_bound == doctest::Approx(std::exp(-0.25)).epsilon(1e-12));
    CHECK(rep.joint_frequency <= rep.hoeffding_bound + 3.0 * rep.max_std_error);
    CHECK(rep.joint_frequency > 0.0); // the sweep found the transition region

    // zero frequency below the information threshold
    for (const auto& [w, f] : rep.grid)
        if (double(w) <= 50 * 0.2) CHECK(f == 0.0);

    // monotone in the pattern weight up to the transition peak (small slack
    // for Monte Carlo noise)
    double prev = -1.0;
    for (const auto& [w, f] : rep.grid) {
        if (w > rep.worst_weight) break;
        CHECK(f >= prev - 0.002);
        prev = f;
    }
}

TEST_CASE("sampling tail parallel kernel matches the serial reference") {
    auto par = sampling_tail_mc(40, 0.1, 0.12, 4000, 7);
    auto ser = sampling_tail_mc_serial(40, 0.1, 0.12, 4000, 7);
    REQUIRE(par.grid.size() == ser.grid.size());
    for (size_t i = 0; i < par.grid.size(); ++i) {
        CHECK(par.grid[i].first == ser.grid[i].first);
        CHECK(par.grid[i].second == ser.grid[i].second);
    }
    CHECK(par.joint_frequency == ser.joint_frequency);
    CHECK(par.worst_weight == ser.worst_weight);
}

TEST_CASE("aggregate_sessions conjunction") {
    Lz78Model model;
    LinearCode code = construct_code({32, 8, 0}, 4);

    ProtocolTranscript aborted;
    aborted.n = 32;
    aborted.aborted = true;
    auto rep = aggregate_sessions({aborted, aborted}, code, model, 0.05, 0.05, 0.11);
    CHECK(rep.empirical_bad_frequency == 0.0);
    CHECK(rep.aborted_sessions == 2);
    CHECK(!rep.caveat.empty());

    // a single finished session with an incompressible key stays below the
    // deficiency threshold
    ProtocolTranscript ok;
    ok.n = 32;
    ok.basis = BitString::from_string("0101010101010101010101010101010101010101010101010101010101010101");
    Rng rng(8);
    ok.final_key = BitString::random(8, rng);
    ok.z_t = BitString(32);
    ok.z_t_prime = BitString(32);
    auto rep2 = aggregate_sessions({ok}, code, model, 0.05, 0.05, 0.11);
    CHECK(rep2.sessions == 1);
    // an 8-bit key cannot clear the deficiency threshold delta*n + c_model
    CHECK(eve_guess_proxy(ok, code, model).deficiency < 0.05 * 32 + rep2.c_model);
    CHECK(rep2.empirical_bad_frequency == 0.0);

    ProtocolTranscript other = ok;
    other.n = 16;
    CHECK_THROWS_AS(aggregate_sessions({ok, other}, code, model, 0.05, 0.05, 0.11),
                    std::invalid_argument);
}

TEST_CASE("aggregate_sessions is reproducible and within the bound for honest runs") {
    Lz78Model model;
    ProtocolConfig cfg;
    cfg.n = 64;
    cfg.p = 0.11;
    cfg.epsilon = 0.05;
    cfg.delta = 0.05;
    cfg.seed = 1234;
    cfg.code = construct_code({64, 8, int(2.0 * 64 * 0.16)}, 77);

    KeyPool pool(reconcile_cost(cfg.n, cfg.p) * 100);
    auto batch = run_session_batch(cfg, AttackStrategy::none(), pool, 100);
    auto rep = aggregate_sessions(batch, cfg.code, model, cfg.delta, cfg.epsilon, cfg.p);
    auto rep2 = aggregate_sessions(batch, cfg.code, model, cfg.delta, cfg.epsilon, cfg.p);
    CHECK(rep.empirical_bad_frequency == rep2.empirical_bad_frequency);
    CHECK(rep.empirical_bad_frequency <= rep.bound);
    CHECK(rep.boundary_sessions == 0); // noiseless: zero errors, threshold 7
}
