#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "qkd/lincode.hpp"

using namespace qkd;

namespace {

// from-scratch oracle: all codewords by closing the span, then min weight
int distance_by_closure(const Gf2Matrix& generators) {
    std::set<std::string> span;
    span.insert(BitString(generators.cols()).to_string());
    for (int r = 0; r < generators.rows(); ++r) {
        std::set<std::string> next = span;
        for (const auto& s : span)
            next.insert((BitString::from_string(s) ^ generators.row(r)).to_string());
        span = next;
    }
    int best = generators.cols() + 1;
    for (const auto& s : span) {
        int w = hamming_weight(BitString::from_string(s));
        if (w > 0) best = std::min(best, w);
    }
    return best;
}

LinearCode random_code(int n, int m, Rng& rng) {
    for (;;) {
        std::vector<BitString> rows;
        for (int r = 0; r < m; ++r) rows.push_back(BitString::random(n, rng));
        Gf2Matrix g(std::move(rows));
        if (g.rank() == m) return LinearCode(std::move(g));
    }
}

} // namespace

TEST_CASE("min_distance examples") {
    CHECK(LinearCode(Gf2Matrix({BitString::from_string("111")})).min_distance() == 3);
    CHECK(LinearCode(Gf2Matrix({BitString::from_string("1100"), BitString::from_string("0011")}))
              .min_distance() == 2);
    CHECK(LinearCode(Gf2Matrix::identity(4)).min_distance() == 1);
}

TEST_CASE("min_distance agrees with closure oracle and serial kernel") {
    Rng rng(21);
    for (int rep = 0; rep < 50; ++rep) {
        int n = 3 + int(rng.next_below(10));
        int m = 1 + int(rng.next_below(uint64_t(std::min(n, 8))));
        LinearCode code = random_code(n, m, rng);
        int oracle = distance_by_closure(code.generators());
        CHECK(code.min_distance() == oracle);
        CHECK(min_distance_serial(code.generators()) == oracle);
    }
}

TEST_CASE("construct_code finds the repetition code at n=3 m=1 floor=2") {
    // only 111 satisfies d > 2 among the 7 nonzero generators
    for (uint64_t seed : {1u, 7u, 42u}) {
        LinearCode code = construct_code({3, 1, 2}, seed);
        CHECK(code.generators().row(0).to_string() == "111");
        CHECK(code.min_distance() == 3);
    }
}

TEST_CASE("construct_code full-dimension request is infeasible") {
    CHECK_THROWS_AS(construct_code({4, 4, 1}, 1), CodeConstructionError);
}

TEST_CASE("construct_code n=8 m=2 floor=3") {
    LinearCode code = construct_code({8, 2, 3}, 5);
    CHECK(code.min_distance() >= 4);
    CHECK(code.min_distance() == distance_by_closure(code.generators()));
}

TEST_CASE("construct_code exhausts attempts on an unlucky target") {
    // d > 4 with n=5, m=1 requires the all-ones row; one attempt almost
    // surely misses it
    CHECK_THROWS_AS(construct_code({5, 1, 4}, 3, 1), CodeConstructionError);
}

TEST_CASE("privacy_amplify examples") {
    LinearCode rep3(Gf2Matrix({BitString::from_string("111")}));
    CHECK(privacy_amplify(rep3, BitString::from_string("101")).to_string() == "0");

    LinearCode pair(Gf2Matrix({BitString::from_string("1100"), BitString::from_string("0011")}));
    CHECK(privacy_amplify(pair, BitString::from_string("1010")).to_string() == "11");
    CHECK(privacy_amplify(pair, BitString(4)).to_string() == "00");

    CHECK_THROWS_AS(privacy_amplify(rep3, BitString(4)), std::invalid_argument);
}

TEST_CASE("privacy_amplify is linear and surjective") {
    Rng rng(22);
    for (int rep = 0; rep < 20; ++rep) {
        int n = 4 + int(rng.next_below(8));
        int m = 1 + int(rng.next_below(4));
        LinearCode code = random_code(n, std::min(m, n), rng);
        BitString a = BitString::random(n, rng);
        BitString b = BitString::random(n, rng);
        CHECK(privacy_amplify(code, a ^ b) ==
              (privacy_amplify(code, a) ^ privacy_amplify(code, b)));
    }

    // image of all inputs covers {0,1}^m at full rank
    LinearCode code = random_code(6, 3, rng);
    std::set<std::string> image;
    for (uint64_t v = 0; v < 64; ++v)
        image.insert(privacy_amplify(code, BitString::from_index(v, 6)).to_string());
    CHECK(image.size() == 8);
}

TEST_CASE("dual_coset examples") {
    LinearCode rep3(Gf2Matrix({BitString::from_string("111")}));

    auto even = dual_coset(rep3, BitString::from_string("0"));
    std::set<std::string> even_set;
    for (const auto& x : even) even_set.insert(x.to_string());
    CHECK(even_set == std::set<std::string>{"000", "110", "101", "011"});

    auto odd = dual_coset(rep3, BitString::from_string("1"));
    std::set<std::string> odd_set;
    for (const auto& x : odd) odd_set.insert(x.to_string());
    CHECK(odd_set == std::set<std::string>{"100", "010", "001", "111"});
}

TEST_CASE("dual_coset size and membership on random codes") {
    Rng rng(23);
    for (int rep = 0; rep < 15; ++rep) {
        int n = 3 + int(rng.next_below(8));
        int m = 1 + int(rng.next_below(uint64_t(std::min(n - 1, 5))));
        LinearCode code = random_code(n, m, rng);
        BitString y = BitString::random(m, rng);
        auto coset = dual_coset(code, y);
        CHECK(coset.size() == (size_t(1) << (n - m)));
        for (const auto& x : coset) CHECK(privacy_amplify(code, x) == y);
        // sorted and duplicate-free
        CHECK(std::is_sorted(coset.begin(), coset.end()));
        CHECK(std::adjacent_find(coset.begin(), coset.end()) == coset.end());
    }
}

TEST_CASE("character_sum examples") {
    LinearCode rep3(Gf2Matrix({BitString::from_string("111")}));
    BitString y0 = BitString::from_string("0");
    CHECK(character_sum(rep3, y0, BitString::from_string("100"), BitString::from_string("100")) ==
          4);
    CHECK(character_sum(rep3, y0, BitString::from_string("100"), BitString::from_string("010")) ==
          0);

    Rng rng(24);
    for (int rep = 0; rep < 10; ++rep) {
        int n = 3 + int(rng.next_below(6));
        int m = 1 + int(rng.next_below(3));
        LinearCode code = random_code(n, std::min(m, n - 1), rng);
        BitString y = BitString::random(code.m(), rng);
        BitString zero(n);
        CHECK(character_sum(code, y, zero, zero) == int64_t(1) << (n - code.m()));
    }
}

TEST_CASE("character_sum matches a full-scan oracle") {
    Rng rng(25);
    for (int rep = 0; rep < 10; ++rep) {
        int n = 4 + int(rng.next_below(5));
        int m = 1 + int(rng.next_below(3));
        LinearCode code = random_code(n, std::min(m, n - 1), rng);
        BitString y = BitString::random(code.m(), rng);
        BitString s = BitString::random(n, rng);
        BitString t = BitString::random(n, rng);

        // oracle: scan all 2^n strings, filter on f(x) = y
        int64_t oracle = 0;
        for (uint64_t v = 0; v < (uint64_t(1) << n); ++v) {
            BitString x = BitString::from_index(v, n);
            if (privacy_amplify(code, x) == y) oracle += dot(x, s ^ t) ? -1 : 1;
        }
        CHECK(character_sum(code, y, s, t) == oracle);
    }
}

TEST_CASE("character-sum identity in the low-weight regime") {
    Rng rng(26);
    int checked = 0;
    for (int rep = 0; rep < 12; ++rep) {
        int n = 4 + int(rng.next_below(9)); // up to 12
        LinearCode code = construct_code({n, 1 + int(rng.next_below(2)), 2}, rng.next_u64(), 200);
        const int64_t expected_eq = int64_t(1) << (code.n() - code.m());
        for (uint64_t yv = 0; yv < (uint64_t(1) << code.m()); ++yv) {
            BitString y = BitString::from_index(yv, code.m());
            for (int trial = 0; trial < 40; ++trial) {
                int limit = (code.min_distance() - 1) / 2; // max weight strictly below d/2
                BitString s(code.n()), t(code.n());
                int ws = int(rng.next_below(uint64_t(limit) + 1));
                int wt = int(rng.next_below(uint64_t(limit) + 1));
                while (hamming_weight(s) < ws) s.set(int(rng.next_below(uint64_t(code.n()))), true);
                while (hamming_weight(t) < wt) t.set(int(rng.next_below(uint64_t(code.n()))), true);
                if (trial % 2 == 0) t = s;
                int64_t got = character_sum(code, y, s, t);
                CHECK(got == (s == t ? expected_eq : 0));
                ++checked;
            }
        }
    }
    CHECK(checked >= 200);
}

TEST_CASE("code file round trip") {
    Rng rng(27);
    LinearCode code = construct_code({10, 3, 1}, 9);
    std::stringstream ss;
    save_code(ss, code);
    std::string first = ss.str();

    LinearCode loaded = load_code(ss);
    CHECK(loaded.n() == code.n());
    CHECK(loaded.m() == code.m());
    CHECK(loaded.min_distance() == code.min_distance());
    CHECK(loaded.generators() == code.generators());

    std::stringstream again;
    save_code(again, loaded);
    CHECK(again.str() == first);
}

TEST_CASE("code file rejects corrupt input") {
    std::stringstream bad1("3 1 2\n111\n"); // wrong stored distance
    CHECK_THROWS_AS(load_code(bad1), std::invalid_argument);

    std::stringstream bad2("3 1 3\n11\n"); // short row
    CHECK_THROWS_AS(load_code(bad2), std::invalid_argument);

    std::stringstream bad3("nonsense");
    CHECK_THROWS_AS(load_code(bad3), std::invalid_argument);
}

TEST_CASE("dimension-zero code") {
    LinearCode code = LinearCode::trivial(5);
    CHECK(code.m() == 0);
    CHECK(code.min_distance() == 6);
    CHECK(privacy_amplify(code, BitString(5)).size() == 0);
}

TEST_CASE("min_distance dimension cap") {
    CHECK_THROWS_AS(min_distance(Gf2Matrix(25, 30)), std::invalid_argument);
}
