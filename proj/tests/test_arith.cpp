#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "digitseq/arith.hpp"
#include "support/oracles.hpp"

using namespace digitseq;

TEST_CASE("mod_pow worked examples", "[arith]") {
    CHECK(arith::mod_pow(10, 3, 27) == 1);
    CHECK(arith::mod_pow(2, 0, 7) == 1);
    CHECK(arith::mod_pow(10, 1'000'000'000'000ULL, 9) == 1);
    CHECK_THROWS_AS(arith::mod_pow(3, 4, 1), invalid_modulus_error);
    CHECK_THROWS_AS(arith::mod_pow(3, 4, 0), invalid_modulus_error);
}

TEST_CASE("mod_pow exponent homomorphism", "[arith]") {
    std::mt19937_64 rng(0x5eed);
    for (int trial = 0; trial < 2000; ++trial) {
        const u64 m = std::max<u64>(2, rng());
        const u64 b = rng();
        const u64 e1 = rng() >> 1;
        const u64 e2 = rng() >> 1;
        const u64 split = arith::mul_mod(arith::mod_pow(b, e1, m),
                                         arith::mod_pow(b, e2, m), m);
        if (arith::mod_pow(b, e1 + e2, m) != split) {
            CAPTURE(b, e1, e2, m);
            REQUIRE(arith::mod_pow(b, e1 + e2, m) == split);
        }
    }
    SUCCEED();
}

TEST_CASE("128-bit mod_pow agrees with the 64-bit path", "[arith]") {
    std::mt19937_64 rng(0xabcd);
    for (int trial = 0; trial < 500; ++trial) {
        const u64 m = std::max<u64>(2, rng());
        const u64 b = rng();
        const u64 e = rng();
        REQUIRE(arith::mod_pow_u128(b, e, m) == arith::mod_pow(b, e, m));
    }
    // A modulus past 64 bits: 10^e mod (2^64 + 13), checked against the
    // square of a half-exponent step.
    const u128 m = (u128{1} << 64) + 13;
    const u128 h = arith::mod_pow_u128(10, 500, m);
    CHECK(arith::mod_pow_u128(10, 1000, m) == arith::mul_mod_u128(h, h, m));
}

TEST_CASE("digit_sum examples and casting out nines", "[arith]") {
    CHECK(arith::digit_sum(999) == 27);
    CHECK(arith::digit_sum(0) == 0);
    CHECK(arith::digit_sum(39049) == 25);

    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 5000; ++trial) {
        const u64 n = rng();
        REQUIRE(arith::digit_sum(n) % 9 == n % 9);
    }
}

TEST_CASE("is_prime examples", "[arith]") {
    CHECK(arith::is_prime(191));
    CHECK_FALSE(arith::is_prime(1));
    CHECK(arith::is_prime(1968299999));
    CHECK_FALSE(arith::is_prime(0));
    CHECK(arith::is_prime(2));
    // Strong pseudoprimes to small bases must still be rejected.
    CHECK_FALSE(arith::is_prime(3215031751ULL));
    CHECK_FALSE(arith::is_prime(3825123056546413051ULL));
    CHECK(arith::is_prime(18446744073709551557ULL));  // largest 64-bit prime
}

TEST_CASE("is_prime agrees with trial division below 10^5", "[arith]") {
    for (u64 n = 0; n < 100'000; ++n)
        if (arith::is_prime(n) != oracle::is_prime_trial(n)) {
            CAPTURE(n);
            REQUIRE(arith::is_prime(n) == oracle::is_prime_trial(n));
        }
    SUCCEED();
}

TEST_CASE("factorize worked examples", "[arith]") {
    using arith::PrimePower;
    CHECK(arith::factorize(33321).factors ==
          std::vector<PrimePower>{{3, 1}, {29, 1}, {383, 1}});
    CHECK(arith::factorize(1).factors.empty());
    CHECK(arith::factorize(36525783703737ULL).factors ==
          std::vector<PrimePower>{{3, 1}, {439, 1}, {96179, 1}, {288359, 1}});
    CHECK(arith::factorize(2300294146809ULL).factors ==
          std::vector<PrimePower>{{3, 1}, {29, 1}, {26440162607ULL, 1}});
    CHECK(arith::factorize(64894173577ULL).factors ==
          std::vector<PrimePower>{{26113, 1}, {2485129, 1}});
    CHECK(arith::factorize(1ULL << 40).factors ==
          std::vector<PrimePower>{{2, 40}});
}

TEST_CASE("factorize reconstructs and matches trial division", "[arith]") {
    for (u64 n = 2; n <= 100'000; ++n) {
        const auto f = arith::factorize(n);
        std::vector<u64> flat;
        for (const auto& [p, e] : f.factors) {
            REQUIRE(arith::is_prime(p));
            for (unsigned i = 0; i < e; ++i) flat.push_back(p);
        }
        if (f.value() != n || flat != oracle::trial_factor(n)) {
            CAPTURE(n);
            REQUIRE(f.value() == n);
            REQUIRE(flat == oracle::trial_factor(n));
        }
    }
    SUCCEED();
}

TEST_CASE("multiplicative_order_10 worked examples", "[arith]") {
    CHECK(arith::multiplicative_order_10(37) == 3);
    CHECK(arith::multiplicative_order_10(3) == 1);
    CHECK(arith::multiplicative_order_10(163) == 81);
    CHECK(arith::multiplicative_order_10(757) == 27);
    CHECK(arith::multiplicative_order_10(1999) == 999);
    CHECK(arith::multiplicative_order_10(1) == 1);
    CHECK_THROWS_AS(arith::multiplicative_order_10(12), not_coprime_error);
    CHECK_THROWS_AS(arith::multiplicative_order_10(35), not_coprime_error);
}

TEST_CASE("order divides p-1 and is minimal", "[arith]") {
    for (u64 p = 3; p < 10'000; ++p) {
        if (!arith::is_prime(p) || p == 5) continue;
        const u64 e = arith::multiplicative_order_10(p);
        REQUIRE((p - 1) % e == 0);
        REQUIRE(arith::mod_pow(10, e, p) == 1);
        unsigned v3 = 0;
        for (const auto& [l, exp] : arith::factorize(e).factors) {
            if (l == 3) v3 = exp;
            REQUIRE(arith::mod_pow(10, e / l, p) != 1);
        }
        REQUIRE(arith::valuation(e, 3) == v3);
    }
}

TEST_CASE("valuation", "[arith]") {
    CHECK(arith::valuation(999, 3) == 3);
    CHECK(arith::valuation(80919, 3) == 7);
    CHECK(arith::valuation(7, 3) == 0);
}
