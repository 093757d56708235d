#include <catch2/catch_amalgamated.hpp>

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <thread>

#include "digitseq/a066364.hpp"
#include "support/oracles.hpp"

using namespace digitseq;
using a066364::PrimeSetCache;

namespace {

std::filesystem::path temp_file(const std::string& stem) {
    return std::filesystem::temp_directory_path() /
           (stem + "-" + std::to_string(::getpid()) + ".txt");
}

}  // namespace

TEST_CASE("is_self_one worked examples", "[a066364]") {
    CHECK(a066364::is_self_one(1));
    CHECK(a066364::is_self_one(3));
    CHECK_FALSE(a066364::is_self_one(7));  // 10^7 mod 7 = 3
    CHECK(a066364::is_self_one(111));
    CHECK_FALSE(a066364::is_self_one(10));
}

TEST_CASE("enumerate_self_one worked examples", "[a066364]") {
    CHECK(a066364::enumerate_self_one(10) == std::vector<u64>{1, 3, 9});
    CHECK(a066364::enumerate_self_one(2) == std::vector<u64>{1});
    CHECK(a066364::enumerate_self_one(400) ==
          std::vector<u64>{1, 3, 9, 27, 81, 111, 243, 333});
}

TEST_CASE("is_a066364_prime worked examples", "[a066364]") {
    PrimeSetCache cache;
    CHECK(a066364::is_a066364_prime(37, cache));
    CHECK(a066364::is_a066364_prime(1999, cache));
    CHECK_FALSE(a066364::is_a066364_prime(7, cache));  // order 6 has factor 2
    CHECK(a066364::is_a066364_prime(3, cache));
    CHECK_THROWS_AS(a066364::is_a066364_prime(2, cache), not_coprime_error);
    CHECK_THROWS_AS(a066364::is_a066364_prime(5, cache), not_coprime_error);
    CHECK_THROWS_AS(a066364::is_a066364_prime(9, cache), domain_error);
}

TEST_CASE("order_record worked examples", "[a066364]") {
    CHECK(a066364::order_record(163) == arith::OrderRecord{163, 81, 4});
    CHECK(a066364::order_record(3) == arith::OrderRecord{3, 1, 0});
    CHECK(a066364::order_record(757) == arith::OrderRecord{757, 27, 3});
    CHECK_THROWS_AS(a066364::order_record(9), domain_error);
}

TEST_CASE("scan_a066364 reproduces the first five members", "[a066364]") {
    const auto recs = a066364::scan_a066364(2000);
    REQUIRE(recs.size() == 5);
    CHECK(recs[0] == arith::OrderRecord{3, 1, 0});
    CHECK(recs[1] == arith::OrderRecord{37, 3, 1});
    CHECK(recs[2] == arith::OrderRecord{163, 81, 4});
    CHECK(recs[3] == arith::OrderRecord{757, 27, 3});
    CHECK(recs[4] == arith::OrderRecord{1999, 999, 3});

    CHECK(a066364::scan_a066364(2).empty());
    const auto single = a066364::scan_a066364(36);
    REQUIRE(single.size() == 1);
    CHECK(single[0].prime == 3);
}

TEST_CASE("every member's order is odd (even-order exclusion)", "[a066364]") {
    for (const auto& rec : a066364::scan_a066364(100'000))
        REQUIRE(rec.order_e % 2 == 1);
}

TEST_CASE("closure accepts all prime factors of enumerated solutions", "[a066364]") {
    PrimeSetCache cache;
    for (u64 n : a066364::enumerate_self_one(100'000)) {
        if (n == 1) continue;
        for (u64 p : oracle::trial_factor(n)) {
            CAPTURE(n, p);
            REQUIRE(a066364::is_a066364_prime(p, cache));
        }
    }
}

TEST_CASE("each member yields a constructed, checked witness", "[a066364]") {
    PrimeSetCache cache;
    for (const auto& rec : a066364::scan_a066364(10'000, cache)) {
        const u128 n = a066364::member_witness(rec.prime, cache);
        REQUIRE(n % rec.prime == 0);
        REQUIRE(a066364::is_self_one_u128(n));  // member_witness already throws if not
    }
    PrimeSetCache other;
    CHECK_THROWS_AS(a066364::member_witness(7, other), domain_error);
}

TEST_CASE("verdicts are independent of cache warm-up order", "[a066364]") {
    PrimeSetCache warm;
    // Warm from the top: 1999 pulls in 37 and 3 through its order 999.
    a066364::is_a066364_prime(1999, warm);
    PrimeSetCache cold;
    for (u64 p = 3; p <= 2000; p += 2) {
        if (!arith::is_prime(p) || p == 5) continue;
        REQUIRE(a066364::is_a066364_prime(p, warm) ==
                a066364::is_a066364_prime(p, cold));
    }
}

TEST_CASE("cache tolerates concurrent readers and writers", "[a066364]") {
    PrimeSetCache cache;
    std::vector<std::thread> pool;
    std::atomic<bool> mismatch{false};
    for (int t = 0; t < 8; ++t) {
        pool.emplace_back([&, t] {
            for (u64 p = 3 + 2 * static_cast<u64>(t); p <= 3000; p += 2) {
                if (!arith::is_prime(p) || p == 5) continue;
                PrimeSetCache own;
                if (a066364::is_a066364_prime(p, cache) !=
                    a066364::is_a066364_prime(p, own))
                    mismatch.store(true);
            }
        });
    }
    for (auto& t : pool) t.join();
    CHECK_FALSE(mismatch.load());
    CHECK(cache.lookup(1999).has_value());
}

TEST_CASE("cache file persists verdicts between instances", "[a066364]") {
    const auto path = temp_file("digitseq-cache-persist");
    std::filesystem::remove(path);
    {
        PrimeSetCache cache(path.string());
        a066364::is_a066364_prime(1999, cache);
        a066364::is_a066364_prime(7, cache);
    }
    {
        PrimeSetCache cache(path.string());
        REQUIRE(cache.lookup(1999).has_value());
        CHECK(cache.lookup(1999)->member);
        CHECK(cache.lookup(1999)->order_e == 999);
        CHECK(cache.lookup(1999)->n_p == 3);
        REQUIRE(cache.lookup(37).has_value());
        CHECK(cache.lookup(37)->member);
        REQUIRE(cache.lookup(7).has_value());
        CHECK_FALSE(cache.lookup(7)->member);
    }
    std::filesystem::remove(path);
}

TEST_CASE("corrupt trailing cache line is discarded, earlier corruption is not",
          "[a066364]") {
    const auto path = temp_file("digitseq-cache-corrupt");
    {
        std::ofstream out(path);
        out << "3 1 0 1\n37 3 1 1\n163 81";  // torn final write
    }
    {
        PrimeSetCache cache(path.string());
        CHECK(cache.lookup(3).has_value());
        CHECK(cache.lookup(37).has_value());
        CHECK_FALSE(cache.lookup(163).has_value());
    }
    {
        std::ofstream out(path);
        out << "3 1 0 1\nnot a record\n37 3 1 1\n";
    }
    CHECK_THROWS_AS(PrimeSetCache(path.string()), corrupt_file_error);
    {
        std::ofstream out(path);
        out << "3 1 0 1\n3 1 0 0\n";  // conflicting verdicts
    }
    CHECK_THROWS_AS(PrimeSetCache(path.string()), corrupt_file_error);
    std::filesystem::remove(path);
}
