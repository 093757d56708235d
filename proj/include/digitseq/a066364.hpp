#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <vector>

#include "digitseq/arith.hpp"
#include "digitseq/common.hpp"

namespace digitseq::a066364 {

using arith::OrderRecord;

struct PrimeVerdict {
    bool member;
    u64 order_e;
    unsigned n_p;

    friend bool operator==(const PrimeVerdict&, const PrimeVerdict&) = default;
};

/// Memoized membership verdicts, optionally persisted to an append-only file
/// (`prime order_e n_p member`, one record per line). Verdicts are monotone:
/// once inserted they are never revised. Concurrent readers are fine; writes
/// are serialized.
class PrimeSetCache {
  public:
    PrimeSetCache() = default;

    explicit PrimeSetCache(const std::string& path) : path_(path) {
        load(path);
        out_.open(path, std::ios::app);
        if (!out_) throw error("cannot open cache file for append: " + path);
    }

    PrimeSetCache(const PrimeSetCache&) = delete;
    PrimeSetCache& operator=(const PrimeSetCache&) = delete;

    std::optional<PrimeVerdict> lookup(u64 prime) const {
        std::shared_lock lock(mu_);
        auto it = verdicts_.find(prime);
        if (it == verdicts_.end()) return std::nullopt;
        return it->second;
    }

    void insert(u64 prime, PrimeVerdict v) {
        std::unique_lock lock(mu_);
        auto [it, fresh] = verdicts_.emplace(prime, v);
        if (!fresh) {
            if (it->second != v)
                throw internal_error("cache verdict revision attempted for prime " +
                                     std::to_string(prime));
            return;
        }
        if (out_.is_open()) {
            out_ << prime << ' ' << v.order_e << ' ' << v.n_p << ' '
                 << (v.member ? 1 : 0) << '\n';
            out_.flush();
        }
    }

    std::vector<std::pair<u64, PrimeVerdict>> snapshot() const {
        std::shared_lock lock(mu_);
        return {verdicts_.begin(), verdicts_.end()};
    }

    std::size_t size() const {
        std::shared_lock lock(mu_);
        return verdicts_.size();
    }

  private:
    void load(const std::string& path) {
        std::ifstream in(path);
        if (!in) return;  // first use, nothing persisted yet
        std::vector<std::string> lines;
        for (std::string line; std::getline(in, line);)
            if (!line.empty()) lines.push_back(line);
        for (std::size_t i = 0; i < lines.size(); ++i) {
            u64 prime = 0, order_e = 0;
            unsigned n_p = 0;
            int member = -1;
            std::istringstream ls(lines[i]);
            char extra;
            if (!(ls >> prime >> order_e >> n_p >> member) || ls >> extra ||
                (member != 0 && member != 1)) {
                if (i + 1 == lines.size()) break;  // torn final write, drop it
                throw corrupt_file_error("corrupt cache record at line " +
                                         std::to_string(i + 1) + " of " + path);
            }
            PrimeVerdict v{member == 1, order_e, n_p};
            auto [it, fresh] = verdicts_.emplace(prime, v);
            if (!fresh && it->second != v)
                throw corrupt_file_error("conflicting cache records for prime " +
                                         std::to_string(prime) + " in " + path);
        }
    }

    mutable std::shared_mutex mu_;
    std::map<u64, PrimeVerdict> verdicts_;
    std::string path_;
    std::ofstream out_;
};

/// 10^n = 1 (mod n) -- the Kennedy-Cooper equation.
inline bool is_self_one(u64 n) {
    if (n == 0) throw domain_error("is_self_one(0)");
    if (n == 1) return true;
    if (n % 2 == 0 || n % 5 == 0) return false;
    return arith::mod_pow(10, n, n) == 1;
}

inline bool is_self_one_u128(u128 n) {
    if (n <= ~static_cast<u64>(0)) return is_self_one(static_cast<u64>(n));
    if (n % 2 == 0 || n % 5 == 0) return false;
    return arith::mod_pow_u128(10, n, n) == 1;
}

inline std::vector<u64> enumerate_self_one(u64 limit) {
    std::vector<u64> out;
    for (u64 n = 1; n <= limit; ++n)
        if (is_self_one(n)) out.push_back(n);
    return out;
}

/// Membership in the prime set: p = 3, or every prime factor of ord_p(10) is
/// itself a member (recursive closure seeded at 3; 2 and 5 never qualify).
inline bool is_a066364_prime(u64 p, PrimeSetCache& cache) {
    if (p == 2 || p == 5) throw not_coprime_error(p);
    if (!arith::is_prime(p)) throw domain_error(std::to_string(p) + " is not prime");
    if (auto hit = cache.lookup(p)) return hit->member;

    const u64 e = arith::multiplicative_order_10(p);
    bool member = true;
    if (p != 3) {
        for (const auto& [q, exp] : arith::factorize(e).factors) {
            (void)exp;
            if (q == 2 || q == 5 || !is_a066364_prime(q, cache)) {
                member = false;
                break;
            }
        }
    }
    cache.insert(p, {member, e, arith::valuation(e, 3)});
    return member;
}

inline OrderRecord order_record(u64 p) {
    if (!arith::is_prime(p)) throw domain_error(std::to_string(p) + " is not prime");
    const u64 e = arith::multiplicative_order_10(p);
    return {p, e, arith::valuation(e, 3)};
}

/// All member primes <= prime_limit, ascending, with their order records.
inline std::vector<OrderRecord> scan_a066364(u64 prime_limit, PrimeSetCache& cache) {
    std::vector<OrderRecord> out;
    for (u64 p = 3; p <= prime_limit; p += (p == 3 ? 4 : 2)) {
        if (p % 5 == 0 || !arith::is_prime(p)) continue;
        if (is_a066364_prime(p, cache)) {
            const auto v = *cache.lookup(p);
            out.push_back({p, v.order_e, v.n_p});
        }
    }
    return out;
}

inline std::vector<OrderRecord> scan_a066364(u64 prime_limit) {
    PrimeSetCache cache;
    return scan_a066364(prime_limit, cache);
}

/// Constructs and checks a witness n with p | n and 10^n = 1 (mod n):
/// n = p * lcm of the orders along p's membership closure chain.
inline u128 member_witness(u64 p, PrimeSetCache& cache) {
    if (!is_a066364_prime(p, cache))
        throw domain_error(std::to_string(p) + " is not a member prime");

    std::vector<u64> pending{p};
    std::map<u64, u64> orders;  // closure prime -> its order
    while (!pending.empty()) {
        const u64 r = pending.back();
        pending.pop_back();
        if (orders.count(r)) continue;
        is_a066364_prime(r, cache);  // ensure cached
        const u64 e = cache.lookup(r)->order_e;
        orders[r] = e;
        for (const auto& [q, exp] : arith::factorize(e).factors) {
            (void)exp;
            pending.push_back(q);
        }
    }

    u64 lcm = 1;
    for (const auto& [r, e] : orders) {
        (void)r;
        const u64 reduced = lcm / std::gcd(lcm, e);
        if (reduced > (~static_cast<u64>(0)) / e)
            throw range_error("witness order lcm exceeds 64 bits");
        lcm = reduced * e;
    }

    const u128 n = static_cast<u128>(p) * lcm;
    if (!is_self_one_u128(n))
        throw internal_error("constructed witness failed 10^n = 1 (mod n) for p = " +
                             std::to_string(p));
    return n;
}

}  // namespace digitseq::a066364
