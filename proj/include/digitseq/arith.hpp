#pragma once

#include <algorithm>
#include <array>
#include <numeric>
#include <vector>

#include "digitseq/common.hpp"

namespace digitseq::arith {

struct PrimePower {
    u64 prime;
    unsigned exponent;

    friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

/// Complete factorization of a positive 64-bit integer: primes strictly
/// ascending, empty iff the integer was 1.
struct Factorization {
    std::vector<PrimePower> factors;

    u128 value() const {
        u128 v = 1;
        for (const auto& [p, e] : factors)
            for (unsigned i = 0; i < e; ++i) v *= p;
        return v;
    }

    bool contains(u64 p) const {
        for (const auto& f : factors)
            if (f.prime == p) return true;
        return false;
    }

    unsigned multiplicity(u64 p) const {
        for (const auto& f : factors)
            if (f.prime == p) return f.exponent;
        return 0;
    }

    // "3^4*37" — compact canonical rendering, ascending primes.
    std::string to_string() const {
        if (factors.empty()) return "1";
        std::string s;
        for (const auto& [p, e] : factors) {
            if (!s.empty()) s += '*';
            s += std::to_string(p);
            if (e > 1) s += '^' + std::to_string(e);
        }
        return s;
    }

    friend bool operator==(const Factorization&, const Factorization&) = default;
};

/// A prime p with e = ord_p(10) and n_p = exponent of 3 in e.
struct OrderRecord {
    u64 prime;
    u64 order_e;
    unsigned n_p;

    friend bool operator==(const OrderRecord&, const OrderRecord&) = default;
};

inline u64 mul_mod(u64 a, u64 b, u64 m) {
    return static_cast<u64>(static_cast<u128>(a) * b % m);
}

inline u64 add_mod(u64 a, u64 b, u64 m) {
    a %= m;
    b %= m;
    return a >= m - b ? a - (m - b) : a + b;
}

/// base^exponent mod modulus by binary exponentiation, 128-bit intermediates.
inline u64 mod_pow(u64 base, u64 exponent, u64 modulus) {
    if (modulus < 2) throw invalid_modulus_error();
    u64 result = 1 % modulus;
    base %= modulus;
    while (exponent > 0) {
        if (exponent & 1) result = mul_mod(result, base, modulus);
        base = mul_mod(base, base, modulus);
        exponent >>= 1;
    }
    return result;
}

// 128-bit modular primitives. Moduli are capped below 2^127 so that a + b
// with a, b < m cannot wrap.
inline constexpr u128 max_modulus_128 = ~static_cast<u128>(0) >> 1;

inline u128 add_mod_u128(u128 a, u128 b, u128 m) {
    u128 s = a + b;
    return s >= m ? s - m : s;
}

inline u128 mul_mod_u128(u128 a, u128 b, u128 m) {
    if (m > max_modulus_128) throw range_error("modulus exceeds 127 bits");
    a %= m;
    b %= m;
    if (m <= ~static_cast<u64>(0))
        return static_cast<u128>(static_cast<u64>(a)) * static_cast<u64>(b) % m;
    // Shift-and-add; fine for the rare >64-bit candidates.
    u128 result = 0;
    while (b > 0) {
        if (b & 1) result = add_mod_u128(result, a, m);
        a = add_mod_u128(a, a, m);
        b >>= 1;
    }
    return result;
}

inline u128 mod_pow_u128(u128 base, u128 exponent, u128 modulus) {
    if (modulus < 2) throw invalid_modulus_error();
    u128 result = 1 % modulus;
    base %= modulus;
    while (exponent > 0) {
        if (exponent & 1) result = mul_mod_u128(result, base, modulus);
        base = mul_mod_u128(base, base, modulus);
        exponent >>= 1;
    }
    return result;
}

inline u64 digit_sum(u64 n) {
    u64 s = 0;
    while (n > 0) {
        s += n % 10;
        n /= 10;
    }
    return s;
}

namespace detail {

inline bool miller_rabin_witness(u64 n, u64 a, u64 d, int r) {
    u64 x = mod_pow(a, d, n);
    if (x == 1 || x == n - 1) return true;
    for (int i = 1; i < r; ++i) {
        x = mul_mod(x, x, n);
        if (x == n - 1) return true;
    }
    return false;
}

}  // namespace detail

/// Deterministic primality for all n < 2^64 (Sinclair's 7-witness base set).
inline bool is_prime(u64 n) {
    if (n < 2) return false;
    for (u64 p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        if (n == p) return true;
        if (n % p == 0) return false;
    }
    u64 d = n - 1;
    int r = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++r;
    }
    constexpr std::array<u64, 7> witnesses = {2,      325,     9375,      28178,
                                              450775, 9780504, 1795265022};
    for (u64 a : witnesses) {
        a %= n;
        if (a == 0) continue;
        if (!detail::miller_rabin_witness(n, a, d, r)) return false;
    }
    return true;
}

namespace detail {

// Brent-cycle Pollard rho with polynomial x^2 + c. Returns a factor of n,
// possibly n itself; the caller retries with the next c.
inline u64 pollard_rho_brent(u64 n, u64 c) {
    u64 y = 2, r = 1, q = 1, g = 1, x = 0, ys = 0;
    constexpr u64 batch = 128;
    while (g == 1) {
        x = y;
        for (u64 i = 0; i < r; ++i) y = add_mod(mul_mod(y, y, n), c, n);
        for (u64 k = 0; k < r && g == 1; k += batch) {
            ys = y;
            const u64 steps = std::min(batch, r - k);
            for (u64 i = 0; i < steps; ++i) {
                y = add_mod(mul_mod(y, y, n), c, n);
                q = mul_mod(q, x > y ? x - y : y - x, n);
            }
            g = std::gcd(q, n);
        }
        r <<= 1;
    }
    if (g == n) {
        do {
            ys = add_mod(mul_mod(ys, ys, n), c, n);
            g = std::gcd(x > ys ? x - ys : ys - x, n);
        } while (g == 1);
    }
    return g;
}

inline void factor_into(u64 n, std::vector<u64>& primes) {
    if (n == 1) return;
    if (is_prime(n)) {
        primes.push_back(n);
        return;
    }
    // Deterministic restart schedule: c = 1, 2, 3, ...
    u64 d = n;
    for (u64 c = 1; d == n; ++c) d = pollard_rho_brent(n, c);
    factor_into(d, primes);
    factor_into(n / d, primes);
}

}  // namespace detail

/// Complete prime factorization: trial division to 10^3, then Pollard rho
/// with Brent cycle detection.
inline Factorization factorize(u64 n) {
    if (n == 0) throw domain_error("factorize(0)");
    std::vector<u64> primes;
    for (u64 p = 2; p <= 1000 && p * p <= n; p == 2 ? p = 3 : p += 2) {
        while (n % p == 0) {
            primes.push_back(p);
            n /= p;
        }
    }
    if (n > 1) {
        if (n <= 1000 * 1000 || is_prime(n))
            primes.push_back(n);
        else
            detail::factor_into(n, primes);
    }
    std::sort(primes.begin(), primes.end());
    Factorization f;
    for (std::size_t i = 0; i < primes.size();) {
        std::size_t j = i;
        while (j < primes.size() && primes[j] == primes[i]) ++j;
        f.factors.push_back({primes[i], static_cast<unsigned>(j - i)});
        i = j;
    }
    return f;
}

/// Inverse of Factorization::to_string ("3^4*37"); validates primality,
/// ordering and exponents.
inline Factorization factorization_from_string(std::string_view s) {
    Factorization f;
    if (s == "1") return f;
    std::size_t pos = 0;
    while (pos < s.size()) {
        const std::size_t star = s.find('*', pos);
        std::string_view part = s.substr(pos, star == std::string_view::npos
                                                  ? std::string_view::npos
                                                  : star - pos);
        const std::size_t caret = part.find('^');
        const u64 p = parse_u64(part.substr(0, caret));
        u64 e = 1;
        if (caret != std::string_view::npos) e = parse_u64(part.substr(caret + 1));
        if (e == 0 || e > 64 || !is_prime(p) ||
            (!f.factors.empty() && f.factors.back().prime >= p))
            throw range_error("malformed factorization: " + std::string(s));
        f.factors.push_back({p, static_cast<unsigned>(e)});
        if (star == std::string_view::npos) break;
        pos = star + 1;
    }
    if (f.factors.empty()) throw range_error("malformed factorization: " + std::string(s));
    return f;
}

/// Largest e with p^e | n.
inline unsigned valuation(u64 n, u64 p) {
    unsigned v = 0;
    while (n % p == 0) {
        n /= p;
        ++v;
    }
    return v;
}

/// Least e >= 1 with 10^e = 1 (mod n). Factors the Carmichael bound of n and
/// strips prime factors; never scans exponents linearly.
inline u64 multiplicative_order_10(u64 n) {
    if (n == 0) throw domain_error("multiplicative_order_10(0)");
    if (n % 2 == 0 || n % 5 == 0) throw not_coprime_error(n);
    if (n == 1) return 1;

    // lcm over p^k || n of phi(p^k); the order divides this.
    u64 bound = 1;
    for (const auto& [p, e] : factorize(n).factors) {
        u64 phi = p - 1;
        for (unsigned i = 1; i < e; ++i) phi *= p;
        bound = bound / std::gcd(bound, phi) * phi;
    }

    u64 order = bound;
    for (const auto& [p, e] : factorize(bound).factors) {
        (void)e;
        while (order % p == 0 && mod_pow(10, order / p, n) == 1) order /= p;
    }
    return order;
}

}  // namespace digitseq::arith
