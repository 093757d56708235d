#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace digitseq {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

// Base class for all library errors.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Contract violations on operation inputs (bad modulus, zero digit sum, ...).
struct domain_error : error {
    using error::error;
};

struct invalid_modulus_error : domain_error {
    invalid_modulus_error() : domain_error("modulus must be >= 2") {}
};

struct not_coprime_error : domain_error {
    explicit not_coprime_error(u64 n)
        : domain_error("gcd(10, " + std::to_string(n) + ") != 1") {}
};

struct not_a_term_error : domain_error {
    explicit not_a_term_error(const std::string& x)
        : domain_error(x + " is not a term of the sequence") {}
};

struct digit_limit_error : error {
    digit_limit_error(u64 needed, u64 limit)
        : error("operation needs " + std::to_string(needed) +
                " digits, limit is " + std::to_string(limit)) {}
    digit_limit_error(const std::string& needed, u64 limit)
        : error("operation needs " + needed + " digits, limit is " +
                std::to_string(limit)) {}
};

// A value left the supported integer width.
struct range_error : error {
    using error::error;
};

struct corrupt_file_error : error {
    using error::error;
};

// A library invariant failed; indicates a bug, not bad input.
struct internal_error : error {
    using error::error;
};

inline std::string to_string(u128 v) {
    if (v == 0) return "0";
    char buf[40];
    int pos = 40;
    while (v > 0) {
        buf[--pos] = static_cast<char>('0' + static_cast<unsigned>(v % 10));
        v /= 10;
    }
    return std::string(buf + pos, buf + 40);
}

// Parses a decimal string into u128; throws range_error on overflow or
// non-digit input.
inline u128 parse_u128(std::string_view s) {
    if (s.empty()) throw range_error("empty integer literal");
    constexpr u128 max = ~static_cast<u128>(0);
    u128 v = 0;
    for (char c : s) {
        if (c < '0' || c > '9')
            throw range_error("invalid digit in integer literal: " + std::string(s));
        unsigned d = static_cast<unsigned>(c - '0');
        if (v > (max - d) / 10)
            throw range_error("integer literal exceeds 128 bits: " + std::string(s));
        v = v * 10 + d;
    }
    return v;
}

inline u64 parse_u64(std::string_view s) {
    u128 v = parse_u128(s);
    if (v > ~static_cast<u64>(0))
        throw range_error("integer literal exceeds 64 bits: " + std::string(s));
    return static_cast<u64>(v);
}

}  // namespace digitseq
