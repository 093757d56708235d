#pragma once

#include <algorithm>
#include <string>
#include <string_view>

#include "digitseq/arith.hpp"
#include "digitseq/common.hpp"

namespace digitseq::kernel {

/// The smallest number with digit sum s = lead + 9*nines, stored compactly:
/// its value is (lead+1)*10^nines - 1, i.e. the digit `lead` (when nonzero)
/// followed by `nines` nines. Never materialized for membership testing --
/// at the search bound the decimal expansion would run to ~10^12 digits.
struct CompactNine {
    unsigned lead;  // in [0, 8]
    u64 nines;

    u64 digit_sum() const { return lead + 9 * nines; }
    u64 digit_count() const { return nines + (lead != 0 ? 1 : 0); }

    std::string to_digits() const {
        std::string s;
        if (lead != 0) s += static_cast<char>('0' + lead);
        s.append(static_cast<std::size_t>(nines), '9');
        return s;
    }

    friend bool operator==(const CompactNine&, const CompactNine&) = default;
};

/// Digits of k_x / x, left-padded with zeros to the digit count of k_x.
/// block_len is the repetition unit: when x is scaled by a prime p, the
/// quotient of the scaled term is this string repeated p times.
struct QuotientDigits {
    std::string digits;
    u64 block_len;
};

inline CompactNine smallest_with_digit_sum(u64 s) {
    if (s == 0) throw domain_error("no positive integer has digit sum 0");
    return {static_cast<unsigned>(s % 9), s / 9};
}

/// Value of k mod m without materializing k.
inline u64 compact_value_mod(const CompactNine& k, u64 m) {
    if (m < 2) throw invalid_modulus_error();
    u64 t = arith::mul_mod(k.lead + 1, arith::mod_pow(10, k.nines, m), m);
    return t == 0 ? m - 1 : t - 1;
}

/// Membership predicate: x divides the smallest number whose digit sum is x,
/// i.e. (x mod 9 + 1) * 10^(x/9) = 1 (mod x). O(log x) multiplications.
inline bool is_term(u64 x) {
    if (x == 0) throw domain_error("is_term(0)");
    if (x == 1) return true;
    const u64 r = x % 9;
    return arith::mul_mod(r + 1, arith::mod_pow(10, x / 9, x), x) == 1;
}

/// 128-bit variant for family candidates beyond 2^64.
inline bool is_term_u128(u128 x) {
    if (x == 0) throw domain_error("is_term(0)");
    if (x <= ~static_cast<u64>(0)) return is_term(static_cast<u64>(x));
    const u128 r = x % 9;
    return arith::mul_mod_u128(r + 1, arith::mod_pow_u128(10, x / 9, x), x) == 1;
}

inline QuotientDigits quotient_digit_stream(u64 x, u64 digit_limit = 1'000'000) {
    if (!is_term(x)) throw not_a_term_error(std::to_string(x));
    const CompactNine k = smallest_with_digit_sum(x);
    if (k.digit_count() > digit_limit)
        throw digit_limit_error(k.digit_count(), digit_limit);

    // Streaming long division over the implicit digit string of k_x,
    // most significant digit first, O(1) state.
    std::string out;
    out.reserve(static_cast<std::size_t>(k.digit_count()));
    u64 rem = 0;
    auto step = [&](unsigned digit) {
        const u128 cur = static_cast<u128>(rem) * 10 + digit;
        out += static_cast<char>('0' + static_cast<unsigned>(cur / x));
        rem = static_cast<u64>(cur % x);
    };
    if (k.lead != 0) step(k.lead);
    for (u64 i = 0; i < k.nines; ++i) step(9);
    if (rem != 0) throw internal_error("long division left a remainder");
    return {std::move(out), k.digit_count()};
}

namespace detail {

inline void check_digits(std::string_view digits) {
    if (digits.empty()) throw domain_error("empty digit string");
    for (char c : digits)
        if (c < '0' || c > '9')
            throw domain_error("malformed digit string");
}

// Sum of two decimal strings. Keeps block-sum reduction exact for block
// widths past 128 bits (order-81 members already need 81-digit blocks).
inline std::string add_decimal(std::string_view a, std::string_view b) {
    std::string out;
    out.reserve(std::max(a.size(), b.size()) + 1);
    int carry = 0;
    auto ia = a.rbegin();
    auto ib = b.rbegin();
    while (ia != a.rend() || ib != b.rend() || carry) {
        int s = carry;
        if (ia != a.rend()) s += *ia++ - '0';
        if (ib != b.rend()) s += *ib++ - '0';
        out += static_cast<char>('0' + s % 10);
        carry = s / 10;
    }
    std::reverse(out.begin(), out.end());
    return out;
}

inline std::string strip_leading_zeros(std::string_view s) {
    const auto pos = s.find_first_not_of('0');
    if (pos == std::string_view::npos) return "0";
    return std::string(s.substr(pos));
}

// Decimal string times a small integer.
inline std::string mul_decimal_small(std::string_view a, u64 f) {
    if (f == 0) return "0";
    std::string out;
    out.reserve(a.size() + 20);
    u128 carry = 0;
    for (auto it = a.rbegin(); it != a.rend(); ++it) {
        const u128 cur = static_cast<u128>(*it - '0') * f + carry;
        out += static_cast<char>('0' + static_cast<unsigned>(cur % 10));
        carry = cur / 10;
    }
    while (carry > 0) {
        out += static_cast<char>('0' + static_cast<unsigned>(carry % 10));
        carry /= 10;
    }
    std::reverse(out.begin(), out.end());
    return strip_leading_zeros(out);
}

inline u64 horner_mod(std::string_view digits, u64 m) {
    u64 r = 0;
    for (char c : digits)
        r = static_cast<u64>((static_cast<u128>(r) * 10 + (c - '0')) % m);
    return r;
}

}  // namespace detail

/// Value of a digit string mod m, by direct modular evaluation.
inline u64 digits_mod(std::string_view digits, u64 m) {
    detail::check_digits(digits);
    if (m < 2) throw invalid_modulus_error();
    return detail::horner_mod(digits, m);
}

/// Sum of right-aligned block_len-wide blocks, as a decimal string (exact at
/// any width). The leftmost block may be shorter.
inline std::string block_digit_sum_decimal(std::string_view digits, u64 block_len) {
    detail::check_digits(digits);
    if (block_len == 0) throw domain_error("block length must be positive");
    std::string sum = "0";
    std::size_t end = digits.size();
    while (end > 0) {
        const std::size_t begin = end >= block_len ? end - block_len : 0;
        sum = detail::add_decimal(sum, digits.substr(begin, end - begin));
        end = begin;
    }
    return detail::strip_leading_zeros(sum);
}

/// Same, returned as an integer; throws range_error if the sum exceeds
/// 128 bits.
inline u128 block_digit_sum(std::string_view digits, u64 block_len) {
    return parse_u128(block_digit_sum_decimal(digits, block_len));
}

/// Divisibility of a digit string by y via the block-digit-sum rule with
/// block length ord_y(10), iterated until the result fits a single block.
/// Agrees with direct modular evaluation.
inline bool divisible_by_block_rule(std::string_view digits, u64 y) {
    detail::check_digits(digits);
    if (y == 0 || y % 2 == 0 || y % 5 == 0) throw not_coprime_error(y);
    if (y == 1) return true;
    const u64 e = arith::multiplicative_order_10(y);

    // One application may leave a multi-block result; the summed value
    // strictly decreases, so the loop terminates.
    std::string cur = detail::strip_leading_zeros(digits);
    while (cur.size() > e) cur = block_digit_sum_decimal(cur, e);
    return detail::horner_mod(cur, y) == 0;
}

}  // namespace digitseq::kernel
