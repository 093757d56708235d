#pragma once

#include <string>
#include <vector>

#include "digitseq/a066364.hpp"
#include "digitseq/arith.hpp"
#include "digitseq/common.hpp"
#include "digitseq/kernel.hpp"

namespace digitseq::families {

/// A term decomposed as 3^m * p * q with member prime p; candidates
/// 3^m * p^i * q for i in [i_from, i_to] are the family it generates.
struct FamilySpec {
    u64 base_term;
    unsigned m;
    u64 p;
    u64 q;
    long long i_from = 1;
    long long i_to = 1;
};

struct FamilyRecord {
    u128 candidate;
    long long i;
    bool verified;
};

/// Every intermediate quantity of the block-digit-sum argument that takes a
/// term x to the candidate p*x.
struct BlockSumTrace {
    u64 x;                       // 3^m * p^i * q, the term being scaled
    u64 p;
    unsigned n_p;
    u64 block_len;               // 3^n_p
    std::string quotient;        // b = k_x / x, zero-padded
    u64 copies;                  // p
    std::string single_copy_sum; // block digit sum of b alone
    std::string block_sum;       // block digit sum of "b b ... b"
    bool block_sum_divisible;    // p | block_sum
    bool direct_divisible;       // p | "b b ... b" by modular evaluation
    bool consistent;             // the two verdicts agree
    bool valid;                  // divisible and consistent
};

namespace detail {

inline u128 checked_pow_mul(u128 acc, u64 base, long long exp, long long i_label) {
    for (long long j = 0; j < exp; ++j) {
        if (acc > arith::max_modulus_128 / base)
            throw range_error("family candidate overflows at i = " +
                              std::to_string(i_label));
        acc *= base;
    }
    return acc;
}

inline u128 candidate_value(const FamilySpec& spec, long long i) {
    if (i < 0) throw domain_error("exponent i must be non-negative");
    u128 z = spec.q;
    z = checked_pow_mul(z, 3, spec.m, i);
    z = checked_pow_mul(z, spec.p, i, i);
    return z;
}

}  // namespace detail

/// Splits a term x into 3^m * p * q. For p = 3 one factor of 3 is attributed
/// to p and the rest to 3^m, keeping the theorem's shape.
inline FamilySpec decompose_term(u64 x, u64 p, a066364::PrimeSetCache& cache) {
    if (!kernel::is_term(x)) throw not_a_term_error(std::to_string(x));
    if (x % 9 != 0) throw domain_error(std::to_string(x) + " is not divisible by 9");
    if (p == 0 || x % p != 0)
        throw domain_error(std::to_string(p) + " does not divide " + std::to_string(x));
    if (!a066364::is_a066364_prime(p, cache))
        throw domain_error(std::to_string(p) + " is not an A066364 member prime");

    const unsigned v3 = arith::valuation(x, 3);
    const unsigned m = (p == 3) ? v3 - 1 : v3;
    if (m < 2)
        throw domain_error("3-adic valuation of " + std::to_string(x) +
                           " leaves exponent m = " + std::to_string(m) +
                           " < 2; theorem hypothesis unmet");

    u64 q = x / p;
    for (unsigned j = 0; j < m; ++j) q /= 3;
    return {x, m, p, q, 1, 1};
}

/// One record per i, ascending; every candidate is independently verified
/// with the membership predicate rather than trusted.
inline std::vector<FamilyRecord> generate_family(const FamilySpec& spec) {
    if (spec.i_from > spec.i_to) throw domain_error("empty exponent range");
    std::vector<FamilyRecord> out;
    out.reserve(static_cast<std::size_t>(spec.i_to - spec.i_from + 1));
    for (long long i = spec.i_from; i <= spec.i_to; ++i) {
        const u128 z = detail::candidate_value(spec, i);
        out.push_back({z, i, kernel::is_term_u128(z)});
    }
    return out;
}

/// Reproduces the divisibility argument for the step x -> p*x at exponent i:
/// the quotient digits of x repeated p times have a 3^n_p-block digit sum
/// divisible by p. The trace's verdict is cross-checked against direct
/// modular evaluation of the concatenation.
inline BlockSumTrace verify_block_sum_argument(const FamilySpec& spec, long long i,
                                               u64 digit_limit = 1'000'000) {
    const u128 xi_wide = detail::candidate_value(spec, i);
    const u128 quotient_digits = xi_wide / 9 + (xi_wide % 9 != 0 ? 1 : 0);
    if (xi_wide > ~static_cast<u64>(0) || quotient_digits > digit_limit)
        throw digit_limit_error(to_string(quotient_digits), digit_limit);
    const u64 xi = static_cast<u64>(xi_wide);
    if (!kernel::is_term(xi)) throw not_a_term_error(std::to_string(xi));
    if (xi % 9 != 0)
        throw domain_error("block-sum argument needs a term divisible by 9");

    const auto b = kernel::quotient_digit_stream(xi, digit_limit);
    if (b.digits.size() > digit_limit / spec.p)
        throw digit_limit_error(
            to_string(static_cast<u128>(b.digits.size()) * spec.p), digit_limit);

    std::string concat;
    concat.reserve(b.digits.size() * spec.p);
    for (u64 c = 0; c < spec.p; ++c) concat += b.digits;

    const auto rec = a066364::order_record(spec.p);
    u64 block_len = 1;
    for (unsigned j = 0; j < rec.n_p; ++j) block_len *= 3;

    BlockSumTrace t;
    t.x = xi;
    t.p = spec.p;
    t.n_p = rec.n_p;
    t.block_len = block_len;
    t.quotient = b.digits;
    t.copies = spec.p;
    t.single_copy_sum = kernel::block_digit_sum_decimal(b.digits, block_len);
    t.block_sum = kernel::block_digit_sum_decimal(concat, block_len);
    t.block_sum_divisible = kernel::digits_mod(t.block_sum, spec.p) == 0;
    t.direct_divisible = kernel::digits_mod(concat, spec.p) == 0;
    t.consistent = t.block_sum_divisible == t.direct_divisible;
    t.valid = t.block_sum_divisible && t.consistent;
    return t;
}

}  // namespace digitseq::families
