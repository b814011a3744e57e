#pragma once

#include <cstdint>
#include <vector>

namespace lmoment {

inline std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m)
{
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

inline std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t m)
{
    std::uint64_t result = 1 % m;
    base %= m;
    while (exp > 0) {
        if (exp & 1) result = mul_mod(result, base, m);
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    return result;
}

/// Deterministic Miller-Rabin; the first twelve prime bases are exact for all 64-bit n.
inline bool is_prime(std::int64_t n)
{
    if (n < 2) return false;
    constexpr std::uint64_t small[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    const auto un = static_cast<std::uint64_t>(n);
    for (auto p : small) {
        if (un == p) return true;
        if (un % p == 0) return false;
    }
    std::uint64_t d = un - 1;
    int r = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++r;
    }
    for (auto a : small) {
        std::uint64_t x = pow_mod(a, d, un);
        if (x == 1 || x == un - 1) continue;
        bool composite = true;
        for (int i = 1; i < r; ++i) {
            x = mul_mod(x, x, un);
            if (x == un - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

/// Distinct prime factors in increasing order, by trial division.
inline std::vector<std::int64_t> distinct_prime_factors(std::int64_t n)
{
    std::vector<std::int64_t> out;
    for (std::int64_t p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            out.push_back(p);
            while (n % p == 0) n /= p;
        }
    }
    if (n > 1) out.push_back(n);
    return out;
}

/// All primes in [lo, hi], ascending.
inline std::vector<std::int64_t> primes_between(std::int64_t lo, std::int64_t hi)
{
    std::vector<std::int64_t> out;
    if (hi < 2) return out;
    std::vector<bool> composite(static_cast<std::size_t>(hi) + 1, false);
    for (std::int64_t p = 2; p * p <= hi; ++p)
        if (!composite[p])
            for (std::int64_t m = p * p; m <= hi; m += p) composite[m] = true;
    for (std::int64_t n = std::max<std::int64_t>(lo, 2); n <= hi; ++n)
        if (!composite[n]) out.push_back(n);
    return out;
}

/// Smallest-prime-factor sieve on [0, n].
inline std::vector<std::int32_t> smallest_prime_factor_table(std::int64_t n)
{
    std::vector<std::int32_t> spf(static_cast<std::size_t>(n) + 1, 0);
    for (std::int64_t i = 2; i <= n; ++i) {
        if (spf[i] != 0) continue;
        for (std::int64_t m = i; m <= n; m += i)
            if (spf[m] == 0) spf[m] = static_cast<std::int32_t>(i);
    }
    return spf;
}

}  // namespace lmoment
