#pragma once

/// Dirichlet characters modulo an odd prime.
///
/// Characters are indexed against the least primitive root g: the character
/// with index k sends g^a to e(k a / (q-1)). Values come from a shared table of
/// (q-1)-th roots of unity, so products of character values are reproducible
/// bit for bit and parity/conjugation reduce to index arithmetic.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "lmoment/error.hpp"
#include "lmoment/numeric.hpp"
#include "lmoment/primes.hpp"

namespace lmoment {

class DirichletCharacter;

class PrimeModulus {
public:
    std::int64_t q() const noexcept { return data_->q; }
    std::int64_t primitive_root() const noexcept { return data_->g; }
    std::int64_t group_order() const noexcept { return data_->q - 1; }

    /// Residue of n in [0, q).
    std::int64_t reduce(std::int64_t n) const noexcept
    {
        const std::int64_t r = n % data_->q;
        return r < 0 ? r + data_->q : r;
    }

    /// Exponent a in [0, q-2] with g^a = n (mod q). n must be coprime to q.
    std::int64_t dlog(std::int64_t n) const noexcept { return data_->dlog[reduce(n)]; }

    /// g^a mod q for any integer a.
    std::int64_t power(std::int64_t a) const noexcept
    {
        std::int64_t e = a % group_order();
        if (e < 0) e += group_order();
        return data_->powers[e];
    }

    /// Inverse of n mod q. n must be coprime to q.
    std::int64_t inverse(std::int64_t n) const noexcept { return power(-dlog(n)); }

    /// e(j / (q-1)) for any integer j.
    cplx order_root(std::int64_t j) const noexcept
    {
        std::int64_t e = j % group_order();
        if (e < 0) e += group_order();
        return data_->char_roots[e];
    }

    /// e(r / q) for any integer r.
    cplx additive(std::int64_t r) const noexcept { return data_->add_roots[reduce(r)]; }

    DirichletCharacter character(std::int64_t k) const;

    /// Indices of the even primitive characters, ascending: 2, 4, ..., q-3.
    std::vector<std::int64_t> even_primitive_indices() const
    {
        std::vector<std::int64_t> out;
        for (std::int64_t k = 2; k < group_order(); k += 2) out.push_back(k);
        return out;
    }

    friend PrimeModulus build_modulus(std::int64_t q);

private:
    struct Data {
        std::int64_t q = 0;
        std::int64_t g = 0;
        std::vector<std::int64_t> dlog;    // indexed by residue; dlog[0] unused
        std::vector<std::int64_t> powers;  // g^a for a in [0, q-2]
        std::vector<cplx> char_roots;      // e(j/(q-1))
        std::vector<cplx> add_roots;       // e(r/q)
    };
    explicit PrimeModulus(std::shared_ptr<const Data> d) : data_(std::move(d)) {}
    std::shared_ptr<const Data> data_;
};

/// Least primitive root of a prime q, by testing g^((q-1)/p) != 1 over prime divisors p.
inline std::int64_t least_primitive_root(std::int64_t q)
{
    const auto factors = distinct_prime_factors(q - 1);
    for (std::int64_t g = 2; g < q; ++g) {
        bool generator = true;
        for (auto p : factors)
            if (pow_mod(g, (q - 1) / p, q) == 1) {
                generator = false;
                break;
            }
        if (generator) return g;
    }
    return 1;  // q = 2
}

inline PrimeModulus build_modulus(std::int64_t q)
{
    if (q < 3) throw ModulusTooSmall("modulus " + std::to_string(q) + " is below 3");
    if (!is_prime(q)) throw CompositeModulus("modulus " + std::to_string(q) + " is not prime");

    auto d = std::make_shared<PrimeModulus::Data>();
    d->q = q;
    d->g = least_primitive_root(q);
    const std::int64_t order = q - 1;
    d->dlog.assign(q, 0);
    d->powers.resize(order);
    std::int64_t x = 1;
    for (std::int64_t a = 0; a < order; ++a) {
        d->powers[a] = x;
        d->dlog[x] = a;
        x = x * d->g % q;
    }
    d->char_roots.resize(order);
    for (std::int64_t j = 0; j < order; ++j)
        d->char_roots[j] = std::polar(1.0, two_pi * static_cast<double>(j) / static_cast<double>(order));
    d->add_roots.resize(q);
    for (std::int64_t r = 0; r < q; ++r)
        d->add_roots[r] = std::polar(1.0, two_pi * static_cast<double>(r) / static_cast<double>(q));
    return PrimeModulus(std::move(d));
}

class DirichletCharacter {
public:
    DirichletCharacter(PrimeModulus modulus, std::int64_t index)
        : modulus_(std::move(modulus)), index_(index % modulus_.group_order())
    {
        if (index_ < 0) index_ += modulus_.group_order();
    }

    const PrimeModulus& modulus() const noexcept { return modulus_; }
    std::int64_t index() const noexcept { return index_; }
    std::int64_t q() const noexcept { return modulus_.q(); }

    bool is_principal() const noexcept { return index_ == 0; }
    bool is_primitive() const noexcept { return index_ != 0; }
    /// chi(-1) = (-1)^k because -1 = g^((q-1)/2).
    bool is_even() const noexcept { return index_ % 2 == 0; }
    int parity() const noexcept { return is_even() ? 1 : -1; }

    DirichletCharacter conj() const { return {modulus_, modulus_.group_order() - index_}; }

    /// Exponent j with chi(n) = e(j/(q-1)); n must be coprime to q.
    std::int64_t exponent(std::int64_t n) const noexcept
    {
        return (index_ * modulus_.dlog(n)) % modulus_.group_order();
    }

    cplx operator()(std::int64_t n) const noexcept
    {
        if (modulus_.reduce(n) == 0) return {0.0, 0.0};
        return modulus_.order_root(exponent(n));
    }

private:
    PrimeModulus modulus_;
    std::int64_t index_;
};

inline DirichletCharacter PrimeModulus::character(std::int64_t k) const { return {*this, k}; }

inline cplx char_value(const DirichletCharacter& chi, std::int64_t n) { return chi(n); }

/// Sum over primitive chi mod q of chi(n) conj(chi(m)), by direct summation.
inline cplx primitive_pair_sum(const PrimeModulus& q, std::int64_t n, std::int64_t m)
{
    if (q.reduce(n) == 0 || q.reduce(m) == 0)
        throw NotCoprime("primitive_pair_sum needs gcd(nm, q) = 1");
    const std::int64_t diff = q.dlog(n) - q.dlog(m);
    CompensatedSum<cplx> acc;
    for (std::int64_t k = 1; k < q.group_order(); ++k) acc += q.order_root(k * diff);
    return acc.value();
}

/// Same sum over every character mod q, principal included.
inline cplx complete_pair_sum(const PrimeModulus& q, std::int64_t n, std::int64_t m)
{
    if (q.reduce(n) == 0 || q.reduce(m) == 0)
        throw NotCoprime("complete_pair_sum needs gcd(nm, q) = 1");
    const std::int64_t diff = q.dlog(n) - q.dlog(m);
    CompensatedSum<cplx> acc;
    for (std::int64_t k = 0; k < q.group_order(); ++k) acc += q.order_root(k * diff);
    return acc.value();
}

}  // namespace lmoment
