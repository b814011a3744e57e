#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "lmoment/characters.hpp"

namespace lmoment {

/// Residual allowed before a sum that should be real (or integral) is rejected.
inline constexpr double exact_sum_residual = 1e-10;

/// tau(chi) = sum_{a=1}^{q-1} chi(a) e(a/q).
inline cplx gauss_sum(const DirichletCharacter& chi)
{
    const auto& m = chi.modulus();
    CompensatedSum<cplx> acc;
    for (std::int64_t a = 1; a < m.q(); ++a) acc += chi(a) * m.additive(a);
    return acc.value();
}

/// X[k] = sum_j e(k j / (q-1)) x[j] for k in [0, q-2], where x is indexed by
/// discrete log: x[j] is the value attached to the residue g^j.
///
/// So if x[j] = F(g^j), then X[k] = sum over units r of chi_k(r) F(r).
inline std::vector<cplx> dlog_transform(const PrimeModulus& q, std::span<const cplx> by_dlog)
{
    const std::int64_t order = q.group_order();
    std::vector<cplx> out(static_cast<std::size_t>(order));
    for (std::int64_t k = 0; k < order; ++k) {
        CompensatedSum<cplx> acc;
        std::int64_t e = 0;
        for (std::int64_t j = 0; j < order; ++j) {
            acc += q.order_root(e) * by_dlog[j];
            e += k;
            if (e >= order) e -= order;
        }
        out[k] = acc.value();
    }
    return out;
}

/// Every Gauss sum mod q at once, indexed by character index.
inline std::vector<cplx> gauss_sums_bulk(const PrimeModulus& q)
{
    std::vector<cplx> x(static_cast<std::size_t>(q.group_order()));
    for (std::int64_t j = 0; j < q.group_order(); ++j) x[j] = q.additive(q.power(j));
    return dlog_transform(q, x);
}

/// S(a, b; q) = sum over units x of e((a x + b xbar)/q).
inline double kloosterman(std::int64_t a, std::int64_t b, const PrimeModulus& q)
{
    const std::int64_t ar = q.reduce(a), br = q.reduce(b);
    CompensatedSum<cplx> acc;
    for (std::int64_t x = 1; x < q.q(); ++x) {
        const std::int64_t phase = (ar * x + br * q.inverse(x)) % q.q();
        acc += q.additive(phase);
    }
    const cplx s = acc.value();
    if (std::abs(s.imag()) > exact_sum_residual)
        throw NonConvergence("Kloosterman sum has imaginary residual " + std::to_string(s.imag()));
    return s.real();
}

/// c_q(n) = sum_{a=1}^{q-1} e(a n / q): q-1 when q | n, else -1.
inline std::int64_t ramanujan_sum(std::int64_t n, const PrimeModulus& q)
{
    const std::int64_t r = q.reduce(n);
    CompensatedSum<cplx> acc;
    for (std::int64_t a = 1; a < q.q(); ++a) acc += q.additive(a * r);
    const cplx s = acc.value();
    const double rounded = std::round(s.real());
    if (std::abs(s - cplx(rounded, 0.0)) > exact_sum_residual)
        throw NonConvergence("Ramanujan sum is not integral to tolerance");
    return static_cast<std::int64_t>(rounded);
}

}  // namespace lmoment
