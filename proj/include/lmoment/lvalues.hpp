#pragma once

/// Central values L(1/2, chi) and L(1/2, f x chi) by approximate functional
/// equations, and an independent Hurwitz-zeta evaluation of L(1/2, chi).

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "lmoment/characters.hpp"
#include "lmoment/error.hpp"
#include "lmoment/exponential_sums.hpp"
#include "lmoment/hecke.hpp"
#include "lmoment/numeric.hpp"
#include "lmoment/weight_table.hpp"

namespace lmoment {

namespace detail {

// B_{2k} for k = 1..15.
inline constexpr std::array<double, 15> bernoulli_even = {
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
    -23749461029.0 / 870.0,
    8615841276005.0 / 14322.0,
};

}  // namespace detail

struct HurwitzValue {
    cplx value;
    double remainder_bound;
};

/// zeta(s, a) = sum_{n >= 0} (n + a)^{-s} by Euler-Maclaurin, with a bound on the remainder.
inline HurwitzValue hurwitz_zeta_certified(cplx s, double a)
{
    if (s == cplx(1.0, 0.0)) throw PoleError("Hurwitz zeta has a pole at s = 1");
    if (!(a > 0.0)) throw InvalidArgument("Hurwitz zeta needs a > 0");
    const int N = 20 + static_cast<int>(std::ceil(std::abs(s)));
    CompensatedSum<cplx> acc;
    for (int n = 0; n < N; ++n) acc += std::pow(cplx(n + a, 0.0), -s);
    const double x = N + a;
    const cplx xs = std::pow(cplx(x, 0.0), -s);
    acc += x * xs / (s - 1.0);
    acc += 0.5 * xs;

    // term_k = B_{2k}/(2k)! * s (s+1) ... (s+2k-2) * x^{-s-2k+1}
    cplx rising = s;      // s (s+1) ... (s+2k-2)
    cplx power = xs / x;  // x^{-s-2k+1}
    double fact = 2.0;    // (2k)!
    double bound = 0.0;
    for (std::size_t k = 1; k <= detail::bernoulli_even.size(); ++k) {
        const cplx term = detail::bernoulli_even[k - 1] / fact * rising * power;
        if (std::abs(term) < 1e-18 * std::abs(acc.value()) || k == detail::bernoulli_even.size()) {
            // The remainder after the previous term is at most |term| |s+2k-1|/(Re s+2k-1).
            bound = std::abs(term) * std::abs(s + 2.0 * k - 1.0) / (s.real() + 2.0 * k - 1.0);
            acc += term;
            break;
        }
        acc += term;
        rising *= (s + 2.0 * k - 1.0) * (s + 2.0 * k);
        power /= x * x;
        fact *= (2.0 * k + 1.0) * (2.0 * k + 2.0);
    }
    return {acc.value(), bound};
}

inline cplx hurwitz_zeta(cplx s, double a) { return hurwitz_zeta_certified(s, a).value; }

enum class CentralMethod { afe, hurwitz_oracle };

inline const char* to_string(CentralMethod m) { return m == CentralMethod::afe ? "afe" : "hurwitz_oracle"; }

struct CentralValue {
    cplx value;
    CentralMethod method = CentralMethod::afe;
    std::int64_t q = 0;
    std::int64_t k = 0;
    bool twisted = false;
    bool conjugated = false;  // value is L(1/2, conj(chi)) rather than L(1/2, chi)
    std::int64_t cutoff = 0;
    double err_estimate = 0.0;
    cplx first_branch;   // the direct Dirichlet-series branch
    cplx second_branch;  // the dual branch, root number included
};

namespace detail {

inline void require_even_primitive(const DirichletCharacter& chi)
{
    if (chi.is_principal()) throw PrincipalCharacter("character index 0 is principal");
    if (!chi.is_even()) throw OddCharacter("only even characters are supported");
}

// Arguments beyond which V1 and V2 are below about 1e-14.
inline constexpr double v1_floor_argument = 3.5;
inline constexpr double v2_floor_argument = 8.0;

// Accuracy of a tabulated weight value: table check plus the contour tolerance.
inline constexpr double weight_value_error = 1e-11;

}  // namespace detail

/// Length of the V1 sum: max(ceil(sqrt(q) log^2 q), ceil(3.5 sqrt(q))).
inline std::int64_t dirichlet_cutoff(std::int64_t q)
{
    const double lq = std::log(static_cast<double>(q));
    const double sq = std::sqrt(static_cast<double>(q));
    return static_cast<std::int64_t>(std::ceil(sq * std::max(lq * lq, detail::v1_floor_argument)));
}

/// Length of the V2 sum: max(ceil(q log^2 q), 8 q).
inline std::int64_t twist_cutoff(std::int64_t q)
{
    const double lq = std::log(static_cast<double>(q));
    return static_cast<std::int64_t>(std::ceil(static_cast<double>(q) * std::max(lq * lq, detail::v2_floor_argument)));
}

/// L(1/2, chi) = q^{-1/2} sum_a chi(a) zeta(1/2, a/q).
inline CentralValue dirichlet_central_oracle(const DirichletCharacter& chi)
{
    if (chi.is_principal()) throw PrincipalCharacter("character index 0 is principal");
    const std::int64_t q = chi.q();
    CompensatedSum<cplx> acc;
    double err = 0.0;
    for (std::int64_t a = 1; a < q; ++a) {
        const auto z = hurwitz_zeta_certified({0.5, 0.0}, static_cast<double>(a) / static_cast<double>(q));
        acc += chi(a) * z.value;
        err += z.remainder_bound + 1e-15 * std::abs(z.value);
    }
    CentralValue out;
    out.value = acc.value() / std::sqrt(static_cast<double>(q));
    out.method = CentralMethod::hurwitz_oracle;
    out.q = q;
    out.k = chi.index();
    out.err_estimate = std::max(err, 1e-12 * static_cast<double>(q - 1)) / std::sqrt(static_cast<double>(q));
    out.first_branch = out.value;
    return out;
}

/// L(1/2, conj(chi)) = sum conj(chi)(m) m^{-1/2} V1(m/sqrt q)
///                   + tau(conj chi)/sqrt(q) sum chi(m) m^{-1/2} V1(m/sqrt q).
/// The value is that of the conjugate character and is marked as such.
inline CentralValue dirichlet_central_afe(const DirichletCharacter& chi, std::int64_t cutoff = 0)
{
    detail::require_even_primitive(chi);
    const std::int64_t q = chi.q();
    const std::int64_t M = cutoff > 0 ? cutoff : dirichlet_cutoff(q);
    const double sq = std::sqrt(static_cast<double>(q));
    const auto V1 = WeightTable::shared(WeightKind::V1, 0.0);

    CompensatedSum<cplx> direct, dual;
    double abs_mass = 0.0;
    for (std::int64_t m = 1; m <= M; ++m) {
        const double w = (*V1)(static_cast<double>(m) / sq) / std::sqrt(static_cast<double>(m));
        const cplx c = chi(m);
        direct += std::conj(c) * w;
        dual += c * w;
        abs_mass += 1.0 / std::sqrt(static_cast<double>(m));
    }
    double tail = 0.0;
    const auto tail_end = static_cast<std::int64_t>(std::ceil(V1->x_hi() * sq));
    for (std::int64_t m = M + 1; m <= tail_end; ++m)
        tail += std::abs((*V1)(static_cast<double>(m) / sq)) / std::sqrt(static_cast<double>(m));

    const cplx root = gauss_sum(chi.conj()) / sq;
    CentralValue out;
    out.first_branch = direct.value();
    out.second_branch = root * dual.value();
    out.value = out.first_branch + out.second_branch;
    out.method = CentralMethod::afe;
    out.q = q;
    out.k = chi.index();
    out.conjugated = true;
    out.cutoff = M;
    out.err_estimate = 2.0 * tail + 2.0 * abs_mass * detail::weight_value_error;
    return out;
}

/// L(1/2, f x chi) = sum lambda(n) chi(n) n^{-1/2} V2(n/q)
///                 + tau(chi)^2/q sum lambda(n) conj(chi)(n) n^{-1/2} V2(n/q).
inline CentralValue twist_central_afe(const HeckeSystem& f, const DirichletCharacter& chi, std::int64_t cutoff = 0)
{
    detail::require_even_primitive(chi);
    const std::int64_t q = chi.q();
    const std::int64_t N = cutoff > 0 ? cutoff : twist_cutoff(q);
    const auto V2 = WeightTable::shared(WeightKind::V2, f.T_f());
    const auto tail_end = std::max(N, static_cast<std::int64_t>(std::ceil(V2->x_hi() * static_cast<double>(q))));
    const auto lam = f.dense(tail_end);
    const double qd = static_cast<double>(q);

    CompensatedSum<cplx> direct, dual;
    double abs_mass = 0.0;
    for (std::int64_t n = 1; n <= N; ++n) {
        if ((*lam)[n] == 0.0) continue;
        const double rn = 1.0 / std::sqrt(static_cast<double>(n));
        const double w = (*lam)[n] * (*V2)(static_cast<double>(n) / qd) * rn;
        const cplx c = chi(n);
        direct += c * w;
        dual += std::conj(c) * w;
        abs_mass += std::abs((*lam)[n]) * rn;
    }
    double tail = 0.0;
    for (std::int64_t n = N + 1; n <= tail_end; ++n)
        tail += std::abs((*lam)[n] * (*V2)(static_cast<double>(n) / qd)) / std::sqrt(static_cast<double>(n));

    const cplx tau = gauss_sum(chi);
    CentralValue out;
    out.first_branch = direct.value();
    out.second_branch = tau * tau / qd * dual.value();
    out.value = out.first_branch + out.second_branch;
    out.method = CentralMethod::afe;
    out.q = q;
    out.k = chi.index();
    out.twisted = true;
    out.cutoff = N;
    out.err_estimate = 2.0 * tail + 2.0 * abs_mass * detail::weight_value_error;
    return out;
}

}  // namespace lmoment
