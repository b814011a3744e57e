#pragma once

/// Numerical check of the GL(2) Voronoi formula
///   sum lambda(n) e(n dbar/q) psi(n/N)
///     = q sum lambda(n)/n [e(nd/q) Psi_+(nN/q^2) + e(-nd/q) Psi_-(nN/q^2)].
///
/// The dual sum is truncated where a contour-shift bound
/// |Psi(x)| <= B(C) (pi^2 x)^{-C} certifies the remainder.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <tuple>
#include <vector>

#include "lmoment/characters.hpp"
#include "lmoment/error.hpp"
#include "lmoment/hecke.hpp"
#include "lmoment/numeric.hpp"
#include "lmoment/weights.hpp"

namespace lmoment {

/// Process-wide Psi kernels on the default line, keyed by test function, T_f and sign.
inline std::shared_ptr<const PsiKernel> shared_psi_kernel(const TestFunction& psi, double T_f, int sign)
{
    using Key = std::tuple<std::vector<std::tuple<double, double, double, double>>, double, int>;
    static std::mutex mu;
    static std::map<Key, std::shared_ptr<const PsiKernel>> cache;
    std::vector<std::tuple<double, double, double, double>> terms;
    for (const auto& t : psi.terms()) terms.emplace_back(t.coef, t.lo, t.hi, t.a);
    const int sg = sign > 0 ? 1 : -1;
    Key key{terms, T_f, sg};
    std::lock_guard lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto k = std::make_shared<const PsiKernel>(psi, T_f, sg, WeightSpec::psi(sg, T_f));
    cache.emplace(key, k);
    return k;
}

struct VoronoiRhs {
    cplx value;
    std::int64_t truncation = 0;
    double decay_exponent = 0.0;  // C in the bound |Psi(x)| <= B (pi^2 x)^{-C}
    double tail_bound = 0.0;      // certified bound on the discarded dual terms
    double kernel_error = 0.0;    // quadrature error of the kept terms
};

struct VoronoiCheck {
    std::int64_t q = 0;
    std::int64_t d = 0;
    std::int64_t N = 0;
    cplx lhs;
    cplx rhs;
    std::int64_t rhs_truncation = 0;
    double decay_exponent = 0.0;
    double tail_bound = 0.0;
    double kernel_error = 0.0;
    double residual = 0.0;  // |lhs - rhs| / (1 + |lhs|)
    bool negative_control = false;
};

namespace detail {

inline std::int64_t voronoi_d_inverse(std::int64_t d, const PrimeModulus& q)
{
    if (q.reduce(d) == 0) throw NotCoprime("d must be coprime to q");
    return q.inverse(d);
}

// A with sum_{n <= x} |lambda(n)| <= A x, measured on the data and padded by 20%.
inline double mean_abs_constant(const HeckeSystem& f)
{
    const std::int64_t reach = f.dense_reach();
    const auto lam = f.dense(reach);
    double best = 0.0, s = 0.0;
    std::int64_t next = 16;
    for (std::int64_t n = 1; n <= reach; ++n) {
        s += std::abs((*lam)[n]);
        if (n == next || n == reach) {
            best = std::max(best, s / static_cast<double>(n));
            next *= 2;
        }
    }
    return 1.2 * std::max(best, 1.0);
}

}  // namespace detail

inline cplx voronoi_lhs(const HeckeSystem& f, std::int64_t d, const PrimeModulus& q, std::int64_t N,
                        const TestFunction& psi)
{
    if (N < 1) throw InvalidArgument("N must be positive");
    const std::int64_t dbar = detail::voronoi_d_inverse(d, q);
    const auto lo = static_cast<std::int64_t>(std::ceil(psi.support_lo() * static_cast<double>(N)));
    const auto hi = static_cast<std::int64_t>(std::floor(psi.support_hi() * static_cast<double>(N)));
    const auto lam = f.dense(hi);
    CompensatedSum<cplx> acc;
    for (std::int64_t n = std::max<std::int64_t>(lo, 1); n <= hi; ++n) {
        const double w = psi(static_cast<double>(n) / static_cast<double>(N));
        if (w == 0.0) continue;
        acc += (*lam)[n] * w * q.additive(n % q.q() * dbar);
    }
    return acc.value();
}

/// Dual side, truncated where the certified tail drops below `target`
/// (or at `truncation` if given, with the tail still reported).
inline VoronoiRhs voronoi_rhs_certified(const HeckeSystem& f, std::int64_t d, const PrimeModulus& q, std::int64_t N,
                                        const TestFunction& psi, double target = 1e-9, std::int64_t truncation = 0)
{
    if (N < 1) throw InvalidArgument("N must be positive");
    detail::voronoi_d_inverse(d, q);
    const double qd = static_cast<double>(q.q());
    const double scale = static_cast<double>(N) / (qd * qd);  // x_n = n * scale
    const double A = detail::mean_abs_constant(f);

    // Tail past K: sum over both signs of q B (pi^2 scale)^{-C} A (1+C)/C K^{-C}.
    auto tail_at = [&](double B, double C, double K) {
        return 2.0 * qd * B * std::pow(pi * pi * scale, -C) * A * (1.0 + C) / C * std::pow(K, -C);
    };
    VoronoiRhs out;
    double best_K = std::numeric_limits<double>::infinity();
    double best_C = 0.0, best_B = 0.0;
    for (double C = 2.0; C <= 12.0; C += 1.0) {
        const double B = psi_decay_constant(psi, f.T_f(), C);
        const double K = std::pow(2.0 * qd * B * A * (1.0 + C) / (C * target), 1.0 / C) / (pi * pi * scale);
        if (K < best_K) {
            best_K = K;
            best_C = C;
            best_B = B;
        }
    }
    std::int64_t K = truncation > 0 ? truncation : static_cast<std::int64_t>(std::ceil(std::max(best_K, 1.0)));
    if (K > f.dense_reach())
        throw InsufficientData("dual sum needs coefficients up to " + std::to_string(K) + ", data reach is " +
                               std::to_string(f.dense_reach()));
    out.truncation = K;
    out.decay_exponent = best_C;
    out.tail_bound = tail_at(best_B, best_C, static_cast<double>(K));

    const auto plus = shared_psi_kernel(psi, f.T_f(), 1);
    const auto minus = shared_psi_kernel(psi, f.T_f(), -1);
    const auto lam = f.dense(K);
    const std::int64_t dr = q.reduce(d);
    CompensatedSum<cplx> acc;
    double kerr = 0.0;
    for (std::int64_t n = 1; n <= K; ++n) {
        const double l = (*lam)[n];
        if (l == 0.0) continue;
        const double x = static_cast<double>(n) * scale;
        const auto pp = plus->evaluate(x);
        const auto pm = minus->evaluate(x);
        const std::int64_t phase = (n % q.q()) * dr;
        const double c = l / static_cast<double>(n);
        acc += c * (q.additive(phase) * pp.value + q.additive(-phase) * pm.value);
        kerr += std::abs(c) * (pp.quad_error + pp.tail_bound + pm.quad_error + pm.tail_bound);
    }
    out.value = qd * acc.value();
    out.kernel_error = qd * kerr;
    return out;
}

inline cplx voronoi_rhs(const HeckeSystem& f, std::int64_t d, const PrimeModulus& q, std::int64_t N,
                        const TestFunction& psi)
{
    return voronoi_rhs_certified(f, d, q, N, psi).value;
}

inline VoronoiCheck voronoi_check(const HeckeSystem& f, std::int64_t d, const PrimeModulus& q, std::int64_t N,
                                  const TestFunction& psi = TestFunction::bump())
{
    VoronoiCheck c;
    c.q = q.q();
    c.d = d;
    c.N = N;
    c.lhs = voronoi_lhs(f, d, q, N, psi);
    const auto r = voronoi_rhs_certified(f, d, q, N, psi, 1e-9);
    c.rhs = r.value;
    c.rhs_truncation = r.truncation;
    c.decay_exponent = r.decay_exponent;
    c.tail_bound = r.tail_bound;
    c.kernel_error = r.kernel_error;
    c.residual = std::abs(c.lhs - c.rhs) / (1.0 + std::abs(c.lhs));
    c.negative_control = f.is_mock();
    return c;
}

}  // namespace lmoment
