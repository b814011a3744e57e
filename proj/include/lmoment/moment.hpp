#pragma once

/// The twisted first moment
///   sum over even primitive chi mod q of L(1/2, f x chi) L(1/2, conj chi),
/// its four cross terms, the main-term ratio against (q-2)/2 L(1, f), and
/// nonvanishing witnesses.
///
/// All characters are handled at once: the weighted coefficients are binned
/// by residue class and a transform along the discrete-log line turns the
/// bins into every character sum.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "lmoment/characters.hpp"
#include "lmoment/error.hpp"
#include "lmoment/exponential_sums.hpp"
#include "lmoment/hecke.hpp"
#include "lmoment/lvalues.hpp"
#include "lmoment/parallel.hpp"
#include "lmoment/weight_table.hpp"

namespace lmoment {

/// Branch sums of both approximate functional equations for one character.
/// S1 + S2 = L(1/2, f x chi), S3 + S4 = L(1/2, conj chi).
struct CharacterBranches {
    std::int64_t k = 0;
    cplx S1, S2, S3, S4;
    double twist_err = 0.0;
    double dirichlet_err = 0.0;

    cplx twist() const { return S1 + S2; }
    cplx dirichlet() const { return S3 + S4; }
};

struct CrossTerms {
    cplx S1S3, S1S4, S2S3, S2S4;
    cplx total() const { return S1S3 + S1S4 + S2S3 + S2S4; }
};

struct Witness {
    std::int64_t k = 0;
    double twist_abs = 0.0;      // |L(1/2, f x chi)|
    double dirichlet_abs = 0.0;  // |L(1/2, chi)|
};

struct MomentReport {
    std::int64_t q = 0;
    cplx moment;
    double l_one = 0.0;
    double main_term = 0.0;  // (q-2)/2 L(1, f)
    double ratio = 0.0;      // Re(moment) / main_term
    CrossTerms cross_terms;
    std::vector<Witness> witnesses;
    double witness_threshold = 0.0;
    std::int64_t characters = 0;
    std::int64_t twist_cutoff = 0;
    std::int64_t dirichlet_cutoff = 0;
    double err_estimate = 0.0;
    double runtime_ms = 0.0;
};

struct MomentOptions {
    double l_one = std::numeric_limits<double>::quiet_NaN();  // computed from f when NaN
    double witness_threshold = 1e-6;
    int workers = 1;
};

namespace detail {

inline PrimeModulus moment_modulus(std::int64_t q)
{
    auto m = build_modulus(q);
    if (q < 5) throw ModulusTooSmall("no even primitive characters mod " + std::to_string(q));
    return m;
}

// sum over j of e(k j/(q-1)) x[j] for the listed k only.
inline std::vector<cplx> dlog_transform_at(const PrimeModulus& q, const std::vector<cplx>& by_dlog,
                                           const std::vector<std::int64_t>& ks, int workers)
{
    const std::int64_t order = q.group_order();
    return parallel_map<cplx>(ks.size(), workers, [&](std::size_t i) {
        const std::int64_t k = ks[i];
        CompensatedSum<cplx> acc;
        std::int64_t e = 0;
        for (std::int64_t j = 0; j < order; ++j) {
            acc += q.order_root(e) * by_dlog[j];
            e += k;
            if (e >= order) e -= order;
        }
        return acc.value();
    });
}

}  // namespace detail

/// Branch sums for every even primitive character mod q, ascending k.
inline std::vector<CharacterBranches> all_branches(const HeckeSystem& f, const PrimeModulus& mod, int workers = 1)
{
    const std::int64_t q = mod.q();
    const double qd = static_cast<double>(q), sq = std::sqrt(qd);
    const std::int64_t N = twist_cutoff(q), M = dirichlet_cutoff(q);
    const auto V1 = WeightTable::shared(WeightKind::V1, 0.0);
    const auto V2 = WeightTable::shared(WeightKind::V2, f.T_f());
    const auto n_tail = std::max(N, static_cast<std::int64_t>(std::ceil(V2->x_hi() * qd)));
    const auto m_tail = std::max(M, static_cast<std::int64_t>(std::ceil(V1->x_hi() * sq)));
    const auto lam = f.dense(n_tail);

    // Residue-class bins, filled in increasing n.
    std::vector<CompensatedSum<double>> A(q), B(q);
    double twist_mass = 0.0, twist_tail = 0.0;
    for (std::int64_t n = 1; n <= n_tail; ++n) {
        const double l = (*lam)[n];
        if (l == 0.0) continue;
        const double w = l * (*V2)(static_cast<double>(n) / qd) / std::sqrt(static_cast<double>(n));
        if (n <= N) {
            A[n % q] += w;
            twist_mass += std::abs(l) / std::sqrt(static_cast<double>(n));
        } else {
            twist_tail += std::abs(w);
        }
    }
    double dir_mass = 0.0, dir_tail = 0.0;
    for (std::int64_t m = 1; m <= m_tail; ++m) {
        const double w = (*V1)(static_cast<double>(m) / sq) / std::sqrt(static_cast<double>(m));
        if (m <= M) {
            B[m % q] += w;
            dir_mass += 1.0 / std::sqrt(static_cast<double>(m));
        } else {
            dir_tail += std::abs(w);
        }
    }

    const std::int64_t order = mod.group_order();
    std::vector<cplx> a(order), b(order), e(order);
    for (std::int64_t j = 0; j < order; ++j) {
        const std::int64_t r = mod.power(j);
        a[j] = A[r].value();
        b[j] = B[r].value();
        e[j] = mod.additive(r);
    }
    const auto ks = mod.even_primitive_indices();
    const auto SA = detail::dlog_transform_at(mod, a, ks, workers);
    const auto SB = detail::dlog_transform_at(mod, b, ks, workers);
    const auto tau = detail::dlog_transform_at(mod, e, ks, workers);

    const double twist_err = 2.0 * twist_tail + 2.0 * twist_mass * detail::weight_value_error;
    const double dir_err = 2.0 * dir_tail + 2.0 * dir_mass * detail::weight_value_error;
    std::vector<CharacterBranches> out(ks.size());
    for (std::size_t i = 0; i < ks.size(); ++i) {
        auto& c = out[i];
        c.k = ks[i];
        c.S1 = SA[i];
        c.S2 = tau[i] * tau[i] / qd * std::conj(SA[i]);
        c.S3 = std::conj(SB[i]);
        c.S4 = std::conj(tau[i]) / sq * SB[i];  // tau(conj chi) = conj(tau(chi)) for even chi
        c.twist_err = twist_err;
        c.dirichlet_err = dir_err;
    }
    return out;
}

/// Characters with both |L(1/2, f x chi)| and |L(1/2, chi)| above threshold plus
/// their error bars, sorted by the smaller of the two magnitudes, descending.
inline std::vector<Witness> witnesses_from(const std::vector<CharacterBranches>& branches, double threshold)
{
    std::vector<Witness> out;
    for (const auto& c : branches) {
        const double t = std::abs(c.twist()), d = std::abs(c.dirichlet());
        if (t > threshold + c.twist_err && d > threshold + c.dirichlet_err) out.push_back({c.k, t, d});
    }
    std::stable_sort(out.begin(), out.end(), [](const Witness& x, const Witness& y) {
        const double mx = std::min(x.twist_abs, x.dirichlet_abs), my = std::min(y.twist_abs, y.dirichlet_abs);
        if (mx != my) return mx > my;
        return x.k < y.k;
    });
    return out;
}

inline CrossTerms cross_terms_from(const std::vector<CharacterBranches>& branches)
{
    CompensatedSum<cplx> s13, s14, s23, s24;
    for (const auto& c : branches) {
        s13 += c.S1 * c.S3;
        s14 += c.S1 * c.S4;
        s23 += c.S2 * c.S3;
        s24 += c.S2 * c.S4;
    }
    return {s13.value(), s14.value(), s23.value(), s24.value()};
}

inline MomentReport twisted_moment(const HeckeSystem& f, std::int64_t q, const MomentOptions& opt = {})
{
    const auto start = std::chrono::steady_clock::now();
    const auto mod = detail::moment_modulus(q);
    const auto branches = all_branches(f, mod, opt.workers);

    MomentReport r;
    r.q = q;
    CompensatedSum<cplx> total;
    double err = 0.0;
    for (const auto& c : branches) {
        total += c.twist() * c.dirichlet();
        err += c.twist_err * std::abs(c.dirichlet()) + c.dirichlet_err * std::abs(c.twist());
    }
    r.moment = total.value();
    r.cross_terms = cross_terms_from(branches);
    r.l_one = std::isnan(opt.l_one) ? l_one(f).value : opt.l_one;
    r.main_term = static_cast<double>(q - 2) / 2.0 * r.l_one;
    r.ratio = r.moment.real() / r.main_term;
    r.witness_threshold = opt.witness_threshold;
    r.witnesses = witnesses_from(branches, opt.witness_threshold);
    r.characters = static_cast<std::int64_t>(branches.size());
    r.twist_cutoff = twist_cutoff(q);
    r.dirichlet_cutoff = dirichlet_cutoff(q);
    r.err_estimate = err;
    r.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return r;
}

inline CrossTerms cross_term_decomposition(const HeckeSystem& f, std::int64_t q)
{
    return cross_terms_from(all_branches(f, detail::moment_modulus(q)));
}

inline std::vector<Witness> nonvanishing_search(const HeckeSystem& f, std::int64_t q, double threshold)
{
    if (!(threshold >= 0.0)) throw InvalidArgument("threshold must be non-negative");
    return witnesses_from(all_branches(f, detail::moment_modulus(q)), threshold);
}

/// (q-2)/2 sum_{n <= M} lambda(n)/n V1(n/sqrt q) V2(n/q): the diagonal part of the S1 S3 term.
inline double diagonal_term(const HeckeSystem& f, std::int64_t q)
{
    const double qd = static_cast<double>(q), sq = std::sqrt(qd);
    const std::int64_t M = dirichlet_cutoff(q);
    const auto V1 = WeightTable::shared(WeightKind::V1, 0.0);
    const auto V2 = WeightTable::shared(WeightKind::V2, f.T_f());
    const auto lam = f.dense(M);
    CompensatedSum<double> acc;
    for (std::int64_t n = 1; n <= M; ++n) {
        const double x = static_cast<double>(n);
        acc += (*lam)[n] / x * (*V1)(x / sq) * (*V2)(x / qd);
    }
    return (qd - 2.0) / 2.0 * acc.value();
}

/// Reports for every prime in [q_min, q_max], ascending, each computed independently.
inline std::vector<MomentReport> prime_scan(const HeckeSystem& f, std::int64_t q_min, std::int64_t q_max,
                                            const MomentOptions& opt = {})
{
    const auto qs = primes_between(std::max<std::int64_t>(q_min, 5), q_max);
    if (qs.empty()) return {};
    const auto V2 = WeightTable::shared(WeightKind::V2, f.T_f());
    WeightTable::shared(WeightKind::V1, 0.0);
    const std::int64_t need =
        std::max(twist_cutoff(qs.back()), static_cast<std::int64_t>(std::ceil(V2->x_hi() * static_cast<double>(qs.back()))));
    try {
        f.dense(need);
    } catch (const InsufficientData&) {
        for (auto q : qs) {
            const auto n = std::max(twist_cutoff(q), static_cast<std::int64_t>(std::ceil(V2->x_hi() * static_cast<double>(q))));
            if (n > f.dense_reach())
                throw InsufficientData("q = " + std::to_string(q) + " needs coefficients up to " + std::to_string(n) +
                                       ", data reach is " + std::to_string(f.dense_reach()));
        }
        throw;
    }
    MomentOptions inner = opt;
    if (std::isnan(inner.l_one)) inner.l_one = l_one(f).value;
    inner.workers = 1;
    return parallel_map<MomentReport>(qs.size(), opt.workers,
                                      [&](std::size_t i) { return twisted_moment(f, qs[i], inner); });
}

}  // namespace lmoment
