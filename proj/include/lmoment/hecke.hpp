#pragma once

/// Hecke eigenvalue systems of even Hecke-Maass forms for SL(2, Z).
///
/// Prime eigenvalues come from a data file (or a seeded mock); every other
/// coefficient follows from the Hecke relations. Values are built with one
/// fixed multiplication order, so a coefficient is bitwise the same whether
/// it is read from the dense table or computed on its own.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <memory>
#include <mutex>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "lmoment/error.hpp"
#include "lmoment/numeric.hpp"
#include "lmoment/primes.hpp"

namespace lmoment {

inline constexpr double kim_sarnak_theta = 7.0 / 64.0;

/// T_f of the first even Hecke-Maass form for SL(2, Z).
inline constexpr double first_even_T = 13.779751351890738;

inline double kim_sarnak_bound(std::int64_t p)
{
    const double pt = std::pow(static_cast<double>(p), kim_sarnak_theta);
    return pt + 1.0 / pt;
}

class HeckeSystem {
public:
    /// Builds a system from explicit prime data. Every prime up to pmax must be present.
    static HeckeSystem from_primes(double T_f, std::vector<std::pair<std::int64_t, double>> primes, std::int64_t pmax,
                                   double precision, std::string provenance, bool check_bound = true)
    {
        std::sort(primes.begin(), primes.end());
        const auto expected = primes_between(2, pmax);
        std::size_t i = 0;
        for (auto p : expected) {
            if (i >= primes.size() || primes[i].first != p)
                throw GapError("prime " + std::to_string(p) + " missing below pmax " + std::to_string(pmax));
            ++i;
        }
        if (i != primes.size()) throw FormatError("prime data extends past pmax or repeats a prime");
        if (check_bound)
            for (const auto& [p, v] : primes)
                if (std::abs(v) > kim_sarnak_bound(p) + precision)
                    throw BoundViolation("|lambda(" + std::to_string(p) + ")| = " + std::to_string(std::abs(v)) +
                                         " exceeds p^theta + p^-theta");

        auto d = std::make_shared<Data>();
        d->T_f = T_f;
        d->pmax = pmax;
        d->precision = precision;
        d->provenance = std::move(provenance);
        d->prime_list.reserve(primes.size());
        d->prime_value.assign(static_cast<std::size_t>(pmax) + 1, 0.0);
        for (const auto& [p, v] : primes) {
            d->prime_list.push_back(p);
            d->prime_value[p] = v;
        }
        return HeckeSystem(std::move(d));
    }

    /// Reads the "maass v1" text format.
    static HeckeSystem load(std::istream& in, std::string provenance = "stream")
    {
        std::string line;
        int lineno = 0;
        auto next_line = [&]() -> bool {
            while (std::getline(in, line)) {
                ++lineno;
                if (!line.empty() && line.back() == '\r') line.pop_back();
                const auto first = line.find_first_not_of(" \t");
                if (first == std::string::npos || line[first] == '#') continue;
                line = line.substr(first);
                return true;
            }
            return false;
        };
        auto fail = [&](const std::string& why) -> FormatError {
            return FormatError("line " + std::to_string(lineno) + ": " + why);
        };
        auto header = [&](const std::string& key) {
            if (!next_line()) throw fail("missing header '" + key + "'");
            std::istringstream ss(line);
            std::string k, v, extra;
            if (!(ss >> k >> v) || k != key || (ss >> extra)) throw fail("expected '" + key + " <value>'");
            return v;
        };
        auto to_double = [&](const std::string& s) {
            std::size_t pos = 0;
            double v = 0.0;
            try {
                v = std::stod(s, &pos);
            } catch (const std::exception&) {
                throw fail("bad number '" + s + "'");
            }
            if (pos != s.size() || !std::isfinite(v)) throw fail("bad number '" + s + "'");
            return v;
        };
        auto to_int = [&](const std::string& s) {
            std::size_t pos = 0;
            long long v = 0;
            try {
                v = std::stoll(s, &pos);
            } catch (const std::exception&) {
                throw fail("bad integer '" + s + "'");
            }
            if (pos != s.size()) throw fail("bad integer '" + s + "'");
            return static_cast<std::int64_t>(v);
        };

        if (!next_line() || line != "maass v1") throw fail("expected 'maass v1'");
        const double T_f = to_double(header("T_f"));
        const std::string parity = header("parity");
        if (parity != "even") throw fail("only even parity is supported, got '" + parity + "'");
        const double precision = to_double(header("precision"));
        const std::int64_t pmax = to_int(header("pmax"));
        if (pmax < 2) throw fail("pmax must be at least 2");
        if (precision < 0.0) throw fail("precision must be non-negative");

        std::vector<std::pair<std::int64_t, double>> primes;
        std::int64_t last = 1;
        while (next_line()) {
            std::istringstream ss(line);
            std::string ps, vs, extra;
            if (!(ss >> ps >> vs) || (ss >> extra)) throw fail("expected '<prime> <value>'");
            const std::int64_t p = to_int(ps);
            if (!is_prime(p)) throw fail(ps + " is not prime");
            if (p <= last) throw fail("primes must be strictly increasing");
            if (p > pmax) throw fail("prime " + ps + " exceeds pmax");
            primes.emplace_back(p, to_double(vs));
            last = p;
        }
        return from_primes(T_f, std::move(primes), pmax, precision, std::move(provenance));
    }

    static HeckeSystem load_file(const std::string& path)
    {
        std::ifstream in(path);
        if (!in) throw FormatError("cannot open " + path);
        return load(in, path);
    }

    /// Surrogate with lambda(p) = 2 cos(theta_p), theta_p uniform on [0, pi] from a seeded generator.
    static HeckeSystem mock(std::uint64_t seed, std::int64_t pmax = 120000, double T_f = first_even_T)
    {
        std::mt19937_64 rng(seed);
        std::vector<std::pair<std::int64_t, double>> primes;
        for (auto p : primes_between(2, pmax)) {
            const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
            primes.emplace_back(p, 2.0 * std::cos(pi * u));
        }
        return from_primes(T_f, std::move(primes), pmax, 0.0, "mock:" + std::to_string(seed));
    }

    double T_f() const noexcept { return data_->T_f; }
    std::int64_t pmax() const noexcept { return data_->pmax; }
    double precision() const noexcept { return data_->precision; }
    const std::string& provenance() const noexcept { return data_->provenance; }
    bool is_mock() const { return data_->provenance.rfind("mock", 0) == 0; }
    const std::vector<std::int64_t>& primes() const noexcept { return data_->prime_list; }

    double prime_coefficient(std::int64_t p) const { return data_->prime_value.at(p); }

    /// Largest N such that every n <= N has all prime factors <= pmax.
    std::int64_t dense_reach() const
    {
        std::int64_t n = data_->pmax + 1;
        while (!is_prime(n)) ++n;
        return n - 1;
    }

    /// lambda(n) for n >= 1.
    double coefficient(std::int64_t n) const
    {
        if (n < 1) throw InvalidArgument("coefficient index must be positive");
        {
            std::lock_guard lock(data_->mu);
            if (data_->dense && n < static_cast<std::int64_t>(data_->dense->size())) return (*data_->dense)[n];
        }
        // Factor, then multiply from the largest prime power down, as the dense table does.
        std::vector<double> parts;
        std::int64_t m = n;
        for (auto p : data_->prime_list) {
            if (p * p > m) break;
            if (m % p != 0) continue;
            int k = 0;
            while (m % p == 0) {
                m /= p;
                ++k;
            }
            parts.push_back(prime_power(p, k));
        }
        if (m > 1) {
            if (m > data_->pmax)
                throw InsufficientData("lambda(" + std::to_string(n) + ") needs prime " + std::to_string(m) +
                                       " above pmax " + std::to_string(data_->pmax));
            parts.push_back(prime_power(m, 1));
        }
        double acc = 1.0;
        for (auto it = parts.rbegin(); it != parts.rend(); ++it) acc = *it * acc;
        return acc;
    }

    /// lambda(0..nmax) with lambda(0) = 0, shared and grown on demand.
    std::shared_ptr<const std::vector<double>> dense(std::int64_t nmax) const
    {
        if (nmax > dense_reach())
            throw InsufficientData("dense coefficients up to " + std::to_string(nmax) + " need primes above pmax " +
                                   std::to_string(data_->pmax));
        std::lock_guard lock(data_->mu);
        if (data_->dense && static_cast<std::int64_t>(data_->dense->size()) > nmax) return data_->dense;
        data_->dense = build_dense(nmax);
        return data_->dense;
    }

private:
    struct Data {
        double T_f = 0.0;
        std::int64_t pmax = 0;
        double precision = 0.0;
        std::string provenance;
        std::vector<std::int64_t> prime_list;
        std::vector<double> prime_value;
        std::mutex mu;
        std::shared_ptr<const std::vector<double>> dense;
    };

    explicit HeckeSystem(std::shared_ptr<Data> d) : data_(std::move(d)) {}

    double prime_power(std::int64_t p, int k) const
    {
        const double lp = data_->prime_value[p];
        double prev = 1.0, cur = lp;
        for (int j = 1; j < k; ++j) {
            const double next = lp * cur - prev;
            prev = cur;
            cur = next;
        }
        return k == 0 ? 1.0 : cur;
    }

    std::shared_ptr<const std::vector<double>> build_dense(std::int64_t nmax) const
    {
        const auto spf = smallest_prime_factor_table(nmax);
        auto out = std::make_shared<std::vector<double>>(static_cast<std::size_t>(nmax) + 1, 0.0);
        auto& lam = *out;
        if (nmax >= 1) lam[1] = 1.0;
        for (std::int64_t n = 2; n <= nmax; ++n) {
            const std::int64_t p = spf[n];
            std::int64_t pk = 1, m = n;
            int k = 0;
            while (m % p == 0) {
                m /= p;
                pk *= p;
                ++k;
            }
            const double lpk = (m == 1) ? prime_power(p, k) : lam[pk];
            lam[n] = lpk * lam[m];
        }
        return out;
    }

    std::shared_ptr<Data> data_;
};

struct AverageBoundRow {
    std::int64_t x;
    double mean_abs;     // (1/x) sum_{n<x} |lambda(n)|
    double mean_square;  // (1/x) sum_{n<x} lambda(n)^2
};

struct AverageBoundReport {
    std::vector<AverageBoundRow> rows;
    double max_ratio = 0.0;
    bool flagged = false;  // some ratio exceeds 10
};

inline AverageBoundReport average_bound_report(const HeckeSystem& f, const std::vector<std::int64_t>& x_grid)
{
    AverageBoundReport rep;
    if (x_grid.empty()) return rep;
    const std::int64_t xmax = *std::max_element(x_grid.begin(), x_grid.end());
    const auto lam = f.dense(std::max<std::int64_t>(xmax - 1, 1));
    for (auto x : x_grid) {
        CompensatedSum<double> a, s;
        for (std::int64_t n = 1; n < x; ++n) {
            a += std::abs((*lam)[n]);
            s += (*lam)[n] * (*lam)[n];
        }
        AverageBoundRow row{x, a.value() / static_cast<double>(x), s.value() / static_cast<double>(x)};
        rep.max_ratio = std::max({rep.max_ratio, row.mean_abs, row.mean_square});
        rep.rows.push_back(row);
    }
    rep.flagged = rep.max_ratio > 10.0;
    return rep;
}

/// sum_{n <= N} lambda(n) e(alpha n).
inline cplx additive_twist(const HeckeSystem& f, double alpha, std::int64_t N)
{
    if (N < 1) return {0.0, 0.0};
    const auto lam = f.dense(N);
    CompensatedSum<cplx> acc;
    for (std::int64_t n = 1; n <= N; ++n) {
        const double turns = std::fmod(alpha * static_cast<double>(n), 1.0);
        acc += (*lam)[n] * unit_exp(turns);
    }
    return acc.value();
}

/// Smooth cutoff W_a(y) = erfc(log y / (2 sqrt a)) / 2, with Mellin transform e^{a s^2}/s.
inline double smooth_cutoff(double y, double a) { return 0.5 * std::erfc(std::log(y) / (2.0 * std::sqrt(a))); }

struct LOneResult {
    double value = 0.0;         // with the narrower cutoff
    double alternate = 0.0;     // with the wider cutoff
    double disagreement = 0.0;  // |value - alternate|
    double X = 0.0;
    std::int64_t terms = 0;
    double tail_estimate = 0.0;  // smoothing weight at the last term, times the last partial sum scale
};

inline constexpr double l_one_cutoff_narrow = 1.0 / 16.0;
inline constexpr double l_one_cutoff_wide = 1.0 / 9.0;

/// L(1, f) from sum lambda(n)/n W_a(n/X) at two cutoff widths.
inline LOneResult l_one(const HeckeSystem& f, double X = 100.0)
{
    if (!(X >= 1.0)) throw InvalidArgument("l_one needs X >= 1");
    // erfc(z)/2 < 1e-18 once z > 6.
    const double z = 6.0;
    const auto nmax = static_cast<std::int64_t>(std::ceil(X * std::exp(2.0 * z * std::sqrt(l_one_cutoff_wide))));
    const auto lam = f.dense(nmax);
    CompensatedSum<double> narrow, wide;
    for (std::int64_t n = 1; n <= nmax; ++n) {
        const double y = static_cast<double>(n) / X;
        const double term = (*lam)[n] / static_cast<double>(n);
        narrow += term * smooth_cutoff(y, l_one_cutoff_narrow);
        wide += term * smooth_cutoff(y, l_one_cutoff_wide);
    }
    LOneResult r;
    r.value = narrow.value();
    r.alternate = wide.value();
    r.disagreement = std::abs(r.value - r.alternate);
    r.X = X;
    r.terms = nmax;
    r.tail_estimate = 0.5 * std::erfc(z) * std::log(static_cast<double>(nmax)) * 4.0;
    if (r.disagreement > 1e-4)
        throw NonConvergence("L(1,f) cutoffs disagree by " + std::to_string(r.disagreement));
    return r;
}

}  // namespace lmoment
