#pragma once

/// Approximate-functional-equation weights V1, V2 and the Voronoi kernels
/// Psi_+/-, all as vertical-line contour integrals.
///
/// Every integral is truncated at a height H where a Stirling upper bound
/// certifies the discarded tail is below tol/10, and the truncated segment
/// is integrated with composite Gauss-Legendre panels, doubled until two
/// refinements agree within tol/2.

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "lmoment/error.hpp"
#include "lmoment/gamma.hpp"
#include "lmoment/numeric.hpp"
#include "lmoment/quadrature.hpp"

namespace lmoment {

enum class WeightKind { V1, V2, PsiPlus, PsiMinus };

struct WeightSpec {
    WeightKind kind = WeightKind::V1;
    double T_f = 0.0;
    double c = 1.0;      // abscissa of the contour
    double H = 0.0;      // truncation height; 0 picks it from the tail bound
    double tol = 1e-10;  // target absolute accuracy
    int order = 20;      // Gauss-Legendre order per panel

    static WeightSpec v1(double c = 1.0, double tol = 1e-10) { return {WeightKind::V1, 0.0, c, 0.0, tol, 20}; }
    static WeightSpec v2(double T_f, double c = 1.0, double tol = 1e-10)
    {
        return {WeightKind::V2, T_f, c, 0.0, tol, 20};
    }
    static WeightSpec psi(int sign, double T_f, double sigma = 0.0, double tol = 1e-9)
    {
        return {sign > 0 ? WeightKind::PsiPlus : WeightKind::PsiMinus, T_f, sigma, 0.0, tol, 20};
    }
};

/// A real contour integral together with its certificates.
struct ContourValue {
    double value = 0.0;
    double imag_residual = 0.0;
    double quad_error = 0.0;  // difference between the last two refinements
    double tail_bound = 0.0;  // certified bound on the discarded tails
    double H = 0.0;
};

namespace detail {

inline constexpr double max_height = 20000.0;
// When (scale x)^{-c} exceeds e the line is moved left of s = 0 and the residue 1
// added back, which avoids cancellation against a large x^{-c} factor.
inline constexpr double small_x_log_factor = 1.0;
inline constexpr double shifted_abscissa = -0.25;

struct VKernel {
    WeightKind kind;
    double T;
    double log_scale;   // log(sqrt(pi) x) for V1, log(pi x) for V2
    cplx log_norm;      // log of the normalizing gamma factors

    cplx log_f(cplx s) const
    {
        if (kind == WeightKind::V1) return log_gamma((2.0 * s + 1.0) / 4.0) - log_norm - s * log_scale;
        const cplx iT{0.0, T};
        return log_gamma((2.0 * s + 1.0 + 2.0 * iT) / 4.0) + log_gamma((2.0 * s + 1.0 - 2.0 * iT) / 4.0) -
               log_norm - s * log_scale;
    }

    // Upper bound for log|f(c + iH)| and a lower bound for its decay rate in t >= H.
    std::pair<double, double> tail_profile(double c, double H) const
    {
        const double sp = (2.0 * c + 1.0) / 4.0;
        if (kind == WeightKind::V1) {
            const double L = log_abs_gamma_upper({sp, H / 2.0}) - log_norm.real() - c * log_scale;
            return {L, pi / 4.0 - sp / H};
        }
        const double L = log_abs_gamma_upper({sp, (H + T) / 2.0}) + log_abs_gamma_upper({sp, (H - T) / 2.0}) -
                         log_norm.real() - c * log_scale;
        return {L, pi / 2.0 - sp / (H + T) - sp / (H - T)};
    }

    double min_height() const { return kind == WeightKind::V1 ? 4.0 : std::abs(T) + 4.0; }
};

inline VKernel make_vkernel(WeightKind kind, double x, double T)
{
    if (kind == WeightKind::V1)
        return {kind, 0.0, std::log(std::sqrt(pi) * x), log_gamma(cplx(0.25, 0.0))};
    const cplx iT{0.0, T};
    return {kind, T, std::log(pi * x), log_gamma((1.0 + 2.0 * iT) / 4.0) + log_gamma((1.0 - 2.0 * iT) / 4.0)};
}

// Tail of (1/2pi) int_{|t|>H} |f(c+it)| |s|^{-p} dt, p = 1 for V, 0 for dV/dlog x.
inline double v_tail(const VKernel& k, double c, double H, bool derivative)
{
    auto [L, rate] = k.tail_profile(c, H);
    if (!derivative) {
        L -= std::log(std::hypot(c, H));
    } else {
        rate -= 1.0 / H;
    }
    if (rate <= 0.0) return std::numeric_limits<double>::infinity();
    return 2.0 * std::exp(L) / rate / two_pi;
}

inline double choose_v_height(const VKernel& k, double c, double tol, bool derivative)
{
    for (double H = k.min_height(); H <= max_height; H += 2.0)
        if (v_tail(k, c, H, derivative) < tol / 10.0) return H;
    throw QuadratureFailure("no truncation height certifies the tail below " + std::to_string(tol));
}

inline ContourValue v_contour(WeightKind kind, double x, double T, double c, double H_req, double tol, int order,
                              bool derivative)
{
    if (!(x > 0.0)) throw InvalidArgument("weight argument must be positive");
    const VKernel k = make_vkernel(kind, x, T);

    double residue = 0.0;
    if (!derivative && c > 0.0 && c * (-k.log_scale) > small_x_log_factor) {
        c = shifted_abscissa;
        residue = 1.0;
    }
    if (!derivative && c <= 0.0 && residue == 0.0) residue = 1.0;  // caller chose a line left of the pole

    double H = H_req;
    if (H <= 0.0) {
        H = choose_v_height(k, c, tol, derivative);
    } else if (v_tail(k, c, H, derivative) >= tol / 10.0) {
        throw QuadratureFailure("requested height " + std::to_string(H) + " does not certify the tail");
    }

    auto integrand = [&](double t) -> cplx {
        const cplx s{c, t};
        const cplx f = std::exp(k.log_f(s));
        return derivative ? -f : f / s;
    };
    const int panels = std::max(4, static_cast<int>(std::ceil(2.0 * H)));
    const auto r = integrate_adaptive(integrand, -H, H, tol / 2.0 * two_pi, panels, order);
    if (r.error > tol / 2.0 * two_pi)
        throw QuadratureFailure("contour quadrature did not settle to " + std::to_string(tol));

    ContourValue out;
    const cplx v = r.value / two_pi;
    out.value = v.real() + residue;
    out.imag_residual = std::abs(v.imag());
    out.quad_error = r.error / two_pi;
    out.tail_bound = v_tail(k, c, H, derivative);
    out.H = H;
    if (out.imag_residual > tol)
        throw QuadratureFailure("imaginary residual " + std::to_string(out.imag_residual) + " exceeds tolerance");
    return out;
}

}  // namespace detail

/// V1 with its certificates.
inline ContourValue v1_certified(double x, const WeightSpec& spec = WeightSpec::v1())
{
    return detail::v_contour(WeightKind::V1, x, 0.0, spec.c, spec.H, spec.tol, spec.order, false);
}

/// V1(x) = (1/2 pi i) int_(c) (sqrt(pi) x)^{-s} Gamma((2s+1)/4)/Gamma(1/4) ds/s.
inline double v1(double x, const WeightSpec& spec = WeightSpec::v1()) { return v1_certified(x, spec).value; }

inline ContourValue v2_certified(double x, double T_f, const WeightSpec& spec)
{
    return detail::v_contour(WeightKind::V2, x, T_f, spec.c, spec.H, spec.tol, spec.order, false);
}

/// V2(x) = (1/2 pi i) int_(c) (pi x)^{-s} prod_{+-} Gamma((2s+1+-2iT)/4)/Gamma((1+-2iT)/4) ds/s.
inline double v2(double x, double T_f, const WeightSpec& spec) { return v2_certified(x, T_f, spec).value; }
inline double v2(double x, double T_f) { return v2(x, T_f, WeightSpec::v2(T_f)); }

/// Abscissa near the saddle point of the V-integrand on the real axis. On this
/// line the integrand is comparable to the value itself, so large-x values come
/// out with relative rather than absolute accuracy.
inline double v_saddle_abscissa(WeightKind kind, double x, double T_f)
{
    if (kind == WeightKind::V1) return std::max(1.0, 2.0 * pi * x * x - 0.5);
    const double r = pi * x, h = T_f / 2.0;
    if (r <= h + 1.0) return 1.0;
    return std::max(1.0, 2.0 * std::sqrt(r * r - h * h) - 0.5);
}

/// V-weight evaluated on the saddle line with accuracy relative to its size.
inline ContourValue v_relative(WeightKind kind, double x, double T_f, double rel_tol = 1e-12)
{
    const double c = v_saddle_abscissa(kind, x, T_f);
    const auto k = detail::make_vkernel(kind, x, T_f);
    const double scale = c > 1.0 ? std::exp(k.log_f({c, 0.0}).real()) / c : 1.0;
    return detail::v_contour(kind, x, T_f, c, 0.0, rel_tol * std::min(1.0, scale), 20, false);
}

/// Smooth test function: a finite combination of bumps
/// exp(a - a/(1-u^2)), u mapping [lo, hi] onto [-1, 1].
class TestFunction {
public:
    static TestFunction bump(double lo = 1.0, double hi = 2.0, double a = 10.0)
    {
        if (!(lo > 0.0 && hi > lo && a > 0.0)) throw InvalidArgument("bump needs 0 < lo < hi and a > 0");
        TestFunction f;
        f.terms_.push_back({1.0, lo, hi, a});
        return f;
    }

    double operator()(double x) const
    {
        double acc = 0.0;
        for (const auto& t : terms_) acc += t.coef * t.value(x);
        return acc;
    }

    double support_lo() const
    {
        double lo = std::numeric_limits<double>::infinity();
        for (const auto& t : terms_) lo = std::min(lo, t.lo);
        return lo;
    }
    double support_hi() const
    {
        double hi = 0.0;
        for (const auto& t : terms_) hi = std::max(hi, t.hi);
        return hi;
    }

    /// Taylor coefficients in h of psi(e^{v+h}), orders 0..order.
    std::vector<double> log_jet(double v, int order) const
    {
        std::vector<double> out(order + 1, 0.0);
        for (const auto& t : terms_) {
            const auto j = t.log_jet(v, order);
            for (int k = 0; k <= order; ++k) out[k] += t.coef * j[k];
        }
        return out;
    }

    TestFunction operator+(const TestFunction& other) const
    {
        TestFunction f = *this;
        f.terms_.insert(f.terms_.end(), other.terms_.begin(), other.terms_.end());
        return f;
    }
    TestFunction scaled(double k) const
    {
        TestFunction f = *this;
        for (auto& t : f.terms_) t.coef *= k;
        return f;
    }

    struct Term {
        double coef, lo, hi, a;

        double u(double x) const { return (2.0 * x - (lo + hi)) / (hi - lo); }
        double value(double x) const
        {
            const double uu = u(x);
            if (std::abs(uu) >= 1.0) return 0.0;
            return std::exp(a - a / (1.0 - uu * uu));
        }
        std::vector<double> log_jet(double v, int order) const;
    };
    const std::vector<Term>& terms() const { return terms_; }

private:
    std::vector<Term> terms_;
};

namespace detail {

using Jet = std::vector<double>;

inline Jet jet_mul(const Jet& a, const Jet& b)
{
    Jet out(a.size(), 0.0);
    for (std::size_t k = 0; k < a.size(); ++k)
        for (std::size_t i = 0; i <= k; ++i) out[k] += a[i] * b[k - i];
    return out;
}

inline Jet jet_div(const Jet& a, const Jet& b)
{
    Jet out(a.size(), 0.0);
    for (std::size_t k = 0; k < a.size(); ++k) {
        double acc = a[k];
        for (std::size_t i = 1; i <= k; ++i) acc -= b[i] * out[k - i];
        out[k] = acc / b[0];
    }
    return out;
}

inline Jet jet_exp(const Jet& a)
{
    Jet out(a.size(), 0.0);
    out[0] = std::exp(a[0]);
    for (std::size_t k = 1; k < a.size(); ++k) {
        double acc = 0.0;
        for (std::size_t i = 1; i <= k; ++i) acc += static_cast<double>(i) * a[i] * out[k - i];
        out[k] = acc / static_cast<double>(k);
    }
    return out;
}

}  // namespace detail

inline std::vector<double> TestFunction::Term::log_jet(double v, int order) const
{
    const std::size_t n = static_cast<std::size_t>(order) + 1;
    const double ev = std::exp(v);
    if (std::abs(u(ev)) >= 1.0) return std::vector<double>(n, 0.0);
    detail::Jet x(n);
    double fact = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        if (k > 0) fact *= static_cast<double>(k);
        x[k] = ev / fact;
    }
    detail::Jet uj(n);
    for (std::size_t k = 0; k < n; ++k) uj[k] = 2.0 * x[k] / (hi - lo);
    uj[0] -= (lo + hi) / (hi - lo);
    detail::Jet w = detail::jet_mul(uj, uj);
    for (auto& c : w) c = -c;
    w[0] += 1.0;
    detail::Jet num(n, 0.0);
    num[0] = a;
    detail::Jet r = detail::jet_div(num, w);
    for (auto& c : r) c = -c;
    r[0] += a;
    return detail::jet_exp(r);
}

/// Mellin transform int_0^inf psi(x) x^{s-1} dx, absolute accuracy 1e-12.
inline cplx mellin(const TestFunction& psi, cplx s)
{
    CompensatedSum<cplx> acc;
    for (const auto& t : psi.terms()) {
        const double a = std::log(t.lo), b = std::log(t.hi);
        auto f = [&](double v) { return t.value(std::exp(v)) * std::exp(s * v); };
        const int panels = 4 + static_cast<int>(std::ceil(std::abs(s.imag()) * (b - a) / 4.0));
        const auto r = integrate_adaptive(f, a, b, 1e-13, panels);
        acc += t.coef * r.value;
    }
    return acc.value();
}

/// Same transform on a fixed rule fine enough for |Im s| up to the caller's range;
/// used where many values are needed at once.
inline cplx mellin_fixed(const TestFunction& psi, cplx s)
{
    CompensatedSum<cplx> acc;
    for (const auto& t : psi.terms()) {
        const double a = std::log(t.lo), b = std::log(t.hi);
        const int panels = 16 + static_cast<int>(std::ceil(std::abs(s.imag()) * (b - a) / 4.0));
        const auto rule = composite_rule(a, b, panels, 20);
        CompensatedSum<cplx> part;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const double v = rule.nodes[i];
            part += rule.weights[i] * t.value(std::exp(v)) * std::exp(s * v);
        }
        acc += t.coef * part.value();
    }
    return acc.value();
}

/// M_k = int |d^k/dv^k psi(e^v)| e^{sigma v} dv for k = 0..order, so that
/// |mellin(psi, sigma + it)| <= M_k / |sigma + it|^k for every k.
inline std::vector<double> mellin_ibp_bounds(const TestFunction& psi, double sigma, int order)
{
    std::vector<double> out(order + 1, 0.0);
    const double a = std::log(psi.support_lo()), b = std::log(psi.support_hi());
    const auto rule = composite_rule(a, b, 256, 20);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double v = rule.nodes[i];
        const auto jet = psi.log_jet(v, order);
        const double w = rule.weights[i] * std::exp(sigma * v);
        double fact = 1.0;
        for (int k = 0; k <= order; ++k) {
            if (k > 0) fact *= k;
            out[k] += w * std::abs(jet[k]) * fact;
        }
    }
    for (auto& m : out) m *= 1.01;  // margin for quadrature of |.| across sign changes
    return out;
}

namespace detail {

// 1/Gamma(z) in log form; zero (log = -inf) at the poles of Gamma.
inline cplx log_rgamma(cplx z)
{
    if (is_nonpositive_integer(z)) return {-std::numeric_limits<double>::infinity(), 0.0};
    return -log_gamma(z);
}

inline cplx exp_or_zero(cplx l) { return std::isinf(l.real()) && l.real() < 0 ? cplx{0.0, 0.0} : std::exp(l); }

}  // namespace detail

/// G_+/-(s) with 2 pi G_+/- = G0 +- G1, where
///   G0 = Gamma((1+s+iT)/2) Gamma((1+s-iT)/2) / [Gamma((-s+iT)/2) Gamma((-s-iT)/2)],
///   G1 = Gamma((2+s+iT)/2) Gamma((2+s-iT)/2) / [Gamma((1-s+iT)/2) Gamma((1-s-iT)/2)].
inline cplx g_pm(cplx s, double T_f, int sign)
{
    const cplx iT{0.0, T_f};
    const cplx l0 = log_gamma((1.0 + s + iT) / 2.0) + log_gamma((1.0 + s - iT) / 2.0) +
                    detail::log_rgamma((-s + iT) / 2.0) + detail::log_rgamma((-s - iT) / 2.0);
    const cplx l1 = log_gamma((2.0 + s + iT) / 2.0) + log_gamma((2.0 + s - iT) / 2.0) +
                    detail::log_rgamma((1.0 - s + iT) / 2.0) + detail::log_rgamma((1.0 - s - iT) / 2.0);
    const cplx g0 = detail::exp_or_zero(l0), g1 = detail::exp_or_zero(l1);
    return (sign > 0 ? g0 + g1 : g0 - g1) / two_pi;
}

/// Upper bound for |G_+/-(sigma + iH)|, valid for sigma > -1.
inline double g_pm_abs_upper(double sigma, double H, double T_f)
{
    const double l0 = log_abs_gamma_upper({(1.0 + sigma) / 2.0, (H + T_f) / 2.0}) +
                      log_abs_gamma_upper({(1.0 + sigma) / 2.0, (H - T_f) / 2.0}) +
                      log_abs_rgamma_upper({-sigma / 2.0, (T_f - H) / 2.0}) +
                      log_abs_rgamma_upper({-sigma / 2.0, -(H + T_f) / 2.0});
    const double l1 = log_abs_gamma_upper({(2.0 + sigma) / 2.0, (H + T_f) / 2.0}) +
                      log_abs_gamma_upper({(2.0 + sigma) / 2.0, (H - T_f) / 2.0}) +
                      log_abs_rgamma_upper({(1.0 - sigma) / 2.0, (T_f - H) / 2.0}) +
                      log_abs_rgamma_upper({(1.0 - sigma) / 2.0, -(H + T_f) / 2.0});
    return (std::exp(l0) + std::exp(l1)) / two_pi;
}

/// B with |Psi_+/-(x)| <= B (pi^2 x)^{-C} for all x > 0: the contour moved to
/// Re s = C, with |G| and |mellin(psi, -s)| replaced by their upper bounds.
inline double psi_decay_constant(const TestFunction& psi, double T_f, double C)
{
    if (!(C > -1.0)) throw InvalidArgument("decay exponent must exceed -1");
    constexpr int kmax = 40;
    const auto M = mellin_ibp_bounds(psi, -C, kmax);
    auto bound = [&](double t) {
        const double r = std::hypot(C, t);
        double m = M[0];
        double rk = 1.0;
        for (int k = 1; k <= kmax; ++k) {
            rk *= r;
            m = std::min(m, M[k] / rk);
        }
        return g_pm_abs_upper(C, t, T_f) * m;
    };
    // The bound is smooth in t; integrate it on a fine rule out to where it is negligible.
    const double t_end = 20000.0;
    const auto rule = composite_rule(0.0, t_end, 10000, 10);
    CompensatedSum<double> acc;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) acc += rule.weights[i] * bound(rule.nodes[i]);
    // Beyond t_end: M_kmax / t^kmax against growth t^{2C+1.5}.
    const double growth = 2.0 * C + 1.5;
    const double tail = g_pm_abs_upper(C, t_end, T_f) * M[kmax] * std::pow(t_end, 1.0 - kmax) / (kmax - growth - 1.0);
    return 1.05 * (acc.value() + tail) / pi;
}

/// Precomputed G_+/-(s) mellin(psi, -s) on the line Re s = sigma, so Psi_+/-
/// can be evaluated at many x cheaply. Levels of the rule are built on demand.
class PsiKernel {
public:
    PsiKernel(TestFunction psi, double T_f, int sign, const WeightSpec& spec = WeightSpec::psi(1, 0.0))
        : psi_(std::move(psi)), T_(T_f), sign_(sign > 0 ? 1 : -1), sigma_(spec.c), tol_(spec.tol), order_(spec.order)
    {
        if (!(sigma_ > -1.0)) throw InvalidArgument("Psi contour needs sigma > -1");
        bounds_ = mellin_ibp_bounds(psi_, -sigma_, ibp_order);
        H_ = spec.H > 0.0 ? spec.H : choose_height();
        if (tail(H_, worst_log_scale()) >= tol_ / 10.0)
            throw QuadratureFailure("Psi truncation height does not certify the tail");
        levels_.resize(max_levels);
    }

    double sigma() const noexcept { return sigma_; }
    double height() const noexcept { return H_; }
    double T_f() const noexcept { return T_; }
    int sign() const noexcept { return sign_; }
    const TestFunction& test_function() const noexcept { return psi_; }

    /// Certified bound on the discarded tails at x; grows like x^{-sigma}.
    double tail_bound(double x) const { return tail(H_, std::log(pi * pi * x)); }

    ContourValue evaluate(double x) const
    {
        if (!(x > 0.0)) throw InvalidArgument("Psi argument must be positive");
        const double lx = std::log(pi * pi * x);
        ContourValue out;
        out.H = H_;
        out.tail_bound = tail_bound(x);
        if (out.tail_bound >= tol_ / 10.0)
            throw QuadratureFailure("Psi tail bound exceeds tolerance at this x");
        double prev = sum_level(0, lx);
        for (int L = 1; L < max_levels; ++L) {
            const double cur = sum_level(L, lx);
            out.quad_error = std::abs(cur - prev);
            prev = cur;
            if (out.quad_error <= tol_ / 2.0) {
                out.value = cur;
                return out;
            }
        }
        throw QuadratureFailure("Psi quadrature did not settle at x = " + std::to_string(x));
    }

    double operator()(double x) const { return evaluate(x).value; }

    static constexpr int ibp_order = 40;
    static constexpr int max_levels = 6;
    // Off the line sigma = 0 the tail scales like x^{-sigma}; the height is certified on this range.
    static constexpr double certified_x_lo = 1e-4;
    static constexpr double certified_x_hi = 1e6;

private:
    struct Level {
        int panels = 0;
        double width = 0.0;
        std::vector<cplx> weighted;  // quadrature weight times G mellin, panel-major
    };

    double tail(double H, double log_scale) const
    {
        // |G(sigma+it)| is taken to grow no faster than t^{2 sigma + 1.5} past H.
        const double growth = 2.0 * sigma_ + 1.5;
        const double g = g_pm_abs_upper(sigma_, H, T_);
        double best = std::numeric_limits<double>::infinity();
        for (int k = 0; k <= ibp_order; ++k) {
            if (k <= growth + 1.0) continue;
            const double one_side = g * bounds_[k] * std::pow(H, 1.0 - k) / (k - growth - 1.0);
            best = std::min(best, one_side);
        }
        return 2.0 * best * std::exp(-sigma_ * log_scale) / two_pi;
    }

    double worst_log_scale() const
    {
        if (sigma_ > 0.0) return std::log(pi * pi * certified_x_lo);
        if (sigma_ < 0.0) return std::log(pi * pi * certified_x_hi);
        return 0.0;
    }

    double choose_height() const
    {
        for (double H = std::abs(T_) + 10.0; H <= detail::max_height; H *= 1.1)
            if (tail(H, worst_log_scale()) < tol_ / 10.0) return std::ceil(H);
        throw QuadratureFailure("no Psi truncation height certifies the tail");
    }

    const Level& level(int L) const
    {
        std::lock_guard lock(mu_);
        auto& slot = levels_[L];
        if (!slot) {
            auto lv = std::make_shared<Level>();
            lv->panels = static_cast<int>(std::ceil(H_)) << L;
            lv->width = H_ / lv->panels;
            const auto rule = composite_rule(0.0, H_, lv->panels, order_);
            lv->weighted.resize(rule.nodes.size());
            for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
                const cplx s{sigma_, rule.nodes[i]};
                lv->weighted[i] = rule.weights[i] * g_pm(s, T_, sign_) * mellin_fixed(psi_, -s);
            }
            slot = std::move(lv);
        }
        return *slot;
    }

    // (1/2pi) int_{-H}^{H} = (1/pi) Re int_0^H by conjugate symmetry. The phase
    // e^{-i t lx} factors into a per-panel rotation times fixed in-panel phases.
    double sum_level(int L, double lx) const
    {
        const auto& lv = level(L);
        const auto& gl = gauss_legendre(order_);
        std::vector<cplx> local(order_);
        for (int j = 0; j < order_; ++j) local[j] = std::polar(1.0, -0.5 * lv.width * gl.nodes[j] * lx);
        const cplx step = std::polar(1.0, -lv.width * lx);
        const double amp = std::exp(-sigma_ * lx);
        CompensatedSum<double> acc;
        cplx rot;
        for (int p = 0; p < lv.panels; ++p) {
            // Resynchronize the recurrence every 32 panels to keep rounding drift negligible.
            if (p % 32 == 0) rot = std::polar(amp, -(p + 0.5) * lv.width * lx);
            double panel = 0.0;
            const cplx* w = lv.weighted.data() + static_cast<std::size_t>(p) * order_;
            for (int j = 0; j < order_; ++j) panel += (rot * local[j] * w[j]).real();
            acc += panel;
            rot *= step;
        }
        return acc.value() / pi;
    }

    TestFunction psi_;
    double T_;
    int sign_;
    double sigma_, tol_;
    int order_;
    double H_ = 0.0;
    std::vector<double> bounds_;
    mutable std::mutex mu_;
    mutable std::vector<std::shared_ptr<const Level>> levels_;
};

/// Psi_+/-(x) = (1/2 pi i) int_(sigma) (pi^2 x)^{-s} G_+/-(s) mellin(psi, -s) ds.
/// Real for real psi and T_f; returned as a complex number with zero imaginary part.
inline cplx psi_pm(double x, const TestFunction& psi, double T_f, int sign, const WeightSpec& spec)
{
    const int want = spec.kind == WeightKind::PsiPlus ? 1 : -1;
    if ((spec.kind != WeightKind::PsiPlus && spec.kind != WeightKind::PsiMinus) || want != (sign > 0 ? 1 : -1))
        throw InvalidArgument("weight spec kind does not match the requested sign");
    const PsiKernel k(psi, T_f, sign, spec);
    return {k(x), 0.0};
}

}  // namespace lmoment
