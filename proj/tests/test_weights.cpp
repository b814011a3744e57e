#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "lmoment/gamma.hpp"
#include "lmoment/hecke.hpp"
#include "lmoment/quadrature.hpp"
#include "lmoment/weight_table.hpp"
#include "lmoment/weights.hpp"

using namespace lmoment;

namespace {

const double T = first_even_T;

// Q(1/4, y) via gamma(1/4, y) = 4 int_0^{y^{1/4}} exp(-w^4) dw, which has a smooth integrand.
double upper_incomplete_quarter(double y)
{
    const auto r = integrate_adaptive([](double w) { return std::exp(-std::pow(w, 4)); }, 0.0, std::pow(y, 0.25), 1e-15);
    return 1.0 - 4.0 * r.value / std::tgamma(0.25);
}

// V2 at T_f = 0, coded from scratch: (pi x)^{-s} Gamma((2s+1)/4)^2 / Gamma(1/4)^2 / s on Re s = 1.
double v2_flat(double x)
{
    const double g = std::tgamma(0.25);
    auto f = [&](double t) {
        const cplx s{1.0, t};
        const cplx gs = complex_gamma((2.0 * s + 1.0) / 4.0);
        return (std::exp(-s * std::log(pi * x)) * gs * gs / (g * g) / s).real();
    };
    const auto r = integrate_adaptive(f, 0.0, 80.0, 1e-14, 64);
    return r.value / pi;
}

}  // namespace

TEST(ComplexGamma, ClassicalValues)
{
    EXPECT_NEAR(std::abs(complex_gamma({1.0, 0.0}) - cplx(1.0, 0.0)), 0.0, 1e-14);
    EXPECT_NEAR(complex_gamma({0.5, 0.0}).real(), std::sqrt(pi), 1e-13);
    EXPECT_NEAR(std::abs(complex_gamma({5.0, 0.0}) - cplx(24.0, 0.0)), 0.0, 1e-11);
    EXPECT_THROW(complex_gamma({0.0, 0.0}), PoleError);
    EXPECT_THROW(complex_gamma({-3.0, 0.0}), PoleError);
}

TEST(ComplexGamma, Reflection)
{
    for (double t : {0.3, 2.0, 17.0}) {
        const cplx z{0.25, t};
        const cplx lhs = complex_gamma(z) * complex_gamma(1.0 - z);
        const cplx rhs = pi / std::sin(pi * z);
        EXPECT_LE(std::abs(lhs / rhs - 1.0), 1e-12);
    }
}

TEST(V1, IncompleteGammaClosedForm)
{
    for (double x : {0.1, 0.5, 1.0, 2.0}) EXPECT_NEAR(v1(x), upper_incomplete_quarter(pi * x * x), 1e-10) << x;
}

TEST(V1, SmallArgumentApproachesOneLikeSqrtX)
{
    // 1 - V1(x) ~ 4 pi^{1/4} x^{1/2} / Gamma(1/4), so V1 is not within 1e-8 of 1 at x = 1e-8.
    const double x = 1e-8;
    const double v = v1(x);
    EXPECT_NEAR(v, upper_incomplete_quarter(pi * x * x), 1e-10);
    const double lead = 4.0 * std::pow(pi, 0.25) * std::sqrt(x) / std::tgamma(0.25);
    EXPECT_NEAR((1.0 - v) / lead, 1.0, 1e-3);
    for (double y : {1e-6, 1e-4, 1e-2}) EXPECT_LE(std::abs(1.0 - v1(y)), 2.0 * std::sqrt(y));
}

TEST(V1, NegligibleAtTen)
{
    EXPECT_LE(std::abs(v1(10.0)), 1e-8);
}

TEST(V1, MonotoneOnGrid)
{
    double prev = v1(0.01);
    for (int i = 1; i < 200; ++i) {
        const double x = 0.01 * std::pow(1000.0, i / 199.0);
        const double v = v1(x);
        EXPECT_LE(v, prev + 1e-10) << x;
        prev = v;
    }
}

TEST(V2, ContourIndependence)
{
    for (double x : {0.05, 0.3, 1.0, 3.0}) {
        const double a = v2(x, T, WeightSpec::v2(T, 0.7));
        const double b = v2(x, T, WeightSpec::v2(T, 1.5));
        EXPECT_NEAR(a, b, 1e-10) << x;
    }
}

TEST(V2, FlatSpectralParameterMatchesSeparateIntegrand)
{
    for (double x : {0.05, 0.3, 1.0, 2.5}) EXPECT_NEAR(v2(x, 0.0), v2_flat(x), 1e-10) << x;
}

TEST(V2, SmallArgumentApproachesOneLikeSqrtX)
{
    for (double x : {1e-8, 1e-6, 1e-4}) {
        const double v = v2(x, T);
        EXPECT_LE(std::abs(1.0 - v), 2.0 * std::sqrt(x)) << x;
        EXPECT_GT(std::abs(1.0 - v), 1e-8) << x;
    }
}

TEST(V2, RisesAboveOneBeforeDecaying)
{
    // The gamma ratio for T_f near 13.8 makes V2 overshoot 1 around x = 1.
    EXPECT_LT(v2(0.3, T), v2(1.0, T));
    EXPECT_GT(v2(1.0, T), 1.0);
    EXPECT_LE(std::abs(v2(10.0, T)), 1e-8);
}

TEST(V2, RealForRealSpectralParameter)
{
    const auto r = v2_certified(0.7, T, WeightSpec::v2(T));
    EXPECT_LE(r.imag_residual, 1e-10);
}

TEST(VRelative, AgreesWithDefaultLine)
{
    for (double x : {0.5, 2.0, 4.0}) {
        EXPECT_NEAR(v_relative(WeightKind::V1, x, 0.0).value, v1(x), 1e-11);
        EXPECT_NEAR(v_relative(WeightKind::V2, x, T).value, v2(x, T), 1e-11);
    }
}

TEST(WeightTable, MatchesDirectEvaluation)
{
    const auto t1 = WeightTable::shared(WeightKind::V1, 0.0);
    const auto t2 = WeightTable::shared(WeightKind::V2, T);
    EXPECT_LE(t1->interpolation_error(), 1e-11);
    EXPECT_LE(t2->interpolation_error(), 1e-11);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(std::log(1e-4), std::log(6.0));
    for (int i = 0; i < 30; ++i) {
        const double x = std::exp(u(rng));
        EXPECT_NEAR((*t1)(x), v1(x), 1e-10) << x;
        EXPECT_NEAR((*t2)(x), v2(x, T), 1e-10) << x;
    }
}

TEST(Mellin, AtOneIsTheIntegral)
{
    const auto psi = TestFunction::bump();
    const auto direct = integrate_adaptive([&](double x) { return psi(x); }, 1.0, 2.0, 1e-15, 8);
    EXPECT_NEAR(std::abs(mellin(psi, {1.0, 0.0}) - cplx(direct.value, 0.0)), 0.0, 1e-12);
}

TEST(Mellin, Linear)
{
    const auto a = TestFunction::bump();
    const auto b = TestFunction::bump(1.2, 1.7, 4.0).scaled(0.5);
    for (cplx s : {cplx(0.5, 3.0), cplx(-1.0, 20.0), cplx(2.0, -7.0)})
        EXPECT_LE(std::abs(mellin(a + b, s) - mellin(a, s) - mellin(b, s)), 1e-12);
}

TEST(Mellin, DecaysFasterThanEighthPower)
{
    const auto psi = TestFunction::bump();
    for (double sigma : {-1.0, 0.0, 1.0}) {
        const auto M = mellin_ibp_bounds(psi, sigma, 8);
        for (double t = 1.0; t <= 100.0; t += 3.0) {
            const cplx s{sigma, t};
            EXPECT_LE(std::abs(mellin(psi, s)) * std::pow(std::abs(s), 8), M[8]) << sigma << " " << t;
        }
    }
}

TEST(GPm, ConjugateSymmetry)
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> re(-0.9, 3.0), im(-60.0, 60.0);
    for (int i = 0; i < 50; ++i) {
        const cplx s{re(rng), im(rng)};
        for (int sign : {1, -1}) {
            const cplx a = g_pm(std::conj(s), T, sign), b = std::conj(g_pm(s, T, sign));
            // G_+ is a near-cancellation of two large terms, so compare against their size.
            const double scale = std::max(1.0, g_pm_abs_upper(s.real(), std::abs(s.imag()), T));
            EXPECT_LE(std::abs(a - b), 1e-13 * scale);
        }
    }
}

TEST(GPm, DuplicationClosedForm)
{
    // Reflection and duplication collapse both combinations onto Gamma(1+s+iT) Gamma(1+s-iT).
    for (cplx s : {cplx(0.0, 3.0), cplx(0.5, 12.0), cplx(1.0, 30.0), cplx(-0.5, 60.0), cplx(2.0, -8.0)}) {
        const cplx P = std::pow(2.0, -2.0 * s) * complex_gamma(1.0 + s + cplx(0.0, T)) *
                       complex_gamma(1.0 + s - cplx(0.0, T)) / (2.0 * pi * pi);
        const double scale = std::max(1.0, g_pm_abs_upper(s.real(), std::abs(s.imag()), T));
        EXPECT_LE(std::abs(g_pm(s, T, 1) - std::cosh(pi * T) * P), 1e-12 * scale);
        EXPECT_LE(std::abs(g_pm(s, T, -1) + std::cos(pi * s) * P), 1e-12 * scale);
    }
}

TEST(GPm, StirlingEnvelope)
{
    for (double sigma : {0.0, 1.0})
        for (double t = 5.0; t <= 100.0; t += 0.5)
            for (int sign : {1, -1}) {
                const double r = std::abs(g_pm({sigma, t}, T, sign)) / std::pow(1.0 + t, 2.0 * sigma + 1.0);
                EXPECT_LE(r, 1.0) << sigma << " " << t;
                EXPECT_LE(std::abs(g_pm({sigma, t}, T, sign)), g_pm_abs_upper(sigma, t, T) * (1.0 + 1e-12));
            }
}

TEST(GPm, ShiftedGammaRewrite)
{
    // Every factor rewritten with Gamma(z + 1) = z Gamma(z).
    auto rewritten = [&](cplx s, int sign) {
        const cplx iT{0.0, T};
        auto G = [](cplx z) { return complex_gamma(z); };
        const cplx p = (s - 1.0 + iT) / 2.0, m = (s - 1.0 - iT) / 2.0;
        const cplx dp = (-s + iT - 2.0) / 2.0, dm = (-s - iT - 2.0) / 2.0;
        const cplx g0 = p * G(p) * m * G(m) / (dp * G(dp) * dm * G(dm));
        const cplx p1 = (s + iT) / 2.0, m1 = (s - iT) / 2.0;
        const cplx d1p = (-1.0 - s + iT) / 2.0, d1m = (-1.0 - s - iT) / 2.0;
        const cplx g1 = p1 * G(p1) * m1 * G(m1) / (d1p * G(d1p) * d1m * G(d1m));
        return (sign > 0 ? g0 + g1 : g0 - g1) / two_pi;
    };
    for (cplx s : {cplx(0.3, 2.0), cplx(-0.5, 11.0), cplx(1.2, -25.0), cplx(0.0, 40.0)})
        for (int sign : {1, -1}) {
            const cplx a = g_pm(s, T, sign), b = rewritten(s, sign);
            EXPECT_LE(std::abs(a - b), 1e-10 * std::max(1.0, std::abs(a)));
        }
}

class PsiTest : public ::testing::Test {
protected:
    static void SetUpTestSuite()
    {
        plus = new PsiKernel(TestFunction::bump(), T, 1, WeightSpec::psi(1, T));
        minus = new PsiKernel(TestFunction::bump(), T, -1, WeightSpec::psi(-1, T));
    }
    static void TearDownTestSuite()
    {
        delete plus;
        delete minus;
    }
    static PsiKernel* plus;
    static PsiKernel* minus;
};
PsiKernel* PsiTest::plus = nullptr;
PsiKernel* PsiTest::minus = nullptr;

TEST_F(PsiTest, LargeArgumentDecay)
{
    // The certified bound |Psi(x)| <= B (pi^2 x)^{-3}.
    const double B = psi_decay_constant(TestFunction::bump(), T, 3.0);
    for (double x = 10.0; x <= 1000.0; x *= 1.26)
        for (const auto* k : {plus, minus}) {
            const auto v = k->evaluate(x);
            EXPECT_LE(std::abs(v.value), B * std::pow(pi * pi * x, -3.0) + v.tail_bound + v.quad_error) << x;
        }
    EXPECT_LE(std::abs((*plus)(100.0)), 1e-12);
    // x^3 |Psi_-(x)| peaks in the transition region and then falls off.
    EXPECT_LT(std::abs((*minus)(1000.0)) * 1e9, std::abs((*minus)(100.0)) * 1e6);
}

TEST_F(PsiTest, SmallArgumentLinearBound)
{
    for (double x = 1e-4; x <= 0.1; x *= 1.5)
        for (const auto* k : {plus, minus}) EXPECT_LE(std::abs((*k)(x)) / x, 1.0) << x;
}

TEST_F(PsiTest, LineIndependence)
{
    for (int sign : {1, -1}) {
        const PsiKernel shifted(TestFunction::bump(), T, sign, WeightSpec::psi(sign, T, 1.0));
        const auto* k = sign > 0 ? plus : minus;
        EXPECT_NEAR((*k)(1.0), shifted(1.0), 1e-9);
    }
}

TEST(PsiPm, RejectsMismatchedSpec)
{
    EXPECT_THROW(psi_pm(1.0, TestFunction::bump(), T, -1, WeightSpec::psi(1, T)), InvalidArgument);
    EXPECT_THROW(psi_pm(1.0, TestFunction::bump(), T, 1, WeightSpec::v1()), InvalidArgument);
}
