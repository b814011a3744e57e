#include <gtest/gtest.h>

#include <cmath>

#include "common.hpp"

using namespace lmoment;
using testing_support::maass;

namespace {

// The real data with every prime coefficient rounded to `step`.
HeckeSystem rounded(double step)
{
    const auto& f = maass();
    std::vector<std::pair<std::int64_t, double>> primes;
    for (auto p : f.primes()) primes.emplace_back(p, std::round(f.prime_coefficient(p) / step) * step);
    return HeckeSystem::from_primes(f.T_f(), primes, f.pmax(), step, "rounded");
}

}  // namespace

TEST(VoronoiLhs, ZeroTestFunction)
{
    const auto zero = TestFunction::bump().scaled(0.0);
    EXPECT_EQ(voronoi_lhs(maass(), 1, build_modulus(7), 50, zero), cplx(0.0, 0.0));
}

TEST(VoronoiLhs, OrderIndependent)
{
    const auto q = build_modulus(7);
    const auto psi = TestFunction::bump();
    const auto& f = maass();
    // d = 1, so dbar = 1.
    cplx reversed{0.0, 0.0};
    for (std::int64_t n = 100; n >= 50; --n) reversed += f.coefficient(n) * psi(n / 50.0) * unit_exp((n % 7) / 7.0);
    EXPECT_LE(std::abs(voronoi_lhs(f, 1, q, 50, psi) - reversed), 1e-12);
}

TEST(VoronoiLhs, DependsOnDModQ)
{
    const auto q = build_modulus(11);
    const auto psi = TestFunction::bump();
    EXPECT_EQ(voronoi_lhs(maass(), 3, q, 100, psi), voronoi_lhs(maass(), 14, q, 100, psi));
    EXPECT_THROW(voronoi_lhs(maass(), 22, q, 100, psi), NotCoprime);
}

TEST(VoronoiRhs, TruncationDoubling)
{
    const auto q = build_modulus(7);
    const auto psi = TestFunction::bump();
    const auto a = voronoi_rhs_certified(maass(), 1, q, 50, psi);
    const auto b = voronoi_rhs_certified(maass(), 1, q, 50, psi, 1e-9, 2 * a.truncation);
    EXPECT_LE(std::abs(a.value - b.value), 1e-8 * (1.0 + std::abs(a.value)));
    EXPECT_LE(a.tail_bound, 1e-9);
    EXPECT_LT(b.tail_bound, a.tail_bound);
}

TEST(VoronoiRhs, NegatedDConjugates)
{
    // Lambda and Psi are real, so d -> -d conjugates every phase on both sides.
    const auto q = build_modulus(7);
    const auto psi = TestFunction::bump();
    const cplx plus = voronoi_rhs(maass(), 2, q, 50, psi), minus = voronoi_rhs(maass(), -2, q, 50, psi);
    EXPECT_LE(std::abs(minus - std::conj(plus)), 1e-10);
    EXPECT_LE(std::abs(voronoi_lhs(maass(), -2, q, 50, psi) - std::conj(voronoi_lhs(maass(), 2, q, 50, psi))), 1e-12);
}

TEST(VoronoiCheck, RealDataSatisfiesIdentity)
{
    const auto c = voronoi_check(maass(), 1, build_modulus(7), 50);
    EXPECT_LE(c.residual, 1e-3);
    EXPECT_FALSE(c.negative_control);
    EXPECT_LE(c.tail_bound, 1e-9 * (1.0 + std::abs(c.lhs)));
    // Crude first-order propagation of the data precision through both sides.
    const double data = maass().precision() * (c.N + 7.0 * static_cast<double>(c.rhs_truncation));
    EXPECT_LE(c.residual, c.tail_bound + c.kernel_error + data + 1e-6);
}

TEST(VoronoiCheck, MockIsANegativeControl)
{
    const auto q = build_modulus(7);
    const auto real = voronoi_check(maass(), 1, q, 50);
    const auto mock = voronoi_check(HeckeSystem::mock(1), 1, q, 50);
    EXPECT_TRUE(mock.negative_control);
    EXPECT_GT(mock.residual, 0.05);
    EXPECT_GE(mock.residual, 10.0 * real.residual);
}

TEST(VoronoiCheck, ResidualTracksDataPrecision)
{
    const auto q = build_modulus(7);
    const auto coarse = voronoi_check(rounded(1e-4), 1, q, 50);
    const auto fine = voronoi_check(rounded(1e-8), 1, q, 50);
    EXPECT_LT(fine.residual, coarse.residual);
    EXPECT_LE(fine.residual, 1e-3);
}

TEST(VoronoiCheck, RejectsNonCoprimeD)
{
    EXPECT_THROW(voronoi_check(maass(), 7, build_modulus(7), 50), NotCoprime);
    EXPECT_THROW(voronoi_check(maass(), 1, build_modulus(7), 0), InvalidArgument);
}
