#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "common.hpp"

using namespace lmoment;
using testing_support::maass;

TEST(Hurwitz, RiemannZetaValues)
{
    EXPECT_NEAR(std::abs(hurwitz_zeta({2.0, 0.0}, 1.0) - cplx(pi * pi / 6.0, 0.0)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(hurwitz_zeta({0.5, 0.0}, 1.0) - cplx(-1.4603545088095868, 0.0)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(hurwitz_zeta({0.0, 0.0}, 0.25) - cplx(0.25, 0.0)), 0.0, 1e-12);
    EXPECT_THROW(hurwitz_zeta({1.0, 0.0}, 0.5), PoleError);
}

TEST(Hurwitz, ShiftIdentity)
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> sr(-1.0, 3.0), si(-20.0, 20.0), ar(0.01, 1.0);
    for (int i = 0; i < 100; ++i) {
        const cplx s{sr(rng), si(rng)};
        const double a = ar(rng);
        const cplx lhs = hurwitz_zeta(s, a) - hurwitz_zeta(s, a + 1.0);
        const cplx rhs = std::exp(-s * std::log(a));
        EXPECT_LE(std::abs(lhs - rhs), 1e-10 * std::max(1.0, std::abs(rhs))) << s << " " << a;
    }
}

TEST(Hurwitz, RemainderCertified)
{
    const auto h = hurwitz_zeta_certified({0.5, 14.0}, 0.3);
    EXPECT_LE(h.remainder_bound, 1e-12);
}

TEST(Oracle, ConjugationModEleven)
{
    const auto q = build_modulus(11);
    for (std::int64_t k = 1; k < 10; ++k) {
        const auto chi = q.character(k);
        const cplx a = dirichlet_central_oracle(chi.conj()).value;
        const cplx b = std::conj(dirichlet_central_oracle(chi).value);
        EXPECT_LE(std::abs(a - b), 1e-10);
    }
}

TEST(Oracle, QuadraticModFiveIsReal)
{
    const auto v = dirichlet_central_oracle(build_modulus(5).character(2));
    EXPECT_LE(std::abs(v.value.imag()), 1e-10);
    EXPECT_EQ(v.method, CentralMethod::hurwitz_oracle);
    EXPECT_FALSE(v.conjugated);
}

TEST(Oracle, RejectsPrincipal)
{
    EXPECT_THROW(dirichlet_central_oracle(build_modulus(7).character(0)), PrincipalCharacter);
}

TEST(DirichletAfe, MatchesConjugatedOracle)
{
    for (auto p : primes_between(5, 41)) {
        const auto q = build_modulus(p);
        for (auto k : q.even_primitive_indices()) {
            const auto chi = q.character(k);
            const auto afe = dirichlet_central_afe(chi);
            EXPECT_TRUE(afe.conjugated);
            EXPECT_LE(std::abs(afe.value - std::conj(dirichlet_central_oracle(chi).value)), 1e-8) << p << " " << k;
        }
    }
}

TEST(DirichletAfe, ConjugateCharacterGivesConjugateValue)
{
    const auto q = build_modulus(37);
    for (auto k : q.even_primitive_indices()) {
        const auto chi = q.character(k);
        EXPECT_LE(std::abs(dirichlet_central_afe(chi.conj()).value - std::conj(dirichlet_central_afe(chi).value)), 1e-8);
    }
}

TEST(DirichletAfe, CutoffRobustness)
{
    const auto q = build_modulus(101);
    for (auto k : {2, 10, 50}) {
        const auto chi = q.character(k);
        const auto a = dirichlet_central_afe(chi);
        const auto b = dirichlet_central_afe(chi, 2 * a.cutoff);
        EXPECT_LE(std::abs(a.value - b.value), 1e-9);
        EXPECT_LE(std::abs(a.value - b.value), a.err_estimate);
    }
}

TEST(DirichletAfe, BranchesRecombine)
{
    const auto chi = build_modulus(29).character(6);
    const auto v = dirichlet_central_afe(chi);
    EXPECT_TRUE(std::isfinite(std::abs(v.first_branch)) && std::isfinite(std::abs(v.second_branch)));
    EXPECT_LE(std::abs(v.first_branch + v.second_branch - v.value), 1e-14);
}

TEST(DirichletAfe, Preconditions)
{
    const auto q = build_modulus(13);
    EXPECT_THROW(dirichlet_central_afe(q.character(0)), PrincipalCharacter);
    EXPECT_THROW(dirichlet_central_afe(q.character(3)), OddCharacter);
}

TEST(TwistAfe, ConjugateCharacter)
{
    const auto q = build_modulus(101);
    for (auto k : {2, 24, 68}) {
        const auto chi = q.character(k);
        const cplx a = twist_central_afe(maass(), chi.conj()).value;
        const cplx b = std::conj(twist_central_afe(maass(), chi).value);
        EXPECT_LE(std::abs(a - b), 1e-8);
    }
}

TEST(TwistAfe, CutoffRobustness)
{
    const auto chi = build_modulus(101).character(30);
    const auto a = twist_central_afe(maass(), chi);
    const auto b = twist_central_afe(maass(), chi, 2 * a.cutoff);
    EXPECT_LE(std::abs(a.value - b.value), 1e-8);
}

TEST(TwistAfe, FunctionalEquationSelfConsistency)
{
    // L(f x chi) = (tau(chi)^2 / q) L(f x conj chi) once the two sums trade places.
    const auto q = build_modulus(101);
    for (auto k : {4, 40, 96}) {
        const auto chi = q.character(k);
        const cplx tau = gauss_sum(chi);
        const cplx eps = tau * tau / 101.0;
        EXPECT_NEAR(std::abs(eps), 1.0, 1e-10);
        const cplx direct = twist_central_afe(maass(), chi).value;
        const cplx swapped = eps * twist_central_afe(maass(), chi.conj()).value;
        EXPECT_LE(std::abs(direct - swapped), 1e-8);
    }
}

TEST(TwistAfe, ErrorEstimateBoundsRefinement)
{
    std::mt19937_64 rng(17);
    const auto ps = primes_between(11, 150);
    for (int i = 0; i < 20; ++i) {
        const auto p = ps[rng() % ps.size()];
        const auto q = build_modulus(p);
        const auto ks = q.even_primitive_indices();
        const auto chi = q.character(ks[rng() % ks.size()]);
        if (i % 2 == 0) {
            const auto a = twist_central_afe(maass(), chi);
            EXPECT_LE(std::abs(twist_central_afe(maass(), chi, 2 * a.cutoff).value - a.value), a.err_estimate);
        } else {
            const auto a = dirichlet_central_afe(chi);
            EXPECT_LE(std::abs(dirichlet_central_afe(chi, 2 * a.cutoff).value - a.value), a.err_estimate);
        }
    }
}

TEST(TwistAfe, InsufficientData)
{
    const auto f = HeckeSystem::mock(1, 500);
    EXPECT_THROW(twist_central_afe(f, build_modulus(101).character(2)), InsufficientData);
}

TEST(Cutoffs, NondecreasingInQ)
{
    std::int64_t prev_n = 0, prev_m = 0;
    for (auto p : primes_between(5, 2000)) {
        EXPECT_GE(twist_cutoff(p), prev_n);
        EXPECT_GE(dirichlet_cutoff(p), prev_m);
        prev_n = twist_cutoff(p);
        prev_m = dirichlet_cutoff(p);
    }
}
