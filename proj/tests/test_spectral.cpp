#include "bwalk/spectral.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace bwalk;

namespace {

QuadraticScalar rho_tilde_oracle(int r, long q)
{
    const auto sq = QuadraticScalar::sqrt_q(q);
    if (r == 1) return sq * make_rational(2, q + 1);
    if (r == 2) return QuadraticScalar(q, make_rational(3 * q, q * q + q + 1));
    const auto den = (QuadraticScalar(q, Rational(q * q + q + 1)) + sq * Rational(2 * (q + 1))) * Rational(1 + q * q);
    return den.inverse() * Rational(14 * q * q);
}

SpectralPoint random_point(int r, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> th(-3.0, 3.0), s(-0.6, 0.6);
    RVec theta(static_cast<std::size_t>(r + 1)), shift(static_cast<std::size_t>(r + 1));
    for (std::size_t j = 0; j <= static_cast<std::size_t>(r); ++j) {
        theta[j] = th(rng);
        shift[j] = s(rng);
    }
    return SpectralPoint::from_parts(theta, shift);
}

} // namespace

TEST(Spectral, RhoTildeClosedForms)
{
    for (int r = 1; r <= 3; ++r)
        for (long q : {2L, 3L, 4L, 5L}) EXPECT_EQ(rho_tilde(WalkSpec::simple(RankParams(r, q))), rho_tilde_oracle(r, q)) << r << " " << q;
}

TEST(Spectral, RhoTildeIsHAtZeroTimesRho)
{
    for (int r = 1; r <= 4; ++r) {
        const auto w = WalkSpec::simple(RankParams(r, 3));
        const Complex h0 = h_value(CVec(static_cast<std::size_t>(r + 1), Complex(0)), w);
        EXPECT_NEAR(static_cast<double>(h0.real() * rho(w).to_long_double()), rho_tilde(w).to_double(), 1e-15);
    }
}

TEST(Spectral, CFunctionProductAndFactorization)
{
    std::mt19937_64 rng(11);
    for (int r = 1; r <= 3; ++r) {
        const RankParams p(r, 3);
        for (int i = 0; i < 30; ++i) {
            const auto pt = random_point(r, rng);
            Complex c = 1;
            for (const auto& al : positive_root_list(r)) {
                const Complex a = pt.z[static_cast<std::size_t>(al.a)] - pt.z[static_cast<std::size_t>(al.b)];
                c *= (Real(1) - std::exp(-a) / Real(3)) / (Real(1) - std::exp(-a));
            }
            EXPECT_LT(std::abs(c_function(pt.z, p) / c - Real(1)), 1e-15L);
            const auto cbd = c_b_delta(pt, p);
            const Complex rhs = cbd.delta * cbd.b * std::exp(-weight_pairing(rho_P(r), pt.z));
            EXPECT_LT(std::abs(rhs * c - Real(1)), 1e-14L);
        }
    }
}

TEST(Spectral, FundamentalSphericalFunctionForms)
{
    std::mt19937_64 rng(5);
    for (int r = 1; r <= 3; ++r) {
        const RankParams p(r, 2);
        for (int i = 0; i < 10; ++i) {
            const auto pt = random_point(r, rng);
            for (int k = 1; k <= r; ++k) {
                const Complex a = macdonald_P(Weight::fundamental(r, k), pt, p);
                const Complex b = macdonald_P_fundamental(k, pt, p);
                EXPECT_LT(std::abs(a - b) / std::abs(b), 1e-13L);
            }
        }
    }
}

TEST(Spectral, F0AtOriginIsOne)
{
    for (int r = 1; r <= 3; ++r) EXPECT_EQ(F0(Weight::zero(r), RankParams(r, 2)), QuadraticScalar(2, Rational(1)));
}

TEST(Spectral, F0RankOneClosedForm)
{
    // tree spherical function at the bottom of the spectrum: q^{-k/2} (1 + k (q-1)/(q+1))
    for (long q : {2L, 3L, 7L}) {
        const RankParams p(1, q);
        for (int k = 0; k <= 30; ++k) {
            const QuadraticScalar expected = QuadraticScalar::half_power(q, -k) * (Rational(1) + make_rational(k * (q - 1), q + 1));
            EXPECT_EQ(F0(Weight({k}), p), expected) << q << " " << k;
        }
    }
}

TEST(Spectral, F0RankOneEigenRecursion)
{
    // neighbour average at distance k >= 1: (q F0(k+1) + F0(k-1)) / (q+1) = rho_tilde F0(k)
    const long q = 3;
    const RankParams p(1, q);
    const F0Evaluator f(p);
    const auto rt = rho_tilde(WalkSpec::simple(p));
    for (int k = 1; k <= 10; ++k) {
        const auto lhs = (f.exact(Weight({k + 1})) * Rational(q) + f.exact(Weight({k - 1}))) * make_rational(1, q + 1);
        EXPECT_EQ(lhs, rt * f.exact(Weight({k})));
    }
}

TEST(Spectral, F0ExactMatchesNumericLimit)
{
    for (int r = 2; r <= 3; ++r) {
        const RankParams p(r, 2);
        const F0Evaluator f(p);
        for (const auto& w : dominant_weights(r, 3)) {
            const long double ex = QuadraticScalar(2, f.reduced(w)).to_long_double();
            EXPECT_NEAR(static_cast<double>(F0_reduced_numeric(w, p) / ex), 1.0, 1e-12) << w;
        }
    }
}

TEST(Spectral, F0ReducedBracket)
{
    const RankParams p(2, 2);
    const F0Evaluator f(p);
    for (const auto& w : dominant_weights(2, 12)) {
        const Rational red = f.reduced(w);
        EXPECT_GT(red, 0);
        // bracket: 0 < q^{E/2} F0 / pi(lambda + rho) <= 1 on this range
        const Rational ratio = red / Rational(pi(w + rho_P(2)) / pi(rho_P(2)));
        EXPECT_LE(ratio, 1);
    }
}

TEST(Spectral, QuadratureMatchesExactRankOne)
{
    const auto w = WalkSpec::simple(RankParams(1, 2));
    for (int n = 0; n <= 12; ++n) {
        const auto t = kernel_table(w, n);
        for (const auto& [lambda, v] : t.entries) {
            const long double num = quadrature_pn(w, n, lambda).value, ex = v.to_long_double();
            if (ex == 0) EXPECT_LT(std::fabs(num), 1e-16L);
            else EXPECT_LT(std::fabs(num / ex - 1), 1e-11L) << n << " " << lambda;
        }
    }
}

TEST(Spectral, QuadratureMatchesExactRankTwo)
{
    const auto w = WalkSpec::simple(RankParams(2, 3));
    for (int n : {1, 3, 5}) {
        const auto t = kernel_table(w, n);
        for (const auto& [lambda, v] : t.entries) {
            const long double ex = v.to_long_double();
            const long double red = quadrature_pn(w, n, lambda).value;
            const long double unshifted = quadrature_pn(w, n, lambda, 0, QuadratureForm::reduced, false).value;
            if (ex == 0) {
                EXPECT_LT(std::fabs(red), 1e-16L);
                continue;
            }
            EXPECT_LT(std::fabs(red / ex - 1), 1e-11L) << n << " " << lambda;
            EXPECT_LT(std::fabs(unshifted / ex - 1), 1e-8L) << n << " " << lambda;
        }
    }
}

TEST(Spectral, PlancherelFormAgrees)
{
    const auto w = WalkSpec::simple(RankParams(2, 2));
    const auto t = kernel_table(w, 4);
    for (const auto& lambda : {Weight({0, 0}), Weight({1, 1}), Weight({2, 1})}) {
        const long double pl = quadrature_pn(w, 4, lambda, 0, QuadratureForm::plancherel).value;
        EXPECT_NEAR(static_cast<double>(pl / t.value(lambda).to_long_double()), 1.0, 1e-8) << lambda;
    }
}

TEST(Spectral, QuadratureArgumentChecks)
{
    const auto w = WalkSpec::simple(RankParams(2, 2));
    EXPECT_THROW(quadrature_pn(w, 4, Weight({0, 0}), 8), std::invalid_argument);
    EXPECT_THROW(quadrature_pn(w, 4, Weight({-1, 0})), std::invalid_argument);
    EXPECT_THROW(quadrature_pn(WalkSpec::simple(RankParams(3, 2)), 2, Weight({0, 0, 0})), std::invalid_argument);
    // the geometric tail of each root factor aliases at twice its index
    EXPECT_GE(quadrature_min_grid(RankParams(1, 2), 3, Weight({3})), 2 * 60);
}
