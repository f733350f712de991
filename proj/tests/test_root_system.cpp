#include "bwalk/root_system.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace bwalk;

namespace {

long binomial(int n, int k)
{
    long b = 1;
    for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
    return b;
}

long ipow(long b, int e)
{
    long out = 1;
    while (e-- > 0) out *= b;
    return out;
}

} // namespace

TEST(RootSystem, RejectsBadParameters)
{
    EXPECT_THROW(RankParams(0, 2), std::invalid_argument);
    EXPECT_THROW(RankParams(2, 1), std::invalid_argument);
    EXPECT_NO_THROW(RankParams(3, 5));
}

TEST(RootSystem, PositiveRootCount)
{
    for (int r = 1; r <= 5; ++r) EXPECT_EQ(positive_root_list(r).size(), static_cast<std::size_t>(r * (r + 1) / 2));
}

TEST(RootSystem, WeylGroupOrder)
{
    long fact = 1;
    for (int r = 1; r <= 4; ++r) {
        fact *= r + 1;
        EXPECT_EQ(static_cast<long>(weyl_group(r).size()), fact);
    }
}

TEST(RootSystem, FundamentalOrbitsAreBinomial)
{
    for (int r = 1; r <= 4; ++r)
        for (int k = 1; k <= r; ++k) {
            const auto orbit = weyl_orbit(r, k);
            EXPECT_EQ(static_cast<long>(orbit.size()), binomial(r + 1, k));
            const std::set<Weight> distinct(orbit.begin(), orbit.end());
            EXPECT_EQ(distinct.size(), orbit.size());
            for (const auto& mu : orbit) EXPECT_EQ(dominant_representative(mu), Weight::fundamental(r, k));
        }
}

TEST(RootSystem, SimpleRootsInFundamentalCoordinates)
{
    // alpha_i = 2 lambda_i - lambda_{i-1} - lambda_{i+1}
    EXPECT_EQ(simple_root_weight(1, 0), Weight({2}));
    EXPECT_EQ(simple_root_weight(2, 0), Weight({2, -1}));
    EXPECT_EQ(simple_root_weight(3, 1), Weight({-1, 2, -1}));
}

TEST(RootSystem, TranslationExponent)
{
    EXPECT_EQ(translation_exponent(Weight({1})), 1);
    EXPECT_EQ(translation_exponent(Weight({3, 2})), 10);
    EXPECT_EQ(translation_exponent(Weight({1, 1, 1})), 10);
    EXPECT_EQ(translation_exponent(rho_P(4)), 20);
}

TEST(RootSystem, PiOfRhoIsSuperfactorial)
{
    // prod_{alpha > 0} <alpha, rho> = prod_{k=1}^{r} k!
    long expected = 1, fact = 1;
    for (int r = 1; r <= 4; ++r) {
        fact *= r;
        expected *= fact;
        EXPECT_EQ(pi(rho_P(r)), BigInt(expected));
    }
}

TEST(RootSystem, SphereSizesRankOne)
{
    for (long q : {2L, 3L, 5L}) {
        const RankParams p(1, q);
        EXPECT_EQ(N_lambda_value(Weight({0}), p), 1);
        for (int k = 1; k <= 8; ++k) EXPECT_EQ(N_lambda_value(Weight({k}), p), BigInt((q + 1) * ipow(q, k - 1)));
    }
}

TEST(RootSystem, SphereSizesRankTwo)
{
    for (long q : {2L, 3L}) {
        const RankParams p(2, q);
        const long c3 = q * q + q + 1;
        for (int a = 1; a <= 4; ++a) {
            EXPECT_EQ(N_lambda_value(Weight({a, 0}), p), BigInt(c3 * ipow(q, 2 * a - 2)));
            EXPECT_EQ(N_lambda_value(Weight({0, a}), p), BigInt(c3 * ipow(q, 2 * a - 2)));
            for (int b = 1; b <= 3; ++b)
                EXPECT_EQ(N_lambda_value(Weight({a, b}), p), BigInt((q + 1) * c3 * ipow(q, 2 * a + 2 * b - 3)));
        }
    }
}

TEST(RootSystem, SymbolicSphereSizeMatchesInteger)
{
    for (int r = 1; r <= 3; ++r) {
        const RankParams p(r, 3);
        for (const auto& w : dominant_weights(r, 4)) {
            const auto v = N_lambda(w, p).evaluate(p.q);
            EXPECT_EQ(v.rational_part(), Rational(N_lambda_value(w, p))) << w;
            EXPECT_EQ(v.sqrt_part(), 0) << w;
        }
    }
}

TEST(RootSystem, DominantWeightEnumeration)
{
    // number of nonnegative integer vectors of length r with sum <= L
    for (int r = 1; r <= 3; ++r)
        for (int L = 0; L <= 6; ++L) {
            const auto ws = dominant_weights(r, L);
            EXPECT_EQ(static_cast<long>(ws.size()), binomial(L + r, r));
            EXPECT_TRUE(std::is_sorted(ws.begin(), ws.end()));
        }
    EXPECT_TRUE(dominant_weights(2, -1).empty());
}

TEST(RootSystem, DominanceTests)
{
    EXPECT_TRUE(is_dominant(Weight({0, 3})));
    EXPECT_FALSE(is_dominant(Weight({-1, 3})));
    EXPECT_TRUE(is_strictly_dominant(Weight({1, 1})));
    EXPECT_FALSE(is_strictly_dominant(Weight({1, 0})));
    EXPECT_EQ(length(Weight({2, 0, 5})), 7);
}

TEST(RootSystem, AmbientRoundTrip)
{
    for (const auto& w : dominant_weights(3, 5)) EXPECT_EQ(from_ambient(ambient(w)), w);
}
