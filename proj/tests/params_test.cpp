#include <gtest/gtest.h>

#include <cmath>

#include "sdiv/params.hpp"
#include "sdiv/rng.hpp"

using namespace sdiv;

TEST(DivergenceParams, DpdSliceExponents) {
    const auto p = derive_exponents(0.5, 0.0);
    EXPECT_DOUBLE_EQ(p.a_exp, 1.0);
    EXPECT_DOUBLE_EQ(p.b_exp, 0.5);
    EXPECT_EQ(p.branch, Branch::generic);
}

TEST(DivergenceParams, HellingerExponents) {
    const auto p = derive_exponents(0.0, -0.5);
    EXPECT_DOUBLE_EQ(p.a_exp, 0.5);
    EXPECT_DOUBLE_EQ(p.b_exp, 0.5);
    EXPECT_EQ(p.branch, Branch::generic);
}

TEST(DivergenceParams, AlphaOneIsLambdaFree) {
    const auto p = derive_exponents(1.0, 7.0);
    EXPECT_DOUBLE_EQ(p.a_exp, 1.0);
    EXPECT_DOUBLE_EQ(p.b_exp, 1.0);
    EXPECT_EQ(p.branch, Branch::generic);
}

TEST(DivergenceParams, KullbackLeiblerHitsTheBLimit) {
    const auto p = derive_exponents(0.0, 0.0);
    EXPECT_DOUBLE_EQ(p.a_exp, 1.0);
    EXPECT_DOUBLE_EQ(p.b_exp, 0.0);
    EXPECT_EQ(p.branch, Branch::b_limit);
}

TEST(DivergenceParams, ALimitAtNegativeBoundary) {
    const auto p = derive_exponents(0.0, -1.0);
    EXPECT_EQ(p.branch, Branch::a_limit);
    EXPECT_NEAR(p.a_exp, 0.0, kBranchTol);
    EXPECT_DOUBLE_EQ(p.b_exp, 1.0);
}

TEST(DivergenceParams, RejectsNegativeExponents) {
    EXPECT_THROW(derive_exponents(0.0, 1.0), OutOfFamily);    // B = -1
    EXPECT_THROW(derive_exponents(0.0, -1.5), OutOfFamily);   // A = -0.5
    EXPECT_THROW(derive_exponents(-0.1, 0.0), OutOfFamily);
    EXPECT_THROW(derive_exponents(1.1, 0.0), OutOfFamily);
}

TEST(DivergenceParams, ExponentSumIdentity) {
    Xoshiro256 rng(7);
    for (int i = 0; i < 500; ++i) {
        const double alpha = rng.next_unit();
        const double lo = alpha < 1.0 ? -1.0 / (1.0 - alpha) : -50.0;
        const double hi = alpha < 1.0 ? alpha / (1.0 - alpha) : 50.0;
        const double lambda = lo + (hi - lo) * rng.next_unit();
        DivergenceParams p;
        try {
            p = derive_exponents(alpha, lambda);
        } catch (const OutOfFamily&) {
            continue;  // rounding can push an endpoint draw past the tolerance
        }
        const double ulp = std::ldexp(1.0, -50);
        EXPECT_NEAR(p.a_exp + p.b_exp, 1.0 + alpha, ulp * (1.0 + alpha));
        EXPECT_GE(p.a_exp, -kBranchTol);
        EXPECT_GE(p.b_exp, -kBranchTol);
    }
}
