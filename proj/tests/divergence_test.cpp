#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "sdiv/divergence.hpp"
#include "sdiv/models.hpp"
#include "test_util.hpp"

using namespace sdiv;
using sdiv_test::random_density_pair;
using sdiv_test::random_generic_params;

namespace {

const IntegratorHandle kQuad = IntegratorHandle::adaptive_quadrature();
const double kSqrtPi = std::sqrt(std::numbers::pi);

DensityModel without_closed_mass(DensityModel d) {
    d.closed_mass = nullptr;
    return d;
}

}  // namespace

TEST(Mass, ExponentialClosedForm) {
    // integral of (2 e^{-2x})^2 = 4 / 4 = 1
    EXPECT_NEAR(mass(exponential_density(2.0), 1.0, kQuad), 1.0, 1e-12);
}

TEST(Mass, AlphaZeroIsTotalMass) {
    EXPECT_NEAR(mass(normal_density(1.3, 0.7), 0.0, kQuad), 1.0, 1e-10);
    EXPECT_NEAR(mass(without_closed_mass(exponential_density(0.4)), 0.0, kQuad), 1.0, 1e-10);
}

TEST(Mass, StandardNormalSquared) {
    // Closed form (2 pi)^{-alpha/2} (1+alpha)^{-1/2} at alpha = 1, and the
    // same value out of raw quadrature.
    const double expected = std::pow(kTwoPi, -0.5) / std::sqrt(2.0);
    EXPECT_NEAR(expected, 0.28209479, 1e-8);
    EXPECT_NEAR(mass(normal_density(0.0, 1.0), 1.0, kQuad), expected, 1e-12);
    EXPECT_NEAR(mass(without_closed_mass(normal_density(0.0, 1.0)), 1.0, kQuad), expected,
                1e-10);
}

TEST(SDivergence, IdentityOfIndiscernibles) {
    const DensityModel g = normal_density(0.0, 1.0);
    for (auto [alpha, lambda] :
         {std::pair{0.5, 0.0}, std::pair{0.0, -0.5}, std::pair{1.0, 2.0},
          std::pair{0.3, -1.0}}) {
        const auto params = derive_exponents(alpha, lambda);
        EXPECT_NEAR(s_divergence(params, g, g, kQuad), 0.0, 1e-10)
            << "alpha=" << alpha << " lambda=" << lambda;
    }
}

TEST(SDivergence, AlphaOneIsSquaredL2) {
    // With unit-variance normals, integral phi^2 = 1/(2 sqrt(pi)) and
    // integral phi(x) phi(x-1) dx = e^{-1/4}/(2 sqrt(pi)), so the squared L2
    // distance is (1 - e^{-1/4}) / sqrt(pi).
    const double expected = (1.0 - std::exp(-0.25)) / kSqrtPi;
    const DensityModel g = normal_density(0.0, 1.0);
    const DensityModel f = normal_density(1.0, 1.0);
    for (double lambda : {-2.0, -0.5, 0.0, 0.9}) {
        const auto params = derive_exponents(1.0, lambda);
        EXPECT_NEAR(s_divergence(params, g, f, kQuad), expected, 1e-9) << "lambda=" << lambda;
    }
}

TEST(SDivergence, KullbackLeiblerBranch) {
    const auto params = derive_exponents(0.0, 0.0);
    ASSERT_EQ(params.branch, Branch::b_limit);
    const DensityModel g = normal_density(0.0, 1.0);
    const DensityModel f = normal_density(1.0, 1.0);
    EXPECT_NEAR(s_divergence(params, g, f, kQuad), 0.5, 1e-9);
}

TEST(SDivergence, InfiniteWhenModelMissesSupport) {
    // Binomial with theta = 1 puts zero mass below x = n; the KL branch
    // against a full-support pmf diverges.
    const auto params = derive_exponents(0.0, 0.0);
    const DensityModel g = binomial_density(12, 0.5);
    const DensityModel f = binomial_density(12, 1.0);
    EXPECT_EQ(s_divergence(params, g, f, kQuad), std::numeric_limits<double>::infinity());
}

TEST(SDivergence, DomainMismatchRejected) {
    const auto params = derive_exponents(0.5, 0.0);
    EXPECT_THROW(
        s_divergence(params, normal_density(0.0, 1.0), exponential_density(1.0), kQuad),
        DomainMismatch);
}

TEST(SDivergenceScaled, FullWeightMatchesPlainDivergence) {
    const auto params = derive_exponents(0.4, -0.3);
    const DensityModel k = normal_density(0.5, 1.2);
    const DensityModel f = normal_density(0.0, 1.0);
    EXPECT_NEAR(s_divergence_scaled(params, 1.0, k, f, kQuad),
                s_divergence(params, k, f, kQuad), 1e-12);
}

TEST(SDivergenceScaled, ZeroWeightLeavesMassTerm) {
    const auto params = derive_exponents(0.5, 0.0);
    const DensityModel f = normal_density(0.0, 1.0);
    const DensityModel k = normal_density(3.0, 1.0);
    const double m_f = mass(f, 0.5, kQuad);
    EXPECT_NEAR(s_divergence_scaled(params, 0.0, k, f, kQuad), m_f / params.a_exp, 1e-12);
}

TEST(SDivergenceScaled, SelfPairMatchesProfile) {
    const auto params = derive_exponents(0.5, 0.0);
    const DensityModel g = normal_density(0.0, 1.0);
    const double m_g = mass(g, 0.5, kQuad);
    const double eps = 0.3;
    const double direct = s_divergence_scaled(params, eps, g, g, kQuad);
    // M_g (1/A - (1+a) eps^A/(AB) + eps^{1+a}/B), worked out by hand.
    const double a = params.a_exp;
    const double b = params.b_exp;
    const double by_hand =
        m_g * (1.0 / a - 1.5 * std::pow(eps, a) / (a * b) + std::pow(eps, 1.5) / b);
    EXPECT_NEAR(direct, by_hand, 1e-9);
    EXPECT_NEAR(direct, m_g * self_divergence_profile(params, eps), 1e-9);
}

TEST(Dpd, VanishesAtEqualDensities) {
    EXPECT_NEAR(dpd(0.7, exponential_density(1.5), exponential_density(1.5), kQuad), 0.0,
                1e-10);
}

TEST(Dpd, AlphaOneMatchesSquaredL2) {
    const double expected = (1.0 - std::exp(-0.25)) / kSqrtPi;
    EXPECT_NEAR(dpd(1.0, normal_density(0.0, 1.0), normal_density(1.0, 1.0), kQuad), expected,
                1e-9);
}

TEST(Dpd, ContinuousAtAlphaZero) {
    const DensityModel g = normal_density(0.0, 1.0);
    const DensityModel f = normal_density(1.0, 1.0);
    const double at_zero = dpd(0.0, g, f, kQuad);
    const double near_zero = dpd(1e-6, g, f, kQuad);
    EXPECT_NEAR(at_zero, 0.5, 1e-9);
    EXPECT_NEAR(near_zero, at_zero, 1e-4);
}

TEST(SelfDivergenceProfile, EndpointValues) {
    const auto params = derive_exponents(0.35, -0.4);
    EXPECT_NEAR(self_divergence_profile(params, 1.0), 0.0, 1e-12);
    EXPECT_NEAR(self_divergence_profile(params, 0.0), 1.0 / params.a_exp, 1e-15);
}

TEST(SelfDivergenceProfile, SquaredL2Case) {
    const auto params = derive_exponents(1.0, 0.0);  // A = B = 1
    EXPECT_NEAR(self_divergence_profile(params, 0.5), 0.25, 1e-15);
}

TEST(SelfDivergenceProfile, LimitBranchesRejected) {
    EXPECT_THROW(self_divergence_profile(derive_exponents(0.0, 0.0), 0.5), BranchUnsupported);
    EXPECT_THROW(self_divergence_profile(derive_exponents(0.0, -1.0), 0.5), BranchUnsupported);
}

// ---------------------------------------------------------------------------
// Property suites
// ---------------------------------------------------------------------------

TEST(SDivergenceProperties, NonnegativityAndIdentityOn200RandomPairs) {
    Xoshiro256 rng(2024);
    for (int i = 0; i < 200; ++i) {
        const auto params = random_generic_params(rng);
        auto [g, f] = random_density_pair(rng, i);
        EXPECT_GE(s_divergence(params, g, f, kQuad), -1e-10) << "instance " << i;
        EXPECT_NEAR(s_divergence(params, g, g, kQuad), 0.0, 1e-10) << "instance " << i;
    }
}

TEST(SDivergenceProperties, LambdaZeroSliceEqualsDpd) {
    Xoshiro256 rng(99);
    for (int i = 0; i < 40; ++i) {
        const double alpha = sdiv_test::uniform_in(rng, 0.05, 1.0);
        const auto params = derive_exponents(alpha, 0.0);
        auto [g, f] = random_density_pair(rng, i);
        EXPECT_NEAR(s_divergence(params, g, f, kQuad), dpd(alpha, g, f, kQuad), 1e-9)
            << "alpha=" << alpha;
    }
}

TEST(SDivergenceProperties, BranchContinuityAtAZero) {
    const double alpha = 0.3;
    const DensityModel g = normal_density(0.2, 1.1);
    const DensityModel f = normal_density(-0.4, 0.9);
    const double lambda_limit = -1.0 / (1.0 - alpha);
    const double lambda_near = (1e-6 - 1.0) / (1.0 - alpha);
    const auto near = derive_exponents(alpha, lambda_near);
    const auto limit = derive_exponents(alpha, lambda_limit);
    ASSERT_EQ(near.branch, Branch::generic);
    ASSERT_EQ(limit.branch, Branch::a_limit);
    EXPECT_NEAR(s_divergence(near, g, f, kQuad), s_divergence(limit, g, f, kQuad), 1e-4);
}

TEST(SDivergenceProperties, BranchContinuityAtBZero) {
    const double alpha = 0.3;
    const DensityModel g = exponential_density(1.0);
    const DensityModel f = exponential_density(1.7);
    const double lambda_limit = alpha / (1.0 - alpha);
    const double lambda_near = (alpha - 1e-6) / (1.0 - alpha);
    const auto near = derive_exponents(alpha, lambda_near);
    const auto limit = derive_exponents(alpha, lambda_limit);
    ASSERT_EQ(near.branch, Branch::generic);
    ASSERT_EQ(limit.branch, Branch::b_limit);
    EXPECT_NEAR(s_divergence(near, g, f, kQuad), s_divergence(limit, g, f, kQuad), 1e-4);
}

TEST(SDivergenceProperties, ScaledSelfDivergenceMatchesProfile) {
    Xoshiro256 rng(555);
    for (int i = 0; i < 60; ++i) {
        const auto params = random_generic_params(rng);
        auto [g, f] = random_density_pair(rng, i);
        (void)f;
        const double eps = rng.next_unit();
        const double m_g = mass(g, params.alpha, kQuad);
        EXPECT_NEAR(s_divergence_scaled(params, eps, g, g, kQuad),
                    m_g * self_divergence_profile(params, eps), 1e-8)
            << "instance " << i;
    }
}
