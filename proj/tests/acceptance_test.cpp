// Acceptance suite: one test per shipping criterion, each printing a
// [CRITERION n] PASS/FAIL line.  Tolerances are pinned in code; the suite is
// fully seeded and deterministic.

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "sdiv/breakdown.hpp"
#include "sdiv/commands.hpp"
#include "sdiv/divergence.hpp"
#include "sdiv/estimate.hpp"
#include "sdiv/models.hpp"
#include "test_util.hpp"

using namespace sdiv;
using sdiv_test::uniform_in;

namespace {

const IntegratorHandle kQuad = IntegratorHandle::adaptive_quadrature();

struct CriterionReporter {
    int number;
    const char* what;
    ~CriterionReporter() {
        std::printf("[CRITERION %d] %s - %s\n", number,
                    ::testing::Test::HasFailure() ? "FAIL" : "PASS", what);
        std::fflush(stdout);
    }
};

/// Independent dense-grid argmin.
template <typename Fn>
double grid_argmin(const Fn& fn, double lo, double hi, double step) {
    double best_x = lo;
    double best_f = fn(lo);
    for (double x = lo + step; x <= hi + 0.5 * step; x += step) {
        const double xx = std::min(x, hi);
        const double v = fn(xx);
        if (v < best_f) {
            best_f = v;
            best_x = xx;
        }
    }
    return best_x;
}

std::vector<double> default_eps_grid() {
    std::vector<double> g;
    for (int i = 0; i <= 100; ++i) g.push_back(i * 0.005);
    return g;
}

}  // namespace

TEST(Acceptance, Criterion1BoundFormulasExact) {
    CriterionReporter rep{1, "bound formulas exact on the dpd slice and special points"};
    for (int i = 0; i <= 100; ++i) {
        const double alpha = i / 100.0;
        EXPECT_NEAR(breakdown_bound(derive_exponents(alpha, 0.0)).bound,
                    alpha / (1.0 + alpha), 1e-12)
            << "alpha=" << alpha;
    }
    EXPECT_NEAR(breakdown_bound(derive_exponents(0.0, -0.5)).bound, 0.25, 1e-12);
    EXPECT_NEAR(breakdown_bound(derive_exponents(1.0, 0.0)).bound, 0.5, 1e-12);
    EXPECT_NEAR(breakdown_bound(derive_exponents(1.0, -2.0)).bound, 0.5, 1e-12);
}

TEST(Acceptance, Criterion2PiecewiseScenarioBreakdowns) {
    CriterionReporter rep{2, "scale-family piecewise breakdown values"};
    for (double alpha : {0.1, 0.25, 0.5, 0.75, 1.0}) {
        const auto params = derive_exponents(alpha, 0.0);  // A = 1
        const double opa = 1.0 + alpha;
        EXPECT_NEAR(scenario_breakdown_point(LimitScenario::exponential(), params).bound,
                    alpha / (opa * opa), 1e-12);
        EXPECT_NEAR(scenario_breakdown_point(LimitScenario::normal_scale(0.0), params).bound,
                    alpha / std::pow(opa, 1.5), 1e-12);
        for (int p : {1, 2, 4, 8}) {
            EXPECT_NEAR(
                scenario_breakdown_point(LimitScenario::mv_scatter(p, 0.0), params).bound,
                alpha * std::pow(opa, -(1.0 + 0.5 * p)), 1e-12)
                << "p=" << p;
        }
    }
    EXPECT_NEAR(scenario_breakdown_point(LimitScenario::exponential(),
                                         derive_exponents(0.5, 0.0))
                    .bound,
                2.0 / 9.0, 1e-12);
    // Unit-shape gamma collapses onto the exponential values for all params.
    Xoshiro256 rng(20250601);
    for (int i = 0; i < 200; ++i) {
        const auto params = sdiv_test::random_generic_params(rng);
        EXPECT_NEAR(scenario_breakdown_point(LimitScenario::gamma(1.0), params).bound,
                    scenario_breakdown_point(LimitScenario::exponential(), params).bound,
                    1e-12);
    }
}

TEST(Acceptance, Criterion3DivergenceFloorPropertySuite) {
    CriterionReporter rep{3, "500 seeded divergence-floor instances, zero violations"};
    Xoshiro256 rng(20250501);
    int violations = 0;
    for (int i = 0; i < 500; ++i) {
        const auto params = sdiv_test::random_generic_params(rng);
        DensityModel g;
        DensityModel f;
        if (i % 2 == 0) {
            const double sg = uniform_in(rng, 0.8, 2.5);
            g = normal_density(uniform_in(rng, -3.0, 3.0), sg);
            f = normal_density(uniform_in(rng, -3.0, 3.0), sg * uniform_in(rng, 0.4, 1.0));
        } else {
            const double rg = uniform_in(rng, 0.3, 2.0);
            g = exponential_density(rg);
            f = exponential_density(rg * uniform_in(rng, 1.0, 4.0));
        }
        const double eps = 0.999 * divergence_floor_eps_cap(params) * rng.next_unit();
        const auto res = check_divergence_floor(params, eps, g, f, kQuad);
        if (!(res.lhs >= res.rhs - 1e-9)) {
            ++violations;
            ADD_FAILURE() << "instance " << i << " lhs=" << res.lhs << " rhs=" << res.rhs;
        }
    }
    EXPECT_EQ(violations, 0);
}

TEST(Acceptance, Criterion4DivergenceAxioms) {
    CriterionReporter rep{4, "nonnegativity, identity, dpd slice, alpha=1 slice, limits"};
    Xoshiro256 rng(20250502);
    for (int i = 0; i < 200; ++i) {
        const auto params = sdiv_test::random_generic_params(rng);
        auto [g, f] = sdiv_test::random_density_pair(rng, i);
        EXPECT_GE(s_divergence(params, g, f, kQuad), -1e-10) << "instance " << i;
        EXPECT_NEAR(s_divergence(params, g, g, kQuad), 0.0, 1e-10) << "instance " << i;
    }
    for (int i = 0; i < 40; ++i) {
        const double alpha = uniform_in(rng, 0.05, 1.0);
        auto [g, f] = sdiv_test::random_density_pair(rng, i);
        EXPECT_NEAR(s_divergence(derive_exponents(alpha, 0.0), g, f, kQuad),
                    dpd(alpha, g, f, kQuad), 1e-9);
    }
    for (int i = 0; i < 20; ++i) {
        auto [g, f] = sdiv_test::random_density_pair(rng, i);
        const double base = s_divergence(derive_exponents(1.0, -2.0), g, f, kQuad);
        for (double lambda : {-0.5, 0.0, 0.9}) {
            EXPECT_NEAR(s_divergence(derive_exponents(1.0, lambda), g, f, kQuad), base, 1e-9);
        }
    }
    // A -> 0 and B -> 0: generic evaluation near the boundary against the
    // limit branch on it.
    const DensityModel gn = normal_density(0.2, 1.1);
    const DensityModel fn = normal_density(-0.4, 0.9);
    const double alpha = 0.3;
    EXPECT_NEAR(
        s_divergence(derive_exponents(alpha, (1e-6 - 1.0) / (1.0 - alpha)), gn, fn, kQuad),
        s_divergence(derive_exponents(alpha, -1.0 / (1.0 - alpha)), gn, fn, kQuad), 1e-4);
    EXPECT_NEAR(
        s_divergence(derive_exponents(alpha, (alpha - 1e-6) / (1.0 - alpha)), gn, fn, kQuad),
        s_divergence(derive_exponents(alpha, alpha / (1.0 - alpha)), gn, fn, kQuad), 1e-4);
}

TEST(Acceptance, Criterion5ClosedFormsVersusQuadrature) {
    CriterionReporter rep{5, "closed-form objectives and masses match quadrature"};
    Xoshiro256 rng(20250503);
    for (int i = 0; i < 100; ++i) {
        const double alpha = uniform_in(rng, 0.1, 1.0);
        const auto params = derive_exponents(alpha, 0.0);
        const double eps = uniform_in(rng, 0.0, 0.6);

        const double mu = uniform_in(rng, -4.0, 4.0);
        const double sigma = uniform_in(rng, 0.4, 3.0);
        const double mu0 = uniform_in(rng, -6.0, 6.0);
        const double sigma0 = uniform_in(rng, 0.5, 2.0);
        const ContaminationSpec nspec{normal_density(0.0, 1.0), normal_density(mu0, sigma0),
                                      eps};
        EXPECT_NEAR(mdpde_normal_objective(alpha, mu, sigma, eps, mu0, sigma0),
                    msd_objective(params, FamilySpec::normal_location_scale(),
                                  std::vector<double>{mu, sigma}, nspec, kQuad),
                    1e-8)
            << "normal instance " << i;

        const double rate = uniform_in(rng, 0.2, 5.0);
        const double rate0 = uniform_in(rng, 0.05, 20.0);
        const ContaminationSpec espec{exponential_density(1.0), exponential_density(rate0),
                                      eps};
        EXPECT_NEAR(mdpde_exponential_objective(alpha, rate, eps, rate0),
                    msd_objective(params, FamilySpec::exponential(),
                                  std::vector<double>{rate}, espec, kQuad),
                    1e-8)
            << "exponential instance " << i;
    }
    // Every family's closed mass against direct quadrature / summation.
    for (int i = 0; i < 10; ++i) {
        std::vector<DensityModel> models;
        models.push_back(normal_density(uniform_in(rng, -3.0, 3.0), uniform_in(rng, 0.3, 3.0)));
        models.push_back(exponential_density(uniform_in(rng, 0.2, 5.0)));
        models.push_back(
            gamma_density(uniform_in(rng, 1.0, 4.0), uniform_in(rng, 0.3, 4.0)));
        models.push_back(binomial_density(12, rng.next_unit()));
        for (const auto& d : models) {
            for (double alpha2 : {0.0, 0.25, 0.5, 0.75, 1.0}) {
                auto raw = [&](double x) { return std::pow(d(x), 1.0 + alpha2); };
                const double quad = integrate(kQuad, raw, d.support, d.features).value;
                EXPECT_NEAR(quad / d.closed_mass(1.0 + alpha2), 1.0, 1e-8);
            }
        }
    }
    const DensityModel mv = mv_normal_iso_density(2, {0.1, -0.3}, 1.2);
    auto raw_nd = [&](std::span<const double> x) { return std::pow(mv(x), 1.5); };
    const IntegratorHandle wide = IntegratorHandle::adaptive_quadrature(1e-9, 1e-12, 400);
    EXPECT_NEAR(integrate_nd(wide, raw_nd, 2, mv.features).value / mv.closed_mass(1.5), 1.0,
                1e-8);
}

TEST(Acceptance, Criterion6MleLinearitySweeps) {
    CriterionReporter rep{6, "alpha=0 sweeps reproduce the exact linear laws"};
    const auto params = derive_exponents(0.0, 0.0);
    const auto grid = default_eps_grid();

    ContaminationScenario nsc;
    nsc.mu0 = 5.0;
    nsc.sigma0 = 1.0;
    const auto nloc = sweep(params, FamilySpec::normal_location(1.0), nsc, grid, kQuad, {});
    for (std::size_t i = 0; i < grid.size(); ++i) {
        ASSERT_EQ(nloc[i].status, "ok");
        EXPECT_NEAR(nloc[i].result.theta_hat[0], 5.0 * grid[i], 1e-4) << "eps=" << grid[i];
    }

    ContaminationScenario esc;
    esc.rate0 = 10.0;
    const auto expo = sweep(params, FamilySpec::exponential(), esc, grid, kQuad, {});
    for (std::size_t i = 0; i < grid.size(); ++i) {
        ASSERT_EQ(expo[i].status, "ok");
        EXPECT_NEAR(1.0 / expo[i].result.theta_hat[0], (1.0 - grid[i]) + grid[i] / 10.0, 1e-4)
            << "eps=" << grid[i];
    }

    ContaminationScenario bsc;
    const auto bino = sweep(params, FamilySpec::binomial_fixed_size(12), bsc, grid, kQuad, {});
    for (std::size_t i = 0; i < grid.size(); ++i) {
        ASSERT_EQ(bino[i].status, "ok");
        EXPECT_NEAR(bino[i].result.theta_hat[0], 0.5 + 0.5 * grid[i], 1e-4)
            << "eps=" << grid[i];
    }
}

TEST(Acceptance, Criterion7RobustRegimeQualitative) {
    CriterionReporter rep{7, "robust-regime behaviour with dense-grid oracle cross-checks"};

    // Binomial, alpha = 0.9: stays near 1/2 at eps = 0.40, jumps by 0.60.
    {
        const auto params = derive_exponents(0.9, 0.0);
        ContaminationScenario sc;
        const std::vector<double> grid{0.40, 0.60};
        const auto pts = sweep(params, FamilySpec::binomial_fixed_size(12), sc, grid, kQuad, {});
        EXPECT_LT(pts[0].result.theta_hat[0], 0.55);
        EXPECT_GT(pts[1].result.theta_hat[0], 0.95);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            auto obj = [&](double th) { return msd_binomial_objective(params, th, grid[i]); };
            EXPECT_NEAR(pts[i].result.theta_hat[0], grid_argmin(obj, 0.0, 1.0, 1e-4), 2e-4);
        }
    }

    // Exponential, alpha = 0.5, rate0 = 0.01: inverse-rate bias stays small
    // through eps = 0.3.  Oracle: dense scan in log10(rate) refined linearly.
    {
        ContaminationScenario sc;
        sc.rate0 = 0.01;
        const auto params = derive_exponents(0.5, 0.0);
        std::vector<double> grid;
        for (int i = 0; i <= 60; ++i) grid.push_back(i * 0.005);
        const auto pts = sweep(params, FamilySpec::exponential(), sc, grid, kQuad, {});
        for (std::size_t i = 0; i < grid.size(); ++i) {
            ASSERT_EQ(pts[i].status, "ok");
            EXPECT_LT(std::abs(1.0 / pts[i].result.theta_hat[0] - 1.0), 0.5)
                << "eps=" << grid[i];
        }
        for (double eps : {0.1, 0.2, 0.3}) {
            auto obj = [&](double lr) {
                return mdpde_exponential_objective(0.5, std::pow(10.0, lr), eps, 0.01);
            };
            const double coarse = grid_argmin(obj, -3.0, 3.0, 1e-4);
            auto obj_rate = [&](double r) {
                return mdpde_exponential_objective(0.5, r, eps, 0.01);
            };
            const double r0 = std::pow(10.0, coarse);
            const double oracle =
                grid_argmin(obj_rate, std::max(1e-3, r0 - 2e-3), r0 + 2e-3, 1e-5);
            const auto it = std::lower_bound(grid.begin(), grid.end(), eps - 1e-12);
            const std::size_t idx = static_cast<std::size_t>(it - grid.begin());
            EXPECT_NEAR(pts[idx].result.theta_hat[0], oracle, 1e-4) << "eps=" << eps;
        }
    }

    // Normal location, alpha = 0.9: |mu_hat| < 0.5 through eps = 0.4.
    {
        ContaminationScenario sc;
        sc.mu0 = 5.0;
        const auto params = derive_exponents(0.9, 0.0);
        std::vector<double> grid;
        for (int i = 0; i <= 80; ++i) grid.push_back(i * 0.005);
        const auto pts = sweep(params, FamilySpec::normal_location(1.0), sc, grid, kQuad, {});
        for (std::size_t i = 0; i < grid.size(); ++i) {
            ASSERT_EQ(pts[i].status, "ok");
            EXPECT_LT(std::abs(pts[i].result.theta_hat[0]), 0.5) << "eps=" << grid[i];
        }
        for (double eps : {0.2, 0.4}) {
            auto obj = [&](double mu) {
                return mdpde_normal_objective(0.9, mu, 1.0, eps, 5.0, 1.0);
            };
            const double oracle = grid_argmin(obj, -20.0, 20.0, 1e-4);
            const auto it = std::lower_bound(grid.begin(), grid.end(), eps - 1e-12);
            const std::size_t idx = static_cast<std::size_t>(it - grid.begin());
            EXPECT_NEAR(pts[idx].result.theta_hat[0], oracle, 1e-4) << "eps=" << eps;
        }
    }
}

TEST(Acceptance, Criterion8BoundGridCellwise) {
    CriterionReporter rep{8, "bound-grid CSV verified cellwise, NOGUARANTEE exact"};
    RunConfig cfg;
    cfg.command = RunConfig::Command::bound_grid;
    const std::string text = cmd_bound_grid(cfg).files.at("");

    std::istringstream is(text);
    std::string line;
    int rows = 0;
    int quarter_region = 0;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("alpha,", 0) == 0) continue;
        ++rows;
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        ASSERT_EQ(cells.size(), 5u);
        const double alpha = std::stod(cells[0]);
        const double lambda = std::stod(cells[1]);
        const double a = 1.0 + lambda * (1.0 - alpha);
        const double b = alpha - lambda * (1.0 - alpha);
        EXPECT_NEAR(a, std::stod(cells[2]), 1e-12);
        EXPECT_NEAR(b, std::stod(cells[3]), 1e-12);
        if (a < -kBranchTol || b < -kBranchTol) {
            EXPECT_EQ(cells[4], "NOGUARANTEE") << line;
            continue;
        }
        ASSERT_NE(cells[4], "NOGUARANTEE") << line;
        // Direct formula evaluation, with the A -> 0 continuity limit.
        const double q = std::abs(a) < kBranchTol ? std::exp(-1.0 / (1.0 + alpha))
                                                  : std::pow(std::max(b, 0.0) / (1.0 + alpha),
                                                             1.0 / a);
        const double expected = std::min(q, 1.0 - q);
        EXPECT_NEAR(std::stod(cells[4]), expected, 1e-12) << line;
        if (expected >= 0.25) ++quarter_region;
    }
    EXPECT_EQ(rows, 21 * 61);
    // The at-least-1/4 side of the contour is a substantial region that
    // contains the alpha = 1 edge and the Hellinger point.
    EXPECT_GT(quarter_region, 100);
}

TEST(Acceptance, Criterion9MonteCarloQuadratureCoherence) {
    CriterionReporter rep{9, "seeded Monte Carlo agrees with quadrature and reruns bitwise"};
    Xoshiro256 gen(20250504);
    for (int i = 0; i < 20; ++i) {
        const double mu = uniform_in(gen, -2.0, 2.0);
        const double sigma = uniform_in(gen, 0.6, 1.8);
        const double mu0 = uniform_in(gen, -6.0, 6.0);
        const double eps = 0.5 * gen.next_unit();
        const double a = uniform_in(gen, 0.4, 1.2);
        const double b = uniform_in(gen, 0.3, 1.2);
        const DensityModel f = normal_density(mu, sigma);
        const DensityModel g =
            mixture({normal_density(0.0, 1.0), normal_density(mu0, 1.0), eps});
        auto raw = [&](double x) { return std::pow(f(x), b) * std::pow(g(x), a); };

        std::vector<double> hints(f.features);
        hints.insert(hints.end(), g.features.begin(), g.features.end());
        const double exact = integrate(kQuad, raw, f.support, hints).value;

        const IntegratorHandle mc = IntegratorHandle::monte_carlo(10000, 1000 + i);
        auto weighted = [&](double x) { return raw(x) / f(x); };
        const auto est = mc_expectation(mc, f, weighted);
        const auto rerun = mc_expectation(mc, f, weighted);
        EXPECT_EQ(est.value, rerun.value) << "bitwise rerun, instance " << i;
        EXPECT_EQ(est.std_err, rerun.std_err);
        EXPECT_LT(std::abs(est.value - exact), 4.0 * est.std_err) << "instance " << i;
    }
}
