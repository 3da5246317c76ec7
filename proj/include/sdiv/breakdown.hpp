#pragma once

/// Asymptotic breakdown-point bounds for minimum S-divergence estimation
/// under eps-contamination, the scenario-specific limit factors for scale
/// families, and executable checks of the inequalities behind the bounds.
///
/// The baseline lower bound is min{q, 1-q} with q = (B/(1+alpha))^{1/A};
/// it applies when the contaminant's power mass never exceeds the model's.
/// When instead the liminf L of M_f / I[f^B k^A] along the boundary-escaping
/// sequence is known, the bound sharpens to
/// min{(BL/(1+alpha))^{1/A}, 1-q, 1/2}.  Scale families (normal scatter,
/// exponential, gamma) have closed-form L limits and piecewise breakdown
/// values depending on whether A is above, at, or below 1.

#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "sdiv/density.hpp"
#include "sdiv/divergence.hpp"
#include "sdiv/errors.hpp"
#include "sdiv/integrate.hpp"
#include "sdiv/params.hpp"

namespace sdiv {

struct BreakdownReport {
    double bound = 0.0;            // always within [0, 1/2]
    std::string formula_branch;
    std::vector<std::pair<std::string, double>> intermediates;
};

/// q = (B/(1+alpha))^{1/A}; the contamination cap in the divergence-floor
/// inequality and the seed of every bound here.
inline double breakdown_base_ratio(const DivergenceParams& params) {
    if (params.a_exp <= kBranchTol) {
        throw BranchUnsupported("bound requires A > 0");
    }
    const double b = std::max(params.b_exp, 0.0);
    return std::pow(b / params.one_plus_alpha(), 1.0 / params.a_exp);
}

/// Lower bound min{q, 1-q} under contaminant-mass domination.
inline BreakdownReport breakdown_bound(const DivergenceParams& params) {
    const double q = breakdown_base_ratio(params);
    BreakdownReport r;
    r.bound = std::min(q, 1.0 - q);
    r.formula_branch = "baseline-ratio";
    r.intermediates = {{"A", params.a_exp}, {"B", params.b_exp}, {"q", q}};
    return r;
}

/// The lambda = 0 slice: alpha/(1+alpha).
inline double dpd_breakdown_bound(double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw OutOfFamily("alpha must lie in [0, 1]");
    return alpha / (1.0 + alpha);
}

/// Continuity limit of the baseline bound as A -> 0 with B = 1+alpha-A:
/// q = (1 - A/(1+alpha))^{1/A} -> e^{-1/(1+alpha)}.
inline double breakdown_bound_a_zero_limit(double alpha) {
    const double q = std::exp(-1.0 / (1.0 + alpha));
    return std::min(q, 1.0 - q);
}

/// Sharpened bound min{(B L /(1+alpha))^{1/A}, 1-q, 1/2} given the mass-ratio
/// limit factor L (0, finite positive, or +infinity; +infinity drops the
/// first term).
inline BreakdownReport breakdown_bound_with_l_factor(const DivergenceParams& params, double l_factor) {
    if (!(l_factor >= 0.0)) throw Error("l_factor must be nonnegative or +infinity");
    const double q = breakdown_base_ratio(params);
    const double kInf = std::numeric_limits<double>::infinity();
    const double first =
        std::isinf(l_factor)
            ? kInf
            : std::pow(std::max(params.b_exp, 0.0) * l_factor / params.one_plus_alpha(),
                       1.0 / params.a_exp);
    BreakdownReport r;
    r.bound = std::min({first, 1.0 - q, 0.5});
    r.formula_branch = "l-factor-ratio";
    r.intermediates = {{"A", params.a_exp},
                       {"B", params.b_exp},
                       {"q", q},
                       {"L", l_factor},
                       {"first_term", first}};
    return r;
}

// ---------------------------------------------------------------------------
// Scale-family limit scenarios
// ---------------------------------------------------------------------------

/// A boundary-escaping contamination scenario for a scale parameter:
/// the contaminating scale implodes to 0 (normal/scatter) or the
/// contaminating rate explodes to infinity (exponential/gamma), while the
/// estimated parameter escapes no faster.
struct LimitScenario {
    enum class Kind {
        normal_scale_implode,  // contaminant N(eta, s^2), s -> 0
        mv_scatter_implode,    // contaminant N_p(eta, s^2 I), s -> 0
        exponential_explode,   // contaminant rate -> infinity
        gamma_explode          // gamma with fixed shape, contaminant rate -> infinity
    };

    Kind kind = Kind::normal_scale_implode;
    double eta = 0.0;   // contaminant location (normal scatter scenarios)
    int dim = 1;        // mv_scatter_implode
    double shape = 1.0; // gamma_explode

    static LimitScenario normal_scale(double eta = 0.0) { return {Kind::normal_scale_implode, eta, 1, 1.0}; }
    static LimitScenario mv_scatter(int p, double eta = 0.0) { return {Kind::mv_scatter_implode, eta, p, 1.0}; }
    static LimitScenario exponential() { return {Kind::exponential_explode, 0.0, 1, 1.0}; }
    static LimitScenario gamma(double t) { return {Kind::gamma_explode, 0.0, 1, t}; }
};

namespace detail {

enum class AClass { above_one, at_one, below_one };

inline AClass classify_a(const DivergenceParams& params) {
    if (params.a_exp <= kBranchTol) throw BranchUnsupported("scenario bounds require A > 0");
    if (params.a_exp > 1.0 + kBranchTol) return AClass::above_one;
    if (params.a_exp >= 1.0 - kBranchTol) return AClass::at_one;
    return AClass::below_one;
}

}  // namespace detail

/// Limit of the mass ratio M_f / I[f^B k^A] along the scenario's escaping
/// sequence (worst rate): 0, a positive closed form, or +infinity.
inline double scenario_l_factor(const LimitScenario& scenario, const DivergenceParams& params) {
    const double kInf = std::numeric_limits<double>::infinity();
    const double opa = params.one_plus_alpha();
    switch (scenario.kind) {
        case LimitScenario::Kind::normal_scale_implode:
        case LimitScenario::Kind::mv_scatter_implode: {
            const int p = scenario.kind == LimitScenario::Kind::normal_scale_implode
                              ? 1
                              : scenario.dim;
            switch (detail::classify_a(params)) {
                case detail::AClass::above_one: return 0.0;
                case detail::AClass::at_one:
                    return scenario.eta == 0.0 ? std::pow(opa, -0.5 * p) : kInf;
                case detail::AClass::below_one: return kInf;
            }
            break;
        }
        case LimitScenario::Kind::exponential_explode: {
            switch (detail::classify_a(params)) {
                case detail::AClass::above_one: return 0.0;
                case detail::AClass::at_one: return 1.0 / opa;
                case detail::AClass::below_one: return kInf;
            }
            break;
        }
        case LimitScenario::Kind::gamma_explode: {
            const double t = scenario.shape;
            if (!(t > 0.0)) throw UnknownScenario("gamma scenario needs shape > 0");
            if (params.a_exp <= kBranchTol) throw BranchUnsupported("scenario bounds require A > 0");
            const double d = params.alpha - params.b_exp * t;
            if (d > kBranchTol) return 0.0;
            if (d < -kBranchTol) return kInf;
            return std::pow(params.a_exp / opa, opa * t - params.alpha);
        }
    }
    throw UnknownScenario("unrecognized limit scenario");
}

/// Worst-case breakdown point of the scenario over escape rates: the
/// piecewise closed forms in A (or in alpha vs B*shape for the gamma case).
inline BreakdownReport scenario_breakdown_point(const LimitScenario& scenario,
                                                const DivergenceParams& params) {
    const double opa = params.one_plus_alpha();
    const double alpha = params.alpha;
    BreakdownReport r;
    r.intermediates = {{"A", params.a_exp}, {"B", params.b_exp}};

    auto below_one_bound = [&]() {
        const double q = breakdown_base_ratio(params);
        r.intermediates.emplace_back("q", q);
        return std::min(0.5, q);
    };

    switch (scenario.kind) {
        case LimitScenario::Kind::normal_scale_implode:
        case LimitScenario::Kind::mv_scatter_implode: {
            const int p = scenario.kind == LimitScenario::Kind::normal_scale_implode
                              ? 1
                              : scenario.dim;
            r.intermediates.emplace_back("p", static_cast<double>(p));
            switch (detail::classify_a(params)) {
                case detail::AClass::above_one:
                    r.bound = 0.0;
                    r.formula_branch = "A>1";
                    return r;
                case detail::AClass::at_one:
                    if (scenario.eta == 0.0) {
                        r.bound = alpha * std::pow(opa, -(1.0 + 0.5 * p));
                        r.formula_branch = "A=1:eta=0";
                    } else {
                        r.bound = alpha / opa;
                        r.formula_branch = "A=1:eta!=0";
                    }
                    return r;
                case detail::AClass::below_one:
                    r.bound = below_one_bound();
                    r.formula_branch = "0<A<1";
                    return r;
            }
            break;
        }
        case LimitScenario::Kind::exponential_explode: {
            switch (detail::classify_a(params)) {
                case detail::AClass::above_one:
                    r.bound = 0.0;
                    r.formula_branch = "A>1";
                    return r;
                case detail::AClass::at_one:
                    r.bound = alpha / (opa * opa);
                    r.formula_branch = "A=1";
                    return r;
                case detail::AClass::below_one:
                    r.bound = below_one_bound();
                    r.formula_branch = "0<A<1";
                    return r;
            }
            break;
        }
        case LimitScenario::Kind::gamma_explode: {
            const double t = scenario.shape;
            if (!(t > 0.0)) throw UnknownScenario("gamma scenario needs shape > 0");
            if (params.a_exp <= kBranchTol) throw BranchUnsupported("scenario bounds require A > 0");
            r.intermediates.emplace_back("t", t);
            const double d = alpha - params.b_exp * t;
            if (d > kBranchTol) {
                r.bound = 0.0;
                r.formula_branch = "alpha>Bt";
                return r;
            }
            if (d < -kBranchTol) {
                r.bound = below_one_bound();
                r.formula_branch = "alpha<Bt";
                return r;
            }
            const double at = params.a_exp * t;
            r.bound = alpha * std::pow(params.a_exp, at) * std::pow(opa, -(1.0 + at));
            r.formula_branch = "alpha=Bt";
            return r;
        }
    }
    throw UnknownScenario("unrecognized limit scenario");
}

// ---------------------------------------------------------------------------
// Inequality checks
// ---------------------------------------------------------------------------

struct CheckResult {
    bool holds = false;
    double lhs = 0.0;
    double rhs = 0.0;
};

/// Cap on eps under which the divergence floor applies.
inline double divergence_floor_eps_cap(const DivergenceParams& params) {
    return breakdown_base_ratio(params);
}

/// Verifies S(eps g, f) >= S(eps g, g) under the hypotheses M_f >= M_g and
/// eps <= (B/(1+alpha))^{1/A}.  Violated hypotheses raise
/// PreconditionViolated: the check would be vacuous, not false.
inline CheckResult check_divergence_floor(const DivergenceParams& params, double eps,
                                          const DensityModel& g, const DensityModel& f,
                                          const IntegratorHandle& integrator) {
    if (params.branch != Branch::generic) {
        throw BranchUnsupported("divergence floor check needs the generic branch");
    }
    const double cap = divergence_floor_eps_cap(params);
    if (eps > cap + 1e-12) {
        throw PreconditionViolated("eps " + std::to_string(eps) + " exceeds the cap " +
                                   std::to_string(cap));
    }
    const double m_f = mass(f, params.alpha, integrator);
    const double m_g = mass(g, params.alpha, integrator);
    if (m_f + 1e-12 * std::max(1.0, m_g) < m_g) {
        throw PreconditionViolated("mass ordering M_f >= M_g fails");
    }
    CheckResult res;
    res.lhs = s_divergence_scaled(params, eps, g, f, integrator);
    res.rhs = s_divergence_scaled(params, eps, g, g, integrator);
    res.holds = res.lhs >= res.rhs - 1e-9;
    return res;
}

/// Verifies the contamination-extremity inequality at one fixed instance of
/// (k, f_theta, g):
///     S(eps k, f_theta) > eps^{1+a} M_k / B + [1/A - (1+a)(1-eps)^A/(AB)] M_g.
/// The algebraically equivalent rearrangement
///     M_f - (1+a) eps^A I[f^B k^A] / B > [1 - (1+a)(1-eps)^A/B] M_g
/// is evaluated as a self-test; the two margins must agree up to integration
/// tolerance.
inline CheckResult check_breakdown_inequality(const DivergenceParams& params, double eps,
                                              const DensityModel& k, const DensityModel& f_theta,
                                              const DensityModel& g,
                                              const IntegratorHandle& integrator) {
    if (params.branch != Branch::generic) {
        throw BranchUnsupported("breakdown inequality check needs the generic branch");
    }
    if (!(eps >= 0.0 && eps <= 1.0)) throw Error("eps must lie in [0, 1]");
    const double a = params.a_exp;
    const double b = params.b_exp;
    const double opa = params.one_plus_alpha();

    const double m_k = mass(k, params.alpha, integrator);
    const double m_g = mass(g, params.alpha, integrator);
    const double m_f = mass(f_theta, params.alpha, integrator);

    CheckResult res;
    res.lhs = s_divergence_scaled(params, eps, k, f_theta, integrator);
    res.rhs = std::pow(eps, opa) * m_k / b +
              (1.0 / a - opa * std::pow(1.0 - eps, a) / (a * b)) * m_g;
    res.holds = res.lhs > res.rhs;

    auto cross_raw = [&](double x) {
        const double fv = f_theta(x);
        if (fv == 0.0) return 0.0;
        const double kv = k(x);
        if (kv == 0.0) return 0.0;
        return std::pow(fv, b) * std::pow(kv, a);
    };
    const double cross =
        detail::weighted_integral(integrator, f_theta, k, cross_raw, detail::kTagCross);
    const double lhs2 = m_f - (opa / b) * std::pow(eps, a) * cross;
    const double rhs2 = (1.0 - opa * std::pow(1.0 - eps, a) / b) * m_g;

    const double margin1 = a * (res.lhs - res.rhs);
    const double margin2 = lhs2 - rhs2;
    const double scale = std::max({1.0, std::abs(lhs2), std::abs(rhs2)});
    if (std::abs(margin1 - margin2) > 1e-7 * scale) {
        throw std::logic_error("equivalent forms of the breakdown inequality disagree");
    }
    return res;
}

/// Overlap integral of min(p, q): 1 for identical densities, near 0 for
/// asymptotically singular pairs.  The kink locations (crossings of p and q)
/// are located by probing plus bisection and passed to quadrature as panel
/// boundaries, so thin overlap regions are not missed.
inline double singularity_overlap(const DensityModel& p, const DensityModel& q,
                                  const IntegratorHandle& integrator) {
    if (!p.support.compatible_with(q.support)) {
        throw DomainMismatch("overlap needs a shared support");
    }
    auto raw = [&](double x) { return std::min(p(x), q(x)); };
    const Support& dom = p.support;
    if (dom.is_discrete()) {
        return sum_over_integers(raw, dom.lo, dom.hi).value;
    }
    if (dom.kind == Support::Kind::real_space) {
        throw IntegrationFailure("overlap integral implemented for one-dimensional supports");
    }

    // Locate sign changes of p - q on a transformed-domain probe grid.
    const bool half_line = dom.kind == Support::Kind::half_line_positive;
    auto to_x = [half_line](double t) {
        return half_line ? t / (1.0 - t) : t / (1.0 - t * t);
    };
    const double t_lo = half_line ? 0.0 : -1.0;
    const int n_probe = 512;
    std::vector<double> hints = detail::merged_hints(p, q);
    auto diff = [&](double x) { return p(x) - q(x); };
    double prev_x = 0.0;
    double prev_d = 0.0;
    bool have_prev = false;
    for (int i = 1; i < n_probe; ++i) {
        const double t = t_lo + (1.0 - t_lo) * static_cast<double>(i) / n_probe;
        const double x = to_x(t);
        const double d = diff(x);
        if (have_prev && ((prev_d < 0.0) != (d < 0.0))) {
            double lo = prev_x;
            double hi = x;
            double d_lo = prev_d;
            for (int it = 0; it < 80; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double d_mid = diff(mid);
                if ((d_lo < 0.0) == (d_mid < 0.0)) {
                    lo = mid;
                    d_lo = d_mid;
                } else {
                    hi = mid;
                }
            }
            hints.push_back(0.5 * (lo + hi));
        }
        prev_x = x;
        prev_d = d;
        have_prev = true;
    }
    return integrate(integrator, raw, dom, hints).value;
}

}  // namespace sdiv
