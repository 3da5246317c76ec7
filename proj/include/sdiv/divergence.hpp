#pragma once

/// The S-divergence family and its special cases.
///
/// For exponents A = 1 + lambda(1-alpha), B = alpha - lambda(1-alpha) the
/// generic divergence between densities g and f is
///
///   S(g, f) = (1/A) I[f^{1+a}] - ((1+a)/(AB)) I[f^B g^A] + (1/B) I[g^{1+a}]
///
/// with continuous limit branches at A = 0 and B = 0:
///
///   S_{A=0}(g, f) = I[f^{1+a} ln(f/g)] - (I[f^{1+a}] - I[g^{1+a}])/(1+a)
///   S_{B=0}(g, f) = I[g^{1+a} ln(g/f)] - (I[g^{1+a}] - I[f^{1+a}])/(1+a)
///
/// Values are extended reals: +infinity is a legitimate result (for example
/// the Kullback-Leibler branch when f vanishes where g does not), -infinity
/// is impossible and treated as a logic error.  First arguments may be
/// sub-densities eps*k; nothing here assumes unit total mass.

#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "sdiv/density.hpp"
#include "sdiv/errors.hpp"
#include "sdiv/integrate.hpp"
#include "sdiv/params.hpp"

namespace sdiv {

namespace detail {

// Monte Carlo call tags: one per integral role, so that objective sweeps see
// common random numbers across parameter probes.
inline constexpr std::uint64_t kTagMass = 1;
inline constexpr std::uint64_t kTagCross = 2;
inline constexpr std::uint64_t kTagLog = 3;

inline std::vector<double> merged_hints(const DensityModel& a, const DensityModel& b) {
    std::vector<double> h(a.features);
    h.insert(h.end(), b.features.begin(), b.features.end());
    return h;
}

/// t^{1+a} ln(t/s) evaluated from log t and log s, with the 0 ln(0) = 0
/// convention.  Working in logs matters: a density that merely underflows in
/// a deep tail must not masquerade as an exact zero and fake a +infinity.
/// When t^{1+a} itself underflows the term contributes nothing either way.
inline double power_log_term(double log_t, double log_s, double one_plus_alpha) {
    const double kInf = std::numeric_limits<double>::infinity();
    if (log_t == -kInf) return 0.0;
    const double t_pow = std::exp(one_plus_alpha * log_t);
    if (t_pow == 0.0) return 0.0;
    if (log_s == -kInf) return kInf;
    return t_pow * (log_t - log_s);
}

/// Integrates `raw` over the shared support.  Quadrature handles integrate
/// directly; Monte Carlo handles importance-sample from whichever density
/// provides a sampler, weighting by raw(x)/density(x).
template <typename Fn>
double weighted_integral(const IntegratorHandle& handle, const DensityModel& f,
                         const DensityModel& g, const Fn& raw, std::uint64_t tag) {
    const Support& domain = f.support;
    if (domain.is_discrete() || !handle.is_monte_carlo()) {
        const std::vector<double> hints = merged_hints(f, g);
        return integrate(handle, raw, domain, hints).value;
    }
    const DensityModel& sampler = f.has_sampler() ? f : g;
    if (!sampler.has_sampler()) {
        throw SamplerUnavailable("monte_carlo integration needs a sampler on f or g");
    }
    auto weighted = [&](double x) {
        const double d = sampler(x);
        const double r = raw(x);
        if (r == 0.0) return 0.0;
        return r / d;
    };
    return mc_expectation(handle, sampler, weighted, tag).value;
}

}  // namespace detail

/// Power mass M_f = integral of f^{1+alpha}; closed form when the model
/// carries one, numerical otherwise.
inline double mass(const DensityModel& f, double alpha, const IntegratorHandle& integrator) {
    if (alpha < 0.0) throw OutOfFamily("mass requires alpha >= 0");
    double result;
    if (f.has_closed_mass()) {
        result = f.closed_mass(1.0 + alpha);
    } else {
        auto raw = [&f, alpha](double x) { return std::pow(f(x), 1.0 + alpha); };
        result = detail::weighted_integral(integrator, f, f, raw, detail::kTagMass);
    }
    if (!(result > 0.0)) throw IntegrationFailure("power mass evaluated non-positive");
    return result;
}

/// S-divergence with the first argument scaled to the sub-density eps*k.
/// eps = 1 recovers the plain divergence.
inline double s_divergence_scaled(const DivergenceParams& params, double eps,
                                  const DensityModel& k, const DensityModel& f,
                                  const IntegratorHandle& integrator) {
    if (!k.support.compatible_with(f.support)) {
        throw DomainMismatch("densities have incompatible supports");
    }
    if (!(eps >= 0.0 && eps <= 1.0)) throw Error("eps must lie in [0, 1]");

    const double opa = params.one_plus_alpha();
    const double alpha = params.alpha;
    const double kInf = std::numeric_limits<double>::infinity();

    auto mass_of = [&](const DensityModel& d) { return mass(d, alpha, integrator); };

    double value = 0.0;
    try {
        switch (params.branch) {
            case Branch::generic: {
                const double a = params.a_exp;
                const double b = params.b_exp;
                auto cross_raw = [&](double x) {
                    const double fv = f(x);
                    if (fv == 0.0) return 0.0;
                    const double kv = k(x);
                    if (kv == 0.0) return 0.0;
                    return std::pow(fv, b) * std::pow(kv, a);
                };
                const double m_f = mass_of(f);
                const double cross =
                    detail::weighted_integral(integrator, f, k, cross_raw, detail::kTagCross);
                const double m_k = eps > 0.0 ? mass_of(k) : 0.0;
                value = m_f / a - (opa / (a * b)) * std::pow(eps, a) * cross +
                        std::pow(eps, opa) * m_k / b;
                break;
            }
            case Branch::a_limit: {
                const double log_eps = eps > 0.0 ? std::log(eps) : -kInf;
                auto log_raw = [&](double x) {
                    return detail::power_log_term(f.log_at(x), log_eps + k.log_at(x), opa);
                };
                const double log_term =
                    detail::weighted_integral(integrator, f, k, log_raw, detail::kTagLog);
                const double m_f = mass_of(f);
                const double m_k_scaled = eps > 0.0 ? std::pow(eps, opa) * mass_of(k) : 0.0;
                value = log_term - (m_f - m_k_scaled) / opa;
                break;
            }
            case Branch::b_limit: {
                const double log_eps = eps > 0.0 ? std::log(eps) : -kInf;
                auto log_raw = [&](double x) {
                    return detail::power_log_term(log_eps + k.log_at(x), f.log_at(x), opa);
                };
                const double log_term =
                    detail::weighted_integral(integrator, k, f, log_raw, detail::kTagLog);
                const double m_f = mass_of(f);
                const double m_k_scaled = eps > 0.0 ? std::pow(eps, opa) * mass_of(k) : 0.0;
                value = log_term - (m_k_scaled - m_f) / opa;
                break;
            }
        }
    } catch (const IntegrandDiverges&) {
        return kInf;
    }
    if (value == -kInf || std::isnan(value)) {
        throw std::logic_error("S-divergence evaluated to -infinity or NaN");
    }
    return value;
}

/// S-divergence between densities g and f, dispatching on the exponent branch.
inline double s_divergence(const DivergenceParams& params, const DensityModel& g,
                           const DensityModel& f, const IntegratorHandle& integrator) {
    return s_divergence_scaled(params, 1.0, g, f, integrator);
}

/// Density power divergence d_alpha(g, f); the lambda = 0 slice of the family.
inline double dpd(double alpha, const DensityModel& g, const DensityModel& f,
                  const IntegratorHandle& integrator) {
    if (alpha < 0.0) throw OutOfFamily("dpd requires alpha >= 0");
    if (!g.support.compatible_with(f.support)) {
        throw DomainMismatch("densities have incompatible supports");
    }
    const double kInf = std::numeric_limits<double>::infinity();
    try {
        if (alpha == 0.0) {
            auto kl_raw = [&](double x) {
                return detail::power_log_term(g.log_at(x), f.log_at(x), 1.0);
            };
            return detail::weighted_integral(integrator, g, f, kl_raw, detail::kTagLog);
        }
        const double opa = 1.0 + alpha;
        auto cross_raw = [&](double x) {
            const double fv = f(x);
            if (fv == 0.0) return 0.0;
            const double gv = g(x);
            if (gv == 0.0) return 0.0;
            return std::pow(fv, alpha) * gv;
        };
        const double m_f = mass(f, alpha, integrator);
        const double m_g = mass(g, alpha, integrator);
        const double cross =
            detail::weighted_integral(integrator, f, g, cross_raw, detail::kTagCross);
        return m_f - (opa / alpha) * cross + m_g / alpha;
    } catch (const IntegrandDiverges&) {
        return kInf;
    }
}

/// Profile of the self-divergence of a scaled density: on the generic branch
/// S(eps g, g) = M_g * r(eps) with
///     r(eps) = 1/A - (1+alpha) eps^A / (AB) + eps^{1+alpha} / B,
/// independent of g.  r(0) = 1/A and r(1) = 0.
inline double self_divergence_profile(const DivergenceParams& params, double eps) {
    if (params.branch != Branch::generic) {
        throw BranchUnsupported("self_divergence_profile is defined on the generic branch only");
    }
    if (!(eps >= 0.0 && eps <= 1.0)) throw Error("eps must lie in [0, 1]");
    const double a = params.a_exp;
    const double b = params.b_exp;
    const double opa = params.one_plus_alpha();
    return 1.0 / a - (opa / (a * b)) * std::pow(eps, a) + std::pow(eps, opa) / b;
}

}  // namespace sdiv
