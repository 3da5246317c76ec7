#pragma once

/// Population objectives for minimum S-divergence estimation under
/// contamination, and the derivative-free minimizers used to locate the
/// estimates.  Objectives drop parameter-free divergence terms in the
/// continuous families (differences still equal divergence differences);
/// the binomial finite-sum objective keeps all three terms, so its values
/// are true discrete divergences.

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sdiv/density.hpp"
#include "sdiv/divergence.hpp"
#include "sdiv/errors.hpp"
#include "sdiv/integrate.hpp"
#include "sdiv/models.hpp"
#include "sdiv/params.hpp"

namespace sdiv {

// ---------------------------------------------------------------------------
// Objectives
// ---------------------------------------------------------------------------

/// Theta-dependent part of S(g_eps, f_theta).  Generic branch:
/// (1/A) M_f - ((1+alpha)/(AB)) I[f^B g^A]; the limit branches drop their
/// own theta-free terms.  Discrete supports evaluate the full three-term
/// divergence instead (cheap, and then the value is the true divergence).
inline double msd_objective(const DivergenceParams& params, const FamilySpec& family,
                            std::span<const double> theta, const ContaminationSpec& contaminated,
                            const IntegratorHandle& integrator) {
    const DensityModel f = density_at(family, theta);
    const DensityModel g = mixture(contaminated);
    if (!f.support.compatible_with(g.support)) {
        throw DomainMismatch("model and contamination supports differ");
    }
    if (f.support.is_discrete()) {
        return s_divergence(params, g, f, integrator);
    }

    const double opa = params.one_plus_alpha();
    const double kInf = std::numeric_limits<double>::infinity();
    try {
        switch (params.branch) {
            case Branch::generic: {
                const double a = params.a_exp;
                const double b = params.b_exp;
                auto cross_raw = [&](double x) {
                    const double fv = f(x);
                    if (fv == 0.0) return 0.0;
                    const double gv = g(x);
                    if (gv == 0.0) return 0.0;
                    return std::pow(fv, b) * std::pow(gv, a);
                };
                const double m_f = mass(f, params.alpha, integrator);
                const double cross =
                    detail::weighted_integral(integrator, f, g, cross_raw, detail::kTagCross);
                return m_f / a - (opa / (a * b)) * cross;
            }
            case Branch::a_limit: {
                auto log_raw = [&](double x) {
                    return detail::power_log_term(f.log_at(x), g.log_at(x), opa);
                };
                const double log_term =
                    detail::weighted_integral(integrator, f, g, log_raw, detail::kTagLog);
                return log_term - mass(f, params.alpha, integrator) / opa;
            }
            case Branch::b_limit: {
                auto log_raw = [&](double x) {
                    const double lg = g.log_at(x);
                    if (lg == -kInf) return 0.0;
                    const double g_pow = std::exp(opa * lg);
                    if (g_pow == 0.0) return 0.0;
                    const double lf = f.log_at(x);
                    if (lf == -kInf) return kInf;
                    return -g_pow * lf;
                };
                const double log_term =
                    detail::weighted_integral(integrator, g, f, log_raw, detail::kTagLog);
                return mass(f, params.alpha, integrator) / opa + log_term;
            }
        }
    } catch (const IntegrandDiverges&) {
        return kInf;
    }
    throw Error("unreachable branch");
}

/// Closed-form DPD objective for the normal family against the mixture
/// (1-eps) N(0,1) + eps N(mu0, sigma0^2), as a function of the model
/// parameters (mu, sigma).  Exact for alpha > 0.
inline double mdpde_normal_objective(double alpha, double mu, double sigma, double eps,
                                     double mu0, double sigma0) {
    if (!(alpha > 0.0)) throw Error("mdpde_normal_objective requires alpha > 0");
    if (!(sigma > 0.0) || !(sigma0 > 0.0)) throw BoundaryParameter("sigma must be positive");
    if (!(eps >= 0.0 && eps <= 1.0)) throw Error("eps must lie in [0, 1]");
    const double v = sigma * sigma;
    const double clean = (1.0 - eps) *
                         std::exp(-0.5 * alpha * mu * mu / (v + alpha)) / std::sqrt(v + alpha);
    const double dm = mu - mu0;
    const double vc = v + alpha * sigma0 * sigma0;
    const double contam = eps * std::exp(-0.5 * alpha * dm * dm / vc) / std::sqrt(vc);
    return std::pow(kTwoPi, -0.5 * alpha) *
           (std::pow(sigma, -alpha) / std::sqrt(1.0 + alpha) -
            (1.0 + 1.0 / alpha) * std::pow(sigma, 1.0 - alpha) * (clean + contam));
}

/// Closed-form DPD objective for the exponential family against the mixture
/// (1-eps) Exp(1) + eps Exp(rate0), as a function of the model rate.
inline double mdpde_exponential_objective(double alpha, double rate, double eps, double rate0) {
    if (!(alpha > 0.0)) throw Error("mdpde_exponential_objective requires alpha > 0");
    if (!(rate > 0.0) || !(rate0 > 0.0)) throw BoundaryParameter("rate must be positive");
    if (!(eps >= 0.0 && eps <= 1.0)) throw Error("eps must lie in [0, 1]");
    return std::pow(rate, alpha) *
           (1.0 / (1.0 + alpha) -
            (1.0 + 1.0 / alpha) *
                ((1.0 - eps) / (alpha * rate + 1.0) + eps * rate0 / (alpha * rate + rate0)));
}

/// Discrete S-divergence objective for the binomial model of size n with
/// true success probability 1/2, contaminated by a point mass at n.  All
/// three sum terms are kept.
inline double msd_binomial_objective(const DivergenceParams& params, double theta, double eps,
                                     int n = 12) {
    ContaminationSpec spec{binomial_density(n, 0.5), dirac_contaminant_binomial(n, n), eps};
    const DensityModel g_eps = mixture(spec);
    const DensityModel f = binomial_density(n, theta);
    const IntegratorHandle sums = IntegratorHandle::adaptive_quadrature();
    return s_divergence(params, g_eps, f, sums);
}

// ---------------------------------------------------------------------------
// Derivative-free minimizers
// ---------------------------------------------------------------------------

struct SearchBound {
    double lo = 0.0;
    double hi = 1.0;
    bool log_scale = false;  // grid and refinement in log coordinates
};

struct OptimizerOpts {
    int n_grid = 64;          // coarse-grid points per dimension
    double param_tol = 1e-8;  // bracket / simplex size at convergence
    long max_evals = 100000;  // objective evaluation cap per minimization
    std::vector<SearchBound> box;
    std::vector<double> ref_point;  // tie-break target for near-equal optima
    // Additional multistart seeds.  Contamination objectives can have minima
    // in basins far narrower than any affordable grid (a near-singular
    // contaminant carves one around its own parameters), so callers that
    // know such candidate locations pass them here.
    std::vector<std::vector<double>> extra_starts;
};

struct EstimationResult {
    std::vector<double> theta_hat;
    double objective_at_min = std::numeric_limits<double>::infinity();
    long evaluations = 0;
    bool converged = false;
    int restarts_used = 0;
};

namespace detail {

/// Objectives may legitimately be +infinity (boundary divergences); any
/// library error at a probe point is treated the same way so one bad probe
/// cannot abort a search.
template <typename Fn>
double safe_eval(const Fn& fn, std::span<const double> theta, long& evals) {
    ++evals;
    try {
        const double v = fn(theta);
        return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
    } catch (const Error&) {
        return std::numeric_limits<double>::infinity();
    }
}

inline double to_search_coord(double x, const SearchBound& b) {
    return b.log_scale ? std::log(x) : x;
}

inline double from_search_coord(double u, const SearchBound& b) {
    return b.log_scale ? std::exp(u) : u;
}

/// Near-equal objectives (within 1e-10) resolve toward the reference point;
/// deterministic, and only relevant at breakdown transitions.
inline bool prefer_candidate(double f_new, const std::vector<double>& theta_new, double f_old,
                             const std::vector<double>& theta_old,
                             const std::vector<double>& ref) {
    if (f_new < f_old - 1e-10) return true;
    if (f_new > f_old + 1e-10) return false;
    if (ref.empty() || theta_old.empty()) return f_new < f_old;
    double d_new = 0.0;
    double d_old = 0.0;
    for (std::size_t i = 0; i < ref.size() && i < theta_new.size(); ++i) {
        d_new += (theta_new[i] - ref[i]) * (theta_new[i] - ref[i]);
        d_old += (theta_old[i] - ref[i]) * (theta_old[i] - ref[i]);
    }
    return d_new < d_old;
}

inline constexpr double kInvPhi = 0.6180339887498948482;

/// Golden-section descent inside [u_lo, u_hi] (search coordinates).
template <typename Fn>
EstimationResult golden_section(const Fn& fn, double u_lo, double u_hi, const SearchBound& bound,
                                const OptimizerOpts& opts, long& evals) {
    auto eval_u = [&](double u) {
        const double x = from_search_coord(u, bound);
        return safe_eval(fn, std::span<const double>(&x, 1), evals);
    };
    double a = u_lo;
    double b = u_hi;
    double c = b - kInvPhi * (b - a);
    double d = a + kInvPhi * (b - a);
    double fc = eval_u(c);
    double fd = eval_u(d);
    double best_u = fc <= fd ? c : d;
    double best_f = std::min(fc, fd);
    bool converged = false;
    while (evals < opts.max_evals) {
        if (b - a < opts.param_tol) {
            converged = true;
            break;
        }
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - kInvPhi * (b - a);
            fc = eval_u(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + kInvPhi * (b - a);
            fd = eval_u(d);
        }
        const double cand_u = fc <= fd ? c : d;
        const double cand_f = std::min(fc, fd);
        if (cand_f < best_f) {
            best_f = cand_f;
            best_u = cand_u;
        }
    }
    EstimationResult r;
    r.theta_hat = {from_search_coord(best_u, bound)};
    r.objective_at_min = best_f;
    r.converged = converged;
    r.restarts_used = 1;
    return r;
}

}  // namespace detail

/// Coarse uniform grid over [lo, hi] (log-spaced when the bound says so),
/// then golden-section refinement bracketing the best grid point.
template <typename Fn>
EstimationResult minimize_scalar(const Fn& fn, double lo, double hi, const OptimizerOpts& opts) {
    SearchBound bound = opts.box.empty() ? SearchBound{lo, hi, false} : opts.box[0];
    bound.lo = lo;
    bound.hi = hi;
    const double u_lo = detail::to_search_coord(lo, bound);
    const double u_hi = detail::to_search_coord(hi, bound);
    const int n = std::max(opts.n_grid, 3);

    long evals = 0;
    int best_i = -1;
    double best_f = std::numeric_limits<double>::infinity();
    std::vector<double> best_theta;
    for (int i = 0; i < n; ++i) {
        const double u = u_lo + (u_hi - u_lo) * static_cast<double>(i) / (n - 1);
        const double x = detail::from_search_coord(u, bound);
        const double v = detail::safe_eval(fn, std::span<const double>(&x, 1), evals);
        if (!std::isfinite(v)) continue;
        std::vector<double> theta{x};
        if (best_i < 0 || detail::prefer_candidate(v, theta, best_f, best_theta, opts.ref_point)) {
            best_i = i;
            best_f = v;
            best_theta = theta;
        }
    }
    if (best_i < 0) throw AllEvaluationsFailed("objective non-finite on the whole coarse grid");

    const double du = (u_hi - u_lo) / (n - 1);
    const double a = std::max(u_lo, u_lo + du * (best_i - 1));
    const double b = std::min(u_hi, u_lo + du * (best_i + 1));
    EstimationResult r = detail::golden_section(fn, a, b, bound, opts, evals);
    int restarts = r.restarts_used;
    for (const auto& seed : opts.extra_starts) {
        if (seed.size() != 1 || !(seed[0] >= lo && seed[0] <= hi)) continue;
        const double u0 = detail::to_search_coord(seed[0], bound);
        EstimationResult cand = detail::golden_section(fn, std::max(u_lo, u0 - du),
                                                       std::min(u_hi, u0 + du), bound, opts,
                                                       evals);
        ++restarts;
        if (detail::prefer_candidate(cand.objective_at_min, cand.theta_hat, r.objective_at_min,
                                     r.theta_hat, opts.ref_point)) {
            r = cand;
        }
    }
    if (detail::prefer_candidate(best_f, best_theta, r.objective_at_min, r.theta_hat,
                                 opts.ref_point)) {
        r.theta_hat = best_theta;
        r.objective_at_min = best_f;
    }
    r.restarts_used = restarts;
    r.evaluations = evals;
    return r;
}

namespace detail {

/// Nelder-Mead with reflection/expansion/contraction/shrink coefficients
/// (1, 2, 0.5, 0.5), probes clamped into the search box.
template <typename Fn>
EstimationResult nelder_mead(const Fn& fn, std::vector<double> start_u,
                             const std::vector<SearchBound>& box, const OptimizerOpts& opts,
                             long& evals) {
    const std::size_t dim = start_u.size();
    auto clamp_u = [&](std::vector<double>& u) {
        for (std::size_t i = 0; i < dim; ++i) {
            const double lo = to_search_coord(box[i].lo, box[i]);
            const double hi = to_search_coord(box[i].hi, box[i]);
            u[i] = std::clamp(u[i], lo, hi);
        }
    };
    auto eval_u = [&](const std::vector<double>& u) {
        std::vector<double> x(dim);
        for (std::size_t i = 0; i < dim; ++i) x[i] = from_search_coord(u[i], box[i]);
        return safe_eval(fn, x, evals);
    };

    struct Vertex {
        std::vector<double> u;
        double f;
    };
    std::vector<Vertex> simplex;
    clamp_u(start_u);
    simplex.push_back({start_u, eval_u(start_u)});
    for (std::size_t i = 0; i < dim; ++i) {
        std::vector<double> u = start_u;
        const double lo = to_search_coord(box[i].lo, box[i]);
        const double hi = to_search_coord(box[i].hi, box[i]);
        const double step = 0.05 * (hi - lo);
        u[i] = u[i] + step <= hi ? u[i] + step : u[i] - step;
        clamp_u(u);
        simplex.push_back({u, eval_u(u)});
    }

    auto order = [&] {
        std::sort(simplex.begin(), simplex.end(),
                  [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
    };
    order();

    bool converged = false;
    while (evals < opts.max_evals) {
        double spread = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            double lo_i = simplex[0].u[i];
            double hi_i = simplex[0].u[i];
            for (const auto& v : simplex) {
                lo_i = std::min(lo_i, v.u[i]);
                hi_i = std::max(hi_i, v.u[i]);
            }
            spread = std::max(spread, hi_i - lo_i);
        }
        if (spread < opts.param_tol) {
            converged = true;
            break;
        }

        std::vector<double> centroid(dim, 0.0);
        for (std::size_t v = 0; v + 1 < simplex.size(); ++v) {
            for (std::size_t i = 0; i < dim; ++i) centroid[i] += simplex[v].u[i];
        }
        for (double& c : centroid) c /= static_cast<double>(dim);

        const Vertex& worst = simplex.back();
        std::vector<double> refl(dim);
        for (std::size_t i = 0; i < dim; ++i) refl[i] = centroid[i] + (centroid[i] - worst.u[i]);
        clamp_u(refl);
        const double f_refl = eval_u(refl);

        if (f_refl < simplex[0].f) {
            std::vector<double> expa(dim);
            for (std::size_t i = 0; i < dim; ++i) {
                expa[i] = centroid[i] + 2.0 * (centroid[i] - worst.u[i]);
            }
            clamp_u(expa);
            const double f_expa = eval_u(expa);
            simplex.back() = f_expa < f_refl ? Vertex{expa, f_expa} : Vertex{refl, f_refl};
        } else if (f_refl < simplex[simplex.size() - 2].f) {
            simplex.back() = {refl, f_refl};
        } else {
            std::vector<double> contr(dim);
            for (std::size_t i = 0; i < dim; ++i) {
                contr[i] = centroid[i] + 0.5 * (worst.u[i] - centroid[i]);
            }
            clamp_u(contr);
            const double f_contr = eval_u(contr);
            if (f_contr < worst.f) {
                simplex.back() = {contr, f_contr};
            } else {
                for (std::size_t v = 1; v < simplex.size(); ++v) {
                    for (std::size_t i = 0; i < dim; ++i) {
                        simplex[v].u[i] = simplex[0].u[i] + 0.5 * (simplex[v].u[i] - simplex[0].u[i]);
                    }
                    simplex[v].f = eval_u(simplex[v].u);
                }
            }
        }
        order();
    }

    EstimationResult r;
    r.theta_hat.resize(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        r.theta_hat[i] = from_search_coord(simplex[0].u[i], box[i]);
    }
    r.objective_at_min = simplex[0].f;
    r.converged = converged;
    r.restarts_used = 1;
    return r;
}

}  // namespace detail

/// Nelder-Mead multi-start: the declared search box is scanned on a coarse
/// grid, and local searches launch from the provided start and from the best
/// grid cell.  Supports one- and two-dimensional boxes.
template <typename Fn>
EstimationResult minimize_simplex(const Fn& fn, std::span<const double> start,
                                  const OptimizerOpts& opts) {
    const std::size_t dim = start.size();
    if (opts.box.size() != dim) throw Error("minimize_simplex needs one SearchBound per axis");
    if (dim < 1 || dim > 2) throw Error("minimize_simplex supports 1- or 2-dimensional searches");

    long evals = 0;
    std::vector<double> grid_best_u;
    double grid_best_f = std::numeric_limits<double>::infinity();
    std::vector<double> grid_best_x;

    const int n = std::max(opts.n_grid, 2);
    std::vector<std::vector<double>> axes(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        const double lo = detail::to_search_coord(opts.box[i].lo, opts.box[i]);
        const double hi = detail::to_search_coord(opts.box[i].hi, opts.box[i]);
        for (int j = 0; j < n; ++j) {
            axes[i].push_back(lo + (hi - lo) * static_cast<double>(j) / (n - 1));
        }
    }
    std::vector<std::size_t> idx(dim, 0);
    while (true) {
        std::vector<double> u(dim);
        std::vector<double> x(dim);
        for (std::size_t i = 0; i < dim; ++i) {
            u[i] = axes[i][idx[i]];
            x[i] = detail::from_search_coord(u[i], opts.box[i]);
        }
        const double f = detail::safe_eval(fn, x, evals);
        if (std::isfinite(f) &&
            detail::prefer_candidate(f, x, grid_best_f, grid_best_x, opts.ref_point)) {
            grid_best_f = f;
            grid_best_u = u;
            grid_best_x = x;
        }
        std::size_t k = 0;
        for (; k < dim; ++k) {
            if (++idx[k] < axes[k].size()) break;
            idx[k] = 0;
        }
        if (k == dim) break;
    }
    if (grid_best_u.empty()) {
        throw AllEvaluationsFailed("objective non-finite on the whole coarse grid");
    }

    std::vector<double> start_u(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        start_u[i] = detail::to_search_coord(start[i], opts.box[i]);
    }

    EstimationResult best = detail::nelder_mead(fn, grid_best_u, opts.box, opts, evals);
    EstimationResult from_start = detail::nelder_mead(fn, start_u, opts.box, opts, evals);
    int restarts = best.restarts_used + from_start.restarts_used;
    if (detail::prefer_candidate(from_start.objective_at_min, from_start.theta_hat,
                                 best.objective_at_min, best.theta_hat, opts.ref_point)) {
        best = from_start;
    }
    for (const auto& seed : opts.extra_starts) {
        if (seed.size() != dim) continue;
        std::vector<double> seed_u(dim);
        for (std::size_t i = 0; i < dim; ++i) {
            seed_u[i] = detail::to_search_coord(std::clamp(seed[i], opts.box[i].lo,
                                                           opts.box[i].hi),
                                                opts.box[i]);
        }
        EstimationResult cand = detail::nelder_mead(fn, seed_u, opts.box, opts, evals);
        ++restarts;
        if (detail::prefer_candidate(cand.objective_at_min, cand.theta_hat,
                                     best.objective_at_min, best.theta_hat, opts.ref_point)) {
            best = cand;
        }
    }
    if (detail::prefer_candidate(grid_best_f, grid_best_x, best.objective_at_min, best.theta_hat,
                                 opts.ref_point)) {
        best.theta_hat = grid_best_x;
        best.objective_at_min = grid_best_f;
    }
    best.restarts_used = restarts;
    best.evaluations = evals;
    return best;
}

// ---------------------------------------------------------------------------
// Contamination sweeps
// ---------------------------------------------------------------------------

/// Contaminant settings for a sweep; the true model is the family's standard
/// member (N(0, sigma_fixed^2), Exp(1), Gamma(t, 1), Binomial(n, 1/2)).
struct ContaminationScenario {
    double mu0 = 5.0;
    double sigma0 = 1.0;
    double rate0 = 10.0;
    int dirac_at = -1;  // binomial point-mass location; -1 means the size n
};

struct SweepPoint {
    double eps = 0.0;
    EstimationResult result;
    std::string status = "ok";  // "ok" or an error tag; failures do not abort the sweep
};

namespace detail {

inline DensityModel sweep_true_model(const FamilySpec& family) {
    switch (family.kind) {
        case FamilySpec::Kind::normal_location: return normal_density(0.0, family.sigma_fixed);
        case FamilySpec::Kind::normal_scale: return normal_density(family.mu_fixed, 1.0);
        case FamilySpec::Kind::normal_location_scale: return normal_density(0.0, 1.0);
        case FamilySpec::Kind::exponential: return exponential_density(1.0);
        case FamilySpec::Kind::gamma_fixed_shape: return gamma_density(family.shape, 1.0);
        case FamilySpec::Kind::binomial_fixed_size: return binomial_density(family.size, 0.5);
        default: throw UnknownScenario("sweeps support univariate families only");
    }
}

inline DensityModel sweep_contaminant(const FamilySpec& family,
                                      const ContaminationScenario& sc) {
    switch (family.kind) {
        case FamilySpec::Kind::normal_location:
        case FamilySpec::Kind::normal_scale:
        case FamilySpec::Kind::normal_location_scale:
            return normal_density(sc.mu0, sc.sigma0);
        case FamilySpec::Kind::exponential: return exponential_density(sc.rate0);
        case FamilySpec::Kind::gamma_fixed_shape: return gamma_density(family.shape, sc.rate0);
        case FamilySpec::Kind::binomial_fixed_size:
            return dirac_contaminant_binomial(family.size,
                                              sc.dirac_at < 0 ? family.size : sc.dirac_at);
        default: throw UnknownScenario("sweeps support univariate families only");
    }
}

inline std::vector<SearchBound> sweep_search_box(const FamilySpec& family) {
    switch (family.kind) {
        case FamilySpec::Kind::normal_location: return {{-20.0, 20.0, false}};
        case FamilySpec::Kind::normal_scale: return {{1e-3, 20.0, true}};
        case FamilySpec::Kind::normal_location_scale:
            return {{-20.0, 20.0, false}, {1e-3, 20.0, true}};
        case FamilySpec::Kind::exponential:
        case FamilySpec::Kind::gamma_fixed_shape: return {{1e-3, 1e3, true}};
        case FamilySpec::Kind::binomial_fixed_size: return {{0.0, 1.0, false}};
        default: throw UnknownScenario("sweeps support univariate families only");
    }
}

/// The contaminant's own parameters, clamped into the box: near and past the
/// breakdown point the minimizer can live in a narrow basin around them.
inline std::vector<std::vector<double>> sweep_extra_starts(const FamilySpec& family,
                                                           const ContaminationScenario& sc,
                                                           const std::vector<SearchBound>& box) {
    switch (family.kind) {
        case FamilySpec::Kind::normal_location: return {{sc.mu0}};
        case FamilySpec::Kind::normal_scale:
            return {{std::clamp(sc.sigma0, box[0].lo, box[0].hi)}};
        case FamilySpec::Kind::normal_location_scale:
            return {{sc.mu0, std::clamp(sc.sigma0, box[1].lo, box[1].hi)}};
        case FamilySpec::Kind::exponential:
        case FamilySpec::Kind::gamma_fixed_shape:
            return {{std::clamp(sc.rate0, box[0].lo, box[0].hi)}};
        case FamilySpec::Kind::binomial_fixed_size: return {{1.0}};
        default: return {};
    }
}

inline std::vector<double> sweep_ref_point(const FamilySpec& family) {
    switch (family.kind) {
        case FamilySpec::Kind::normal_location: return {0.0};
        case FamilySpec::Kind::normal_scale: return {1.0};
        case FamilySpec::Kind::normal_location_scale: return {0.0, 1.0};
        case FamilySpec::Kind::exponential:
        case FamilySpec::Kind::gamma_fixed_shape: return {1.0};
        case FamilySpec::Kind::binomial_fixed_size: return {0.5};
        default: return {};
    }
}

/// Builds the per-eps objective.  The lambda = 0, alpha > 0 normal and
/// exponential cases use the exact closed forms; everything else goes
/// through the generic quadrature/Monte-Carlo objective.
inline std::function<double(std::span<const double>)> make_sweep_objective(
    const DivergenceParams& params, const FamilySpec& family, const ContaminationScenario& sc,
    double eps, const IntegratorHandle& integrator) {
    const bool dpd_slice = params.lambda == 0.0 && params.alpha > kBranchTol;
    switch (family.kind) {
        case FamilySpec::Kind::binomial_fixed_size:
            return [params, n = family.size, eps](std::span<const double> th) {
                return msd_binomial_objective(params, th[0], eps, n);
            };
        case FamilySpec::Kind::normal_location:
            if (dpd_slice && family.sigma_fixed == 1.0) {
                return [a = params.alpha, eps, sc](std::span<const double> th) {
                    return mdpde_normal_objective(a, th[0], 1.0, eps, sc.mu0, sc.sigma0);
                };
            }
            break;
        case FamilySpec::Kind::normal_scale:
            if (dpd_slice && family.mu_fixed == 0.0) {
                return [a = params.alpha, eps, sc](std::span<const double> th) {
                    return mdpde_normal_objective(a, 0.0, th[0], eps, sc.mu0, sc.sigma0);
                };
            }
            break;
        case FamilySpec::Kind::normal_location_scale:
            if (dpd_slice) {
                return [a = params.alpha, eps, sc](std::span<const double> th) {
                    return mdpde_normal_objective(a, th[0], th[1], eps, sc.mu0, sc.sigma0);
                };
            }
            break;
        case FamilySpec::Kind::exponential:
            if (dpd_slice) {
                return [a = params.alpha, eps, sc](std::span<const double> th) {
                    return mdpde_exponential_objective(a, th[0], eps, sc.rate0);
                };
            }
            break;
        default: break;
    }
    ContaminationSpec spec{sweep_true_model(family), sweep_contaminant(family, sc), eps};
    return [params, family, spec, integrator](std::span<const double> th) {
        return msd_objective(params, family, th, spec, integrator);
    };
}

template <typename Fn>
EstimationResult cold_minimize(const Fn& fn, const OptimizerOpts& opts) {
    if (opts.box.size() == 1) {
        return minimize_scalar(fn, opts.box[0].lo, opts.box[0].hi, opts);
    }
    std::vector<double> start = opts.ref_point;
    if (start.size() != opts.box.size()) {
        start.assign(opts.box.size(), 0.0);
        for (std::size_t i = 0; i < opts.box.size(); ++i) {
            start[i] = 0.5 * (opts.box[i].lo + opts.box[i].hi);
        }
    }
    return minimize_simplex(fn, start, opts);
}

/// Local continuation from the previous minimizer: a one-grid-cell bracket
/// refinement (scalar) or a single Nelder-Mead start (simplex).
template <typename Fn>
EstimationResult warm_minimize(const Fn& fn, const std::vector<double>& prev,
                               const OptimizerOpts& opts) {
    long evals = 0;
    if (opts.box.size() == 1) {
        const SearchBound& b = opts.box[0];
        const double u_lo = to_search_coord(b.lo, b);
        const double u_hi = to_search_coord(b.hi, b);
        const double du = (u_hi - u_lo) / std::max(opts.n_grid - 1, 2);
        const double u0 = to_search_coord(prev[0], b);
        EstimationResult r = golden_section(fn, std::max(u_lo, u0 - du),
                                            std::min(u_hi, u0 + du), b, opts, evals);
        r.evaluations = evals;
        return r;
    }
    std::vector<double> start_u(prev.size());
    for (std::size_t i = 0; i < prev.size(); ++i) {
        start_u[i] = to_search_coord(prev[i], opts.box[i]);
    }
    EstimationResult r = nelder_mead(fn, start_u, opts.box, opts, evals);
    r.evaluations = evals;
    return r;
}

}  // namespace detail

/// One estimate per contamination level.  Each grid point runs a fresh
/// grid-restart search and, when available, a continuation search warm-
/// started at the previous minimizer; the two candidates run concurrently
/// and the lower objective wins (ties resolve toward the reference point).
inline std::vector<SweepPoint> sweep(const DivergenceParams& params, const FamilySpec& family,
                                     const ContaminationScenario& scenario,
                                     std::span<const double> eps_grid,
                                     const IntegratorHandle& integrator,
                                     const OptimizerOpts& base_opts = {}) {
    OptimizerOpts opts = base_opts;
    if (opts.box.empty()) opts.box = detail::sweep_search_box(family);
    if (opts.ref_point.empty()) opts.ref_point = detail::sweep_ref_point(family);
    if (opts.extra_starts.empty()) {
        opts.extra_starts = detail::sweep_extra_starts(family, scenario, opts.box);
    }
    if (family.kind == FamilySpec::Kind::binomial_fixed_size && base_opts.n_grid == 64) {
        opts.n_grid = 128;
    }

    std::vector<SweepPoint> out;
    out.reserve(eps_grid.size());
    std::optional<std::vector<double>> prev;
    for (double eps : eps_grid) {
        SweepPoint point;
        point.eps = eps;
        try {
            if (!(eps >= 0.0 && eps <= 1.0)) throw Error("eps outside [0, 1]");
            auto objective = detail::make_sweep_objective(params, family, scenario, eps,
                                                          integrator);
            auto cold_future = std::async(std::launch::async, [&] {
                return detail::cold_minimize(objective, opts);
            });
            std::optional<EstimationResult> warm;
            if (prev) {
                warm = detail::warm_minimize(objective, *prev, opts);
            }
            EstimationResult cold = cold_future.get();
            EstimationResult chosen = cold;
            if (warm) {
                chosen.restarts_used += warm->restarts_used;
                chosen.evaluations += warm->evaluations;
                if (detail::prefer_candidate(warm->objective_at_min, warm->theta_hat,
                                             cold.objective_at_min, cold.theta_hat,
                                             opts.ref_point)) {
                    chosen.theta_hat = warm->theta_hat;
                    chosen.objective_at_min = warm->objective_at_min;
                    chosen.converged = warm->converged;
                }
            }
            point.result = chosen;
            prev = chosen.theta_hat;
        } catch (const Error& e) {
            point.status = std::string("error: ") + e.what();
            prev.reset();
        }
        out.push_back(std::move(point));
    }
    return out;
}

}  // namespace sdiv
