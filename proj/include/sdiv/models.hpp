#pragma once

/// Parametric model families: univariate normal (location, scale, both),
/// isotropic multivariate normal (location or scatter), exponential, gamma
/// with fixed shape, and binomial with fixed size.  Each instantiated density
/// carries a closed-form power mass where one exists, a direct sampler where
/// practical, and feature abscissae for quadrature hinting.

#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "sdiv/density.hpp"
#include "sdiv/errors.hpp"

namespace sdiv {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// One coordinate of a parameter-space box.  Open boundaries are excluded
/// values (scale parameters at 0); closed boundaries are attainable
/// (binomial success probability at 0 or 1).
struct ParamBound {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    bool lo_open = true;
    bool hi_open = true;

    bool admits(double v) const {
        if (lo_open ? !(v > lo) : !(v >= lo)) return false;
        if (hi_open ? !(v < hi) : !(v <= hi)) return false;
        return true;
    }
};

struct FamilySpec {
    enum class Kind {
        normal_location,        // N(theta, sigma_fixed^2)
        normal_scale,           // N(mu_fixed, theta^2)
        normal_location_scale,  // N(theta_0, theta_1^2)
        mv_normal_location_iso, // N_p(theta, sigma_fixed^2 I), theta a p-vector
        mv_normal_scatter_iso,  // N_p(mu_fixed * 1_p, theta^2 I)
        exponential,            // rate theta
        gamma_fixed_shape,      // shape t, rate theta
        binomial_fixed_size     // Binomial(size, theta)
    };

    Kind kind = Kind::normal_location;
    double sigma_fixed = 1.0;  // normal_location, mv location
    double mu_fixed = 0.0;     // normal_scale, mv scatter (each coordinate)
    int dim = 1;               // multivariate families
    double shape = 1.0;        // gamma
    int size = 12;             // binomial

    static FamilySpec normal_location(double sigma = 1.0) {
        FamilySpec s;
        s.kind = Kind::normal_location;
        s.sigma_fixed = sigma;
        return s;
    }
    static FamilySpec normal_scale(double mu = 0.0) {
        FamilySpec s;
        s.kind = Kind::normal_scale;
        s.mu_fixed = mu;
        return s;
    }
    static FamilySpec normal_location_scale() {
        FamilySpec s;
        s.kind = Kind::normal_location_scale;
        return s;
    }
    static FamilySpec mv_normal_location_iso(int dim, double sigma = 1.0) {
        FamilySpec s;
        s.kind = Kind::mv_normal_location_iso;
        s.dim = dim;
        s.sigma_fixed = sigma;
        return s;
    }
    static FamilySpec mv_normal_scatter_iso(int dim, double mu = 0.0) {
        FamilySpec s;
        s.kind = Kind::mv_normal_scatter_iso;
        s.dim = dim;
        s.mu_fixed = mu;
        return s;
    }
    static FamilySpec exponential() {
        FamilySpec s;
        s.kind = Kind::exponential;
        return s;
    }
    static FamilySpec gamma_fixed_shape(double t) {
        if (!(t > 0.0)) throw BoundaryParameter("gamma shape must be positive");
        FamilySpec s;
        s.kind = Kind::gamma_fixed_shape;
        s.shape = t;
        return s;
    }
    static FamilySpec binomial_fixed_size(int n = 12) {
        FamilySpec s;
        s.kind = Kind::binomial_fixed_size;
        s.size = n;
        return s;
    }

    int param_dim() const {
        switch (kind) {
            case Kind::normal_location_scale: return 2;
            case Kind::mv_normal_location_iso: return dim;
            default: return 1;
        }
    }

    std::vector<ParamBound> param_space() const {
        const double inf = std::numeric_limits<double>::infinity();
        const ParamBound whole_line{-inf, inf, true, true};
        const ParamBound positive{0.0, inf, true, true};
        switch (kind) {
            case Kind::normal_location: return {whole_line};
            case Kind::normal_scale: return {positive};
            case Kind::normal_location_scale: return {whole_line, positive};
            case Kind::mv_normal_location_iso:
                return std::vector<ParamBound>(static_cast<std::size_t>(dim), whole_line);
            case Kind::mv_normal_scatter_iso: return {positive};
            case Kind::exponential: return {positive};
            case Kind::gamma_fixed_shape: return {positive};
            case Kind::binomial_fixed_size: return {ParamBound{0.0, 1.0, false, false}};
        }
        return {};
    }
};

namespace detail {

inline double normal_pdf(double x, double mu, double sigma) {
    const double z = (x - mu) / sigma;
    return std::exp(-0.5 * z * z) / (sigma * std::sqrt(kTwoPi));
}

/// integral of N(mu, sigma^2)^beta = (2 pi)^{(1-beta)/2} sigma^{1-beta} beta^{-1/2}
inline double normal_power_mass(double sigma, double beta) {
    if (!(beta > 0.0)) throw MassDiverges("normal power mass needs beta > 0");
    return std::pow(kTwoPi, 0.5 * (1.0 - beta)) * std::pow(sigma, 1.0 - beta) /
           std::sqrt(beta);
}

// Bracket out to 8 sigma: the 4..8 sigma band still carries ~6e-5 of mass,
// and on transform-compressed panels a ledge that thin is invisible to the
// error estimator unless it has panels of its own.
inline std::vector<double> normal_features(double mu, double sigma) {
    return {mu - 8.0 * sigma, mu - 4.0 * sigma, mu - sigma, mu,
            mu + sigma,       mu + 4.0 * sigma, mu + 8.0 * sigma};
}

}  // namespace detail

inline DensityModel normal_density(double mu, double sigma) {
    if (!(sigma > 0.0)) throw BoundaryParameter("normal sigma must be positive");
    DensityModel d;
    d.eval = [mu, sigma](double x) { return detail::normal_pdf(x, mu, sigma); };
    d.log_eval = [mu, sigma, c = -std::log(sigma) - 0.5 * std::log(kTwoPi)](double x) {
        const double z = (x - mu) / sigma;
        return c - 0.5 * z * z;
    };
    d.support = Support::real_line();
    d.closed_mass = [sigma](double beta) { return detail::normal_power_mass(sigma, beta); };
    d.sampler = [mu, sigma](Xoshiro256& rng) { return mu + sigma * rng.next_normal(); };
    d.features = detail::normal_features(mu, sigma);
    return d;
}

inline DensityModel exponential_density(double rate) {
    if (!(rate > 0.0)) throw BoundaryParameter("exponential rate must be positive");
    DensityModel d;
    d.eval = [rate](double x) { return x < 0.0 ? 0.0 : rate * std::exp(-rate * x); };
    d.log_eval = [rate, lr = std::log(rate)](double x) {
        return x < 0.0 ? -std::numeric_limits<double>::infinity() : lr - rate * x;
    };
    d.support = Support::half_line_positive();
    // integral of (rate e^{-rate x})^beta = rate^{beta-1} / beta
    d.closed_mass = [rate](double beta) {
        if (!(beta > 0.0)) throw MassDiverges("exponential power mass needs beta > 0");
        return std::pow(rate, beta - 1.0) / beta;
    };
    d.sampler = [rate](Xoshiro256& rng) { return rng.next_exponential(rate); };
    d.features = {0.5 / rate, 1.0 / rate, 4.0 / rate};
    return d;
}

/// Power mass of a Gamma(shape t, rate) density: integral of f^{1+alpha}.
/// Diverges at the origin when (1+alpha)(t-1) + 1 <= 0.
inline double gamma_mass(double t, double rate, double alpha) {
    if (!(t > 0.0) || !(rate > 0.0)) throw BoundaryParameter("gamma needs t > 0, rate > 0");
    if (alpha < 0.0) throw OutOfFamily("gamma_mass requires alpha >= 0");
    const double beta = 1.0 + alpha;
    const double s = (t - 1.0) * beta + 1.0;
    if (s <= 0.0) {
        throw MassDiverges("gamma power mass diverges: (1+alpha)(t-1)+1 = " + std::to_string(s));
    }
    return std::pow(rate, alpha) *
           std::exp(std::lgamma(s) - beta * std::lgamma(t) - s * std::log(beta));
}

inline DensityModel gamma_density(double t, double rate) {
    if (!(t > 0.0) || !(rate > 0.0)) throw BoundaryParameter("gamma needs t > 0, rate > 0");
    const double log_norm = t * std::log(rate) - std::lgamma(t);
    DensityModel d;
    d.eval = [t, rate, log_norm](double x) {
        if (x < 0.0) return 0.0;
        if (x == 0.0) return t > 1.0 ? 0.0 : (t == 1.0 ? rate : std::numeric_limits<double>::infinity());
        return std::exp(log_norm + (t - 1.0) * std::log(x) - rate * x);
    };
    d.log_eval = [t, rate, log_norm](double x) {
        const double kInf = std::numeric_limits<double>::infinity();
        if (x < 0.0) return -kInf;
        if (x == 0.0) return t > 1.0 ? -kInf : (t == 1.0 ? std::log(rate) : kInf);
        return log_norm + (t - 1.0) * std::log(x) - rate * x;
    };
    d.support = Support::half_line_positive();
    d.closed_mass = [t, rate](double beta) {
        const double s = (t - 1.0) * beta + 1.0;
        if (s <= 0.0) throw MassDiverges("gamma power mass diverges");
        return std::pow(rate, beta - 1.0) *
               std::exp(std::lgamma(s) - beta * std::lgamma(t) - s * std::log(beta));
    };
    const double mode = t > 1.0 ? (t - 1.0) / rate : 0.1 / rate;
    d.features = {0.25 * mode, mode, 4.0 * (t + 1.0) / rate};
    return d;
}

/// C(n, x) theta^x (1-theta)^{n-x} with the 0^0 = 1 convention at the
/// closed boundaries theta = 0 and theta = 1.
inline double binomial_pmf(int n, double theta, int x) {
    if (x < 0 || x > n) throw Error("binomial_pmf: x outside 0..n");
    if (!(theta >= 0.0 && theta <= 1.0)) throw BoundaryParameter("theta must lie in [0, 1]");
    if (theta == 0.0) return x == 0 ? 1.0 : 0.0;
    if (theta == 1.0) return x == n ? 1.0 : 0.0;
    double coeff = 1.0;
    for (int i = 1; i <= x; ++i) {
        coeff *= static_cast<double>(n - x + i) / static_cast<double>(i);
    }
    return coeff * std::pow(theta, x) * std::pow(1.0 - theta, n - x);
}

inline DensityModel binomial_density(int n, double theta) {
    DensityModel d;
    d.eval = [n, theta](double x) {
        const int xi = static_cast<int>(std::lround(x));
        if (xi < 0 || xi > n) return 0.0;
        return binomial_pmf(n, theta, xi);
    };
    d.log_eval = [n, theta](double x) {
        const int xi = static_cast<int>(std::lround(x));
        const double p = (xi < 0 || xi > n) ? 0.0 : binomial_pmf(n, theta, xi);
        return p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity();
    };
    d.support = Support::integer_range(0, n);
    d.closed_mass = [n, theta](double beta) {
        double total = 0.0;
        for (int x = 0; x <= n; ++x) {
            const double p = binomial_pmf(n, theta, x);
            if (p > 0.0) total += std::pow(p, beta);
        }
        return total;
    };
    return d;
}

/// Dirac point mass at `at` on the integer support 0..n.
inline DensityModel dirac_contaminant_binomial(int n, int at) {
    if (at < 0 || at > n) throw Error("dirac point outside 0..n");
    DensityModel d;
    d.eval = [at](double x) {
        const int xi = static_cast<int>(std::lround(x));
        return xi == at ? 1.0 : 0.0;
    };
    d.log_eval = [at](double x) {
        const int xi = static_cast<int>(std::lround(x));
        return xi == at ? 0.0 : -std::numeric_limits<double>::infinity();
    };
    d.support = Support::integer_range(0, n);
    d.closed_mass = [](double) { return 1.0; };
    return d;
}

inline DensityModel mv_normal_iso_density(int dim, std::vector<double> mu, double sigma) {
    if (!(sigma > 0.0)) throw BoundaryParameter("mv normal sigma must be positive");
    if (static_cast<int>(mu.size()) != dim) throw Error("mean dimension mismatch");
    DensityModel d;
    const double log_norm = -0.5 * dim * std::log(kTwoPi) - dim * std::log(sigma);
    d.eval_nd = [mu = std::move(mu), sigma, log_norm](std::span<const double> x) {
        double q = 0.0;
        for (std::size_t i = 0; i < mu.size(); ++i) {
            const double z = (x[i] - mu[i]) / sigma;
            q += z * z;
        }
        return std::exp(log_norm - 0.5 * q);
    };
    d.eval = [](double) -> double {
        throw Error("multivariate density requires a vector argument");
    };
    d.support = Support::real_space(dim);
    d.closed_mass = [dim, sigma](double beta) {
        return std::pow(detail::normal_power_mass(sigma, beta), dim);
    };
    d.features = {-4.0 * sigma, 0.0, 4.0 * sigma};
    return d;
}

/// Instantiates f_theta for a family.  Parameters must lie strictly inside
/// open boundaries; the binomial's closed [0, 1] admits its endpoints.
inline DensityModel density_at(const FamilySpec& spec, std::span<const double> theta) {
    if (static_cast<int>(theta.size()) != spec.param_dim()) {
        throw Error("parameter dimension mismatch for family");
    }
    const auto box = spec.param_space();
    for (std::size_t i = 0; i < theta.size(); ++i) {
        if (!box[i].admits(theta[i])) {
            throw BoundaryParameter("parameter " + std::to_string(theta[i]) +
                                    " lies on or outside an open boundary");
        }
    }
    switch (spec.kind) {
        case FamilySpec::Kind::normal_location:
            return normal_density(theta[0], spec.sigma_fixed);
        case FamilySpec::Kind::normal_scale:
            return normal_density(spec.mu_fixed, theta[0]);
        case FamilySpec::Kind::normal_location_scale:
            return normal_density(theta[0], theta[1]);
        case FamilySpec::Kind::mv_normal_location_iso:
            return mv_normal_iso_density(spec.dim,
                                         std::vector<double>(theta.begin(), theta.end()),
                                         spec.sigma_fixed);
        case FamilySpec::Kind::mv_normal_scatter_iso:
            return mv_normal_iso_density(
                spec.dim, std::vector<double>(static_cast<std::size_t>(spec.dim), spec.mu_fixed),
                theta[0]);
        case FamilySpec::Kind::exponential:
            return exponential_density(theta[0]);
        case FamilySpec::Kind::gamma_fixed_shape:
            return gamma_density(spec.shape, theta[0]);
        case FamilySpec::Kind::binomial_fixed_size:
            return binomial_density(spec.size, theta[0]);
    }
    throw Error("unreachable family kind");
}

inline DensityModel density_at(const FamilySpec& spec, double theta) {
    const std::vector<double> packed{theta};
    return density_at(spec, std::span<const double>(packed));
}

/// The eps-contamination mixture (1-eps) g + eps k.
struct ContaminationSpec {
    DensityModel true_model;
    DensityModel contaminant;
    double eps = 0.0;
};

inline DensityModel mixture(const ContaminationSpec& spec) {
    if (!spec.true_model.support.compatible_with(spec.contaminant.support)) {
        throw DomainMismatch("mixture components have incompatible supports");
    }
    if (!(spec.eps >= 0.0 && spec.eps <= 1.0)) throw Error("eps must lie in [0, 1]");
    const double eps = spec.eps;
    DensityModel d;
    d.support = spec.true_model.support;
    d.eval = [g = spec.true_model.eval, k = spec.contaminant.eval, eps](double x) {
        return (1.0 - eps) * g(x) + eps * k(x);
    };
    if (spec.true_model.eval_nd && spec.contaminant.eval_nd) {
        d.eval_nd = [g = spec.true_model.eval_nd, k = spec.contaminant.eval_nd,
                     eps](std::span<const double> x) {
            return (1.0 - eps) * g(x) + eps * k(x);
        };
    }
    // log-sum-exp keeps mixture tails meaningful far past component underflow
    d.log_eval = [g = spec.true_model, k = spec.contaminant, eps](double x) {
        const double kInf = std::numeric_limits<double>::infinity();
        const double lg = eps < 1.0 ? std::log1p(-eps) + g.log_at(x) : -kInf;
        const double lk = eps > 0.0 ? std::log(eps) + k.log_at(x) : -kInf;
        const double m = std::max(lg, lk);
        if (m == -kInf) return -kInf;
        return m + std::log(std::exp(lg - m) + std::exp(lk - m));
    };
    if (spec.true_model.has_sampler() && spec.contaminant.has_sampler()) {
        d.sampler = [g = spec.true_model.sampler, k = spec.contaminant.sampler,
                     eps](Xoshiro256& rng) {
            return rng.next_unit() <= eps ? k(rng) : g(rng);
        };
    }
    d.features = spec.true_model.features;
    d.features.insert(d.features.end(), spec.contaminant.features.begin(),
                      spec.contaminant.features.end());
    return d;
}

}  // namespace sdiv
