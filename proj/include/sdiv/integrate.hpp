#pragma once

/// Numerical integration backends behind one handle.
///
/// Adaptive quadrature: 15-point Gauss-Kronrod panels with globally adaptive
/// bisection of the worst panel.  Semi-infinite and infinite domains are
/// mapped onto finite intervals by rational transformations
///     (0, inf):  x = t/(1-t),    t in (0,1)
///     R:         x = t/(1-t^2),  t in (-1,1)
/// so tails are integrated, never truncated.  Exhausting the subdivision
/// budget raises IntegrationFailure; there is no best-effort return, because
/// divergence values feed inequality checks where bias flips conclusions.
///
/// Monte Carlo: seeded xoshiro256++ sample means with reported standard
/// error.  Identical (seed, n_samples, tag) reproduce bit-identical results.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <queue>
#include <span>
#include <vector>

#include "sdiv/density.hpp"
#include "sdiv/errors.hpp"
#include "sdiv/params.hpp"
#include "sdiv/rng.hpp"

namespace sdiv {

struct IntegralResult {
    double value = 0.0;
    double err_estimate = 0.0;
};

struct McResult {
    double value = 0.0;
    double std_err = 0.0;
};

class IntegratorHandle {
  public:
    enum class Method { adaptive_quadrature, monte_carlo };

    static IntegratorHandle adaptive_quadrature(double rel_tol = 1e-9, double abs_tol = 1e-12,
                                                int max_subdivisions = 200) {
        IntegratorHandle h;
        h.method_ = Method::adaptive_quadrature;
        h.rel_tol_ = rel_tol;
        h.abs_tol_ = abs_tol;
        h.max_subdivisions_ = max_subdivisions;
        return h;
    }

    static IntegratorHandle monte_carlo(int n_samples = 10000, std::uint64_t seed = 0) {
        IntegratorHandle h;
        h.method_ = Method::monte_carlo;
        h.n_samples_ = n_samples;
        h.seed_ = seed;
        return h;
    }

    Method method() const { return method_; }
    bool is_monte_carlo() const { return method_ == Method::monte_carlo; }
    double rel_tol() const { return rel_tol_; }
    double abs_tol() const { return abs_tol_; }
    int max_subdivisions() const { return max_subdivisions_; }
    int n_samples() const { return n_samples_; }
    std::uint64_t seed() const { return seed_; }

  private:
    Method method_ = Method::adaptive_quadrature;
    double rel_tol_ = 1e-9;
    double abs_tol_ = 1e-12;
    int max_subdivisions_ = 200;
    int n_samples_ = 10000;
    std::uint64_t seed_ = 0;
};

namespace detail {

// 15-point Kronrod / 7-point Gauss pair (QUADPACK dqk15 constants).
inline constexpr double kGk15Nodes[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr double kGk15WeightsK[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

inline constexpr double kGauss7Weights[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double lo = 0.0;
    double hi = 0.0;
    double value = 0.0;
    double err = 0.0;
};

inline void check_node_value(double v) {
    if (std::isfinite(v)) return;
    if (v == std::numeric_limits<double>::infinity()) {
        throw IntegrandDiverges("integrand is +infinity at an interior node");
    }
    throw IntegrationFailure("integrand non-finite at an interior node");
}

template <typename Fn>
Panel gk15_panel(const Fn& fn, double lo, double hi) {
    const double center = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);

    const double fc = fn(center);
    check_node_value(fc);

    double resg = kGauss7Weights[3] * fc;
    double resk = kGk15WeightsK[7] * fc;
    double resabs = kGk15WeightsK[7] * std::abs(fc);

    double fv1[7];
    double fv2[7];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kGk15Nodes[j];
        fv1[j] = fn(center - dx);
        fv2[j] = fn(center + dx);
        check_node_value(fv1[j]);
        check_node_value(fv2[j]);
        const double fsum = fv1[j] + fv2[j];
        resk += kGk15WeightsK[j] * fsum;
        resabs += kGk15WeightsK[j] * (std::abs(fv1[j]) + std::abs(fv2[j]));
        if (j % 2 == 1) resg += kGauss7Weights[j / 2] * fsum;
    }

    const double reskh = resk * 0.5;
    double resasc = kGk15WeightsK[7] * std::abs(fc - reskh);
    for (int j = 0; j < 7; ++j) {
        resasc += kGk15WeightsK[j] * (std::abs(fv1[j] - reskh) + std::abs(fv2[j] - reskh));
    }

    Panel p;
    p.lo = lo;
    p.hi = hi;
    p.value = resk * half;
    resabs *= std::abs(half);
    resasc *= std::abs(half);

    double err = std::abs((resk - resg) * half);
    if (resasc != 0.0 && err != 0.0) {
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    }
    const double eps50 = 50.0 * std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / eps50) {
        err = std::max(eps50 * resabs, err);
    }
    p.err = err;
    return p;
}

/// Globally adaptive quadrature over a finite interval, bisecting the
/// largest-error panel until the tolerance is met or the budget is spent.
/// `cuts` are interior abscissae forced to be panel boundaries.
template <typename Fn>
IntegralResult adaptive_on_interval(const Fn& fn, double lo, double hi,
                                    std::vector<double> cuts, const IntegratorHandle& opts,
                                    int min_initial_panels = 16) {
    // Initial boundaries: forced cuts plus a uniform grid.
    cuts.push_back(lo);
    cuts.push_back(hi);
    for (int i = 1; i < min_initial_panels; ++i) {
        cuts.push_back(lo + (hi - lo) * static_cast<double>(i) / min_initial_panels);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    while (!cuts.empty() && cuts.front() < lo) cuts.erase(cuts.begin());
    while (!cuts.empty() && cuts.back() > hi) cuts.pop_back();

    auto worse = [](const Panel& a, const Panel& b) { return a.err < b.err; };
    std::priority_queue<Panel, std::vector<Panel>, decltype(worse)> queue(worse);

    double total_value = 0.0;
    double total_err = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        Panel p = gk15_panel(fn, cuts[i], cuts[i + 1]);
        total_value += p.value;
        total_err += p.err;
        queue.push(p);
    }

    int splits = 0;
    while (total_err > std::max(opts.abs_tol(), opts.rel_tol() * std::abs(total_value))) {
        if (splits >= opts.max_subdivisions()) {
            throw IntegrationFailure("quadrature budget of " +
                                     std::to_string(opts.max_subdivisions()) +
                                     " subdivisions exhausted; error estimate " +
                                     std::to_string(total_err));
        }
        Panel worst = queue.top();
        queue.pop();
        const double mid = 0.5 * (worst.lo + worst.hi);
        if (!(mid > worst.lo && mid < worst.hi)) {
            throw IntegrationFailure("quadrature panel no longer splittable at machine precision");
        }
        Panel left = gk15_panel(fn, worst.lo, mid);
        Panel right = gk15_panel(fn, mid, worst.hi);
        total_value += left.value + right.value - worst.value;
        total_err += left.err + right.err - worst.err;
        queue.push(left);
        queue.push(right);
        ++splits;
    }
    return {total_value, total_err};
}

inline double half_line_to_unit(double x) { return x / (1.0 + x); }

inline double real_line_to_unit(double x) {
    if (x == 0.0) return 0.0;
    return (-1.0 + std::sqrt(1.0 + 4.0 * x * x)) / (2.0 * x);
}

template <typename Fn>
IntegralResult integrate_half_line(const Fn& fn, std::span<const double> hints,
                                   const IntegratorHandle& opts) {
    auto tfn = [&fn](double t) {
        const double om = 1.0 - t;
        const double x = t / om;
        const double fx = fn(x);
        if (fx == 0.0) return 0.0;  // avoid 0 * inf at extreme panels
        return fx / (om * om);
    };
    std::vector<double> cuts;
    for (double h : hints) {
        if (h > 0.0 && std::isfinite(h)) cuts.push_back(half_line_to_unit(h));
    }
    return adaptive_on_interval(tfn, 0.0, 1.0, std::move(cuts), opts);
}

template <typename Fn>
IntegralResult integrate_real_line(const Fn& fn, std::span<const double> hints,
                                   const IntegratorHandle& opts) {
    auto tfn = [&fn](double t) {
        const double om = 1.0 - t * t;
        const double x = t / om;
        const double fx = fn(x);
        if (fx == 0.0) return 0.0;
        return fx * (1.0 + t * t) / (om * om);
    };
    std::vector<double> cuts;
    for (double h : hints) {
        if (std::isfinite(h)) cuts.push_back(real_line_to_unit(h));
    }
    return adaptive_on_interval(tfn, -1.0, 1.0, std::move(cuts), opts);
}

}  // namespace detail

/// Sum of fn over an integer support.  +infinity terms propagate to a
/// +infinity total; conflicting infinities are a logic error upstream.
template <typename Fn>
IntegralResult sum_over_integers(const Fn& fn, int lo, int hi) {
    double total = 0.0;
    for (int x = lo; x <= hi; ++x) {
        const double v = fn(static_cast<double>(x));
        if (std::isnan(v)) throw IntegrationFailure("summand is NaN");
        total += v;
    }
    return {total, 0.0};
}

/// Integrates a scalar integrand over a support descriptor.  `hints` are
/// x-locations of narrow features; they become panel boundaries so adaptive
/// refinement cannot miss spikes between nodes.
template <typename Fn>
IntegralResult integrate(const IntegratorHandle& handle, const Fn& fn, const Support& domain,
                         std::span<const double> hints = {}) {
    if (domain.kind == Support::Kind::integer_range) {
        return sum_over_integers(fn, domain.lo, domain.hi);
    }
    if (handle.is_monte_carlo()) {
        throw SamplerUnavailable(
            "monte_carlo handle cannot integrate a bare integrand; use mc_expectation with a "
            "sampling density");
    }
    switch (domain.kind) {
        case Support::Kind::half_line_positive:
            return detail::integrate_half_line(fn, hints, handle);
        case Support::Kind::real_line:
            return detail::integrate_real_line(fn, hints, handle);
        default:
            throw IntegrationFailure("scalar integrate() requires a one-dimensional support");
    }
}

/// Integrates over a finite interval [lo, hi].
template <typename Fn>
IntegralResult integrate_interval(const IntegratorHandle& handle, const Fn& fn, double lo,
                                  double hi, std::span<const double> hints = {}) {
    std::vector<double> cuts(hints.begin(), hints.end());
    return detail::adaptive_on_interval(fn, lo, hi, std::move(cuts), handle);
}

/// Tensor-product (iterated) quadrature over R^dim, dim <= 3.  Scalar hints
/// are applied on every axis, which matches the isotropic use cases here.
inline IntegralResult integrate_nd(const IntegratorHandle& handle,
                                   const std::function<double(std::span<const double>)>& fn,
                                   int dim, std::span<const double> hints = {}) {
    if (handle.is_monte_carlo()) {
        throw SamplerUnavailable("monte_carlo handle cannot integrate a bare integrand");
    }
    if (dim < 1 || dim > 3) {
        throw IntegrationFailure("tensor-product quadrature supports dim <= 3; use Monte Carlo");
    }
    if (dim == 1) {
        auto fn1 = [&fn](double x) { return fn(std::span<const double>(&x, 1)); };
        return detail::integrate_real_line(fn1, hints, handle);
    }
    // Inner integrals run at a tighter tolerance so the outer estimate stays honest.
    IntegratorHandle inner = IntegratorHandle::adaptive_quadrature(
        handle.rel_tol() * 0.1, handle.abs_tol() * 0.1, handle.max_subdivisions());
    std::vector<double> point(static_cast<std::size_t>(dim), 0.0);
    std::function<double(int)> level = [&](int k) -> double {
        auto fn1 = [&](double x) {
            point[static_cast<std::size_t>(k)] = x;
            if (k + 1 == dim) return fn(point);
            return level(k + 1);
        };
        return detail::integrate_real_line(fn1, hints, inner).value;
    };
    auto outer = [&](double x) {
        point[0] = x;
        return level(1);
    };
    return detail::integrate_real_line(outer, hints, handle);
}

/// Sample mean of `integrand` under draws from `weight_density`.
/// std_err is the sample standard deviation divided by sqrt(n).
template <typename Fn>
McResult mc_expectation(const IntegratorHandle& handle, const DensityModel& weight_density,
                        const Fn& integrand, std::uint64_t tag = 0) {
    if (!handle.is_monte_carlo()) {
        throw Error("mc_expectation requires a monte_carlo handle");
    }
    if (!weight_density.has_sampler()) {
        throw SamplerUnavailable("weight density has no direct sampler");
    }
    Xoshiro256 rng = make_stream(handle.seed(), tag);
    const int n = handle.n_samples();
    double mean = 0.0;
    double m2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = weight_density.sample(rng);
        const double v = integrand(x);
        const double delta = v - mean;
        mean += delta / static_cast<double>(i + 1);
        m2 += delta * (v - mean);
    }
    const double var = n > 1 ? m2 / static_cast<double>(n - 1) : 0.0;
    return {mean, std::sqrt(std::max(var, 0.0) / static_cast<double>(n))};
}

}  // namespace sdiv
