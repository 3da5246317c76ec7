#pragma once

/// Evaluable densities and their supports.
///
/// A DensityModel bundles a pointwise density (or pmf) with a support
/// descriptor, an optional closed-form power mass beta -> integral of f^beta,
/// an optional direct sampler, and "feature" abscissae (modes, spike
/// locations) that quadrature uses as subdivision hints so that narrow
/// components are never stepped over.

#include <cmath>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "sdiv/errors.hpp"
#include "sdiv/rng.hpp"

namespace sdiv {

struct Support {
    enum class Kind { real_line, half_line_positive, integer_range, real_space };

    Kind kind = Kind::real_line;
    int lo = 0;   // integer_range only
    int hi = 0;   // integer_range only
    int dim = 1;  // real_space only

    static Support real_line() { return {}; }
    static Support half_line_positive() { return {Kind::half_line_positive, 0, 0, 1}; }
    static Support integer_range(int lo, int hi) { return {Kind::integer_range, lo, hi, 1}; }
    static Support real_space(int dim) { return {Kind::real_space, 0, 0, dim}; }

    bool is_discrete() const { return kind == Kind::integer_range; }
    int dimension() const { return kind == Kind::real_space ? dim : 1; }

    bool compatible_with(const Support& other) const {
        if (kind != other.kind) return false;
        if (kind == Kind::integer_range) return lo == other.lo && hi == other.hi;
        if (kind == Kind::real_space) return dim == other.dim;
        return true;
    }
};

struct DensityModel {
    using Eval1 = std::function<double(double)>;
    using EvalN = std::function<double(std::span<const double>)>;
    using MassFn = std::function<double(double)>;  // beta -> integral of f^beta
    using Sampler = std::function<double(Xoshiro256&)>;

    Eval1 eval;              // univariate / discrete evaluation
    Eval1 log_eval;          // log density; lets tail terms dodge underflow
    EvalN eval_nd;           // real_space evaluation (dim > 1)
    Support support;
    MassFn closed_mass;      // empty when no closed form is known
    Sampler sampler;         // empty when direct sampling is unavailable
    std::vector<double> features;  // quadrature subdivision hints (x locations)

    double operator()(double x) const { return eval(x); }
    double operator()(std::span<const double> x) const {
        return support.dimension() > 1 ? eval_nd(x) : eval(x[0]);
    }

    bool has_closed_mass() const { return static_cast<bool>(closed_mass); }
    bool has_sampler() const { return static_cast<bool>(sampler); }

    double log_at(double x) const { return log_eval ? log_eval(x) : std::log(eval(x)); }

    double sample(Xoshiro256& rng) const {
        if (!sampler) throw SamplerUnavailable("density has no direct sampler");
        return sampler(rng);
    }
};

}  // namespace sdiv
