#pragma once

/// Tuning parameters of the S-divergence family.
///
/// The family is indexed by (alpha, lambda) with derived exponents
///     A = 1 + lambda (1 - alpha),   B = alpha - lambda (1 - alpha),
/// so A + B = 1 + alpha.  The generic divergence formula needs A and B
/// nonzero; the A = 0 and B = 0 cases are served by continuous limit
/// branches.  Only the subfamily with A >= 0 and B >= 0 is supported, i.e.
/// lambda in [-1/(1-alpha), alpha/(1-alpha)].

#include <cmath>
#include <string>

#include "sdiv/errors.hpp"

namespace sdiv {

/// Exact-zero detection for the limit branches.  The limits exist
/// analytically only at A = 0 / B = 0; this tolerance absorbs rounding in
/// 1 + lambda(1-alpha) while keeping 1/A evaluations far from blowup.
inline constexpr double kBranchTol = 1e-12;

/// Slack accepted on "value >= 0" style numerical postconditions.
inline constexpr double kNumTol = 1e-10;

enum class Branch { generic, a_limit, b_limit };

inline const char* branch_name(Branch b) {
    switch (b) {
        case Branch::a_limit: return "a_limit";
        case Branch::b_limit: return "b_limit";
        default: return "generic";
    }
}

struct DivergenceParams {
    double alpha = 0.0;
    double lambda = 0.0;
    double a_exp = 1.0;
    double b_exp = 0.0;
    Branch branch = Branch::b_limit;

    double one_plus_alpha() const { return 1.0 + alpha; }
};

inline DivergenceParams derive_exponents(double alpha, double lambda) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw OutOfFamily("alpha must lie in [0, 1], got " + std::to_string(alpha));
    }
    const double a = 1.0 + lambda * (1.0 - alpha);
    const double b = alpha - lambda * (1.0 - alpha);
    if (a < -kBranchTol || b < -kBranchTol) {
        throw OutOfFamily("exponents A=" + std::to_string(a) + ", B=" + std::to_string(b) +
                          " leave the supported region (both must be nonnegative)");
    }
    DivergenceParams p;
    p.alpha = alpha;
    p.lambda = lambda;
    p.a_exp = a;
    p.b_exp = b;
    if (std::abs(a) < kBranchTol) {
        p.branch = Branch::a_limit;
    } else if (std::abs(b) < kBranchTol) {
        p.branch = Branch::b_limit;
    } else {
        p.branch = Branch::generic;
    }
    return p;
}

}  // namespace sdiv
