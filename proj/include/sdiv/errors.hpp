#pragma once

#include <stdexcept>
#include <string>

namespace sdiv {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// (alpha, lambda) outside the supported region: A or B negative beyond tolerance.
struct OutOfFamily : Error {
    using Error::Error;
};

/// Quadrature could not reach the requested tolerance within its subdivision budget,
/// or the integrand was non-finite in the interior of the domain.
struct IntegrationFailure : Error {
    using Error::Error;
};

/// Integrand diverged to +infinity at an interior point.  Callers that evaluate
/// divergences may translate this into a +infinity result.
struct IntegrandDiverges : IntegrationFailure {
    using IntegrationFailure::IntegrationFailure;
};

/// Two densities do not share a support type.
struct DomainMismatch : Error {
    using Error::Error;
};

/// Operation not defined for the parameter branch (A=0 / B=0 limits).
struct BranchUnsupported : Error {
    using Error::Error;
};

/// Power-mass integral diverges for the requested exponent.
struct MassDiverges : Error {
    using Error::Error;
};

/// Parameter lies on or outside an open boundary of the parameter space.
struct BoundaryParameter : Error {
    using Error::Error;
};

/// Density has no direct sampler but one is required.
struct SamplerUnavailable : Error {
    using Error::Error;
};

/// Optimizer found no finite objective value anywhere.
struct AllEvaluationsFailed : Error {
    using Error::Error;
};

/// Hypotheses of a theorem-backed check are not met; the check is vacuous.
struct PreconditionViolated : Error {
    using Error::Error;
};

/// Limit scenario not recognized for the given family/parameters.
struct UnknownScenario : Error {
    using Error::Error;
};

/// Could not read or write a file.
struct IOFailure : Error {
    using Error::Error;
};

}  // namespace sdiv
