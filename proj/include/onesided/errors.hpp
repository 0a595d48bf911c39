#pragma once

#include <stdexcept>
#include <string>

namespace onesided {

// Error taxonomy shared across the library. Every failure mode a public
// operation can report maps to one exception type; flags that are part of a
// result (converged = false, divergent verdicts) are not exceptions.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonIntegrable : Error { using Error::Error; };
struct EmptyDomain : Error { using Error::Error; };
struct AllEvaluationsFailed : Error { using Error::Error; };
struct InvalidParams : Error { using Error::Error; };
struct NoValidExponent : Error { using Error::Error; };
struct ThetaOutOfRange : Error { using Error::Error; };
struct ExponentCollapse : Error { using Error::Error; };
struct OrderViolation : Error { using Error::Error; };
struct NoAdmissibleTheta : Error { using Error::Error; };
struct InvalidGeometry : Error { using Error::Error; };
struct NonConvergentPV : Error { using Error::Error; };
struct NormalizationFailure : Error { using Error::Error; };
struct ExponentRelationViolated : Error { using Error::Error; };
struct ConfigInvalid : Error { using Error::Error; };
struct ComputeError : Error { using Error::Error; };
struct UnknownExperiment : Error { using Error::Error; };

}  // namespace onesided
