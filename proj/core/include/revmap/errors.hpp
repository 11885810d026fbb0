// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace revmap {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define REVMAP_ERROR(Name)                                                     \
    struct Name : Error {                                                      \
        explicit Name(const std::string& what) : Error(#Name ": " + what) {}   \
    }

// core
REVMAP_ERROR(NoConvergence);
REVMAP_ERROR(OutOfDomain);
REVMAP_ERROR(DegenerateLinearPart);
// hmap
REVMAP_ERROR(DomainError);
REVMAP_ERROR(OnCurve);
// birkhoff
REVMAP_ERROR(NotElliptic);
REVMAP_ERROR(Resonant);
REVMAP_ERROR(DegenerateDenominator);
REVMAP_ERROR(StrongResonance);
// saddle
REVMAP_ERROR(NoContraction);
REVMAP_ERROR(NotSaddleOnFixLine);
REVMAP_ERROR(NonReversibleInput);
// firstreturn
REVMAP_ERROR(BalanceViolation);
REVMAP_ERROR(NoAsymmetricPair);
REVMAP_ERROR(DetectionFailure);
// melnikov
REVMAP_ERROR(TailBound);
REVMAP_ERROR(FitResidualTooLarge);
REVMAP_ERROR(DegenerateAlpha);
// rotators
REVMAP_ERROR(DenominatorVanishes);
REVMAP_ERROR(IntegratorFailure);
REVMAP_ERROR(BracketInvalid);

#undef REVMAP_ERROR

} // namespace revmap
