#pragma once

#include <stdexcept>
#include <string>

namespace cointegra {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define COINTEGRA_DECLARE_ERROR(Name)      \
  class Name : public Error {              \
   public:                                 \
    using Error::Error;                    \
  };

// Argument outside the half-plane where a transform is defined.
COINTEGRA_DECLARE_ERROR(DomainError)
COINTEGRA_DECLARE_ERROR(GridError)
COINTEGRA_DECLARE_ERROR(SingularError)
// Winding-number scan did not stabilize under refinement.
COINTEGRA_DECLARE_ERROR(ScanResolutionError)
COINTEGRA_DECLARE_ERROR(DivergenceError)
COINTEGRA_DECLARE_ERROR(InstabilityError)
COINTEGRA_DECLARE_ERROR(PreconditionError)
COINTEGRA_DECLARE_ERROR(CholeskyError)
COINTEGRA_DECLARE_ERROR(WindowError)
// Initial value not in the null space of the total mass.
COINTEGRA_DECLARE_ERROR(XiError)
COINTEGRA_DECLARE_ERROR(ConditionError)
COINTEGRA_DECLARE_ERROR(VerificationError)
COINTEGRA_DECLARE_ERROR(RootError)
COINTEGRA_DECLARE_ERROR(LagError)
// Malformed measure, spec or model definition.
COINTEGRA_DECLARE_ERROR(InvalidArgument)

#undef COINTEGRA_DECLARE_ERROR

}  // namespace cointegra
