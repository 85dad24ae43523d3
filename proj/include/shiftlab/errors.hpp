#pragma once

#include <stdexcept>
#include <string>

namespace shiftlab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define SHIFTLAB_ERROR(Name)               \
  class Name : public Error {              \
   public:                                 \
    explicit Name(const std::string& what) \
        : Error(#Name ": " + what) {}      \
  }

SHIFTLAB_ERROR(HorizonExceeded);
SHIFTLAB_ERROR(InvalidWeight);
SHIFTLAB_ERROR(NotSummable);
SHIFTLAB_ERROR(EmptyWitnessSet);
SHIFTLAB_ERROR(ZeroScalar);
SHIFTLAB_ERROR(InternalInconsistency);
SHIFTLAB_ERROR(InfiniteMoment);
SHIFTLAB_ERROR(UnsupportedKind);
SHIFTLAB_ERROR(QuadratureFailure);
SHIFTLAB_ERROR(NoDensity);
SHIFTLAB_ERROR(InsufficientHorizon);
SHIFTLAB_ERROR(SupportContainsZero);
SHIFTLAB_ERROR(NoDiscontinuityList);
SHIFTLAB_ERROR(HypothesisViolation);
SHIFTLAB_ERROR(NoWitnessFound);
SHIFTLAB_ERROR(ConfigError);
SHIFTLAB_ERROR(PreconditionError);

#undef SHIFTLAB_ERROR

}  // namespace shiftlab
