#pragma once

#include <stdexcept>
#include <string>

namespace gmeas {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define GMEAS_DEFINE_ERROR(Name)          \
  class Name : public Error {             \
   public:                                \
    using Error::Error;                   \
  }

GMEAS_DEFINE_ERROR(NotHermitian);
GMEAS_DEFINE_ERROR(NotPositive);
GMEAS_DEFINE_ERROR(DimensionMismatch);
GMEAS_DEFINE_ERROR(NotAState);
GMEAS_DEFINE_ERROR(EmptySection);
GMEAS_DEFINE_ERROR(InvalidCompression);
GMEAS_DEFINE_ERROR(Infeasible);
GMEAS_DEFINE_ERROR(NotInSection);
GMEAS_DEFINE_ERROR(SectionMismatch);
GMEAS_DEFINE_ERROR(NotATester);
GMEAS_DEFINE_ERROR(NotAChannel);
GMEAS_DEFINE_ERROR(WrongShape);
GMEAS_DEFINE_ERROR(SigmaSingular);
GMEAS_DEFINE_ERROR(NotAGeneralizedPOVM);
// Two engines that must agree did not.
GMEAS_DEFINE_ERROR(CrossCheckFailure);

#undef GMEAS_DEFINE_ERROR

}  // namespace gmeas
