#pragma once

#include <stdexcept>
#include <string>

namespace overlap {

// Every failure raised by the library derives from Error so callers (the CLI in
// particular) can map the whole family onto one exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define OVERLAP_DEFINE_ERROR(Name)             \
  class Name : public Error {                  \
   public:                                     \
    using Error::Error;                        \
  }

OVERLAP_DEFINE_ERROR(DimensionError);
OVERLAP_DEFINE_ERROR(NumericError);
OVERLAP_DEFINE_ERROR(CapacityError);
OVERLAP_DEFINE_ERROR(ParameterError);
OVERLAP_DEFINE_ERROR(StateError);
OVERLAP_DEFINE_ERROR(DegenerateError);
OVERLAP_DEFINE_ERROR(FitError);
OVERLAP_DEFINE_ERROR(StiffnessError);
OVERLAP_DEFINE_ERROR(UndefinedError);
OVERLAP_DEFINE_ERROR(InsufficientPointsError);
OVERLAP_DEFINE_ERROR(SweepInsufficientError);

#undef OVERLAP_DEFINE_ERROR

}  // namespace overlap
