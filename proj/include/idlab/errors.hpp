#pragma once

#include <stdexcept>
#include <string>

namespace idlab {

/// Base class of every error raised by the library. Precondition violations
/// on plain arguments (negative counts, bad dimensions in constructors) use
/// std::invalid_argument instead.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define IDLAB_DEFINE_ERROR(Name)                  \
  class Name : public Error {                     \
   public:                                        \
    explicit Name(const std::string& what)        \
        : Error(std::string(#Name ": ") + what) {} \
  }

/// A root-finding bracket could not be expanded to contain the target level.
IDLAB_DEFINE_ERROR(BracketFailure);
/// Two exponential-family members do not share base measure and statistic.
IDLAB_DEFINE_ERROR(MismatchedFamily);
IDLAB_DEFINE_ERROR(DimensionMismatch);
/// A finite-difference derivative of a monotone component was not positive.
IDLAB_DEFINE_ERROR(NonFiniteDerivative);
IDLAB_DEFINE_ERROR(DegenerateMeans);
IDLAB_DEFINE_ERROR(SingularMatrix);
/// A generator inverse failed to invert another generator's outputs.
IDLAB_DEFINE_ERROR(RangeMismatch);
IDLAB_DEFINE_ERROR(RankDeficient);
IDLAB_DEFINE_ERROR(SingularCovariance);
/// A task transform did not pass prior-invariance re-verification.
IDLAB_DEFINE_ERROR(UncertifiedTransform);
/// Invalid experiment configuration (unknown name, malformed field).
IDLAB_DEFINE_ERROR(ConfigError);

#undef IDLAB_DEFINE_ERROR

}  // namespace idlab
