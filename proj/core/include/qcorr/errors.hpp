#pragma once

#include <stdexcept>
#include <string>

namespace qcorr {

/// Base class for all toolkit errors.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define QCORR_DEFINE_ERROR(Name)                                              \
  class Name : public Error {                                                 \
  public:                                                                     \
    explicit Name(const std::string& what) : Error(#Name ": " + what) {}      \
  }

QCORR_DEFINE_ERROR(NotHermitian);
QCORR_DEFINE_ERROR(NoConvergence);
QCORR_DEFINE_ERROR(DomainError);
QCORR_DEFINE_ERROR(UnknownLabel);
QCORR_DEFINE_ERROR(LabelCollision);
QCORR_DEFINE_ERROR(DimensionMismatch);
QCORR_DEFINE_ERROR(LayoutMismatch);
QCORR_DEFINE_ERROR(InvalidPovm);
QCORR_DEFINE_ERROR(ArityMismatch);
QCORR_DEFINE_ERROR(SingularMarginal);
QCORR_DEFINE_ERROR(NotAPartition);
QCORR_DEFINE_ERROR(OverlappingSets);
QCORR_DEFINE_ERROR(NotNormalized);
QCORR_DEFINE_ERROR(UnknownName);
QCORR_DEFINE_ERROR(InvalidState);
QCORR_DEFINE_ERROR(OptimizerFailure);
QCORR_DEFINE_ERROR(DimensionGuard);
QCORR_DEFINE_ERROR(UnknownCheck);
QCORR_DEFINE_ERROR(MissingWitness);
QCORR_DEFINE_ERROR(ParseError);

#undef QCORR_DEFINE_ERROR

}  // namespace qcorr
