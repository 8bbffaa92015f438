#pragma once

#include <stdexcept>
#include <string>

namespace capillary {

// Every failure carries a stable class name so the CLI can report it.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

#define CAPILLARY_ERROR(Name)                                      \
  class Name : public Error {                                      \
   public:                                                         \
    explicit Name(const std::string& what) : Error(#Name, what) {} \
  };

CAPILLARY_ERROR(NonConvexNorm)
CAPILLARY_ERROR(DegeneratePoint)
CAPILLARY_ERROR(InvalidContactAngle)
CAPILLARY_ERROR(PointOffCap)
CAPILLARY_ERROR(NotBoundaryPoint)
CAPILLARY_ERROR(FormMismatch)
CAPILLARY_ERROR(ChartFailure)
CAPILLARY_ERROR(SingularMetric)
CAPILLARY_ERROR(NotAdmissible)
CAPILLARY_ERROR(NotPositive)
CAPILLARY_ERROR(NotSymmetricNorm)
CAPILLARY_ERROR(ConditionFailed)
CAPILLARY_ERROR(AdmissibilityLost)
CAPILLARY_ERROR(NoConvergence)
CAPILLARY_ERROR(ProjectionBreaksPositivity)
CAPILLARY_ERROR(ConfigError)

#undef CAPILLARY_ERROR

}  // namespace capillary
