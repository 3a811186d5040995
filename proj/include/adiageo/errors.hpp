#pragma once

#include <stdexcept>
#include <string>

namespace adiageo {

// Base class for all library errors; what() carries the diagnostic,
// kind() a stable machine-readable tag for CLI error records.
class Error : public std::runtime_error {
  public:
    Error(std::string kind, const std::string& msg)
        : std::runtime_error(msg), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

  private:
    std::string kind_;
};

#define ADIAGEO_DEFINE_ERROR(Name)                                          \
    class Name : public Error {                                             \
      public:                                                               \
        explicit Name(const std::string& msg) : Error(#Name, msg) {}        \
    }

ADIAGEO_DEFINE_ERROR(InvalidModel);
ADIAGEO_DEFINE_ERROR(NumericalFailure);
ADIAGEO_DEFINE_ERROR(GapCollapse);
ADIAGEO_DEFINE_ERROR(DegenerateGround);
ADIAGEO_DEFINE_ERROR(DegenerateMode);
ADIAGEO_DEFINE_ERROR(RankMismatch);
ADIAGEO_DEFINE_ERROR(SingularMetric);
ADIAGEO_DEFINE_ERROR(NoConvergence);
ADIAGEO_DEFINE_ERROR(CriticalPointOnPath);
ADIAGEO_DEFINE_ERROR(NonIntegrableSingularity);
ADIAGEO_DEFINE_ERROR(QuadratureNotConverged);
ADIAGEO_DEFINE_ERROR(StepLimitExceeded);
ADIAGEO_DEFINE_ERROR(MeshTooCoarse);
ADIAGEO_DEFINE_ERROR(FrameDegeneration);
ADIAGEO_DEFINE_ERROR(InsufficientSamples);
ADIAGEO_DEFINE_ERROR(NonPositiveData);
ADIAGEO_DEFINE_ERROR(ConfigError);

#undef ADIAGEO_DEFINE_ERROR

}  // namespace adiageo
