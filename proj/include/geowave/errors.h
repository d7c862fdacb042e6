#pragma once

#include <stdexcept>
#include <string>

namespace geowave {

// Base for every error the library reports. Catch this at tool boundaries.
class GeowaveError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

#define GEOWAVE_ERROR(Name)                                                                                          \
  class Name : public GeowaveError {                                                                                 \
  public:                                                                                                            \
    using GeowaveError::GeowaveError;                                                                                \
  }

GEOWAVE_ERROR(ParseError);
GEOWAVE_ERROR(NonManifold);
GEOWAVE_ERROR(OpenSurface);
GEOWAVE_ERROR(DegenerateFace);
GEOWAVE_ERROR(NotAdjacent);
GEOWAVE_ERROR(Unreachable);
GEOWAVE_ERROR(DepthExceeded);
GEOWAVE_ERROR(IndexOutOfRange);
GEOWAVE_ERROR(BadParameter);
GEOWAVE_ERROR(InvariantViolation);
GEOWAVE_ERROR(NoPath);

#undef GEOWAVE_ERROR

} // namespace geowave
