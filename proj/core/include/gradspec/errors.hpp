#pragma once

#include <stdexcept>
#include <string>

namespace gradspec {

// All library errors derive from Error so callers can catch one type.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PointOutsideAtlas : Error { using Error::Error; };
struct DegreeMismatch : Error { using Error::Error; };
struct UnknownBuiltin : Error { using Error::Error; };
struct BadParams : Error { using Error::Error; };

struct SingularHessian : Error { using Error::Error; };
struct NotCritical : Error { using Error::Error; };

struct StepFailure : Error { using Error::Error; };
struct NoConvergence : Error { using Error::Error; };
struct IndexGapNotOne : Error { using Error::Error; };
struct AmbiguousCluster : Error { using Error::Error; };

struct CutoffTooLarge : Error { using Error::Error; };
struct DimensionTooLarge : Error { using Error::Error; };

struct ComplexInconsistent : Error { using Error::Error; };
struct DegenerateTime : Error { using Error::Error; };

struct UnmatchedRate : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

}  // namespace gradspec
