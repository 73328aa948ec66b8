#pragma once

#include <stdexcept>
#include <string>

namespace fwt {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Platform pitch/roll reached the Euler-rate singularity guard; the run is
// physically implausible and must abort rather than clamp.
struct SingularAttitude : Error { using Error::Error; };

// Wetted-length denominator collapsed (platform near horizontal).
struct DegenerateAttitude : Error { using Error::Error; };

struct InvalidParameters : Error { using Error::Error; };
struct NotPositiveDefinite : Error { using Error::Error; };
struct SimulationDiverged : Error { using Error::Error; };
struct NoConvergence : Error { using Error::Error; };
struct RoleMismatch : Error { using Error::Error; };
struct OutOfRange : Error { using Error::Error; };

struct ParseError : Error { using Error::Error; };
struct UnknownKey : Error { using Error::Error; };
struct MissingFile : Error { using Error::Error; };

struct EmptySeries : Error { using Error::Error; };
struct ZeroBaseline : Error { using Error::Error; };
struct ScenarioMismatch : Error { using Error::Error; };

}  // namespace fwt
