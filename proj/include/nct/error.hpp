#ifndef NCT_ERROR_HPP
#define NCT_ERROR_HPP

#include <stdexcept>
#include <string>

namespace nct {

/// Failure categories surfaced by the library. Each error carries a kind
/// (for programmatic handling) and a human-readable message.
enum class ErrorKind {
  DegenerateTriangle,
  NonManifoldEdge,
  InadmissibleAngle,
  ZeroTransmissibilityDistance,
  CollinearPoints,
  PointOutsideTriangle,
  NonZeroMean,
  SolverFailure,
  DimensionMismatch,
  NonPositiveTimeStep,
  MobilityBelowFloor,
  NonPositiveTemperature,
  DuplicateDecayRates,
  BoundaryFluxViolation,
  UnknownCase,
  NonPositiveError,
  InadmissibleData,
  ConfigParse,
  MeshLoad,
  IoError,
};

const char* error_kind_name(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace nct

#endif
