#pragma once

#include <stdexcept>
#include <string>

namespace bdm {

enum class ErrorCode {
  OutOfDomain,
  InvalidKnotVector,
  InvalidWeights,
  InvalidControlNet,
  DegenerateInterval,
  SingularMatrix,
  NonCoincidentInterface,
  ChainedSlave,
  DimensionMismatch,
  ConflictingConstraint,
  ElementInversion,
  NewtonDivergence,
  InvalidArgument,
  Io,
};

const char* to_string(ErrorCode code);

/// Library-wide exception. Every failure carries a machine-readable code so the
/// CLI can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace bdm
