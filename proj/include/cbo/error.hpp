#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cbo {

enum class ErrorCode {
  InvalidArgument,
  EmptyDataset,
  SingularGram,
  MissingEnsemble,
  DegenerateKernel,
  MissingTruth,
  LengthMismatch,
  IllegalPhase,
  IndexOutOfRange,
  NonFiniteObservation,
  NotFound,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so the
/// service layer can map it onto an HTTP status without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace cbo
