#include "cbo/error.hpp"

namespace cbo {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::SingularGram: return "SingularGram";
    case ErrorCode::MissingEnsemble: return "MissingEnsemble";
    case ErrorCode::DegenerateKernel: return "DegenerateKernel";
    case ErrorCode::MissingTruth: return "MissingTruth";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::IllegalPhase: return "IllegalPhase";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::NonFiniteObservation: return "NonFiniteObservation";
    case ErrorCode::NotFound: return "NotFound";
  }
  return "Unknown";
}

}  // namespace cbo
