#include "dflow/errors.hpp"

namespace dflow {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidCell: return "InvalidCell";
    case Errc::DoubleFree: return "DoubleFree";
    case Errc::InvalidConstraint: return "InvalidConstraint";
    case Errc::UnbalancedAtomic: return "UnbalancedAtomic";
    case Errc::SolverBudgetExceeded: return "SolverBudgetExceeded";
    case Errc::QueueNotEmpty: return "QueueNotEmpty";
    case Errc::CycleDetected: return "CycleDetected";
    case Errc::UnknownNode: return "UnknownNode";
    case Errc::DuplicateEdge: return "DuplicateEdge";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::ParseError: return "ParseError";
    case Errc::VerificationFailed: return "VerificationFailed";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace dflow
