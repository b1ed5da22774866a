#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dflow {

enum class Errc {
  InvalidCell,
  DoubleFree,
  InvalidConstraint,
  UnbalancedAtomic,
  SolverBudgetExceeded,
  QueueNotEmpty,
  CycleDetected,
  UnknownNode,
  DuplicateEdge,
  DimensionMismatch,
  InvalidArgument,
  ParseError,
  VerificationFailed,
};

std::string_view to_string(Errc code) noexcept;

/// Every failure raised by the engine and the applications built on it.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace dflow
