#pragma once

#include <functional>
#include <utility>

#include "dflow/handles.hpp"

namespace dflow {

/// Scheduling policy used to pick the next constraint out of the queue.
///
/// Ties are always broken by ascending constraint index, so every policy is
/// deterministic.
class Comparator {
 public:
  enum class Kind {
    LeastRecentlyExecuted,  // smallest last-execution stamp first
    Lifo,                   // most recently queued first
    UserParam,              // strict weak order over user parameters
  };

  using ParamLess = std::function<bool(UserParam, UserParam)>;

  static Comparator least_recently_executed() { return Comparator(Kind::LeastRecentlyExecuted, {}); }
  static Comparator lifo() { return Comparator(Kind::Lifo, {}); }
  static Comparator by_param(ParamLess less) { return Comparator(Kind::UserParam, std::move(less)); }

  Kind kind() const noexcept { return kind_; }
  const ParamLess& param_less() const noexcept { return less_; }

 private:
  Comparator(Kind kind, ParamLess less) : kind_(kind), less_(std::move(less)) {}

  Kind kind_;
  ParamLess less_;
};

}  // namespace dflow
