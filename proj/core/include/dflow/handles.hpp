#pragma once

#include <cstdint>
#include <functional>
#include <limits>

namespace dflow {

using Stamp = std::uint64_t;

/// User value attached to a constraint. It is passed to the body, the final
/// handler and the user-parameter comparator.
using UserParam = std::int64_t;

inline constexpr std::uint32_t kNullIndex = std::numeric_limits<std::uint32_t>::max();

struct CellId {
  std::uint32_t index = kNullIndex;
  std::uint32_t generation = 0;

  constexpr bool is_null() const noexcept { return index == kNullIndex; }
  friend constexpr bool operator==(CellId, CellId) noexcept = default;
};

/// Typed handle to a reactive cell owned by an Engine.
template <class T>
class Cell {
 public:
  using value_type = T;

  constexpr Cell() noexcept = default;
  constexpr explicit Cell(CellId id) noexcept : id_(id) {}

  constexpr CellId id() const noexcept { return id_; }
  constexpr bool is_null() const noexcept { return id_.is_null(); }

  friend constexpr bool operator==(Cell, Cell) noexcept = default;

 private:
  CellId id_;
};

struct ConstraintId {
  std::uint32_t index = kNullIndex;
  std::uint32_t generation = 0;

  constexpr bool is_null() const noexcept { return index == kNullIndex; }
  friend constexpr bool operator==(ConstraintId, ConstraintId) noexcept = default;
};

}  // namespace dflow

template <>
struct std::hash<dflow::CellId> {
  std::size_t operator()(dflow::CellId id) const noexcept {
    return std::hash<std::uint64_t>{}((std::uint64_t{id.generation} << 32) | id.index);
  }
};

template <>
struct std::hash<dflow::ConstraintId> {
  std::size_t operator()(dflow::ConstraintId id) const noexcept {
    return std::hash<std::uint64_t>{}((std::uint64_t{id.generation} << 32) | id.index);
  }
};
