#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dflow/engine.hpp"

namespace dflow::apps {

/// Reactive vector-matrix product out[j] = sum_i V[i] * M[i][j].
///
/// Constraints are attached to blocks of `block` consecutive cells of one
/// column. Each block remembers its last partial sum and adds only the
/// difference to the output cell, so a single-cell update costs one
/// constraint execution. Arithmetic wraps modulo 2^64.
class VecMatProduct {
 public:
  using Matrix = std::vector<std::vector<std::int64_t>>;

  VecMatProduct(Engine& engine, std::span<const std::int64_t> vector, const Matrix& matrix, std::size_t block);
  ~VecMatProduct();

  VecMatProduct(const VecMatProduct&) = delete;
  VecMatProduct& operator=(const VecMatProduct&) = delete;

  void set_cell(std::size_t i, std::size_t j, std::int64_t value);
  /// Replaces column j in one atomic block.
  void set_column(std::size_t j, std::span<const std::int64_t> column);
  void set_vector(std::size_t i, std::int64_t value);

  std::int64_t output(std::size_t j) const;
  std::vector<std::int64_t> outputs() const;
  std::int64_t matrix(std::size_t i, std::size_t j) const;
  std::int64_t vector(std::size_t i) const;

  std::size_t size() const noexcept { return n_; }
  std::size_t block() const noexcept { return block_; }
  std::size_t constraint_count() const noexcept { return cons_.size(); }
  Cell<std::int64_t> output_cell(std::size_t j) const;

 private:
  void update_block(std::size_t k);
  void check_index(std::size_t i, std::size_t j) const;

  Engine& engine_;
  std::size_t n_;
  std::size_t block_;
  std::size_t blocks_per_column_;
  std::vector<Cell<std::int64_t>> vec_;
  std::vector<Cell<std::int64_t>> mat_;  // row-major
  std::vector<Cell<std::int64_t>> out_;
  std::vector<std::int64_t> last_partial_;
  std::vector<ConstraintId> cons_;
};

}  // namespace dflow::apps
