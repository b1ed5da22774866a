#include "dflow/apps/vecmat.hpp"

#include <algorithm>
#include <string>

namespace dflow::apps {

namespace {

std::int64_t wrap_add(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) + static_cast<std::uint64_t>(b));
}

std::int64_t wrap_sub(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) - static_cast<std::uint64_t>(b));
}

std::int64_t wrap_mul(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(b));
}

}  // namespace

VecMatProduct::VecMatProduct(Engine& engine, std::span<const std::int64_t> vector, const Matrix& matrix,
                             std::size_t block)
    : engine_(engine), n_(vector.size()), block_(block) {
  if (n_ == 0) throw Error(Errc::DimensionMismatch, "empty input vector");
  if (matrix.size() != n_) {
    throw Error(Errc::DimensionMismatch,
                "matrix has " + std::to_string(matrix.size()) + " rows, vector has " + std::to_string(n_));
  }
  for (std::size_t i = 0; i < n_; ++i) {
    if (matrix[i].size() != n_) {
      throw Error(Errc::DimensionMismatch, "row " + std::to_string(i) + " has " + std::to_string(matrix[i].size()) +
                                               " columns, expected " + std::to_string(n_));
    }
  }
  if (block_ == 0 || block_ > n_) {
    throw Error(Errc::DimensionMismatch, "block size " + std::to_string(block_) + " outside [1, " +
                                             std::to_string(n_) + "]");
  }
  blocks_per_column_ = (n_ + block_ - 1) / block_;

  vec_.reserve(n_);
  for (std::int64_t v : vector) vec_.push_back(engine_.alloc<std::int64_t>(v));
  mat_.reserve(n_ * n_);
  for (const auto& row : matrix) {
    for (std::int64_t v : row) mat_.push_back(engine_.alloc<std::int64_t>(v));
  }
  out_.reserve(n_);
  for (std::size_t j = 0; j < n_; ++j) out_.push_back(engine_.alloc<std::int64_t>(0));

  const std::size_t total = blocks_per_column_ * n_;
  last_partial_.assign(total, 0);
  cons_.reserve(total);
  Engine::AtomicBlock batch(engine_);
  for (std::size_t k = 0; k < total; ++k) {
    cons_.push_back(engine_.new_constraint([this, k] { update_block(k); }, static_cast<UserParam>(k)));
  }
}

VecMatProduct::~VecMatProduct() {
  for (ConstraintId id : cons_) {
    if (engine_.alive(id)) engine_.del_constraint(id);
  }
  for (auto c : vec_) engine_.free(c);
  for (auto c : mat_) engine_.free(c);
  for (auto c : out_) engine_.free(c);
}

void VecMatProduct::update_block(std::size_t k) {
  const std::size_t j = k / blocks_per_column_;
  const std::size_t first = (k % blocks_per_column_) * block_;
  const std::size_t last = std::min(n_, first + block_);
  std::int64_t partial = 0;
  for (std::size_t i = first; i < last; ++i) {
    partial = wrap_add(partial, wrap_mul(engine_.get(vec_[i]), engine_.get(mat_[i * n_ + j])));
  }
  const std::int64_t delta = wrap_sub(partial, last_partial_[k]);
  last_partial_[k] = partial;
  if (delta != 0) engine_.set(out_[j], wrap_add(engine_.peek(out_[j]), delta));
}

void VecMatProduct::check_index(std::size_t i, std::size_t j) const {
  if (i >= n_ || j >= n_) {
    throw Error(Errc::DimensionMismatch, "index (" + std::to_string(i) + ", " + std::to_string(j) +
                                             ") outside " + std::to_string(n_) + "x" + std::to_string(n_));
  }
}

void VecMatProduct::set_cell(std::size_t i, std::size_t j, std::int64_t value) {
  check_index(i, j);
  engine_.set(mat_[i * n_ + j], value);
}

void VecMatProduct::set_column(std::size_t j, std::span<const std::int64_t> column) {
  check_index(0, j);
  if (column.size() != n_) {
    throw Error(Errc::DimensionMismatch,
                "column has " + std::to_string(column.size()) + " entries, expected " + std::to_string(n_));
  }
  Engine::AtomicBlock batch(engine_);
  for (std::size_t i = 0; i < n_; ++i) engine_.set(mat_[i * n_ + j], column[i]);
}

void VecMatProduct::set_vector(std::size_t i, std::int64_t value) {
  check_index(i, 0);
  engine_.set(vec_[i], value);
}

std::int64_t VecMatProduct::output(std::size_t j) const {
  check_index(0, j);
  return engine_.peek(out_[j]);
}

std::vector<std::int64_t> VecMatProduct::outputs() const {
  std::vector<std::int64_t> out;
  out.reserve(n_);
  for (auto c : out_) out.push_back(engine_.peek(c));
  return out;
}

std::int64_t VecMatProduct::matrix(std::size_t i, std::size_t j) const {
  check_index(i, j);
  return engine_.peek(mat_[i * n_ + j]);
}

std::int64_t VecMatProduct::vector(std::size_t i) const {
  check_index(i, 0);
  return engine_.peek(vec_[i]);
}

Cell<std::int64_t> VecMatProduct::output_cell(std::size_t j) const {
  check_index(0, j);
  return out_[j];
}

}  // namespace dflow::apps
