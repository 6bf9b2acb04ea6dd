// SPDX-License-Identifier: Apache-2.0
/**
 * @file   tensor.hpp
 * @brief  Dense row-major tensor of 64-bit reals.
 */
#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace hapnet::nn {

using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape &shape);
std::string shape_string(const Shape &shape);

/**
 * @brief Dense tensor with an explicit shape.
 *
 * A default-constructed tensor is empty (rank 0, no data) and is only used as
 * a placeholder. Every other tensor has a non-empty shape of positive extents
 * and exactly product(shape) values.
 */
class Tensor {
public:
  Tensor() = default;
  explicit Tensor(Shape shape, double fill = 0.0);
  Tensor(Shape shape, std::vector<double> data);

  /// Rank-1 tensor holding @p values.
  static Tensor from(std::vector<double> values);
  static Tensor from(std::initializer_list<double> values);

  const Shape &shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }
  const std::vector<double> &vector() const { return data_; }

  double &operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  /// Rank-2 element access.
  double &at(std::size_t row, std::size_t col) {
    return data_[row * shape_[1] + col];
  }
  double at(std::size_t row, std::size_t col) const {
    return data_[row * shape_[1] + col];
  }

  /// Same values, new shape of equal element count.
  Tensor reshaped(Shape shape) const;
  /// Swap the axes of a rank-2 tensor.
  Tensor transposed() const;

  void fill(double value);
  bool all_finite() const;

  bool operator==(const Tensor &other) const = default;

private:
  Shape shape_;
  std::vector<double> data_;
};

} // namespace hapnet::nn
