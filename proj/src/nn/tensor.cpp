// SPDX-License-Identifier: Apache-2.0
#include <hapnet/errors.hpp>
#include <hapnet/nn/tensor.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hapnet::nn {

std::size_t shape_size(const Shape &shape) {
  std::size_t n = 1;
  for (auto d : shape)
    n *= d;
  return shape.empty() ? 0 : n;
}

std::string shape_string(const Shape &shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i)
    os << (i ? "x" : "") << shape[i];
  os << ']';
  return os.str();
}

namespace {
void check_shape(const Shape &shape) {
  if (shape.empty())
    throw InvalidSpec("tensor shape must have at least one axis");
  for (auto d : shape)
    if (d == 0)
      throw InvalidSpec("tensor extent must be positive, got " +
                        shape_string(shape));
}
} // namespace

Tensor::Tensor(Shape shape, double fill) : shape_(std::move(shape)) {
  check_shape(shape_);
  data_.assign(shape_size(shape_), fill);
}

Tensor::Tensor(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  check_shape(shape_);
  if (data_.size() != shape_size(shape_))
    throw InvalidSpec("tensor of shape " + shape_string(shape_) + " needs " +
                      std::to_string(shape_size(shape_)) + " values, got " +
                      std::to_string(data_.size()));
}

Tensor Tensor::from(std::vector<double> values) {
  Shape s{values.size()};
  return Tensor(std::move(s), std::move(values));
}

Tensor Tensor::from(std::initializer_list<double> values) {
  return from(std::vector<double>(values));
}

Tensor Tensor::reshaped(Shape shape) const {
  return Tensor(std::move(shape), data_);
}

Tensor Tensor::transposed() const {
  if (rank() != 2)
    throw InvalidSpec("transpose needs a rank-2 tensor, got " +
                      shape_string(shape_));
  const std::size_t rows = shape_[0], cols = shape_[1];
  Tensor out({cols, rows});
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      out.data_[c * rows + r] = data_[r * cols + c];
  return out;
}

void Tensor::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

bool Tensor::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

} // namespace hapnet::nn
