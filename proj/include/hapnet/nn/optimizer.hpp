// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <hapnet/errors.hpp>
#include <hapnet/nn/tensor.hpp>

#include <map>
#include <string>

namespace hapnet::nn {

/// A learnable tensor together with its momentum buffer.
struct Parameter {
  Tensor value;
  Tensor velocity;

  bool operator==(const Parameter &) const = default;
};

using ParameterSet = std::map<std::string, Parameter>;
using GradientSet = std::map<std::string, Tensor>;

/// Raised when training meets a non-finite loss or gradient.
class TrainingDiverged : public Error {
public:
  using Error::Error;
  const char *kind() const noexcept override { return "training-diverged"; }
};

/**
 * @brief v <- mu v - lr g; w <- w + v for every parameter named in @p grads.
 *
 * Parameters without a gradient entry are left untouched (frozen). All
 * gradients are checked for finiteness before anything is modified.
 */
void sgd_momentum_step(ParameterSet &params, const GradientSet &grads,
                       double lr = 0.01, double momentum = 0.9);

} // namespace hapnet::nn
