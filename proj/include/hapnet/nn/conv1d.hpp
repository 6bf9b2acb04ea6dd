// SPDX-License-Identifier: Apache-2.0
/**
 * @file   conv1d.hpp
 * @brief  Grouped temporal convolution over a [channels x time] input.
 *
 * Cross-correlation convention (the kernel is not flipped). Weights are laid
 * out as [out_channels, in_channels / groups, kernel_len]; output channel o
 * belongs to group o / (out_channels / groups) and reads only the input
 * channels of that group.
 */
#pragma once

#include <hapnet/nn/tensor.hpp>

namespace hapnet::nn {

struct ConvSpec {
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;
  std::size_t kernel_len = 1;
  std::size_t stride = 1;
  std::size_t pad = 0;
  std::size_t groups = 1;

  /// Throws InvalidSpec when the channel/group arithmetic does not work out.
  void validate() const;
  std::size_t output_length(std::size_t input_len) const;
  Shape weight_shape() const;
  std::size_t weight_count() const;
  std::size_t fan_in() const { return in_channels / groups * kernel_len; }

  bool operator==(const ConvSpec &) const = default;
};

/// Learnable tensors of an affine layer (conv or inner product).
struct LayerParams {
  Tensor weights;
  Tensor bias;
};

struct ConvGradients {
  Tensor input;
  Tensor weights;
  Tensor bias;
};

Tensor conv1d_forward(const Tensor &input, const ConvSpec &spec,
                      const LayerParams &params);

ConvGradients conv1d_backward(const Tensor &input, const ConvSpec &spec,
                              const LayerParams &params,
                              const Tensor &grad_out);

} // namespace hapnet::nn
