// SPDX-License-Identifier: Apache-2.0
/**
 * @file   layers.hpp
 * @brief  Elementwise ReLU, inner product, average pooling and L2
 *         normalization.
 */
#pragma once

#include <hapnet/nn/conv1d.hpp>
#include <hapnet/nn/tensor.hpp>

namespace hapnet::nn {

/// max(0, x) elementwise.
Tensor relu(const Tensor &input);
/// Passes @p grad_out where input > 0; the subgradient at 0 is 0.
Tensor relu_backward(const Tensor &input, const Tensor &grad_out);

/// out = W x + b with W of shape [M, D]; @p input is flattened to D values.
Tensor inner_product(const Tensor &input, const LayerParams &params);

struct InnerProductGradients {
  Tensor input; ///< same shape as the forward input
  Tensor weights;
  Tensor bias;
};

InnerProductGradients inner_product_backward(const Tensor &input,
                                             const LayerParams &params,
                                             const Tensor &grad_out);

/// Mean over every axis but the last: [..., C] -> [C].
Tensor avg_pool(const Tensor &featmap);

struct Normalized {
  Tensor value;
  bool degenerate = false; ///< input had zero norm; value is all zeros
};

/// v / ||v||_2, or the zero vector flagged degenerate when ||v|| == 0.
Normalized l2_normalize(const Tensor &v);

} // namespace hapnet::nn
