// SPDX-License-Identifier: Apache-2.0
/**
 * @file   lstm.hpp
 * @brief  Single-layer LSTM returning the final hidden state, with full
 *         backpropagation through time.
 *
 * Gate rows are stacked in the order input, forget, output, candidate:
 * rows [0,H) input gate, [H,2H) forget gate, [2H,3H) output gate and
 * [3H,4H) candidate. Initial hidden and cell states are zero.
 */
#pragma once

#include <hapnet/nn/tensor.hpp>

#include <vector>

namespace hapnet::nn {

struct LstmParams {
  Tensor input_weights;  ///< [4H, D]
  Tensor hidden_weights; ///< [4H, H]
  Tensor bias;           ///< [4H]
  std::size_t hidden_size = 0;

  /// Zero-valued parameters for D inputs and H units.
  static LstmParams zeros(std::size_t input_size, std::size_t hidden_size);
  void validate(std::size_t input_size) const;
};

/// Activations recorded by the forward pass for BPTT.
struct LstmTrace {
  std::size_t steps = 0;
  std::size_t hidden = 0;
  std::vector<double> gates; ///< steps x 4H post-nonlinearity gate values
  std::vector<double> cells; ///< (steps + 1) x H, row 0 is the zero state
  std::vector<double> hiddens; ///< (steps + 1) x H, row 0 is the zero state

  Tensor final_hidden() const;
};

/// @p sequence is [T, D] (time-major). Returns h_T of shape [H].
Tensor lstm_forward(const Tensor &sequence, const LstmParams &params);
LstmTrace lstm_forward_trace(const Tensor &sequence, const LstmParams &params);

struct LstmGradients {
  Tensor input; ///< [T, D]
  Tensor input_weights;
  Tensor hidden_weights;
  Tensor bias;
};

LstmGradients lstm_backward(const Tensor &sequence, const LstmParams &params,
                            const LstmTrace &trace, const Tensor &grad_hidden);

} // namespace hapnet::nn
