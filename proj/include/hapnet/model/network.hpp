// SPDX-License-Identifier: Apache-2.0
/**
 * @file   network.hpp
 * @brief  A ModelGraph bound to parameter values, with forward, backward and
 *         activation taps.
 */
#pragma once

#include <hapnet/model/graph.hpp>
#include <hapnet/nn/lstm.hpp>
#include <hapnet/nn/optimizer.hpp>

#include <cstdint>
#include <string_view>
#include <vector>

namespace hapnet::model {

/// Per-layer outputs of one forward pass (post-ReLU where the layer has one).
struct ForwardTrace {
  nn::Tensor input;
  std::vector<nn::Tensor> outputs;
  std::vector<nn::LstmTrace> lstm; ///< one entry per lstm layer, in order

  double score() const { return outputs.back()[0]; }
};

class Network {
public:
  /// All parameters and velocities zero.
  explicit Network(ModelGraph graph);

  /// Xavier weights, zero biases, zero velocities.
  static Network initialized(ModelGraph graph, std::uint64_t seed);

  const ModelGraph &graph() const { return graph_; }
  nn::ParameterSet &params() { return params_; }
  const nn::ParameterSet &params() const { return params_; }

  void initialize(std::uint64_t seed);
  /// Re-draws one layer's parameters and clears their velocities.
  void initialize_layer(std::string_view layer, std::uint64_t seed);
  /// Replaces the parameter set; names and shapes must match the graph.
  void set_params(nn::ParameterSet params);

  ForwardTrace forward(const nn::Tensor &input) const;
  double score(const nn::Tensor &input) const;
  /// Flattened output of @p layer; throws InvalidSpec for unknown layers.
  std::vector<double> activations(const nn::Tensor &input,
                                  std::string_view layer) const;

  /**
   * Adds d(loss)/d(param) into @p grads given d(loss)/d(score). Only
   * parameters of layers named in @p trainable are touched; an empty list
   * means every layer.
   */
  void backward(const ForwardTrace &trace, double grad_score,
                nn::GradientSet &grads,
                const std::vector<std::string> &trainable = {}) const;

  /// Rounds every value and velocity to the nearest 32-bit float.
  void quantize_to_float();

private:
  ModelGraph graph_;
  nn::ParameterSet params_;
};

} // namespace hapnet::model
