// SPDX-License-Identifier: Apache-2.0
/**
 * @file   graph.hpp
 * @brief  Declarative layer graphs for the haptic CNN, the haptic LSTM and
 *         linear classifiers over fixed features.
 */
#pragma once

#include <hapnet/nn/conv1d.hpp>
#include <hapnet/nn/tensor.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace hapnet::model {

enum class LayerKind { conv1d, inner_product, lstm, flatten };

const char *to_string(LayerKind kind);
LayerKind parse_layer_kind(std::string_view s);

/**
 * One layer. `relu` applies the rectifier in place on the layer output, so a
 * tap on a conv layer observes post-ReLU activations.
 *
 * An lstm layer reads a [channels, time] input as a time-major sequence of
 * channel vectors and outputs its final hidden state.
 */
struct LayerSpec {
  LayerKind kind = LayerKind::flatten;
  std::string name;
  nn::ConvSpec conv;       ///< conv1d only
  std::size_t outputs = 0; ///< inner_product only
  std::size_t hidden = 0;  ///< lstm only
  bool relu = false;

  bool operator==(const LayerSpec &) const = default;
};

struct ParamInfo {
  std::string name;
  std::string layer;
  nn::Shape shape;
  std::size_t fan_in = 1;
  bool is_bias = false;
};

struct ModelGraph {
  std::string name;
  nn::Shape input_shape;
  std::vector<LayerSpec> layers;
  std::string tap_layer;

  /// Output shape of every layer; throws InvalidSpec on incompatibility.
  std::vector<nn::Shape> output_shapes() const;
  void validate() const;
  std::vector<ParamInfo> parameters() const;
  std::size_t parameter_count() const;
  std::size_t layer_index(std::string_view layer) const;
  /// Name of the final inner-product layer.
  const LayerSpec &classifier() const;

  bool operator==(const ModelGraph &) const = default;
};

/// Three grouped conv layers (groups of 32) and a linear score.
ModelGraph build_haptic_cnn();
/// LSTM(10) -> inner product(10) + ReLU -> inner product(1).
ModelGraph build_haptic_lstm();
/// Single inner product from @p features inputs to one score.
ModelGraph build_linear_classifier(std::size_t features);

std::string graph_to_json(const ModelGraph &graph);
ModelGraph graph_from_json(std::string_view text);

} // namespace hapnet::model
