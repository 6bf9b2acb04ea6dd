// SPDX-License-Identifier: Apache-2.0
#include <hapnet/errors.hpp>
#include <hapnet/model/network.hpp>
#include <hapnet/nn/init.hpp>
#include <hapnet/nn/layers.hpp>

#include <algorithm>

namespace hapnet::model {

namespace {

std::uint64_t param_seed(std::uint64_t seed, const std::string &name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  // splitmix64 finalizer over the combined key
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (h | 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

nn::LayerParams layer_params(const nn::ParameterSet &ps,
                             const std::string &layer) {
  return {ps.at(layer + ".weight").value, ps.at(layer + ".bias").value};
}

nn::LstmParams lstm_params(const nn::ParameterSet &ps, const LayerSpec &l) {
  return {ps.at(l.name + ".input_weights").value,
          ps.at(l.name + ".hidden_weights").value, ps.at(l.name + ".bias").value,
          l.hidden};
}

void accumulate(nn::GradientSet &grads, const std::string &name,
                const nn::Tensor &g) {
  auto it = grads.find(name);
  if (it == grads.end()) {
    grads.emplace(name, g);
    return;
  }
  auto dst = it->second.values();
  auto src = g.values();
  for (std::size_t i = 0; i < dst.size(); ++i)
    dst[i] += src[i];
}

} // namespace

Network::Network(ModelGraph graph) : graph_(std::move(graph)) {
  graph_.validate();
  for (const auto &p : graph_.parameters())
    params_.emplace(p.name, nn::Parameter{nn::Tensor(p.shape), nn::Tensor(p.shape)});
}

Network Network::initialized(ModelGraph graph, std::uint64_t seed) {
  Network n(std::move(graph));
  n.initialize(seed);
  return n;
}

void Network::initialize(std::uint64_t seed) {
  for (const auto &l : graph_.layers)
    if (l.kind != LayerKind::flatten)
      initialize_layer(l.name, seed);
}

void Network::initialize_layer(std::string_view layer, std::uint64_t seed) {
  graph_.layer_index(layer);
  for (const auto &p : graph_.parameters()) {
    if (p.layer != layer)
      continue;
    auto &dst = params_.at(p.name);
    dst.value = p.is_bias ? nn::Tensor(p.shape)
                          : nn::xavier_init(p.shape, p.fan_in,
                                            param_seed(seed, p.name));
    dst.velocity = nn::Tensor(p.shape);
  }
}

void Network::set_params(nn::ParameterSet params) {
  const auto infos = graph_.parameters();
  if (params.size() != infos.size())
    throw InvalidSpec("graph '" + graph_.name + "' expects " +
                      std::to_string(infos.size()) + " parameters, got " +
                      std::to_string(params.size()));
  for (const auto &p : infos) {
    auto it = params.find(p.name);
    if (it == params.end())
      throw InvalidSpec("missing parameter '" + p.name + "'");
    if (it->second.value.shape() != p.shape ||
        it->second.velocity.shape() != p.shape)
      throw InvalidSpec("parameter '" + p.name + "' has shape " +
                        nn::shape_string(it->second.value.shape()) +
                        ", expected " + nn::shape_string(p.shape));
  }
  params_ = std::move(params);
}

ForwardTrace Network::forward(const nn::Tensor &input) const {
  if (input.shape() != graph_.input_shape)
    throw InvalidInput("graph '" + graph_.name + "' expects input " +
                       nn::shape_string(graph_.input_shape) + ", got " +
                       nn::shape_string(input.shape()));
  ForwardTrace tr;
  tr.input = input;
  tr.outputs.reserve(graph_.layers.size());
  for (const auto &l : graph_.layers) {
    const nn::Tensor &x = tr.outputs.empty() ? tr.input : tr.outputs.back();
    nn::Tensor y;
    switch (l.kind) {
    case LayerKind::conv1d:
      y = nn::conv1d_forward(x, l.conv, layer_params(params_, l.name));
      break;
    case LayerKind::inner_product:
      y = nn::inner_product(x, layer_params(params_, l.name));
      break;
    case LayerKind::lstm: {
      auto t = nn::lstm_forward_trace(x.transposed(), lstm_params(params_, l));
      y = t.final_hidden();
      tr.lstm.push_back(std::move(t));
      break;
    }
    case LayerKind::flatten:
      y = x.reshaped({x.size()});
      break;
    }
    if (l.relu)
      y = nn::relu(y);
    tr.outputs.push_back(std::move(y));
  }
  return tr;
}

double Network::score(const nn::Tensor &input) const {
  return forward(input).score();
}

std::vector<double> Network::activations(const nn::Tensor &input,
                                         std::string_view layer) const {
  const std::size_t idx = graph_.layer_index(layer);
  return forward(input).outputs[idx].vector();
}

void Network::backward(const ForwardTrace &trace, double grad_score,
                       nn::GradientSet &grads,
                       const std::vector<std::string> &trainable) const {
  const auto &layers = graph_.layers;
  // Earliest layer whose parameters need gradients; nothing below it matters.
  std::size_t first = 0;
  if (!trainable.empty()) {
    first = layers.size();
    for (const auto &name : trainable)
      first = std::min(first, graph_.layer_index(name));
  }
  auto wanted = [&](const std::string &name) {
    return trainable.empty() ||
           std::find(trainable.begin(), trainable.end(), name) !=
               trainable.end();
  };

  nn::Tensor g({1}, grad_score);
  std::size_t lstm_idx = trace.lstm.size();
  for (std::size_t i = layers.size(); i-- > first;) {
    const auto &l = layers[i];
    const nn::Tensor &x = i == 0 ? trace.input : trace.outputs[i - 1];
    if (l.relu)
      g = nn::relu_backward(trace.outputs[i], g);
    switch (l.kind) {
    case LayerKind::conv1d: {
      auto cg = nn::conv1d_backward(x, l.conv, layer_params(params_, l.name), g);
      if (wanted(l.name)) {
        accumulate(grads, l.name + ".weight", cg.weights);
        accumulate(grads, l.name + ".bias", cg.bias);
      }
      g = std::move(cg.input);
      break;
    }
    case LayerKind::inner_product: {
      auto ig = nn::inner_product_backward(x, layer_params(params_, l.name), g);
      if (wanted(l.name)) {
        accumulate(grads, l.name + ".weight", ig.weights);
        accumulate(grads, l.name + ".bias", ig.bias);
      }
      g = std::move(ig.input);
      break;
    }
    case LayerKind::lstm: {
      const auto seq = x.transposed();
      auto lg = nn::lstm_backward(seq, lstm_params(params_, l),
                                  trace.lstm[--lstm_idx], g);
      if (wanted(l.name)) {
        accumulate(grads, l.name + ".input_weights", lg.input_weights);
        accumulate(grads, l.name + ".hidden_weights", lg.hidden_weights);
        accumulate(grads, l.name + ".bias", lg.bias);
      }
      g = lg.input.transposed();
      break;
    }
    case LayerKind::flatten:
      g = g.reshaped(x.shape());
      break;
    }
  }
}

void Network::quantize_to_float() {
  for (auto &[name, p] : params_) {
    for (auto &v : p.value.values())
      v = static_cast<double>(static_cast<float>(v));
    for (auto &v : p.velocity.values())
      v = static_cast<double>(static_cast<float>(v));
  }
}

} // namespace hapnet::model
