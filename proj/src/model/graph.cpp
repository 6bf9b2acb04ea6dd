// SPDX-License-Identifier: Apache-2.0
#include <hapnet/errors.hpp>
#include <hapnet/haptic/instance.hpp>
#include <hapnet/model/graph.hpp>

#include <json.hpp>

#include <set>

namespace hapnet::model {

const char *to_string(LayerKind kind) {
  switch (kind) {
  case LayerKind::conv1d:
    return "conv1d";
  case LayerKind::inner_product:
    return "inner_product";
  case LayerKind::lstm:
    return "lstm";
  case LayerKind::flatten:
    return "flatten";
  }
  return "?";
}

LayerKind parse_layer_kind(std::string_view s) {
  for (auto k : {LayerKind::conv1d, LayerKind::inner_product, LayerKind::lstm,
                 LayerKind::flatten})
    if (s == to_string(k))
      return k;
  throw InvalidSpec("unknown layer kind '" + std::string(s) + "'");
}

std::vector<nn::Shape> ModelGraph::output_shapes() const {
  if (input_shape.empty() || nn::shape_size(input_shape) == 0)
    throw InvalidSpec("graph '" + name + "': empty input shape");
  std::vector<nn::Shape> shapes;
  nn::Shape cur = input_shape;
  std::set<std::string> seen;
  for (const auto &l : layers) {
    if (!seen.insert(l.name).second)
      throw InvalidSpec("graph '" + name + "': duplicate layer name '" +
                        l.name + "'");
    const std::string where = "graph '" + name + "' layer '" + l.name + "': ";
    switch (l.kind) {
    case LayerKind::conv1d:
      l.conv.validate();
      if (cur.size() != 2 || cur[0] != l.conv.in_channels)
        throw InvalidSpec(where + "input " + nn::shape_string(cur) +
                          " does not match " +
                          std::to_string(l.conv.in_channels) + " channels");
      cur = {l.conv.out_channels, l.conv.output_length(cur[1])};
      break;
    case LayerKind::inner_product:
      if (l.outputs == 0)
        throw InvalidSpec(where + "needs at least one output");
      cur = {l.outputs};
      break;
    case LayerKind::lstm:
      if (l.hidden == 0)
        throw InvalidSpec(where + "hidden size must be positive");
      if (cur.size() != 2)
        throw InvalidSpec(where + "expects a [channels, time] input");
      cur = {l.hidden};
      break;
    case LayerKind::flatten:
      cur = {nn::shape_size(cur)};
      break;
    }
    shapes.push_back(cur);
  }
  return shapes;
}

void ModelGraph::validate() const {
  auto shapes = output_shapes();
  if (layers.empty() || layers.back().kind != LayerKind::inner_product ||
      shapes.back() != nn::Shape{1})
    throw InvalidSpec("graph '" + name +
                      "' must end in an inner product with one output");
  if (!tap_layer.empty())
    layer_index(tap_layer);
}

std::vector<ParamInfo> ModelGraph::parameters() const {
  auto shapes = output_shapes();
  std::vector<ParamInfo> out;
  nn::Shape in = input_shape;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto &l = layers[i];
    switch (l.kind) {
    case LayerKind::conv1d:
      out.push_back({l.name + ".weight", l.name, l.conv.weight_shape(),
                     l.conv.fan_in(), false});
      out.push_back({l.name + ".bias", l.name, {l.conv.out_channels}, 1, true});
      break;
    case LayerKind::inner_product: {
      const std::size_t d = nn::shape_size(in);
      out.push_back({l.name + ".weight", l.name, {l.outputs, d}, d, false});
      out.push_back({l.name + ".bias", l.name, {l.outputs}, 1, true});
      break;
    }
    case LayerKind::lstm: {
      const std::size_t d = in[0], h = l.hidden;
      out.push_back({l.name + ".input_weights", l.name, {4 * h, d}, d, false});
      out.push_back({l.name + ".hidden_weights", l.name, {4 * h, h}, h, false});
      out.push_back({l.name + ".bias", l.name, {4 * h}, 1, true});
      break;
    }
    case LayerKind::flatten:
      break;
    }
    in = shapes[i];
  }
  return out;
}

std::size_t ModelGraph::parameter_count() const {
  std::size_t n = 0;
  for (const auto &p : parameters())
    n += nn::shape_size(p.shape);
  return n;
}

std::size_t ModelGraph::layer_index(std::string_view layer) const {
  for (std::size_t i = 0; i < layers.size(); ++i)
    if (layers[i].name == layer)
      return i;
  throw InvalidSpec("graph '" + name + "' has no layer '" +
                    std::string(layer) + "'");
}

const LayerSpec &ModelGraph::classifier() const {
  for (auto it = layers.rbegin(); it != layers.rend(); ++it)
    if (it->kind == LayerKind::inner_product)
      return *it;
  throw InvalidSpec("graph '" + name + "' has no inner product layer");
}

namespace {

LayerSpec conv_layer(std::string name, std::size_t in, std::size_t out,
                     std::size_t kernel) {
  LayerSpec l;
  l.kind = LayerKind::conv1d;
  l.name = std::move(name);
  // "same"-style padding with stride 2 halves the temporal extent each time.
  l.conv = {in, out, kernel, 2, kernel / 2, haptic::kInstanceChannels};
  l.relu = true;
  return l;
}

LayerSpec ip_layer(std::string name, std::size_t outputs, bool relu) {
  LayerSpec l;
  l.kind = LayerKind::inner_product;
  l.name = std::move(name);
  l.outputs = outputs;
  l.relu = relu;
  return l;
}

} // namespace

ModelGraph build_haptic_cnn() {
  ModelGraph g;
  g.name = "haptic_cnn";
  g.input_shape = {haptic::kInstanceChannels, haptic::kInstanceLength};
  g.layers.push_back(conv_layer("conv1", 32, 64, 7));
  g.layers.push_back(conv_layer("conv2", 64, 64, 5));
  g.layers.push_back(conv_layer("conv3", 64, 64, 3));
  LayerSpec flat;
  flat.kind = LayerKind::flatten;
  flat.name = "flatten";
  g.layers.push_back(flat);
  g.layers.push_back(ip_layer("fc", 1, false));
  g.tap_layer = "conv3";
  g.validate();
  return g;
}

ModelGraph build_haptic_lstm() {
  ModelGraph g;
  g.name = "haptic_lstm";
  g.input_shape = {haptic::kInstanceChannels, haptic::kInstanceLength};
  LayerSpec lstm;
  lstm.kind = LayerKind::lstm;
  lstm.name = "lstm";
  lstm.hidden = 10;
  g.layers.push_back(lstm);
  g.layers.push_back(ip_layer("fc1", 10, true));
  g.layers.push_back(ip_layer("fc2", 1, false));
  g.tap_layer = "fc1";
  g.validate();
  return g;
}

ModelGraph build_linear_classifier(std::size_t features) {
  if (features == 0)
    throw InvalidSpec("linear classifier needs at least one feature");
  ModelGraph g;
  g.name = "linear";
  g.input_shape = {features};
  g.layers.push_back(ip_layer("fc", 1, false));
  g.validate();
  return g;
}

std::string graph_to_json(const ModelGraph &graph) {
  nlohmann::ordered_json j;
  j["name"] = graph.name;
  j["input"] = graph.input_shape;
  j["tap"] = graph.tap_layer;
  auto &layers = j["layers"] = nlohmann::ordered_json::array();
  for (const auto &l : graph.layers) {
    nlohmann::ordered_json e;
    e["kind"] = to_string(l.kind);
    e["name"] = l.name;
    if (l.kind == LayerKind::conv1d) {
      e["in"] = l.conv.in_channels;
      e["out"] = l.conv.out_channels;
      e["kernel"] = l.conv.kernel_len;
      e["stride"] = l.conv.stride;
      e["pad"] = l.conv.pad;
      e["groups"] = l.conv.groups;
    }
    if (l.kind == LayerKind::inner_product)
      e["outputs"] = l.outputs;
    if (l.kind == LayerKind::lstm)
      e["hidden"] = l.hidden;
    e["relu"] = l.relu;
    layers.push_back(std::move(e));
  }
  return j.dump();
}

ModelGraph graph_from_json(std::string_view text) {
  try {
    auto j = nlohmann::json::parse(text);
    ModelGraph g;
    g.name = j.at("name").get<std::string>();
    g.input_shape = j.at("input").get<nn::Shape>();
    g.tap_layer = j.at("tap").get<std::string>();
    for (const auto &e : j.at("layers")) {
      LayerSpec l;
      l.kind = parse_layer_kind(e.at("kind").get<std::string>());
      l.name = e.at("name").get<std::string>();
      l.relu = e.at("relu").get<bool>();
      if (l.kind == LayerKind::conv1d)
        l.conv = {e.at("in").get<std::size_t>(), e.at("out").get<std::size_t>(),
                  e.at("kernel").get<std::size_t>(),
                  e.at("stride").get<std::size_t>(),
                  e.at("pad").get<std::size_t>(),
                  e.at("groups").get<std::size_t>()};
      if (l.kind == LayerKind::inner_product)
        l.outputs = e.at("outputs").get<std::size_t>();
      if (l.kind == LayerKind::lstm)
        l.hidden = e.at("hidden").get<std::size_t>();
      g.layers.push_back(std::move(l));
    }
    g.validate();
    return g;
  } catch (const nlohmann::json::exception &e) {
    throw InvalidSpec(std::string("graph description: ") + e.what());
  }
}

} // namespace hapnet::model
