// SPDX-License-Identifier: Apache-2.0
#include <hapnet/errors.hpp>
#include <hapnet/nn/layers.hpp>
#include <hapnet/pipeline.hpp>

#include <algorithm>
#include <map>

namespace hapnet::pipeline {

std::vector<haptic::PreparedTrial>
prepare_all(std::span<const haptic::HapticTrial> trials) {
  std::vector<haptic::PreparedTrial> out;
  out.reserve(trials.size());
  for (const auto &t : trials)
    out.push_back(haptic::prepare_trial(t));
  return out;
}

namespace {

std::string prepared_key(const haptic::PreparedTrial &t, std::size_t finger,
                         haptic::Ep ep) {
  return t.object_id + "/t" + std::to_string(t.trial_index) + "/f" +
         std::to_string(finger) + "/" + std::string(haptic::ep_name(ep));
}

/// Splits "a/b/c" into components.
std::vector<std::string> path_parts(const std::string &name) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    auto p = name.find('/', start);
    parts.push_back(name.substr(start, p - start));
    if (p == std::string::npos)
      return parts;
    start = p + 1;
  }
}

int parse_tagged(const std::string &s, char tag, const std::string &where) {
  if (s.size() < 2 || s[0] != tag)
    throw InvalidInput(where + ": bad component '" + s + "'");
  try {
    return std::stoi(s.substr(1));
  } catch (const std::exception &) {
    throw InvalidInput(where + ": bad component '" + s + "'");
  }
}

} // namespace

std::string encode_prepared(std::span<const haptic::PreparedTrial> trials) {
  io::NamedTensors out;
  for (const auto &t : trials)
    for (std::size_t f = 0; f < haptic::kFingers; ++f)
      for (auto ep : haptic::kAllEps) {
        const auto &p = t.fingers[f][static_cast<std::size_t>(ep)];
        const auto key = prepared_key(t, f, ep);
        const std::size_t n = p.length();
        nn::Tensor base({3 + haptic::kElectrodes, n});
        for (std::size_t c = 0; c < 3; ++c)
          std::copy(p.scalars[c + 1].begin(), p.scalars[c + 1].end(),
                    base.values().begin() + c * n);
        for (std::size_t e = 0; e < haptic::kElectrodes; ++e)
          std::copy(p.electrodes[e].begin(), p.electrodes[e].end(),
                    base.values().begin() + (3 + e) * n);
        out.emplace_back(key + "/pac", nn::Tensor::from(p.scalars[0]));
        out.emplace_back(key + "/base", std::move(base));
        out.emplace_back(key + "/constant",
                         nn::Tensor({1}, static_cast<double>(p.constant_channels)));
      }
  return io::encode_tensors(out);
}

std::vector<haptic::PreparedTrial> decode_prepared(std::string_view bytes,
                                                   const std::string &where) {
  auto tensors = io::decode_tensors(bytes, where);
  std::vector<haptic::PreparedTrial> out;
  std::map<std::pair<std::string, int>, std::size_t> index;
  for (auto &[name, t] : tensors) {
    auto parts = path_parts(name);
    if (parts.size() < 5)
      throw InvalidInput(where + ": bad tensor name '" + name + "'");
    const std::size_t k = parts.size();
    std::string object;
    for (std::size_t i = 0; i + 4 < k; ++i)
      object += (i ? "/" : "") + parts[i];
    const int trial = parse_tagged(parts[k - 4], 't', where);
    const int finger = parse_tagged(parts[k - 3], 'f', where);
    const auto ep = haptic::parse_ep(parts[k - 2]);
    if (!ep || finger < 0 || finger >= static_cast<int>(haptic::kFingers))
      throw InvalidInput(where + ": bad tensor name '" + name + "'");
    auto [it, fresh] = index.try_emplace({object, trial}, out.size());
    if (fresh) {
      out.emplace_back();
      out.back().object_id = object;
      out.back().trial_index = trial;
    }
    auto &p = out[it->second].fingers[finger][static_cast<std::size_t>(*ep)];
    const auto &field = parts[k - 1];
    if (field == "pac") {
      p.scalars[0] = t.vector();
    } else if (field == "base") {
      if (t.rank() != 2 || t.dim(0) != 3 + haptic::kElectrodes)
        throw InvalidInput(where + ": '" + name + "' must have 22 rows");
      const std::size_t n = t.dim(1);
      auto row = [&](std::size_t r) {
        return std::vector<double>(t.values().begin() + r * n,
                                   t.values().begin() + (r + 1) * n);
      };
      for (std::size_t c = 0; c < 3; ++c)
        p.scalars[c + 1] = row(c);
      for (std::size_t e = 0; e < haptic::kElectrodes; ++e)
        p.electrodes[e] = row(3 + e);
    } else if (field == "constant") {
      p.constant_channels = static_cast<std::size_t>(t[0]);
    } else {
      throw InvalidInput(where + ": bad tensor name '" + name + "'");
    }
  }
  return out;
}

AdjectiveTask make_task(std::span<const eval::AdjectiveLabelSet> table,
                        const std::string &adjective,
                        std::uint64_t split_seed) {
  const std::size_t a = eval::require_adjective(adjective);
  std::vector<std::string> ids;
  std::vector<char> pos;
  AdjectiveTask task;
  task.adjective = adjective;
  for (const auto &row : table) {
    ids.push_back(row.object_id);
    pos.push_back(row.labels[a]);
    task.labels[row.object_id] = row.labels[a] ? 1 : -1;
  }
  std::vector<bool> flags(pos.begin(), pos.end());
  std::unique_ptr<bool[]> buf(new bool[flags.size()]);
  std::copy(flags.begin(), flags.end(), buf.get());
  task.split = eval::make_split(ids, std::span<const bool>(buf.get(), flags.size()),
                                adjective, split_seed);
  return task;
}

std::vector<haptic::InstanceMatrix>
instances_of(std::span<const haptic::PreparedTrial> trials,
             const haptic::PcaSet &pca, const std::set<std::string> &objects) {
  std::vector<haptic::InstanceMatrix> out;
  for (const auto &t : trials) {
    if (!objects.empty() && !objects.count(t.object_id))
      continue;
    for (auto &inst : haptic::augment(t, pca))
      out.push_back(std::move(inst));
  }
  return out;
}

io::Checkpoint train_haptic(std::span<const haptic::PreparedTrial> trials,
                            const AdjectiveTask &task, HapticModel kind,
                            const model::TrainSchedule &schedule,
                            bool pca_on_all_objects) {
  const std::set<std::string> train_set(task.split.train.begin(),
                                        task.split.train.end());
  std::vector<haptic::PreparedTrial> train_trials;
  for (const auto &t : trials)
    if (train_set.count(t.object_id))
      train_trials.push_back(t);
  if (train_trials.empty())
    throw InvalidInput("no haptic trials for the training objects of '" +
                       task.adjective + "'");
  const auto pca = haptic::fit_pca_set(
      pca_on_all_objects ? trials : std::span<const haptic::PreparedTrial>(
                                        train_trials),
      haptic::kPcaComponents);
  auto instances = instances_of(train_trials, pca, {});
  std::vector<nn::Tensor> inputs;
  std::vector<int> labels;
  for (auto &inst : instances) {
    labels.push_back(task.labels.at(inst.object_id));
    inputs.push_back(std::move(inst.values));
  }
  auto graph = kind == HapticModel::cnn ? model::build_haptic_cnn()
                                        : model::build_haptic_lstm();
  auto result = model::train(model::Network::initialized(graph, schedule.seed),
                             inputs, labels, schedule);
  nlohmann::json extra = {{"input", "instances"},
                          {"adjective", task.adjective},
                          {"split_seed", task.split.seed},
                          {"train_objects", task.split.train},
                          {"test_objects", task.split.test},
                          {"pca_scope", pca_on_all_objects ? "all" : "train"},
                          {"pca", io::pca_to_json(pca)}};
  return io::make_checkpoint(result, schedule, std::move(extra));
}

Combine parse_combine(std::string_view s) {
  if (s == "none")
    return Combine::none;
  if (s == "trials")
    return Combine::trials;
  if (s == "views")
    return Combine::views;
  throw InvalidSpec("unknown combine mode '" + std::string(s) + "'");
}

const char *to_string(Combine c) {
  switch (c) {
  case Combine::none:
    return "none";
  case Combine::trials:
    return "trials";
  case Combine::views:
    return "views";
  }
  return "?";
}

haptic::PcaSet checkpoint_pca(const io::Checkpoint &ckpt) {
  if (!ckpt.meta.extra.contains("pca"))
    throw InvalidInput("checkpoint has no PCA model; not a haptic checkpoint");
  return io::pca_from_json(ckpt.meta.extra.at("pca"));
}

std::vector<model::FeatureVector>
haptic_features(const io::Checkpoint &ckpt,
                std::span<const haptic::PreparedTrial> trials,
                const std::string &tap_layer, Combine combine) {
  if (combine == Combine::views)
    throw InvalidSpec("haptic features combine over trials, not views");
  const auto pca = checkpoint_pca(ckpt);
  std::vector<haptic::InstanceMatrix> instances;
  if (combine == Combine::trials) {
    for (const auto &t : trials)
      instances.push_back(haptic::assemble_instance(t, 0, 0, pca));
  } else {
    instances = instances_of(trials, pca, {});
  }
  auto feats = model::extract_activations(ckpt.model, instances, tap_layer);
  if (combine == Combine::trials)
    return model::combine_by_object(feats, model::CombineMode::trials);
  return feats;
}

std::vector<model::FeatureVector>
visual_features(std::span<const visual::VisualFeatureMap> views,
                Combine combine) {
  if (combine == Combine::trials)
    throw InvalidSpec("visual features combine over views, not trials");
  std::vector<model::FeatureVector> per_view;
  for (const auto &v : views) {
    auto f = visual::pool_normalize(v);
    per_view.push_back({v.object_id, -1, -1, -1,
                        static_cast<int>(v.view_index), std::move(f.values)});
  }
  if (combine == Combine::views)
    return model::combine_by_object(per_view, model::CombineMode::views);
  return per_view;
}

std::string encode_features(std::span<const model::FeatureVector> features) {
  io::NamedTensors out;
  for (const auto &f : features) {
    if (f.values.empty())
      throw InvalidInput("feature for '" + f.object_id + "' is empty");
    const std::string name = f.object_id + "/t" + std::to_string(f.trial_index) +
                             "/f" + std::to_string(f.finger) + "/o" +
                             std::to_string(f.offset) + "/v" +
                             std::to_string(f.view_index);
    out.emplace_back(name, nn::Tensor::from(f.values));
  }
  return io::encode_tensors(out);
}

std::vector<model::FeatureVector> decode_features(std::string_view bytes,
                                                  const std::string &where) {
  std::vector<model::FeatureVector> out;
  for (auto &[name, t] : io::decode_tensors(bytes, where)) {
    auto parts = path_parts(name);
    if (parts.size() < 5)
      throw InvalidInput(where + ": bad feature name '" + name + "'");
    const std::size_t k = parts.size();
    model::FeatureVector f;
    for (std::size_t i = 0; i + 4 < k; ++i)
      f.object_id += (i ? "/" : "") + parts[i];
    f.trial_index = parse_tagged(parts[k - 4], 't', where);
    f.finger = parse_tagged(parts[k - 3], 'f', where);
    f.offset = parse_tagged(parts[k - 2], 'o', where);
    f.view_index = parse_tagged(parts[k - 1], 'v', where);
    f.values = t.vector();
    out.push_back(std::move(f));
  }
  return out;
}

Modality parse_modality(std::string_view s) {
  if (s == "haptic")
    return Modality::haptic;
  if (s == "visual")
    return Modality::visual;
  if (s == "fused")
    return Modality::fused;
  throw InvalidSpec("unknown modality '" + std::string(s) + "'");
}

const char *to_string(Modality m) {
  switch (m) {
  case Modality::haptic:
    return "haptic";
  case Modality::visual:
    return "visual";
  case Modality::fused:
    return "fused";
  }
  return "?";
}

namespace {

std::vector<model::FeatureVector>
unit_blocks(std::span<const model::FeatureVector> features) {
  std::vector<model::FeatureVector> out(features.begin(), features.end());
  for (auto &f : out)
    f.values = nn::l2_normalize(nn::Tensor::from(f.values)).value.vector();
  return out;
}

} // namespace

std::vector<model::FeatureVector>
modality_features(Modality modality,
                  std::span<const model::FeatureVector> haptic,
                  std::span<const model::FeatureVector> visual) {
  switch (modality) {
  case Modality::haptic:
    return unit_blocks(haptic);
  case Modality::visual:
    return unit_blocks(visual);
  case Modality::fused:
    return model::fuse_features(unit_blocks(haptic), unit_blocks(visual));
  }
  return {};
}

io::Checkpoint train_feature_classifier(
    std::span<const model::FeatureVector> features, const AdjectiveTask &task,
    const model::TrainSchedule &schedule, nlohmann::json provenance) {
  const std::set<std::string> train_set(task.split.train.begin(),
                                        task.split.train.end());
  std::vector<model::FeatureVector> train_feats;
  for (const auto &f : features)
    if (train_set.count(f.object_id))
      train_feats.push_back(f);
  if (train_feats.empty())
    throw InvalidInput("no features for the training objects of '" +
                       task.adjective + "'");
  auto result = model::train_linear(train_feats, task.labels, schedule);
  nlohmann::json extra = std::move(provenance);
  extra["input"] = "features";
  extra["adjective"] = task.adjective;
  extra["split_seed"] = task.split.seed;
  extra["train_objects"] = task.split.train;
  extra["test_objects"] = task.split.test;
  return io::make_checkpoint(result, schedule.hinge_only(), std::move(extra));
}

std::vector<std::string> trained_objects(const io::Checkpoint &ckpt) {
  return ckpt.meta.extra.at("train_objects").get<std::vector<std::string>>();
}

eval::SplitPlan checkpoint_split(const io::Checkpoint &ckpt) {
  const auto &x = ckpt.meta.extra;
  try {
    return {x.at("adjective").get<std::string>(),
            x.at("split_seed").get<std::uint64_t>(),
            x.at("train_objects").get<std::vector<std::string>>(),
            x.at("test_objects").get<std::vector<std::string>>()};
  } catch (const nlohmann::json::exception &e) {
    throw InvalidInput(std::string("checkpoint lacks split provenance: ") +
                       e.what());
  }
}

std::vector<eval::ScoredItem>
score_instances(const model::Network &net,
                std::span<const haptic::InstanceMatrix> instances) {
  std::vector<eval::ScoredItem> out;
  out.reserve(instances.size());
  for (const auto &inst : instances)
    out.push_back({inst.object_id, net.score(inst.values)});
  return out;
}

std::vector<eval::ScoredItem>
score_features(const model::Network &net,
               std::span<const model::FeatureVector> features,
               const std::set<std::string> &objects) {
  std::vector<eval::ScoredItem> out;
  for (const auto &f : features)
    if (objects.empty() || objects.count(f.object_id))
      out.push_back({f.object_id, model::score_feature(net, f)});
  return out;
}

} // namespace hapnet::pipeline
