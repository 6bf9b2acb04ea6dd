// SPDX-License-Identifier: Apache-2.0
#include <hapnet/errors.hpp>
#include <hapnet/model/fusion.hpp>
#include <hapnet/visual/features.hpp>

#include <algorithm>
#include <cmath>

namespace hapnet::model {

std::vector<FeatureVector>
extract_activations(const Network &model,
                    std::span<const haptic::InstanceMatrix> instances,
                    std::string_view tap_layer) {
  const std::size_t idx = model.graph().layer_index(tap_layer);
  std::vector<FeatureVector> out;
  out.reserve(instances.size());
  for (const auto &inst : instances) {
    auto trace = model.forward(inst.values);
    FeatureVector f;
    f.object_id = inst.object_id;
    f.trial_index = inst.trial_index;
    f.finger = static_cast<int>(inst.finger);
    f.offset = static_cast<int>(inst.offset);
    f.values = trace.outputs[idx].vector();
    out.push_back(std::move(f));
  }
  return out;
}

FeatureVector combine_instances(std::span<const FeatureVector> parts,
                                CombineMode mode) {
  const bool trials = mode == CombineMode::trials;
  const std::size_t count = trials ? kTrialsPerObject : visual::kViews;
  const char *what = trials ? "trial" : "view";
  if (parts.size() != count)
    throw InvalidInput("combine: expected " + std::to_string(count) + " " +
                       what + " features, got " + std::to_string(parts.size()));
  std::vector<const FeatureVector *> slot(count, nullptr);
  for (const auto &p : parts) {
    const int index = trials ? p.trial_index : p.view_index;
    if (index < 0 || static_cast<std::size_t>(index) >= count)
      throw InvalidInput(std::string("combine: ") + what + " index " +
                         std::to_string(index) + " out of range");
    if (slot[index])
      throw InvalidInput(std::string("combine: duplicate ") + what + " " +
                         std::to_string(index));
    if (p.object_id != parts[0].object_id)
      throw InvalidInput("combine: mixed objects '" + parts[0].object_id +
                         "' and '" + p.object_id + "'");
    if (p.values.size() != parts[0].values.size())
      throw InvalidInput("combine: feature lengths differ");
    slot[index] = &p;
  }
  FeatureVector out;
  out.object_id = parts[0].object_id;
  out.values.reserve(count * parts[0].values.size());
  for (const auto *p : slot)
    out.values.insert(out.values.end(), p->values.begin(), p->values.end());
  return out;
}

std::vector<FeatureVector> combine_by_object(std::span<const FeatureVector> parts,
                                             CombineMode mode) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<FeatureVector>> groups;
  for (const auto &p : parts) {
    auto [it, fresh] = groups.try_emplace(p.object_id);
    if (fresh)
      order.push_back(p.object_id);
    it->second.push_back(p);
  }
  std::vector<FeatureVector> out;
  for (const auto &id : order)
    out.push_back(combine_instances(groups.at(id), mode));
  return out;
}

std::vector<FeatureVector> fuse_features(std::span<const FeatureVector> haptic,
                                         std::span<const FeatureVector> visual) {
  std::map<std::string, const FeatureVector *> by_object;
  for (const auto &v : visual) {
    if (!by_object.emplace(v.object_id, &v).second)
      throw InvalidInput("fuse: object '" + v.object_id +
                         "' has more than one visual feature");
    if (v.values.size() != visual[0].values.size())
      throw InvalidInput("fuse: visual feature lengths differ");
  }
  std::vector<FeatureVector> out;
  out.reserve(haptic.size());
  for (const auto &h : haptic) {
    auto it = by_object.find(h.object_id);
    if (it == by_object.end())
      throw InvalidInput("fuse: no visual feature for object '" + h.object_id +
                         "'");
    if (h.values.size() != haptic[0].values.size())
      throw InvalidInput("fuse: haptic feature lengths differ");
    FeatureVector f = h;
    f.values.insert(f.values.end(), it->second->values.begin(),
                    it->second->values.end());
    out.push_back(std::move(f));
  }
  return out;
}

TrainResult train_linear(std::span<const FeatureVector> features,
                         const ObjectLabels &labels,
                         const TrainSchedule &schedule) {
  if (features.empty())
    throw InvalidInput("train_linear: no features");
  const std::size_t d = features[0].values.size();
  std::vector<nn::Tensor> inputs;
  std::vector<int> ys;
  for (const auto &f : features) {
    if (f.values.size() != d)
      throw InvalidInput("train_linear: feature lengths differ");
    auto it = labels.find(f.object_id);
    if (it == labels.end())
      throw InvalidInput("train_linear: no label for object '" + f.object_id +
                         "'");
    inputs.push_back(nn::Tensor({d}, f.values));
    ys.push_back(it->second);
  }
  const TrainSchedule s = schedule.hinge_only();
  return train(Network::initialized(build_linear_classifier(d), s.seed), inputs,
               ys, s);
}

FusionResult fuse_and_train(std::span<const FeatureVector> haptic,
                            std::span<const FeatureVector> visual,
                            const ObjectLabels &labels,
                            const TrainSchedule &schedule) {
  if (haptic.empty() || visual.empty())
    throw InvalidInput("fuse: both modalities need features");
  auto fused = fuse_features(haptic, visual);
  return {train_linear(fused, labels, schedule), haptic[0].values.size(),
          visual[0].values.size()};
}

double score_feature(const Network &model, const FeatureVector &feature) {
  return model.score(nn::Tensor(model.graph().input_shape, feature.values));
}

} // namespace hapnet::model
