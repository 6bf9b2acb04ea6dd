// SPDX-License-Identifier: Apache-2.0
/**
 * @file   fusion.hpp
 * @brief  Tap-layer feature extraction, trial/view concatenation and the
 *         linear classifiers trained on fixed features.
 */
#pragma once

#include <hapnet/haptic/instance.hpp>
#include <hapnet/model/train.hpp>

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hapnet::model {

/// A feature with its provenance; -1 marks fields that do not apply.
struct FeatureVector {
  std::string object_id;
  int trial_index = -1;
  int finger = -1;
  int offset = -1;
  int view_index = -1;
  std::vector<double> values;

  bool operator==(const FeatureVector &) const = default;
};

std::vector<FeatureVector>
extract_activations(const Network &model,
                    std::span<const haptic::InstanceMatrix> instances,
                    std::string_view tap_layer);

enum class CombineMode { trials, views };

inline constexpr std::size_t kTrialsPerObject = 10;

/**
 * Concatenates one object's per-trial (10) or per-view (8) features ordered
 * by trial or view index. Indices must be exactly 0..count-1.
 */
FeatureVector combine_instances(std::span<const FeatureVector> parts,
                                CombineMode mode);

/// Groups by object and combines each group; objects in first-seen order.
std::vector<FeatureVector> combine_by_object(std::span<const FeatureVector> parts,
                                             CombineMode mode);

/// Appends each haptic vector's object visual vector (one per object).
std::vector<FeatureVector> fuse_features(std::span<const FeatureVector> haptic,
                                         std::span<const FeatureVector> visual);

using ObjectLabels = std::map<std::string, int>;

/// Hinge-loss linear classifier on fixed features labelled per object.
TrainResult train_linear(std::span<const FeatureVector> features,
                         const ObjectLabels &labels,
                         const TrainSchedule &schedule);

struct FusionResult {
  TrainResult training;
  std::size_t haptic_length = 0;
  std::size_t visual_length = 0;
};

FusionResult fuse_and_train(std::span<const FeatureVector> haptic,
                            std::span<const FeatureVector> visual,
                            const ObjectLabels &labels,
                            const TrainSchedule &schedule);

/// Score of a linear (or any single-vector-input) model on one feature.
double score_feature(const Network &model, const FeatureVector &feature);

} // namespace hapnet::model
