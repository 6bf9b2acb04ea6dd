// SPDX-License-Identifier: Apache-2.0
/**
 * @file   pipeline.hpp
 * @brief  End-to-end steps shared by the command-line tool and the tests:
 *         preprocessing cache, per-adjective training, feature extraction,
 *         feature classifiers and scoring.
 */
#pragma once

#include <hapnet/eval/labels.hpp>
#include <hapnet/eval/metrics.hpp>
#include <hapnet/eval/split.hpp>
#include <hapnet/haptic/instance.hpp>
#include <hapnet/io/checkpoint.hpp>
#include <hapnet/io/files.hpp>
#include <hapnet/model/fusion.hpp>
#include <hapnet/visual/features.hpp>

#include <set>
#include <span>
#include <string>
#include <vector>

namespace hapnet::pipeline {

std::vector<haptic::PreparedTrial>
prepare_all(std::span<const haptic::HapticTrial> trials);

/// Prepared signals stored as one [23, n] tensor per (trial, finger, EP).
std::string encode_prepared(std::span<const haptic::PreparedTrial> trials);
std::vector<haptic::PreparedTrial> decode_prepared(std::string_view bytes,
                                                   const std::string &where);

/// One adjective's labels and object split.
struct AdjectiveTask {
  std::string adjective;
  eval::SplitPlan split;
  model::ObjectLabels labels; ///< every object, +1 / -1
};

AdjectiveTask make_task(std::span<const eval::AdjectiveLabelSet> table,
                        const std::string &adjective, std::uint64_t split_seed);

/// All augmented instances of the listed objects (every object if empty).
std::vector<haptic::InstanceMatrix>
instances_of(std::span<const haptic::PreparedTrial> trials,
             const haptic::PcaSet &pca, const std::set<std::string> &objects);

enum class HapticModel { cnn, lstm };

/**
 * Fits PCA on the training objects (or on every object when
 * @p pca_on_all_objects), trains on the training objects' augmented
 * instances and records the split and PCA in the checkpoint.
 */
io::Checkpoint train_haptic(std::span<const haptic::PreparedTrial> trials,
                            const AdjectiveTask &task, HapticModel kind,
                            const model::TrainSchedule &schedule,
                            bool pca_on_all_objects = false);

enum class Combine { none, trials, views };
Combine parse_combine(std::string_view s);
const char *to_string(Combine c);

haptic::PcaSet checkpoint_pca(const io::Checkpoint &ckpt);

/**
 * Tap-layer features for every object. `trials` keeps finger 0 at offset 0
 * of each trial and concatenates the 10 trials per object.
 */
std::vector<model::FeatureVector>
haptic_features(const io::Checkpoint &ckpt,
                std::span<const haptic::PreparedTrial> trials,
                const std::string &tap_layer, Combine combine);

/// Pooled, normalized views: one vector per view, or 8 views concatenated.
std::vector<model::FeatureVector>
visual_features(std::span<const visual::VisualFeatureMap> views,
                Combine combine);

std::string encode_features(std::span<const model::FeatureVector> features);
std::vector<model::FeatureVector> decode_features(std::string_view bytes,
                                                  const std::string &where);

enum class Modality { haptic, visual, fused };
Modality parse_modality(std::string_view s);
const char *to_string(Modality m);

/**
 * Inputs of a feature classifier for one modality. Each modality block is
 * scaled to unit L2 norm per object before concatenation (all-zero blocks
 * stay zero), the same head the visual branch applies per view; otherwise
 * raw conv3 activations outweigh the visual block by orders of magnitude.
 */
std::vector<model::FeatureVector>
modality_features(Modality modality,
                  std::span<const model::FeatureVector> haptic,
                  std::span<const model::FeatureVector> visual);

/// Hinge-loss linear classifier on the training objects' features.
io::Checkpoint train_feature_classifier(
    std::span<const model::FeatureVector> features, const AdjectiveTask &task,
    const model::TrainSchedule &schedule, nlohmann::json provenance);

std::vector<std::string> trained_objects(const io::Checkpoint &ckpt);
eval::SplitPlan checkpoint_split(const io::Checkpoint &ckpt);

std::vector<eval::ScoredItem>
score_instances(const model::Network &net,
                std::span<const haptic::InstanceMatrix> instances);
std::vector<eval::ScoredItem>
score_features(const model::Network &net,
               std::span<const model::FeatureVector> features,
               const std::set<std::string> &objects);

} // namespace hapnet::pipeline
