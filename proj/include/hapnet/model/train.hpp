// SPDX-License-Identifier: Apache-2.0
/**
 * @file   train.hpp
 * @brief  Two-phase minibatch SGD: logistic pretraining, then hinge
 *         fine-tuning with a freshly initialized classifier layer.
 */
#pragma once

#include <hapnet/model/network.hpp>
#include <hapnet/nn/loss.hpp>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace hapnet::model {

struct TrainSchedule {
  std::size_t epochs = 200;          ///< logistic phase
  std::size_t finetune_epochs = 200; ///< hinge phase
  std::size_t batch_size = 1000;     ///< capped at the dataset size
  double lr = 0.01;
  double momentum = 0.9;
  std::uint64_t seed = 0;
  bool freeze_features = false;  ///< hinge phase updates the classifier only
  bool reinit_classifier = true; ///< hinge phase starts from a fresh classifier

  void validate() const;
  /// `epochs` hinge-loss epochs and no logistic phase.
  TrainSchedule hinge_only() const;

  bool operator==(const TrainSchedule &) const = default;
};

struct LossPoint {
  nn::LossKind phase = nn::LossKind::logistic;
  std::size_t epoch = 0; ///< 1-based within the phase
  double loss = 0.0;     ///< mean instance loss seen during the epoch

  bool operator==(const LossPoint &) const = default;
};

struct TrainResult {
  Network model;
  std::vector<LossPoint> curve;
  nn::LossKind final_phase = nn::LossKind::logistic;
  /// Mean training loss of the returned (float-rounded) model.
  double final_loss = 0.0;
  bool diverged = false;
  std::string diagnostic; ///< set when diverged; model is the last finite state
};

/**
 * Trains @p model in place of a copy. Parameters and velocities are rounded
 * to 32-bit floats on return so the result matches its serialized form;
 * final_loss is measured after rounding.
 */
TrainResult train(Network model, std::span<const nn::Tensor> inputs,
                  std::span<const int> labels, const TrainSchedule &schedule);

/// Mean loss of @p model over a dataset.
double mean_loss(const Network &model, nn::LossKind kind,
                 std::span<const nn::Tensor> inputs,
                 std::span<const int> labels);

} // namespace hapnet::model
