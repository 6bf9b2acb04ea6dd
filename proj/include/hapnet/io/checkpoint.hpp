// SPDX-License-Identifier: Apache-2.0
/**
 * @file   checkpoint.hpp
 * @brief  Trained-model checkpoints: graph, weights, optimizer state and
 *         training metadata in one versioned file.
 *
 * Layout: "HNCK", u32 version (1), a u32-length JSON header holding the graph
 * description and metadata, u32 parameter count, then per parameter a
 * u32-length name, u32 rank, u32 dims, float32 values and float32
 * velocities. All integers little-endian.
 */
#pragma once

#include <hapnet/haptic/instance.hpp>
#include <hapnet/model/train.hpp>

#include <json.hpp>

#include <filesystem>
#include <string>
#include <string_view>

namespace hapnet::io {

struct CheckpointMeta {
  model::TrainSchedule schedule;
  nn::LossKind final_phase = nn::LossKind::logistic;
  double final_loss = 0.0;
  std::vector<model::LossPoint> curve;
  bool diverged = false;
  std::string diagnostic;
  /// Pipeline context: adjective, split, trained objects, PCA, inputs.
  nlohmann::json extra = nlohmann::json::object();

  bool operator==(const CheckpointMeta &) const = default;
};

struct Checkpoint {
  model::Network model;
  CheckpointMeta meta;
};

Checkpoint make_checkpoint(const model::TrainResult &result,
                           const model::TrainSchedule &schedule,
                           nlohmann::json extra = nlohmann::json::object());

std::string encode_checkpoint(const Checkpoint &ckpt);
/// Throws UnsupportedFormat on bad magic, unknown version or truncation.
Checkpoint decode_checkpoint(std::string_view bytes,
                             const std::string &where = "checkpoint");

void save_checkpoint(const std::filesystem::path &path, const Checkpoint &ckpt);
Checkpoint load_checkpoint(const std::filesystem::path &path);

nlohmann::json pca_to_json(const haptic::PcaSet &pca);
haptic::PcaSet pca_from_json(const nlohmann::json &j);

} // namespace hapnet::io
