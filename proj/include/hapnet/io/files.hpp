// SPDX-License-Identifier: Apache-2.0
/**
 * @file   files.hpp
 * @brief  Whole-file helpers and the small self-describing formats: haptic
 *         trial text, visual feature binaries, named tensor files and
 *         numeric grids.
 *
 * Haptic trial file (one per object, trial, finger and EP):
 *
 *     #hapnet-trial 1
 *     #block P_AC
 *     <one value per line>
 *     #block P_DC,T_AC,T_DC,E1,...,E19
 *     <comma-separated rows>
 *
 * with a JSON sidecar `<file>.meta.json` holding provenance and sample rates.
 *
 * Visual feature file: "HNVF", u32 version, u32 views, H, W, C, then
 * views*H*W*C little-endian float32 values, row-major (view, y, x, channel).
 *
 * Tensor file: "HNTS", u32 version, u32 count, then per tensor a u32-length
 * name, u32 rank, u32 dims and float32 values.
 */
#pragma once

#include <hapnet/haptic/trial.hpp>
#include <hapnet/nn/tensor.hpp>
#include <hapnet/visual/features.hpp>

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace hapnet::io {

namespace fs = std::filesystem;

std::string read_file(const fs::path &path);
/// Writes via a temporary sibling and rename, creating parent directories.
void write_file(const fs::path &path, std::string_view bytes);

struct TrialFileMeta {
  std::string object_id;
  int trial_index = 0;
  std::size_t finger = 0;
  haptic::Ep ep = haptic::Ep::squeeze;
  double pac_rate_hz = haptic::kPacRateHz;
  double base_rate_hz = haptic::kBaseRateHz;

  bool operator==(const TrialFileMeta &) const = default;
};

std::string format_trial_text(const haptic::EpRecording &recording);
haptic::EpRecording parse_trial_text(std::string_view text,
                                     const std::string &where = "trial");
std::string format_trial_meta(const TrialFileMeta &meta);
TrialFileMeta parse_trial_meta(std::string_view text,
                               const std::string &where = "trial meta");

void write_trial_file(const fs::path &path, const haptic::EpRecording &rec,
                      const TrialFileMeta &meta);
std::pair<haptic::EpRecording, TrialFileMeta>
read_trial_file(const fs::path &path);
fs::path meta_path(const fs::path &trial_path);

/// All views of one object; views must be ordered 0..n-1 with equal grids.
std::string encode_visual_features(
    std::span<const visual::VisualFeatureMap> views);
std::vector<visual::VisualFeatureMap>
decode_visual_features(std::string_view bytes, const std::string &object_id,
                       const std::string &where = "visual features");

using NamedTensors = std::vector<std::pair<std::string, nn::Tensor>>;

std::string encode_tensors(const NamedTensors &tensors);
NamedTensors decode_tensors(std::string_view bytes,
                            const std::string &where = "tensor file");

/// Rows of whitespace-separated values, preceded by a `# rows cols` line.
std::string format_grid(const nn::Tensor &matrix, std::string_view title);

} // namespace hapnet::io
