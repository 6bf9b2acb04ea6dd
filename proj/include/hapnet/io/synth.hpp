// SPDX-License-Identifier: Apache-2.0
/**
 * @file   synth.hpp
 * @brief  Seeded synthetic datasets with known latent structure.
 *
 * Each object draws a latent factor vector z. A haptic channel slot carries
 * one factor as the phase of a sinusoid, cos(t) b(t) + sin(t) p(t) with
 * t = (pi/3) tanh(h z), where b and p hold an integer number of cycles; after
 * z-scoring such a channel is linear in (cos t, sin t). Visual feature maps
 * carry factors as channel gains. The informativeness matrix sets h (haptic)
 * and v (visual) per factor, so a factor with h = 0 is invisible to touch.
 * Adjective labels threshold z_primary + w z_secondary at zero.
 */
#pragma once

#include <hapnet/eval/labels.hpp>
#include <hapnet/haptic/trial.hpp>
#include <hapnet/visual/features.hpp>

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace hapnet::io {

struct LabelRule {
  std::size_t primary = 0;
  std::size_t secondary = 0;
  double secondary_weight = 0.0;

  bool operator==(const LabelRule &) const = default;
};

struct SynthConfig {
  std::string preset = "default";
  std::size_t objects = 53;
  std::size_t trials = 10;
  std::size_t factors = 8;
  double noise = 0.3; ///< per-sample noise relative to signal amplitude
  double margin = 0.0; ///< factor magnitudes are |N(0,1)| + margin
  std::uint64_t seed = 0;
  /// Per factor: {haptic visibility, visual visibility}.
  std::vector<std::array<double, 2>> informativeness;
  std::array<LabelRule, eval::kAdjectives> rules{};
  std::size_t base_length = 180;   ///< 100 Hz samples per non-squeeze EP
  std::size_t grid_height = 3;
  std::size_t grid_width = 3;
  std::size_t grid_channels = 32;

  void validate() const;
  bool operator==(const SynthConfig &) const = default;
};

/// "default", "separable" or "two-cue"; throws InvalidSpec otherwise.
SynthConfig synth_preset(std::string_view name, std::size_t objects,
                         std::uint64_t seed);

struct ObjectInfo {
  std::string id;
  std::string name;

  bool operator==(const ObjectInfo &) const = default;
};

struct SynthDataset {
  SynthConfig config;
  std::vector<ObjectInfo> objects;
  std::vector<eval::AdjectiveLabelSet> labels; ///< one row per object
  std::vector<std::vector<double>> factors;    ///< one z per object
  std::vector<haptic::HapticTrial> trials;     ///< object-major, trial order
  std::vector<visual::VisualFeatureMap> views; ///< object-major, view order
};

SynthDataset synth_generate(const SynthConfig &config);

/// Haptic slot (EP * 8 + channel) -> factor it carries.
std::size_t slot_factor(const SynthConfig &config, std::size_t slot);

} // namespace hapnet::io
